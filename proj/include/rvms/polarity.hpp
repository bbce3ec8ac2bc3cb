#ifndef RVMS_POLARITY_HPP
#define RVMS_POLARITY_HPP

#include "rvms/image.hpp"

#include <string>
#include <utility>
#include <vector>

namespace rvms {

/// Signed vessel-background polarity statistic of one image.
struct PolarityScore {
    double value = 0.0;
    int n_pixels_used = 0;
};

/// Per-domain routing decision with its median score.
struct DomainLabel {
    enum class Kind { similar, dissimilar };
    Kind label = Kind::dissimilar;
    double median_score = 0.0;
};

/// Windowed mean with boundary-cropped windows (window side 2*radius + 1).
GrayImage box_blur(const GrayImage& img, int radius);

/**
 * @brief Score thin-structure polarity against the local background.
 *
 * r = img - boxblur(img, blur_radius); the score is the mean of r over the
 * top_frac fraction of pixels ranked by |r| (ties broken by pixel index).
 * Positive means thin structures are brighter than their surroundings.
 * Requires each dimension >= 3 * blur_radius; throws on a constant image
 * (all residuals zero).
 */
PolarityScore polarity_score(const GrayImage& img, int blur_radius = 7, double top_frac = 0.05);

/**
 * @brief Label each target domain Similar or Dissimilar to the source.
 *
 * The source polarity is the sign of the median score over source images;
 * a target is Similar iff the sign of its median score matches. A zero
 * median is resolved as Dissimilar.
 */
std::vector<std::pair<std::string, DomainLabel>> classify_domains(
    const std::vector<GrayImage>& source,
    const std::vector<std::pair<std::string, std::vector<GrayImage>>>& targets);

} // namespace rvms

#endif
