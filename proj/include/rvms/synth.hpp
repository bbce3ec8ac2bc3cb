#ifndef RVMS_SYNTH_HPP
#define RVMS_SYNTH_HPP

#include "rvms/image.hpp"
#include "rvms/rng.hpp"

#include <utility>

namespace rvms {

enum class Polarity { bright, dark };

/**
 * @brief Parameters of the synthetic vascular-tree generator.
 *
 * Defaults are the documented benchmark constants; override to synthesize
 * domains with different stroke statistics. Strokes render at intensity
 * >= 0.75 on a background <= 0.35 (bright polarity, before noise).
 */
struct SynthParams {
    int min_roots = 3;               ///< root branches per image, lower bound
    int max_roots = 6;               ///< root branches per image, upper bound
    double root_width_min = 2.0;     ///< stroke width at a root, px
    double root_width_max = 4.0;
    double min_width = 1.0;          ///< taper floor, px
    double taper_factor = 0.45;      ///< end width as a fraction of start width
    double step_length = 2.0;        ///< walk step, px
    double dir_jitter_sd = 0.22;     ///< per-step heading jitter, radians
    double split_prob = 0.10;        ///< per-step branching probability
    int max_depth = 3;               ///< recursion depth of splits
    double child_width_factor = 0.72;
    double split_angle_min = 0.35;   ///< radians
    double split_angle_max = 0.90;
    double length_frac_min = 0.50;   ///< root length as a fraction of min(W,H)
    double length_frac_max = 0.85;
};

/**
 * @brief Draw a random branching vessel tree with its segmentation mask.
 *
 * Anti-aliased capsule strokes on a smooth background gradient; the mask is
 * the stroke support (coverage >= 0.5). Dark polarity is the exact pixelwise
 * intensity complement of the bright rendering for the same seed. Additive
 * Gaussian noise of sd noise_sd is applied last and clamped to [0, 1].
 * Deterministic given the generator state.
 *
 * Requires width, height >= 32 and 0 <= noise_sd <= 0.2.
 */
std::pair<GrayImage, BinaryMask> synth_vessels(SeededRng& rng, int width, int height,
                                               Polarity polarity, double noise_sd,
                                               const SynthParams& params = {});

} // namespace rvms

#endif
