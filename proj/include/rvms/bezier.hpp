#ifndef RVMS_BEZIER_HPP
#define RVMS_BEZIER_HPP

#include "rvms/image.hpp"
#include "rvms/rng.hpp"

#include <vector>

namespace rvms {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

enum class AugmentMode { similar, dissimilar };

/**
 * @brief Monotone intensity remapping curve.
 *
 * A cubic Bezier through p0..p3 rendered into a lookup table of (x, y)
 * pairs sorted by x ascending; x spans [0, 1]. Similar-mode maps run
 * (0,0) -> (1,1) and are non-decreasing; dissimilar-mode maps run
 * (0,1) -> (1,0) and are non-increasing.
 */
struct BezierMap {
    Point p0, p1, p2, p3;
    std::vector<Point> lut;
};

/**
 * @brief Evaluate the cubic Bezier at parameter t in [0, 1].
 *
 * B(t) = (1-t)^3 p0 + 3(1-t)^2 t p1 + 3(1-t) t^2 p2 + t^3 p3.
 * Throws if t is outside [0, 1].
 */
Point bezier_point(double t, Point p0, Point p1, Point p2, Point p3);

/**
 * @brief Draw a random intensity map.
 *
 * Endpoints depend on the mode; the two control points have coordinates
 * uniform in the open interval (0, 1). The curve is sampled at n_samples
 * uniform parameter values and the pairs are sorted by x, making the map
 * single-valued. Requires n_samples >= 256.
 */
BezierMap sample_map(SeededRng& rng, AugmentMode mode, int n_samples = 4096);

/**
 * @brief Remap every pixel through the curve's lookup table.
 *
 * Piecewise-linear interpolation of the lut at x = v, clamped to [0, 1].
 * Inputs below/above the table range take the boundary y value.
 */
GrayImage apply_intensity_map(const GrayImage& img, const BezierMap& map);

} // namespace rvms

#endif
