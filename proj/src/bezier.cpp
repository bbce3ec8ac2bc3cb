#include "rvms/bezier.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rvms {

Point bezier_point(double t, Point p0, Point p1, Point p2, Point p3) {
    if (!(t >= 0.0 && t <= 1.0))
        throw std::invalid_argument("bezier_point: t outside [0,1]");
    const double u = 1.0 - t;
    const double b0 = u * u * u;
    const double b1 = 3.0 * u * u * t;
    const double b2 = 3.0 * u * t * t;
    const double b3 = t * t * t;
    return {b0 * p0.x + b1 * p1.x + b2 * p2.x + b3 * p3.x,
            b0 * p0.y + b1 * p1.y + b2 * p2.y + b3 * p3.y};
}

BezierMap sample_map(SeededRng& rng, AugmentMode mode, int n_samples) {
    if (n_samples < 256)
        throw std::invalid_argument("sample_map: n_samples must be >= 256");

    BezierMap map;
    if (mode == AugmentMode::similar) {
        map.p0 = {0.0, 0.0};
        map.p3 = {1.0, 1.0};
    } else {
        map.p0 = {0.0, 1.0};
        map.p3 = {1.0, 0.0};
    }
    map.p1 = {rng.uniform_open(), rng.uniform_open()};
    map.p2 = {rng.uniform_open(), rng.uniform_open()};

    map.lut.resize(n_samples);
    for (int k = 0; k < n_samples; ++k) {
        const double t = static_cast<double>(k) / (n_samples - 1);
        map.lut[k] = bezier_point(t, map.p0, map.p1, map.p2, map.p3);
    }
    std::sort(map.lut.begin(), map.lut.end(),
              [](const Point& a, const Point& b) { return a.x < b.x; });
    return map;
}

GrayImage apply_intensity_map(const GrayImage& img, const BezierMap& map) {
    validate(img);
    if (map.lut.size() < 2)
        throw std::invalid_argument("apply_intensity_map: lut too small");

    const auto& lut = map.lut;
    GrayImage out(img.width, img.height);
    for (size_t i = 0; i < img.data.size(); ++i) {
        const double v = img.data[i];
        double y;
        if (v <= lut.front().x) {
            y = lut.front().y;
        } else if (v >= lut.back().x) {
            y = lut.back().y;
        } else {
            const auto it = std::lower_bound(
                lut.begin(), lut.end(), v,
                [](const Point& p, double value) { return p.x < value; });
            const Point hi = *it;
            const Point lo = *(it - 1);
            const double dx = hi.x - lo.x;
            y = dx > 0.0 ? lo.y + (v - lo.x) * (hi.y - lo.y) / dx : lo.y;
        }
        out.data[i] = static_cast<float>(std::clamp(y, 0.0, 1.0));
    }
    return out;
}

} // namespace rvms
