#include "rvms/synth.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace rvms {

namespace {

struct Segment {
    double x0, y0, x1, y1;
    double width;
};

struct Vec2 {
    double x, y;
};

Vec2 rotate(Vec2 v, double angle) {
    const double c = std::cos(angle), s = std::sin(angle);
    return {c * v.x - s * v.y, s * v.x + c * v.y};
}

double dist_to_segment(double px, double py, const Segment& s) {
    const double dx = s.x1 - s.x0, dy = s.y1 - s.y0;
    const double len2 = dx * dx + dy * dy;
    double t = 0.0;
    if (len2 > 0.0) t = std::clamp(((px - s.x0) * dx + (py - s.y0) * dy) / len2, 0.0, 1.0);
    const double cx = s.x0 + t * dx, cy = s.y0 + t * dy;
    return std::hypot(px - cx, py - cy);
}

void grow_branch(SeededRng& rng, const SynthParams& p, std::vector<Segment>& segments,
                 Vec2 pos, Vec2 dir, double start_width, double length, int depth) {
    const int steps = std::max(3, static_cast<int>(std::lround(length / p.step_length)));
    const double end_width = std::max(p.min_width, start_width * p.taper_factor);
    for (int s = 0; s < steps; ++s) {
        const double frac = static_cast<double>(s) / steps;
        const double w = start_width + (end_width - start_width) * frac;
        const Vec2 nxt{pos.x + dir.x * p.step_length, pos.y + dir.y * p.step_length};
        segments.push_back({pos.x, pos.y, nxt.x, nxt.y, w});
        pos = nxt;
        dir = rotate(dir, rng.normal(0.0, p.dir_jitter_sd));
        if (depth < p.max_depth && s > steps / 3 && rng.uniform() < p.split_prob) {
            const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
            const double angle = sign * rng.uniform(p.split_angle_min, p.split_angle_max);
            const double child_w = std::max(p.min_width, w * p.child_width_factor);
            const double child_len = (steps - s) * p.step_length * rng.uniform(0.55, 0.9);
            grow_branch(rng, p, segments, pos, rotate(dir, angle), child_w, child_len, depth + 1);
        }
    }
}

std::vector<Segment> grow_tree(SeededRng& rng, const SynthParams& p, int width, int height) {
    std::vector<Segment> segments;
    const int n_roots = rng.uniform_int(p.min_roots, p.max_roots);
    const double base_len = std::min(width, height);
    for (int r = 0; r < n_roots; ++r) {
        const int edge = rng.uniform_int(0, 3); // 0 top, 1 right, 2 bottom, 3 left
        const double along = rng.uniform(0.15, 0.85);
        Vec2 pos, dir;
        switch (edge) {
            case 0: pos = {along * width, 0.0}; dir = {0.0, 1.0}; break;
            case 1: pos = {width - 1.0, along * height}; dir = {-1.0, 0.0}; break;
            case 2: pos = {along * width, height - 1.0}; dir = {0.0, -1.0}; break;
            default: pos = {0.0, along * height}; dir = {1.0, 0.0}; break;
        }
        dir = rotate(dir, rng.uniform(-0.5, 0.5));
        const double w0 = rng.uniform(p.root_width_min, p.root_width_max);
        const double len = base_len * rng.uniform(p.length_frac_min, p.length_frac_max);
        grow_branch(rng, p, segments, pos, dir, w0, len, 0);
    }
    return segments;
}

// Max capsule coverage over all segments; 1 inside, linear 1 px falloff at the rim.
std::vector<float> rasterize_coverage(const std::vector<Segment>& segments, int width,
                                      int height) {
    std::vector<float> coverage(static_cast<size_t>(width) * height, 0.0f);
    for (const auto& seg : segments) {
        const double r = seg.width * 0.5 + 0.5;
        const int x_lo = std::max(0, static_cast<int>(std::floor(std::min(seg.x0, seg.x1) - r)));
        const int x_hi = std::min(width - 1, static_cast<int>(std::ceil(std::max(seg.x0, seg.x1) + r)));
        const int y_lo = std::max(0, static_cast<int>(std::floor(std::min(seg.y0, seg.y1) - r)));
        const int y_hi = std::min(height - 1, static_cast<int>(std::ceil(std::max(seg.y0, seg.y1) + r)));
        for (int y = y_lo; y <= y_hi; ++y) {
            for (int x = x_lo; x <= x_hi; ++x) {
                const double d = dist_to_segment(x, y, seg);
                const double c = std::clamp(seg.width * 0.5 + 0.5 - d, 0.0, 1.0);
                float& cell = coverage[static_cast<size_t>(y) * width + x];
                cell = std::max(cell, static_cast<float>(c));
            }
        }
    }
    return coverage;
}

} // namespace

std::pair<GrayImage, BinaryMask> synth_vessels(SeededRng& rng, int width, int height,
                                               Polarity polarity, double noise_sd,
                                               const SynthParams& params) {
    if (width < 32 || height < 32)
        throw std::invalid_argument("synth_vessels requires dimensions >= 32");
    if (!(noise_sd >= 0.0 && noise_sd <= 0.2))
        throw std::invalid_argument("synth_vessels requires noise_sd in [0, 0.2]");

    const auto segments = grow_tree(rng, params, width, height);
    const auto coverage = rasterize_coverage(segments, width, height);

    // Smooth undulating background. Tones keep the polarity contract
    // (strokes >= 0.75, background <= 0.35) while holding the image mean
    // near the midpoint so amplitude-style edits rarely clip; the waves give
    // the background real local gradients instead of a flat ramp.
    const double g0 = rng.uniform(0.0, 1.0);
    const double gx = rng.uniform(-1.0, 1.0);
    const double gy = rng.uniform(-1.0, 1.0);
    double wave_kx[2], wave_ky[2], wave_phase[2];
    for (int k = 0; k < 2; ++k) {
        const double wavelength = rng.uniform(8.0, 20.0);
        const double angle = rng.uniform(0.0, 2.0 * 3.14159265358979323846);
        wave_kx[k] = 2.0 * 3.14159265358979323846 / wavelength * std::cos(angle);
        wave_ky[k] = 2.0 * 3.14159265358979323846 / wavelength * std::sin(angle);
        wave_phase[k] = rng.uniform(0.0, 2.0 * 3.14159265358979323846);
    }

    GrayImage img(width, height);
    BinaryMask mask(width, height);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const size_t i = static_cast<size_t>(y) * width + x;
            double shade = 0.5 + 0.25 * (g0 - 0.5 + gx * (static_cast<double>(x) / width - 0.5) +
                                         gy * (static_cast<double>(y) / height - 0.5));
            for (int k = 0; k < 2; ++k)
                shade += 0.22 * std::sin(wave_kx[k] * x + wave_ky[k] * y + wave_phase[k]);
            shade = std::clamp(shade, 0.0, 1.0);
            const double bg = 0.24 + 0.10 * shade;
            const double c = coverage[i];
            double v;
            if (c >= 0.5) {
                v = 0.76 + 0.07 * (c - 0.5) * 2.0; // stroke: [0.76, 0.83]
                mask.data[i] = 1;
            } else {
                v = bg + (0.35 - bg) * c * 2.0; // rim blends toward 0.35
            }
            img.data[i] = static_cast<float>(v);
        }
    }

    if (polarity == Polarity::dark)
        for (auto& v : img.data) v = 1.0f - v;

    if (noise_sd > 0.0)
        for (auto& v : img.data)
            v = std::clamp(static_cast<float>(v + rng.normal(0.0, noise_sd)), 0.0f, 1.0f);

    return {std::move(img), std::move(mask)};
}

} // namespace rvms
