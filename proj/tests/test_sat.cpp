#include "rvms/bezier.hpp"
#include "rvms/fourier.hpp"
#include "rvms/rng.hpp"
#include "rvms/synth.hpp"

#include "doctest.h"

#include <algorithm>
#include <cmath>

using namespace rvms;

namespace {

GrayImage random_image(SeededRng& rng, int w, int h) {
    GrayImage img(w, h);
    for (auto& v : img.data) v = static_cast<float>(rng.uniform());
    return img;
}

BezierMap build_map(Point p0, Point p1, Point p2, Point p3, int n = 4096) {
    BezierMap map{p0, p1, p2, p3, {}};
    map.lut.resize(n);
    for (int k = 0; k < n; ++k)
        map.lut[k] = bezier_point(static_cast<double>(k) / (n - 1), p0, p1, p2, p3);
    std::sort(map.lut.begin(), map.lut.end(),
              [](const Point& a, const Point& b) { return a.x < b.x; });
    return map;
}

double max_abs_diff(const GrayImage& a, const GrayImage& b) {
    double worst = 0.0;
    for (size_t i = 0; i < a.data.size(); ++i)
        worst = std::max(worst, std::fabs(static_cast<double>(a.data[i]) - b.data[i]));
    return worst;
}

} // namespace

TEST_CASE("bezier_point: endpoints and midpoint") {
    const Point p0{0, 0}, p3{1, 1};
    const Point q1{0.3, 0.8}, q2{0.7, 0.2};
    const Point at0 = bezier_point(0.0, p0, q1, q2, p3);
    CHECK(at0.x == 0.0);
    CHECK(at0.y == 0.0);
    const Point at1 = bezier_point(1.0, p0, q1, q2, p3);
    CHECK(at1.x == 1.0);
    CHECK(at1.y == 1.0);

    // Control points collapsed onto the endpoints: 0.375+0.125 of (1,1).
    const Point mid = bezier_point(0.5, {0, 0}, {0, 0}, {1, 1}, {1, 1});
    CHECK(mid.x == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(mid.y == doctest::Approx(0.5).epsilon(1e-12));

    CHECK_THROWS_AS(bezier_point(-0.1, p0, q1, q2, p3), std::invalid_argument);
    CHECK_THROWS_AS(bezier_point(1.1, p0, q1, q2, p3), std::invalid_argument);
}

TEST_CASE("sample_map: endpoint conventions and determinism") {
    SeededRng rng(10);
    const BezierMap sim = sample_map(rng, AugmentMode::similar);
    CHECK(sim.p0.x == 0.0);
    CHECK(sim.p0.y == 0.0);
    CHECK(sim.p3.x == 1.0);
    CHECK(sim.p3.y == 1.0);
    CHECK(sim.lut.front().x == 0.0);
    CHECK(sim.lut.back().x == 1.0);

    const BezierMap dis = sample_map(rng, AugmentMode::dissimilar);
    CHECK(dis.p0.y == 1.0);
    CHECK(dis.p3.y == 0.0);

    SeededRng r1(123), r2(123);
    const BezierMap a = sample_map(r1, AugmentMode::similar);
    const BezierMap b = sample_map(r2, AugmentMode::similar);
    for (size_t i = 0; i < a.lut.size(); ++i) {
        CHECK(a.lut[i].x == b.lut[i].x);
        CHECK(a.lut[i].y == b.lut[i].y);
    }

    CHECK_THROWS_AS(sample_map(r1, AugmentMode::similar, 100), std::invalid_argument);
}

TEST_CASE("sample_map: diagonal control points degenerate to the identity") {
    const BezierMap map = build_map({0, 0}, {0.3, 0.3}, {0.8, 0.8}, {1, 1});
    for (const auto& p : map.lut) CHECK(std::fabs(p.y - p.x) <= 1.0 / 4096.0);
}

TEST_CASE("sample_map: forced anti-diagonal is a decreasing involution-like map") {
    const BezierMap map = build_map({0, 1}, {0, 1}, {1, 0}, {1, 0});
    CHECK(map.lut.front().x == 0.0);
    CHECK(map.lut.front().y == 1.0);
    CHECK(map.lut.back().x == 1.0);
    CHECK(map.lut.back().y == 0.0);
    for (size_t i = 1; i < map.lut.size(); ++i) CHECK(map.lut[i].y <= map.lut[i - 1].y);
}

TEST_CASE("sample_map: monotone lut property over 1000 maps") {
    SeededRng rng(2024);
    for (int k = 0; k < 1000; ++k) {
        const AugmentMode mode = k % 2 ? AugmentMode::similar : AugmentMode::dissimilar;
        const BezierMap map = sample_map(rng, mode, 256);
        for (size_t i = 1; i < map.lut.size(); ++i) {
            CHECK(map.lut[i].x >= map.lut[i - 1].x);
            if (mode == AugmentMode::similar)
                CHECK(map.lut[i].y >= map.lut[i - 1].y - 1e-12);
            else
                CHECK(map.lut[i].y <= map.lut[i - 1].y + 1e-12);
        }
    }
}

TEST_CASE("apply_intensity_map: identity, inversion endpoints, constants, rank order") {
    SeededRng rng(33);
    const GrayImage img = random_image(rng, 16, 16);

    const BezierMap ident = build_map({0, 0}, {0.4, 0.4}, {0.6, 0.6}, {1, 1});
    const GrayImage same = apply_intensity_map(img, ident);
    CHECK(max_abs_diff(img, same) <= 1.0 / 4096.0);

    GrayImage extremes(4, 4, 0.0f);
    extremes.data[5] = 1.0f;
    const BezierMap inv = build_map({0, 1}, {0.5, 0.5}, {0.5, 0.5}, {1, 0});
    const GrayImage flipped = apply_intensity_map(extremes, inv);
    CHECK(flipped.data[0] == 1.0f); // 0 -> 1 exactly
    CHECK(flipped.data[5] == 0.0f); // 1 -> 0 exactly

    GrayImage constant(8, 8, 0.37f);
    const BezierMap m = sample_map(rng, AugmentMode::similar);
    const GrayImage mapped = apply_intensity_map(constant, m);
    for (float v : mapped.data) CHECK(v == mapped.data[0]);

    // Similar-mode maps preserve pixel rank order.
    const BezierMap sim = sample_map(rng, AugmentMode::similar);
    const GrayImage ranked = apply_intensity_map(img, sim);
    for (size_t i = 0; i < img.data.size(); ++i)
        for (size_t j = 0; j < img.data.size(); j += 7)
            if (img.data[i] < img.data[j]) CHECK(ranked.data[i] <= ranked.data[j]);
}

TEST_CASE("fft2: constant image concentrates on the DC bin") {
    for (const auto [w, h] : {std::pair{8, 8}, std::pair{7, 5}, std::pair{16, 9}}) {
        GrayImage img(w, h, 0.4f);
        const SpectralImage spec = fft2(img);
        const int cy = h / 2, cx = w / 2;
        const double dc = spec.amplitude[static_cast<size_t>(cy) * w + cx];
        CHECK(dc == doctest::Approx(0.4 * w * h).epsilon(1e-6));
        for (int r = 0; r < h; ++r)
            for (int c = 0; c < w; ++c)
                if (r != cy || c != cx)
                    CHECK(spec.amplitude[static_cast<size_t>(r) * w + c] < 1e-9 * w * h);
    }
}

TEST_CASE("fft2/ifft2: inverse property on random images") {
    SeededRng rng(8);
    for (const auto [w, h] : {std::pair{8, 8}, std::pair{7, 5}, std::pair{31, 17}}) {
        const GrayImage img = random_image(rng, w, h);
        const GrayImage back = ifft2(fft2(img));
        CHECK(max_abs_diff(img, back) < 1e-4);
    }
}

TEST_CASE("fft2: amplitude is point-symmetric about DC for real input") {
    SeededRng rng(9);
    const int w = 8, h = 6;
    const GrayImage img = random_image(rng, w, h);
    const SpectralImage spec = fft2(img);
    const int cy = h / 2, cx = w / 2;
    for (int dy = -2; dy <= 2; ++dy) {
        for (int dx = -3; dx <= 3; ++dx) {
            const int r1 = cy + dy, c1 = cx + dx, r2 = cy - dy, c2 = cx - dx;
            if (r1 < 0 || r1 >= h || c1 < 0 || c1 >= w) continue;
            if (r2 < 0 || r2 >= h || c2 < 0 || c2 >= w) continue;
            CHECK(spec.amplitude[static_cast<size_t>(r1) * w + c1] ==
                  doctest::Approx(spec.amplitude[static_cast<size_t>(r2) * w + c2])
                      .epsilon(1e-9));
        }
    }
}

TEST_CASE("ifft2: zero amplitude and clamping") {
    SpectralImage zero;
    zero.width = 8;
    zero.height = 8;
    zero.amplitude.assign(64, 0.0);
    zero.phase.assign(64, 0.0);
    const GrayImage img = ifft2(zero);
    for (float v : img.data) CHECK(v == 0.0f);

    SeededRng rng(12);
    GrayImage src(8, 8);
    for (auto& v : src.data) v = static_cast<float>(0.5 + 0.4 * rng.uniform());
    SpectralImage spec = fft2(src);
    for (auto& a : spec.amplitude) a *= 2.0;
    const GrayImage doubled = ifft2(spec);
    float top = 0.0f;
    for (float v : doubled.data) {
        CHECK(v <= 1.0f);
        top = std::max(top, v);
    }
    CHECK(top == 1.0f); // doubling a bright image must hit the clamp
}

TEST_CASE("freq mask: geometry, DC coverage and full-coverage alpha") {
    const FreqMask full = make_freq_mask(8, 8, 0.5);
    for (auto v : full.data) CHECK(v == 1);

    const FreqMask tiny = make_freq_mask(9, 7, 0.01);
    CHECK(tiny.data[static_cast<size_t>(7 / 2) * 9 + 9 / 2] == 1);

    const FreqMask m = make_freq_mask(10, 8, 0.2);
    // side lengths round(2*0.2*8)=3, round(2*0.2*10)=4
    size_t count = 0;
    for (auto v : m.data) count += v;
    CHECK(count == 3 * 4);
    CHECK(m.data[static_cast<size_t>(8 / 2) * 10 + 10 / 2] == 1);

    CHECK_THROWS_AS(make_freq_mask(8, 8, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(make_freq_mask(8, 8, 0.6), std::invalid_argument);
}

TEST_CASE("mix_amplitude: algebraic cases") {
    SeededRng rng(21);
    const int w = 8, h = 8;
    const FreqMask mask = make_freq_mask(w, h, 0.25);
    std::vector<double> a_src(w * h), a_tgt(w * h);
    for (auto& v : a_src) v = rng.uniform(0.0, 10.0);
    for (auto& v : a_tgt) v = rng.uniform(0.0, 10.0);

    const auto at0 = mix_amplitude(a_src, a_tgt, mask, 0.0);
    CHECK(at0 == a_src);

    const FreqMask full = make_freq_mask(w, h, 0.5);
    const auto at1 = mix_amplitude(a_src, a_tgt, full, 1.0);
    CHECK(at1 == a_tgt);

    std::vector<double> fours(w * h, 4.0), twos(w * h, 2.0);
    const auto mean = mix_amplitude(fours, twos, mask, 0.5);
    for (size_t i = 0; i < mean.size(); ++i)
        CHECK(mean[i] == (mask.data[i] ? 3.0 : 4.0));

    // Energy interpolation: inside the mask the mix lies between the inputs.
    for (double lambda : {0.1, 0.5, 0.9}) {
        const auto mixed = mix_amplitude(a_src, a_tgt, mask, lambda);
        for (size_t i = 0; i < mixed.size(); ++i) {
            if (!mask.data[i]) continue;
            CHECK(mixed[i] >= std::min(a_src[i], a_tgt[i]) - 1e-12);
            CHECK(mixed[i] <= std::max(a_src[i], a_tgt[i]) + 1e-12);
        }
    }

    std::vector<double> wrong(10, 1.0);
    CHECK_THROWS_AS(mix_amplitude(wrong, a_tgt, mask, 0.5), std::invalid_argument);
}

TEST_CASE("style_transfer: lambda=0 is the identity") {
    SeededRng rng(31);
    for (int k = 0; k < 10; ++k) {
        auto [src, m1] = synth_vessels(rng, 64, 64, Polarity::bright, 0.05);
        auto [tgt, m2] = synth_vessels(rng, 64, 64, Polarity::dark, 0.05);
        const GrayImage out = style_transfer(src, tgt, 0.2, 0.0);
        CHECK(max_abs_diff(src, out) < 1e-4);
    }
}

TEST_CASE("style_transfer: identical target is a fixed point for any lambda") {
    SeededRng rng(32);
    auto [src, mask] = synth_vessels(rng, 64, 64, Polarity::bright, 0.05);
    for (double lambda : {0.25, 0.5, 1.0}) {
        const GrayImage out = style_transfer(src, src, 0.2, lambda);
        CHECK(max_abs_diff(src, out) < 1e-4);
    }
}

TEST_CASE("style_transfer: lambda=1 with full mask adopts the target amplitude") {
    // Affine pair keeps the recombined image inside [0,1], so no clamping
    // perturbs the recomputed spectrum.
    SeededRng rng(33);
    GrayImage src(8, 8);
    for (auto& v : src.data) v = static_cast<float>(rng.uniform());
    GrayImage tgt(8, 8);
    for (size_t i = 0; i < tgt.data.size(); ++i) tgt.data[i] = 0.25f + 0.5f * src.data[i];

    const GrayImage out = style_transfer(src, tgt, 0.5, 1.0);
    const SpectralImage out_spec = fft2(out);
    const SpectralImage tgt_spec = fft2(tgt);
    for (size_t i = 0; i < out_spec.amplitude.size(); ++i)
        CHECK(std::fabs(out_spec.amplitude[i] - tgt_spec.amplitude[i]) < 1e-4);
}

TEST_CASE("style_transfer: output phase matches source phase (amplitude-only edit)") {
    SeededRng rng(34);
    // Compressed contrast keeps the blend inside [0,1] so the clamp is inert.
    GrayImage src(16, 16), tgt(16, 16);
    for (auto& v : src.data) v = static_cast<float>(0.35 + 0.3 * rng.uniform());
    for (auto& v : tgt.data) v = static_cast<float>(0.35 + 0.3 * rng.uniform());

    const SpectralImage src_spec = fft2(src);
    for (double lambda : {0.3, 0.7, 1.0}) {
        const GrayImage out = style_transfer(src, tgt, 0.2, lambda);
        const SpectralImage out_spec = fft2(out);
        for (size_t i = 0; i < out_spec.phase.size(); ++i) {
            if (out_spec.amplitude[i] <= 1e-6 || src_spec.amplitude[i] <= 1e-6) continue;
            double diff = std::fabs(out_spec.phase[i] - src_spec.phase[i]);
            diff = std::min(diff, 2.0 * 3.14159265358979323846 - diff);
            CHECK(diff < 1e-3);
        }
    }
}

TEST_CASE("style_transfer: mismatched target sizes are resampled") {
    SeededRng rng(35);
    auto [src, m1] = synth_vessels(rng, 64, 64, Polarity::bright, 0.0);
    auto [tgt, m2] = synth_vessels(rng, 48, 32, Polarity::dark, 0.0);
    const GrayImage out = style_transfer(src, tgt, 0.2, 0.5);
    CHECK(out.width == 64);
    CHECK(out.height == 64);
}

TEST_CASE("resize_bilinear: identity at equal size, bounds preserved") {
    SeededRng rng(36);
    GrayImage img(12, 9);
    for (auto& v : img.data) v = static_cast<float>(rng.uniform());
    const GrayImage same = resize_bilinear(img, 12, 9);
    CHECK(max_abs_diff(img, same) < 1e-6);
    const GrayImage up = resize_bilinear(img, 25, 19);
    for (float v : up.data) {
        CHECK(v >= 0.0f);
        CHECK(v <= 1.0f);
    }
}
