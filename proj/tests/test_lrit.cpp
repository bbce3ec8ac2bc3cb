#include "rvms/bezier.hpp"
#include "rvms/lrit.hpp"
#include "rvms/rng.hpp"

#include "doctest.h"

#include <algorithm>
#include <set>

using namespace rvms;

namespace {

// Independent per-pixel reference: explicit clamped fetches, no offset
// tables or interior fast path.
std::uint16_t reference_pixel(const GrayImage& img, int y, int x, StartDir start) {
    auto fetch = [&](int yy, int xx) {
        yy = yy < 0 ? 0 : (yy >= img.height ? img.height - 1 : yy);
        xx = xx < 0 ? 0 : (xx >= img.width ? img.width - 1 : xx);
        return img.at(yy, xx);
    };
    // Clockwise ring beginning at "up".
    const int ring[8][2] = {{-1, 0}, {-1, 1}, {0, 1},  {1, 1},
                            {1, 0},  {1, -1}, {0, -1}, {-1, -1}};
    int first;
    switch (start) {
        case StartDir::up: first = 0; break;
        case StartDir::right: first = 2; break;
        case StartDir::down: first = 4; break;
        default: first = 6; break;
    }
    unsigned value = 0;
    for (int i = 1; i <= 8; ++i) {
        const int* d = ring[(first + i - 1) % 8];
        if (fetch(y, x) > fetch(y + d[0], x + d[1])) value += 1u << i;
    }
    return static_cast<std::uint16_t>(value);
}

GrayImage random_image(SeededRng& rng, int w, int h) {
    GrayImage img(w, h);
    for (auto& v : img.data) v = static_cast<float>(rng.uniform());
    return img;
}

GrayImage rot90cw(const GrayImage& img) {
    GrayImage out(img.height, img.width);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) out.at(x, img.height - 1 - y) = img.at(y, x);
    return out;
}

LritChannel rot90cw(const LritChannel& ch) {
    LritChannel out;
    out.width = ch.height;
    out.height = ch.width;
    out.data.resize(ch.data.size());
    for (int y = 0; y < ch.height; ++y)
        for (int x = 0; x < ch.width; ++x)
            out.data[static_cast<size_t>(x) * out.width + (ch.height - 1 - y)] =
                ch.data[static_cast<size_t>(y) * ch.width + x];
    return out;
}

} // namespace

TEST_CASE("lrit: constant image encodes to zero") {
    GrayImage img(8, 8, 0.5f);
    for (const StartDir d : {StartDir::up, StartDir::right, StartDir::down, StartDir::left}) {
        const LritChannel ch = lrit_channel(img, d);
        for (auto v : ch.data) CHECK(v == 0);
    }
}

TEST_CASE("lrit: strict interior local maximum encodes to 510") {
    GrayImage img(5, 5, 0.4f);
    img.at(2, 2) = 0.5f;
    const LritChannel ch = lrit_channel(img, StartDir::up);
    CHECK(ch.data[2 * 5 + 2] == 510);
}

TEST_CASE("lrit: 3x3 with bright center matches the per-pixel reference") {
    GrayImage img(3, 3, 0.4f);
    img.at(1, 1) = 0.5f;
    const LritChannel ch = lrit_channel(img, StartDir::up);
    CHECK(ch.data[1 * 3 + 1] == 510);
    for (int y = 0; y < 3; ++y)
        for (int x = 0; x < 3; ++x)
            CHECK(ch.data[y * 3 + x] == reference_pixel(img, y, x, StartDir::up));
}

TEST_CASE("lrit: bit-exact against the reference on 200 random 16x16 images") {
    SeededRng rng(500);
    for (int k = 0; k < 200; ++k) {
        const GrayImage img = random_image(rng, 16, 16);
        const StartDir d = static_cast<StartDir>(k % 4);
        const LritChannel ch = lrit_channel(img, d);
        for (int y = 0; y < 16; ++y)
            for (int x = 0; x < 16; ++x)
                REQUIRE(ch.data[y * 16 + x] == reference_pixel(img, y, x, d));
    }
}

TEST_CASE("lrit: start directions relate by rotating the bit weights") {
    SeededRng rng(501);
    const GrayImage img = random_image(rng, 12, 10);
    const LritChannel up = lrit_channel(img, StartDir::up);
    const LritChannel right = lrit_channel(img, StartDir::right);
    for (size_t i = 0; i < up.data.size(); ++i) {
        // Neighbor bits as an 8-bit ring; starting at "right" rotates by two.
        const unsigned bits = up.data[i] >> 1;
        const unsigned rotated = ((bits >> 2) | (bits << 6)) & 0xFFu;
        CHECK(right.data[i] == static_cast<std::uint16_t>(rotated << 1));
    }
}

TEST_CASE("lrit: rotation equivariance up to start-direction relabeling") {
    SeededRng rng(502);
    for (int k = 0; k < 20; ++k) {
        const GrayImage img = random_image(rng, 5, 5);
        const LritChannel up = lrit_channel(img, StartDir::up);
        const LritChannel rotated = lrit_channel(rot90cw(img), StartDir::right);
        CHECK(rotated.data == rot90cw(up).data);
    }
}

TEST_CASE("lrit: range and parity") {
    SeededRng rng(503);
    const GrayImage img = random_image(rng, 16, 16);
    for (const StartDir d : {StartDir::up, StartDir::right, StartDir::down, StartDir::left}) {
        const LritChannel ch = lrit_channel(img, d);
        for (auto v : ch.data) {
            CHECK(v <= 510);
            CHECK(v % 2 == 0);
        }
    }
}

TEST_CASE("lrit: exactly invariant under strictly increasing transforms") {
    SeededRng rng(504);
    const GrayImage img = random_image(rng, 16, 16);

    GrayImage halved = img;
    for (auto& v : halved.data) v *= 0.5f; // exact exponent shift
    CHECK(lrit_channel(img, StartDir::up).data == lrit_channel(halved, StartDir::up).data);

    // A similar-mode curve; confirm it kept the image's value order strict,
    // then invariance must hold.
    const BezierMap map = sample_map(rng, AugmentMode::similar);
    const GrayImage mapped = apply_intensity_map(img, map);
    bool strict = true;
    for (size_t i = 0; i < img.data.size() && strict; ++i)
        for (size_t j = 0; j < img.data.size(); ++j)
            if (img.data[i] < img.data[j] && !(mapped.data[i] < mapped.data[j])) {
                strict = false;
                break;
            }
    REQUIRE(strict);
    CHECK(lrit_channel(img, StartDir::left).data == lrit_channel(mapped, StartDir::left).data);
}

TEST_CASE("lrit: strictly decreasing transform complements interior values") {
    // All-distinct values: a shuffled 16x16 grid of the 256 gray levels.
    SeededRng rng(505);
    std::vector<int> levels(256);
    for (int i = 0; i < 256; ++i) levels[i] = i;
    for (int i = 255; i > 0; --i) std::swap(levels[i], levels[rng.uniform_int(0, i)]);

    GrayImage img(16, 16);
    for (size_t i = 0; i < img.data.size(); ++i)
        img.data[i] = static_cast<float>(levels[i]) / 255.0f;
    GrayImage complement(16, 16);
    for (size_t i = 0; i < img.data.size(); ++i) complement.data[i] = 1.0f - img.data[i];

    const LritChannel a = lrit_channel(img, StartDir::up);
    const LritChannel b = lrit_channel(complement, StartDir::up);
    for (int y = 1; y < 15; ++y)
        for (int x = 1; x < 15; ++x)
            CHECK(b.data[y * 16 + x] == 510 - a.data[y * 16 + x]);
}

TEST_CASE("lrit_stack: canonical order and stack helpers") {
    SeededRng rng(506);
    const GrayImage img = random_image(rng, 8, 8);
    const LritStack stack = lrit_stack(img);
    CHECK(stack.order[0] == StartDir::up);
    CHECK(stack.order[1] == StartDir::right);
    CHECK(stack.order[2] == StartDir::down);
    CHECK(stack.order[3] == StartDir::left);
    for (int i = 0; i < 4; ++i)
        CHECK(stack.channels[i].data == lrit_channel(img, stack.order[i]).data);
}

TEST_CASE("shuffle_stack: deterministic permutation preserving channel contents") {
    SeededRng rng(507);
    const GrayImage img = random_image(rng, 8, 8);
    const LritStack stack = lrit_stack(img);

    SeededRng s1(42), s2(42);
    const LritStack a = shuffle_stack(stack, s1);
    const LritStack b = shuffle_stack(stack, s2);
    for (int i = 0; i < 4; ++i) {
        CHECK(a.order[i] == b.order[i]);
        CHECK(a.channels[i].data == b.channels[i].data);
    }

    // Order stays a permutation and every channel still matches its label.
    std::set<StartDir> seen(a.order.begin(), a.order.end());
    CHECK(seen.size() == 4);
    for (int i = 0; i < 4; ++i)
        CHECK(a.channels[i].data == lrit_channel(img, a.order[i]).data);
}

TEST_CASE("normalize_stack: scales by 1/510") {
    GrayImage img(5, 5, 0.4f);
    img.at(2, 2) = 0.9f; // interior strict max -> 510 in every channel
    const LritStack stack = lrit_stack(img);
    const auto planes = normalize_stack(stack);
    REQUIRE(planes.size() == 4 * 25);
    CHECK(planes[2 * 5 + 2] == 1.0f);
    CHECK(planes[0] == doctest::Approx(stack.channels[0].data[0] / 510.0).epsilon(1e-7));
    // 510 -> 1, 0 -> 0, and a mid value checks the division.
    CHECK(static_cast<float>(256) / 510.0f == doctest::Approx(0.50196).epsilon(1e-4));
}

TEST_CASE("lrit: images below 3x3 are rejected") {
    GrayImage tiny(2, 3, 0.5f);
    CHECK_THROWS_AS(lrit_channel(tiny, StartDir::up), std::invalid_argument);
}
