#include "rvms/lrit.hpp"

#include <algorithm>
#include <stdexcept>
#include <utility>

namespace rvms {

namespace {

// Clockwise 8-neighborhood starting at "up", in (dy, dx) with y growing down.
constexpr int kOffsets[8][2] = {{-1, 0}, {-1, 1}, {0, 1},  {1, 1},
                                {1, 0},  {1, -1}, {0, -1}, {-1, -1}};

constexpr int start_index(StartDir d) {
    switch (d) {
        case StartDir::up: return 0;
        case StartDir::right: return 2;
        case StartDir::down: return 4;
        case StartDir::left: return 6;
    }
    return 0;
}

} // namespace

LritChannel lrit_channel(const GrayImage& img, StartDir start_dir) {
    if (img.width < 3 || img.height < 3)
        throw std::invalid_argument("lrit_channel requires an image of at least 3x3");

    const int w = img.width, h = img.height;
    const int base = start_index(start_dir);
    int dy[8], dx[8];
    for (int i = 0; i < 8; ++i) {
        dy[i] = kOffsets[(base + i) % 8][0];
        dx[i] = kOffsets[(base + i) % 8][1];
    }

    LritChannel out;
    out.width = w;
    out.height = h;
    out.data.resize(img.pixel_count());

    auto encode_clamped = [&](int y, int x) {
        const float v = img.at(y, x);
        unsigned code = 0;
        for (int i = 0; i < 8; ++i) {
            const int ny = std::clamp(y + dy[i], 0, h - 1);
            const int nx = std::clamp(x + dx[i], 0, w - 1);
            if (v > img.at(ny, nx)) code |= 2u << i; // weight 2^(i+1)
        }
        return static_cast<std::uint16_t>(code);
    };

    // Interior pixels skip the coordinate clamping.
    for (int y = 1; y < h - 1; ++y) {
        const float* row = img.data.data() + static_cast<size_t>(y) * w;
        std::uint16_t* dst = out.data.data() + static_cast<size_t>(y) * w;
        for (int x = 1; x < w - 1; ++x) {
            const float v = row[x];
            unsigned code = 0;
            for (int i = 0; i < 8; ++i)
                if (v > row[dy[i] * w + x + dx[i]]) code |= 2u << i;
            dst[x] = static_cast<std::uint16_t>(code);
        }
    }
    for (int x = 0; x < w; ++x) {
        out.data[x] = encode_clamped(0, x);
        out.data[static_cast<size_t>(h - 1) * w + x] = encode_clamped(h - 1, x);
    }
    for (int y = 0; y < h; ++y) {
        out.data[static_cast<size_t>(y) * w] = encode_clamped(y, 0);
        out.data[static_cast<size_t>(y) * w + w - 1] = encode_clamped(y, w - 1);
    }
    return out;
}

LritStack lrit_stack(const GrayImage& img) {
    LritStack stack;
    stack.order = {StartDir::up, StartDir::right, StartDir::down, StartDir::left};
    for (int i = 0; i < 4; ++i) stack.channels[i] = lrit_channel(img, stack.order[i]);
    return stack;
}

LritStack shuffle_stack(const LritStack& stack, SeededRng& rng) {
    std::array<int, 4> perm = {0, 1, 2, 3};
    for (int i = 3; i > 0; --i)
        std::swap(perm[i], perm[rng.uniform_int(0, i)]);

    LritStack out;
    for (int i = 0; i < 4; ++i) {
        out.channels[i] = stack.channels[perm[i]];
        out.order[i] = stack.order[perm[i]];
    }
    return out;
}

std::vector<float> normalize_stack(const LritStack& stack) {
    const size_t plane = stack.channels[0].data.size();
    std::vector<float> out;
    out.reserve(4 * plane);
    for (const auto& ch : stack.channels)
        for (const auto v : ch.data) out.push_back(static_cast<float>(v) / 510.0f);
    return out;
}

} // namespace rvms
