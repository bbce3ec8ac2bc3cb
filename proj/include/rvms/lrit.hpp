#ifndef RVMS_LRIT_HPP
#define RVMS_LRIT_HPP

#include "rvms/image.hpp"
#include "rvms/rng.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace rvms {

enum class StartDir { up, right, down, left };

/**
 * @brief One local relative intensity plane.
 *
 * Every pixel holds sum_{i=1..8} c(V(a) - V(n_i)) * 2^i where n_1..n_8 are
 * the anchor's eight neighbors enumerated clockwise from the channel's start
 * direction and c(x) = 1 iff x > 0. Values are even integers in [0, 510].
 * Borders use edge replication. Exactly invariant under strictly increasing
 * intensity transforms.
 */
struct LritChannel {
    int width = 0;
    int height = 0;
    std::vector<std::uint16_t> data;
};

/// Four LRIT planes, one per start direction, plus their current order.
struct LritStack {
    std::array<LritChannel, 4> channels;
    std::array<StartDir, 4> order;
};

/// Compute one plane. Requires the image to be at least 3x3.
LritChannel lrit_channel(const GrayImage& img, StartDir start_dir);

/// All four planes in canonical order (up, right, down, left).
LritStack lrit_stack(const GrayImage& img);

/// Uniform random channel permutation; used during training only.
LritStack shuffle_stack(const LritStack& stack, SeededRng& rng);

/// Concatenated planes divided by 510, in the stack's current order.
std::vector<float> normalize_stack(const LritStack& stack);

} // namespace rvms

#endif
