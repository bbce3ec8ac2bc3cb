#ifndef RVMS_CHECKPOINT_HPP
#define RVMS_CHECKPOINT_HPP

#include "rvms/segnet.hpp"

#include <filesystem>
#include <string>

namespace rvms {

/**
 * @brief Versioned binary model snapshot.
 *
 * Layout: magic "RVMSCKPT", u32 version, u32 input channels, u32 layer
 * count, then per layer its shape (u32 out_c, in_c, kh, kw) followed by
 * little-endian 32-bit float weights and biases, and finally the full
 * training configuration echoed as JSON (u64 length + bytes). Save/load is
 * bit-exact: re-saving a loaded checkpoint reproduces the file byte for
 * byte.
 */
struct Checkpoint {
    SegNet<float> net;
    std::string config_json;
};

void save_checkpoint(const SegNet<float>& net, const std::string& config_json,
                     const std::filesystem::path& path);

Checkpoint load_checkpoint(const std::filesystem::path& path);

} // namespace rvms

#endif
