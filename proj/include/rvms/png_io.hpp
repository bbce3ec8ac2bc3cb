#ifndef RVMS_PNG_IO_HPP
#define RVMS_PNG_IO_HPP

#include "rvms/image.hpp"

#include <cstdint>
#include <filesystem>
#include <vector>

namespace rvms {

/**
 * @brief Load an 8-bit PNG as a GrayImage with intensities in [0, 1].
 *
 * Grayscale pixels are scaled by 1/255. RGB(A) input is collapsed by the
 * unweighted channel mean of R, G, B. Throws on unreadable files, bit depths
 * other than 8, and images smaller than 3x3.
 */
GrayImage load_image(const std::filesystem::path& path);

/**
 * @brief Write a GrayImage as an 8-bit grayscale PNG.
 *
 * Quantization is round(v * 255) with round-half-up, so a save/load round
 * trip differs from the original by at most 1/510 per pixel.
 */
void save_image(const GrayImage& img, const std::filesystem::path& path);

/// Load an 8-bit PNG as a binary mask: foreground where the gray value >= 128.
BinaryMask load_mask(const std::filesystem::path& path);

/// Write a binary mask as an 8-bit grayscale PNG (0 / 255).
void save_mask(const BinaryMask& mask, const std::filesystem::path& path);

/// Lossless 16-bit grayscale PNG in/out for integer-valued planes.
void save_png16(const std::vector<std::uint16_t>& data, int width, int height,
                const std::filesystem::path& path);
std::vector<std::uint16_t> load_png16(const std::filesystem::path& path, int& width, int& height);

} // namespace rvms

#endif
