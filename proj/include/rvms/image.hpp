#ifndef RVMS_IMAGE_HPP
#define RVMS_IMAGE_HPP

#include <cstdint>
#include <vector>

namespace rvms {

/**
 * @brief Single-channel image with intensities in [0, 1].
 *
 * Pixel data is stored in row-major order: pixel (row, col) lives at
 * data[row * width + col]. Images are immutable by convention once built
 * and safe to share across parallel workers.
 */
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<float> data; ///< row-major, values in [0, 1]

    GrayImage() = default;
    GrayImage(int w, int h, float fill = 0.0f)
        : width(w), height(h), data(static_cast<size_t>(w) * h, fill) {}

    float at(int row, int col) const {
        return data[static_cast<size_t>(row) * width + col];
    }
    float& at(int row, int col) {
        return data[static_cast<size_t>(row) * width + col];
    }
    size_t pixel_count() const { return static_cast<size_t>(width) * height; }
};

/// Binary segmentation mask with the same row-major layout as GrayImage.
struct BinaryMask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data; ///< row-major, 0 or 1

    BinaryMask() = default;
    BinaryMask(int w, int h, std::uint8_t fill = 0)
        : width(w), height(h), data(static_cast<size_t>(w) * h, fill) {}

    bool at(int row, int col) const {
        return data[static_cast<size_t>(row) * width + col] != 0;
    }
    void set(int row, int col, bool v) {
        data[static_cast<size_t>(row) * width + col] = v ? 1 : 0;
    }
    size_t pixel_count() const { return static_cast<size_t>(width) * height; }
    size_t foreground_count() const {
        size_t n = 0;
        for (auto v : data) n += (v != 0);
        return n;
    }
};

/// Throws std::invalid_argument unless dimensions and value range are valid.
void validate(const GrayImage& img);
void validate(const BinaryMask& mask);

} // namespace rvms

#endif
