#include "rvms/image.hpp"

#include <stdexcept>
#include <string>

namespace rvms {

void validate(const GrayImage& img) {
    if (img.width < 3 || img.height < 3)
        throw std::invalid_argument("image must be at least 3x3, got " +
                                    std::to_string(img.width) + "x" + std::to_string(img.height));
    if (img.data.size() != img.pixel_count())
        throw std::invalid_argument("image data length does not match dimensions");
    for (float v : img.data)
        if (!(v >= 0.0f && v <= 1.0f))
            throw std::invalid_argument("image intensity outside [0,1]");
}

void validate(const BinaryMask& mask) {
    if (mask.width < 1 || mask.height < 1)
        throw std::invalid_argument("mask has degenerate dimensions");
    if (mask.data.size() != mask.pixel_count())
        throw std::invalid_argument("mask data length does not match dimensions");
}

} // namespace rvms
