#ifndef RVMS_FOURIER_HPP
#define RVMS_FOURIER_HPP

#include "rvms/image.hpp"

#include <cstdint>
#include <vector>

namespace rvms {

/**
 * @brief Centered amplitude and phase planes of an image's 2D DFT.
 *
 * The DC bin sits at (height/2, width/2), rounding down. Amplitude is the
 * modulus (non-negative), phase the argument in (-pi, pi]. The transform is
 * unnormalized, so a constant image c has DC amplitude c * H * W.
 */
struct SpectralImage {
    int width = 0;
    int height = 0;
    std::vector<double> amplitude; ///< row-major, DC-centered
    std::vector<double> phase;     ///< row-major, DC-centered
};

/**
 * @brief Centered low-frequency rectangle mask.
 *
 * True on an axis-aligned rectangle of side lengths round(2*alpha*H) by
 * round(2*alpha*W) centered on the DC bin; the DC bin is always inside.
 * alpha must lie in (0, 0.5]; alpha = 0.5 covers the whole plane.
 */
struct FreqMask {
    int width = 0;
    int height = 0;
    double alpha = 0.0;
    std::vector<std::uint8_t> data;
};

/// Forward 2D DFT with DC-centered amplitude/phase planes.
SpectralImage fft2(const GrayImage& img);

/// Recombine amplitude * exp(i*phase), invert, take the real part, clamp to [0, 1].
GrayImage ifft2(const SpectralImage& spec);

FreqMask make_freq_mask(int width, int height, double alpha);

/**
 * @brief Blend two amplitude planes inside the mask.
 *
 * out = ((1-lambda)*a_src + lambda*a_tgt) * M + a_src * (1-M), elementwise.
 * Throws on dimension mismatch.
 */
std::vector<double> mix_amplitude(const std::vector<double>& a_src,
                                  const std::vector<double>& a_tgt, const FreqMask& mask,
                                  double lambda);

/**
 * @brief Transfer low-frequency amplitude style from x_tgt onto x_src.
 *
 * The target is resampled (bilinear) to the source size if needed; the
 * output keeps the source phase unchanged. Requires 0 < alpha <= 0.5 and
 * lambda in [0, 1].
 */
GrayImage style_transfer(const GrayImage& x_src, const GrayImage& x_tgt, double alpha,
                         double lambda);

/// Bilinear resample to new dimensions (>= 3x3).
GrayImage resize_bilinear(const GrayImage& img, int new_width, int new_height);

} // namespace rvms

#endif
