#include "rvms/fourier.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <stdexcept>

namespace rvms {

namespace {

// FFTW plan creation is not thread-safe; execution is.
std::mutex& plan_mutex() {
    static std::mutex m;
    return m;
}

struct FftwBuffer {
    fftw_complex* data = nullptr;
    explicit FftwBuffer(size_t n) {
        data = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
        if (!data) throw std::bad_alloc();
    }
    ~FftwBuffer() { fftw_free(data); }
    FftwBuffer(const FftwBuffer&) = delete;
    FftwBuffer& operator=(const FftwBuffer&) = delete;
};

void execute_dft(fftw_complex* in, fftw_complex* out, int height, int width, int sign) {
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(plan_mutex());
        plan = fftw_plan_dft_2d(height, width, in, out, sign, FFTW_ESTIMATE);
    }
    if (!plan) throw std::runtime_error("fftw_plan_dft_2d failed");
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(plan_mutex());
        fftw_destroy_plan(plan);
    }
}

void check_same_dims(int w1, int h1, int w2, int h2, const char* what) {
    if (w1 != w2 || h1 != h2)
        throw std::invalid_argument(std::string(what) + ": dimension mismatch");
}

} // namespace

SpectralImage fft2(const GrayImage& img) {
    validate(img);
    const int h = img.height, w = img.width;
    const size_t n = img.pixel_count();

    FftwBuffer in(n), out(n);
    for (size_t i = 0; i < n; ++i) {
        in.data[i][0] = img.data[i];
        in.data[i][1] = 0.0;
    }
    execute_dft(in.data, out.data, h, w, FFTW_FORWARD);

    SpectralImage spec;
    spec.width = w;
    spec.height = h;
    spec.amplitude.resize(n);
    spec.phase.resize(n);
    const int cy = h / 2, cx = w / 2;
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            const size_t src = static_cast<size_t>(r) * w + c;
            const size_t dst = static_cast<size_t>((r + cy) % h) * w + (c + cx) % w;
            const double re = out.data[src][0], im = out.data[src][1];
            spec.amplitude[dst] = std::hypot(re, im);
            spec.phase[dst] = std::atan2(im, re);
        }
    }
    return spec;
}

GrayImage ifft2(const SpectralImage& spec) {
    const int h = spec.height, w = spec.width;
    const size_t n = static_cast<size_t>(h) * w;
    if (spec.amplitude.size() != n || spec.phase.size() != n)
        throw std::invalid_argument("ifft2: plane length does not match dimensions");

    FftwBuffer in(n), out(n);
    const int cy = h / 2, cx = w / 2;
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            const size_t centered = static_cast<size_t>((r + cy) % h) * w + (c + cx) % w;
            const size_t raw = static_cast<size_t>(r) * w + c;
            in.data[raw][0] = spec.amplitude[centered] * std::cos(spec.phase[centered]);
            in.data[raw][1] = spec.amplitude[centered] * std::sin(spec.phase[centered]);
        }
    }
    execute_dft(in.data, out.data, h, w, FFTW_BACKWARD);

    GrayImage img(w, h);
    const double scale = 1.0 / static_cast<double>(n);
    for (size_t i = 0; i < n; ++i)
        img.data[i] = static_cast<float>(std::clamp(out.data[i][0] * scale, 0.0, 1.0));
    return img;
}

FreqMask make_freq_mask(int width, int height, double alpha) {
    if (!(alpha > 0.0 && alpha <= 0.5))
        throw std::invalid_argument("make_freq_mask: alpha must be in (0, 0.5]");

    FreqMask mask;
    mask.width = width;
    mask.height = height;
    mask.alpha = alpha;
    mask.data.assign(static_cast<size_t>(width) * height, 0);

    // Side lengths round(2*alpha*dim), at least 1 so the DC bin stays inside.
    const int side_h = std::max(1L, std::lround(2.0 * alpha * height));
    const int side_w = std::max(1L, std::lround(2.0 * alpha * width));
    const int cy = height / 2, cx = width / 2;
    const int r0 = std::max(0, cy - side_h / 2);
    const int r1 = std::min(height - 1, r0 + side_h - 1);
    const int c0 = std::max(0, cx - side_w / 2);
    const int c1 = std::min(width - 1, c0 + side_w - 1);
    for (int r = r0; r <= r1; ++r)
        for (int c = c0; c <= c1; ++c) mask.data[static_cast<size_t>(r) * width + c] = 1;
    return mask;
}

std::vector<double> mix_amplitude(const std::vector<double>& a_src,
                                  const std::vector<double>& a_tgt, const FreqMask& mask,
                                  double lambda) {
    const size_t n = static_cast<size_t>(mask.width) * mask.height;
    if (a_src.size() != n || a_tgt.size() != n)
        throw std::invalid_argument("mix_amplitude: dimension mismatch");

    std::vector<double> out(n);
    for (size_t i = 0; i < n; ++i)
        out[i] = mask.data[i] ? (1.0 - lambda) * a_src[i] + lambda * a_tgt[i] : a_src[i];
    return out;
}

GrayImage style_transfer(const GrayImage& x_src, const GrayImage& x_tgt, double alpha,
                         double lambda) {
    validate(x_src);
    validate(x_tgt);
    if (!(lambda >= 0.0 && lambda <= 1.0))
        throw std::invalid_argument("style_transfer: lambda must be in [0, 1]");

    const GrayImage* tgt = &x_tgt;
    GrayImage resized;
    if (x_tgt.width != x_src.width || x_tgt.height != x_src.height) {
        resized = resize_bilinear(x_tgt, x_src.width, x_src.height);
        tgt = &resized;
    }

    const SpectralImage spec_src = fft2(x_src);
    const SpectralImage spec_tgt = fft2(*tgt);
    const FreqMask mask = make_freq_mask(x_src.width, x_src.height, alpha);

    SpectralImage mixed;
    mixed.width = spec_src.width;
    mixed.height = spec_src.height;
    mixed.amplitude = mix_amplitude(spec_src.amplitude, spec_tgt.amplitude, mask, lambda);
    mixed.phase = spec_src.phase; // content stays with the source
    return ifft2(mixed);
}

GrayImage resize_bilinear(const GrayImage& img, int new_width, int new_height) {
    validate(img);
    if (new_width < 3 || new_height < 3)
        throw std::invalid_argument("resize_bilinear: target dimensions too small");

    GrayImage out(new_width, new_height);
    const double sx = static_cast<double>(img.width) / new_width;
    const double sy = static_cast<double>(img.height) / new_height;
    for (int y = 0; y < new_height; ++y) {
        const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, img.height - 1.0);
        const int y0 = static_cast<int>(fy);
        const int y1 = std::min(y0 + 1, img.height - 1);
        const double wy = fy - y0;
        for (int x = 0; x < new_width; ++x) {
            const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, img.width - 1.0);
            const int x0 = static_cast<int>(fx);
            const int x1 = std::min(x0 + 1, img.width - 1);
            const double wx = fx - x0;
            const double v = (1 - wy) * ((1 - wx) * img.at(y0, x0) + wx * img.at(y0, x1)) +
                             wy * ((1 - wx) * img.at(y1, x0) + wx * img.at(y1, x1));
            out.at(y, x) = static_cast<float>(std::clamp(v, 0.0, 1.0));
        }
    }
    return out;
}

} // namespace rvms
