#ifndef RVMS_SEGNET_HPP
#define RVMS_SEGNET_HPP

#include "rvms/rng.hpp"
#include "rvms/tensor.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace rvms {

template <typename T>
struct ConvLayer {
    int in_c = 0;
    int out_c = 0;
    Tensor<T> weight; ///< (out_c, in_c, 3, 3)
    Tensor<T> bias;   ///< (out_c)
};

/**
 * @brief Minimal convolutional segmentation model.
 *
 * Fixed topology: conv3x3(C_in->8)+ReLU, conv3x3(8->16)+ReLU,
 * conv3x3(16->8)+ReLU, conv3x3(8->1), sigmoid. Same-size padding by edge
 * replication. C_in is 1 (image only) or 5 (image + 4 normalized LRIT
 * channels). The forward pass is deterministic; there is no dropout or
 * batch normalization.
 */
template <typename T>
struct SegNet {
    int in_channels = 1;
    std::array<ConvLayer<T>, 4> layers;

    static SegNet he_init(int in_channels, SeededRng& rng) {
        SegNet net;
        net.in_channels = in_channels;
        const int widths[5] = {in_channels, 8, 16, 8, 1};
        for (int l = 0; l < 4; ++l) {
            ConvLayer<T>& layer = net.layers[l];
            layer.in_c = widths[l];
            layer.out_c = widths[l + 1];
            layer.weight = Tensor<T>({layer.out_c, layer.in_c, 3, 3});
            layer.bias = Tensor<T>({layer.out_c});
            const double sd = std::sqrt(2.0 / (layer.in_c * 9));
            for (auto& w : layer.weight.data) w = static_cast<T>(rng.normal(0.0, sd));
        }
        // Output bias starts at a background prior so early training cannot
        // shortcut into confident all-foreground predictions, where the
        // sigmoid gradient vanishes.
        net.layers[3].bias.data[0] = T(-2);
        return net;
    }
};

/// Activation record from forward(), sufficient for exact backpropagation.
template <typename T>
struct ForwardTape {
    std::array<Tensor<T>, 4> conv_in; ///< post-activation input to each conv layer
    Tensor<T> logits;                 ///< final pre-sigmoid plane
    Tensor<T> prob;
};

/// Per-layer parameter gradients.
template <typename T>
struct Gradients {
    std::array<Tensor<T>, 4> weight;
    std::array<Tensor<T>, 4> bias;
};

namespace detail {

// Replicate-pad one plane to (h+2) x (w+2).
template <typename T>
void pad_plane(const T* src, int h, int w, T* dst) {
    const int pw = w + 2;
    for (int y = -1; y <= h; ++y) {
        const int sy = std::clamp(y, 0, h - 1);
        T* row = dst + static_cast<size_t>(y + 1) * pw;
        row[0] = src[static_cast<size_t>(sy) * w];
        for (int x = 0; x < w; ++x) row[x + 1] = src[static_cast<size_t>(sy) * w + x];
        row[w + 1] = src[static_cast<size_t>(sy) * w + w - 1];
    }
}

// Dot product with independent lanes so the reduction vectorizes without
// relaxed floating-point flags.
template <typename T>
T dot_row(const T* a, const T* b, int n) {
    T s0 = T(0), s1 = T(0), s2 = T(0), s3 = T(0);
    T s4 = T(0), s5 = T(0), s6 = T(0), s7 = T(0);
    int i = 0;
    for (; i + 8 <= n; i += 8) {
        s0 += a[i] * b[i];
        s1 += a[i + 1] * b[i + 1];
        s2 += a[i + 2] * b[i + 2];
        s3 += a[i + 3] * b[i + 3];
        s4 += a[i + 4] * b[i + 4];
        s5 += a[i + 5] * b[i + 5];
        s6 += a[i + 6] * b[i + 6];
        s7 += a[i + 7] * b[i + 7];
    }
    for (; i < n; ++i) s0 += a[i] * b[i];
    return ((s0 + s1) + (s2 + s3)) + ((s4 + s5) + (s6 + s7));
}

template <typename T>
std::vector<T>& pad_scratch() {
    thread_local std::vector<T> buffer;
    return buffer;
}

template <typename T>
Tensor<T> conv3x3_forward(const Tensor<T>& input, const ConvLayer<T>& layer) {
    const int c_in = input.shape[0], h = input.shape[1], w = input.shape[2];
    if (c_in != layer.in_c) throw std::invalid_argument("conv3x3: channel count mismatch");
    const int pw = w + 2;
    const size_t plane = static_cast<size_t>(h) * w;
    const size_t pplane = static_cast<size_t>(h + 2) * pw;

    std::vector<T>& padded = pad_scratch<T>();
    padded.resize(static_cast<size_t>(c_in) * pplane);
    for (int c = 0; c < c_in; ++c)
        pad_plane(input.data.data() + c * plane, h, w, padded.data() + c * pplane);

    Tensor<T> out({layer.out_c, h, w});
    for (int o = 0; o < layer.out_c; ++o) {
        T* out_plane = out.data.data() + static_cast<size_t>(o) * plane;
        std::fill(out_plane, out_plane + plane, layer.bias.data[o]);
        const T* wlayer = layer.weight.data.data() + static_cast<size_t>(o) * c_in * 9;
        for (int y = 0; y < h; ++y) {
            T* __restrict dst = out_plane + static_cast<size_t>(y) * w;
            for (int c = 0; c < c_in; ++c) {
                const T* pad = padded.data() + static_cast<size_t>(c) * pplane;
                const T* wbase = wlayer + static_cast<size_t>(c) * 9;
                for (int ky = 0; ky < 3; ++ky) {
                    const T w0 = wbase[ky * 3], w1 = wbase[ky * 3 + 1], w2 = wbase[ky * 3 + 2];
                    const T* __restrict src = pad + static_cast<size_t>(y + ky) * pw;
                    for (int x = 0; x < w; ++x)
                        dst[x] += w0 * src[x] + w1 * src[x + 1] + w2 * src[x + 2];
                }
            }
        }
    }
    return out;
}

template <typename T>
void conv3x3_backward(const Tensor<T>& input, const ConvLayer<T>& layer, const Tensor<T>& d_out,
                      Tensor<T>& d_weight, Tensor<T>& d_bias, Tensor<T>& d_input) {
    const int c_in = input.shape[0], h = input.shape[1], w = input.shape[2];
    const int pw = w + 2;
    const size_t plane = static_cast<size_t>(h) * w;
    const size_t pplane = static_cast<size_t>(h + 2) * pw;

    std::vector<T>& padded = pad_scratch<T>();
    padded.resize(static_cast<size_t>(c_in) * pplane);
    for (int c = 0; c < c_in; ++c)
        pad_plane(input.data.data() + c * plane, h, w, padded.data() + c * pplane);

    d_weight = Tensor<T>({layer.out_c, c_in, 3, 3});
    d_bias = Tensor<T>({layer.out_c});
    thread_local std::vector<T> d_padded;
    d_padded.assign(static_cast<size_t>(c_in) * pplane, T(0));

    for (int o = 0; o < layer.out_c; ++o) {
        const T* dout_plane = d_out.data.data() + static_cast<size_t>(o) * plane;
        {
            T s0 = T(0), s1 = T(0), s2 = T(0), s3 = T(0);
            size_t i = 0;
            for (; i + 4 <= plane; i += 4) {
                s0 += dout_plane[i];
                s1 += dout_plane[i + 1];
                s2 += dout_plane[i + 2];
                s3 += dout_plane[i + 3];
            }
            for (; i < plane; ++i) s0 += dout_plane[i];
            d_bias.data[o] = (s0 + s1) + (s2 + s3);
        }

        for (int c = 0; c < c_in; ++c) {
            const T* pad = padded.data() + static_cast<size_t>(c) * pplane;
            T* dpad = d_padded.data() + static_cast<size_t>(c) * pplane;
            const T* wbase = layer.weight.data.data() + (static_cast<size_t>(o) * c_in + c) * 9;
            T* dwbase = d_weight.data.data() + (static_cast<size_t>(o) * c_in + c) * 9;
            for (int ky = 0; ky < 3; ++ky) {
                for (int kx = 0; kx < 3; ++kx) {
                    const T wv = wbase[ky * 3 + kx];
                    T acc = T(0);
                    for (int y = 0; y < h; ++y) {
                        const T* __restrict src = pad + static_cast<size_t>(y + ky) * pw + kx;
                        T* __restrict dst = dpad + static_cast<size_t>(y + ky) * pw + kx;
                        const T* __restrict dout_row = dout_plane + static_cast<size_t>(y) * w;
                        acc += dot_row(dout_row, src, w);
                        for (int x = 0; x < w; ++x) dst[x] += wv * dout_row[x];
                    }
                    dwbase[ky * 3 + kx] = acc;
                }
            }
        }
    }

    // Fold padded-cell gradients back onto their replicated source pixels.
    d_input = Tensor<T>({c_in, h, w});
    for (int c = 0; c < c_in; ++c) {
        const T* dpad = d_padded.data() + static_cast<size_t>(c) * pplane;
        T* din = d_input.data.data() + static_cast<size_t>(c) * plane;
        for (int py = 0; py < h + 2; ++py) {
            const int sy = std::clamp(py - 1, 0, h - 1);
            for (int px = 0; px < pw; ++px) {
                const int sx = std::clamp(px - 1, 0, w - 1);
                din[static_cast<size_t>(sy) * w + sx] += dpad[static_cast<size_t>(py) * pw + px];
            }
        }
    }
}

} // namespace detail

/**
 * @brief Run the network; the returned tape suffices for exact backprop.
 *
 * Input must be (C_in, H, W). Output prob is (1, H, W) with values in (0,1).
 */
template <typename T>
std::pair<Tensor<T>, ForwardTape<T>> forward(const SegNet<T>& net, const Tensor<T>& input) {
    if (input.shape.size() != 3 || input.shape[0] != net.in_channels)
        throw std::invalid_argument("forward: input shape does not match C_in");

    ForwardTape<T> tape;
    tape.conv_in[0] = input;
    for (int l = 0; l < 4; ++l) {
        Tensor<T> z = detail::conv3x3_forward(tape.conv_in[l], net.layers[l]);
        if (l < 3) {
            for (auto& v : z.data) v = v > T(0) ? v : T(0);
            tape.conv_in[l + 1] = std::move(z);
        } else {
            tape.logits = std::move(z);
            tape.prob = tape.logits;
            for (auto& v : tape.prob.data) v = T(1) / (T(1) + std::exp(-v));
        }
    }
    return {tape.prob, std::move(tape)};
}

/// Probabilities only, without recording a tape (inference path).
template <typename T>
Tensor<T> forward_prob(const SegNet<T>& net, const Tensor<T>& input) {
    if (input.shape.size() != 3 || input.shape[0] != net.in_channels)
        throw std::invalid_argument("forward_prob: input shape does not match C_in");
    Tensor<T> act = detail::conv3x3_forward(input, net.layers[0]);
    for (int l = 1; l < 4; ++l) {
        for (auto& v : act.data) v = v > T(0) ? v : T(0);
        act = detail::conv3x3_forward(act, net.layers[l]);
    }
    for (auto& v : act.data) v = T(1) / (T(1) + std::exp(-v));
    return act;
}

/// Exact gradients of a scalar loss given d loss / d prob.
template <typename T>
Gradients<T> backward(const SegNet<T>& net, const ForwardTape<T>& tape, const Tensor<T>& d_prob) {
    if (!d_prob.same_shape(tape.prob))
        throw std::invalid_argument("backward: gradient shape mismatch");

    Gradients<T> grads;
    Tensor<T> delta = d_prob;
    for (size_t i = 0; i < delta.data.size(); ++i) {
        // Sigmoid gradient from the logit: sigma(z)*sigma(-z) stays nonzero
        // where the rounded probability saturates to exactly 0 or 1.
        const double z = tape.logits.data[i];
        const double e = std::exp(-std::abs(z));
        delta.data[i] = static_cast<T>(delta.data[i] * (e / ((1.0 + e) * (1.0 + e))));
    }
    for (int l = 3; l >= 0; --l) {
        Tensor<T> d_input;
        detail::conv3x3_backward(tape.conv_in[l], net.layers[l], delta, grads.weight[l],
                                 grads.bias[l], d_input);
        if (l > 0) {
            // ReLU mask: post-activation > 0 iff pre-activation > 0.
            for (size_t i = 0; i < d_input.data.size(); ++i)
                if (tape.conv_in[l].data[i] <= T(0)) d_input.data[i] = T(0);
            delta = std::move(d_input);
        }
    }
    return grads;
}

/// Elementwise accumulate: dst += src (shapes must match).
template <typename T>
void accumulate(Gradients<T>& dst, const Gradients<T>& src, double scale = 1.0) {
    for (int l = 0; l < 4; ++l) {
        if (dst.weight[l].numel() == 0) {
            dst.weight[l] = src.weight[l];
            dst.bias[l] = src.bias[l];
            if (scale != 1.0) {
                for (auto& v : dst.weight[l].data) v = static_cast<T>(v * scale);
                for (auto& v : dst.bias[l].data) v = static_cast<T>(v * scale);
            }
            continue;
        }
        for (size_t i = 0; i < dst.weight[l].data.size(); ++i)
            dst.weight[l].data[i] += static_cast<T>(src.weight[l].data[i] * scale);
        for (size_t i = 0; i < dst.bias[l].data.size(); ++i)
            dst.bias[l].data[i] += static_cast<T>(src.bias[l].data[i] * scale);
    }
}

} // namespace rvms

#endif
