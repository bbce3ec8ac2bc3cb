#ifndef RVMS_ADAM_HPP
#define RVMS_ADAM_HPP

#include "rvms/segnet.hpp"
#include "rvms/tensor.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace rvms {

/**
 * @brief Adam optimizer state for one SegNet.
 *
 * Standard bias-corrected update with lr = 1e-3, beta1 = 0.9, beta2 = 0.999,
 * eps = 1e-8 by default. Moments are shaped like the parameters and kept in
 * double so squared gradients of barely-active units do not underflow.
 */
template <typename T>
struct AdamState {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    long step = 0;
    std::array<Tensor<double>, 4> m_w, v_w, m_b, v_b;

    static AdamState like(const SegNet<T>& net, double lr = 1e-3) {
        AdamState s;
        s.lr = lr;
        for (int l = 0; l < 4; ++l) {
            s.m_w[l] = Tensor<double>(net.layers[l].weight.shape);
            s.v_w[l] = Tensor<double>(net.layers[l].weight.shape);
            s.m_b[l] = Tensor<double>(net.layers[l].bias.shape);
            s.v_b[l] = Tensor<double>(net.layers[l].bias.shape);
        }
        return s;
    }
};

namespace detail {

template <typename T>
void adam_update(std::vector<T>& params, const std::vector<T>& grads, std::vector<double>& m,
                 std::vector<double>& v, const AdamState<T>& s, double bc1, double bc2) {
    for (size_t i = 0; i < params.size(); ++i) {
        const double g = grads[i];
        const double mi = s.beta1 * m[i] + (1.0 - s.beta1) * g;
        const double vi = s.beta2 * v[i] + (1.0 - s.beta2) * g * g;
        m[i] = mi;
        v[i] = vi;
        const double m_hat = mi / bc1;
        const double v_hat = vi / bc2;
        params[i] = static_cast<T>(params[i] - s.lr * m_hat / (std::sqrt(v_hat) + s.eps));
    }
}

} // namespace detail

/// One bias-corrected Adam step; throws on non-finite gradients.
template <typename T>
void adam_step(SegNet<T>& net, const Gradients<T>& grads, AdamState<T>& state) {
    for (int l = 0; l < 4; ++l)
        if (!grads.weight[l].all_finite() || !grads.bias[l].all_finite())
            throw std::runtime_error("adam_step: non-finite gradient in layer " +
                                     std::to_string(l) + " at step " +
                                     std::to_string(state.step + 1));

    state.step += 1;
    const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
    for (int l = 0; l < 4; ++l) {
        detail::adam_update(net.layers[l].weight.data, grads.weight[l].data, state.m_w[l].data,
                            state.v_w[l].data, state, bc1, bc2);
        detail::adam_update(net.layers[l].bias.data, grads.bias[l].data, state.m_b[l].data,
                            state.v_b[l].data, state, bc1, bc2);
    }
}

} // namespace rvms

#endif
