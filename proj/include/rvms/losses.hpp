#ifndef RVMS_LOSSES_HPP
#define RVMS_LOSSES_HPP

#include "rvms/image.hpp"
#include "rvms/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rvms {

template <typename T>
struct LossValue {
    double value = 0.0;
    Tensor<T> d_prob; ///< gradient with respect to the (student) probabilities
};

/**
 * @brief Soft Dice loss: 1 - (2*sum(p*g) + smooth) / (sum(p) + sum(g) + smooth).
 *
 * Differentiable in p; smooth keeps the loss defined for empty masks.
 */
template <typename T>
LossValue<T> dice_loss(const Tensor<T>& prob, const BinaryMask& target, double smooth = 1.0) {
    if (prob.shape.size() != 3 || prob.shape[0] != 1 || prob.shape[1] != target.height ||
        prob.shape[2] != target.width)
        throw std::invalid_argument("dice_loss: shape mismatch");

    const size_t n = prob.numel();
    double sum_p = 0.0, sum_g = 0.0, sum_pg = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double p = prob.data[i];
        const double g = target.data[i];
        sum_p += p;
        sum_g += g;
        sum_pg += p * g;
    }
    const double numer = 2.0 * sum_pg + smooth;
    const double denom = sum_p + sum_g + smooth;

    LossValue<T> out;
    out.value = 1.0 - numer / denom;
    out.d_prob = Tensor<T>(prob.shape);
    const double inv_d2 = 1.0 / (denom * denom);
    for (size_t i = 0; i < n; ++i) {
        const double g = target.data[i];
        out.d_prob.data[i] = static_cast<T>(-(2.0 * g * denom - numer) * inv_d2);
    }
    return out;
}

/**
 * @brief Soft-target binary cross-entropy for distillation.
 *
 * Pixel mean of -[q_t*log(q_s) + (1-q_t)*log(1-q_s)] with the teacher
 * clamped to [1e-6, 1-1e-6]. The teacher is a detached target: the gradient
 * flows to the student only.
 */
template <typename T>
LossValue<T> kd_loss(const Tensor<T>& student_prob, const Tensor<T>& teacher_prob) {
    if (!student_prob.same_shape(teacher_prob))
        throw std::invalid_argument("kd_loss: shape mismatch");

    const size_t n = student_prob.numel();
    const double teacher_eps = 1e-6;
    // Keeps the (q-qt)/(q(1-q)) quotient bounded when the student's float
    // sigmoid rounds to exactly 0 or 1.
    const double student_eps = 1e-7;

    LossValue<T> out;
    out.d_prob = Tensor<T>(student_prob.shape);
    double total = 0.0;
    const double inv_n = 1.0 / static_cast<double>(n);
    for (size_t i = 0; i < n; ++i) {
        const double qt =
            std::clamp(static_cast<double>(teacher_prob.data[i]), teacher_eps, 1.0 - teacher_eps);
        const double qs = std::clamp(static_cast<double>(student_prob.data[i]), student_eps,
                                     1.0 - student_eps);
        total -= qt * std::log(qs) + (1.0 - qt) * std::log(1.0 - qs);
        out.d_prob.data[i] = static_cast<T>((qs - qt) / (qs * (1.0 - qs)) * inv_n);
    }
    out.value = total * inv_n;
    return out;
}

} // namespace rvms

#endif
