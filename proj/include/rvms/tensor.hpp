#ifndef RVMS_TENSOR_HPP
#define RVMS_TENSOR_HPP

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace rvms {

/**
 * @brief Dense row-major tensor.
 *
 * Activations are (channels, height, width); conv weights are
 * (out_c, in_c, kh, kw). Scalar type is templated: training runs in float,
 * gradient checks instantiate the same code in double.
 */
template <typename T>
struct Tensor {
    std::vector<int> shape;
    std::vector<T> data;

    Tensor() = default;
    explicit Tensor(std::vector<int> s, T fill = T(0))
        : shape(std::move(s)),
          data(static_cast<size_t>(std::accumulate(shape.begin(), shape.end(), 1,
                                                   std::multiplies<int>())),
               fill) {}

    size_t numel() const { return data.size(); }

    bool same_shape(const Tensor& other) const { return shape == other.shape; }

    bool all_finite() const {
        for (const T v : data)
            if (!std::isfinite(static_cast<double>(v))) return false;
        return true;
    }
};

} // namespace rvms

#endif
