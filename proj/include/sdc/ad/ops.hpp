#pragma once

#include <vector>

#include "sdc/ad/tensor.hpp"

namespace sdc {
class PolyphaseUpsampler;
}

namespace sdc::ad {

// Elementwise ops require identical shapes (ShapeMismatch otherwise).
template <typename T> Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b);
template <typename T> Tensor<T> sub(const Tensor<T>& a, const Tensor<T>& b);
template <typename T> Tensor<T> mul(const Tensor<T>& a, const Tensor<T>& b);
template <typename T> Tensor<T> scale(const Tensor<T>& a, T factor);
template <typename T> Tensor<T> add_scalar(const Tensor<T>& a, T offset);
template <typename T> Tensor<T> square(const Tensor<T>& a);
template <typename T> Tensor<T> abs(const Tensor<T>& a);
template <typename T> Tensor<T> log(const Tensor<T>& a);
template <typename T> Tensor<T> tanh(const Tensor<T>& a);
template <typename T> Tensor<T> leaky_relu(const Tensor<T>& a, T slope);

// x + sin^2(alpha x) / alpha with one learnable alpha per channel; x is
// [batch, channels, time], alpha is [channels].
template <typename T> Tensor<T> snake(const Tensor<T>& x, const Tensor<T>& alpha);
template <typename T> Tensor<T> snake(const Tensor<T>& x, T alpha);

template <typename T> Tensor<T> sum(const Tensor<T>& a);
template <typename T> Tensor<T> mean(const Tensor<T>& a);
template <typename T> Tensor<T> reshape(const Tensor<T>& a, Shape shape);

// Cross-correlation. x [B, Cin, T], w [Cout, Cin, K], bias [Cout] or undefined.
template <typename T>
Tensor<T> conv1d(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& bias, std::size_t stride = 1,
                 std::size_t padding = 0, std::size_t dilation = 1);

// Adjoint of conv1d in its input. x [B, Cin, T], w [Cin, Cout, K], output
// length (T - 1) * stride - 2 * padding + K + output_padding.
template <typename T>
Tensor<T> conv_transpose1d(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& bias, std::size_t stride = 1,
                           std::size_t padding = 0, std::size_t output_padding = 0);

// Zero padding / cropping along the last axis of a [B, C, T] tensor.
template <typename T> Tensor<T> pad_time(const Tensor<T>& x, std::size_t left, std::size_t right);
template <typename T> Tensor<T> crop_time(const Tensor<T>& x, std::size_t start, std::size_t length);

// out[b, d, f] = table[index[b * frames + f], d] for table [K, D].
template <typename T>
Tensor<T> gather_columns(const Tensor<T>& table, const std::vector<int>& index, std::size_t batch,
                         std::size_t frames);

// x [..., n] times a constant row-major matrix [m, n] transposed: [..., m].
template <typename T> Tensor<T> matmul_const(const Tensor<T>& x, const std::vector<T>& matrix, std::size_t m);

// Applies the polyphase interpolator along the last axis of [B, C, T].
template <typename T> Tensor<T> upsample(const Tensor<T>& x, const PolyphaseUpsampler& up);

template <typename T> Tensor<T> mse(const Tensor<T>& a, const Tensor<T>& b) { return mean(square(sub(a, b))); }
template <typename T> Tensor<T> l1(const Tensor<T>& a, const Tensor<T>& b) { return mean(abs(sub(a, b))); }

template <typename T> Tensor<T> operator+(const Tensor<T>& a, const Tensor<T>& b) { return add(a, b); }
template <typename T> Tensor<T> operator-(const Tensor<T>& a, const Tensor<T>& b) { return sub(a, b); }
template <typename T> Tensor<T> operator*(T s, const Tensor<T>& a) { return scale(a, s); }

}  // namespace sdc::ad
