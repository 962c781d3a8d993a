#include "sdc/ad/ops.hpp"

#include <cmath>
#include <string>

#include "sdc/error.hpp"
#include "sdc/kernels/conv.hpp"
#include "sdc/signal/resample.hpp"

namespace sdc::ad {
namespace {

namespace kp = sdc::kernels::parallel;

template <typename T>
void require_same(const Tensor<T>& a, const Tensor<T>& b, const char* op) {
    if (a.shape() != b.shape())
        fail(ErrorKind::ShapeMismatch,
             std::string(op) + ": shapes " + to_string(a.shape()) + " and " + to_string(b.shape()) + " differ");
}

template <typename T>
void require_rank(const Tensor<T>& a, std::size_t rank, const char* op) {
    if (a.rank() != rank)
        fail(ErrorKind::ShapeMismatch, std::string(op) + ": expected rank " + std::to_string(rank) + ", got " +
                                           to_string(a.shape()));
}

// Elementwise unary op with derivative computed from (x, y).
template <typename T, typename F, typename D>
Tensor<T> unary(const char* name, const Tensor<T>& a, F f, D df) {
    std::vector<T> out(a.numel());
    const auto x = a.data();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(x[i]);
    return make_result<T>(name, a.shape(), std::move(out), {a}, [df](Node<T>& n) {
        Node<T>& in = *n.inputs[0];
        auto g = in.grad_buffer();
        for (std::size_t i = 0; i < g.size(); ++i) g[i] += n.grad[i] * df(in.value[i], n.value[i]);
    });
}

}  // namespace

template <typename T>
Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b) {
    require_same(a, b, "add");
    std::vector<T> out(a.numel());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] + b.data()[i];
    return make_result<T>("add", a.shape(), std::move(out), {a, b}, [](Node<T>& n) {
        for (auto& in : n.inputs) {
            if (!in->requires_grad) continue;
            auto g = in->grad_buffer();
            for (std::size_t i = 0; i < g.size(); ++i) g[i] += n.grad[i];
        }
    });
}

template <typename T>
Tensor<T> sub(const Tensor<T>& a, const Tensor<T>& b) {
    require_same(a, b, "sub");
    std::vector<T> out(a.numel());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] - b.data()[i];
    return make_result<T>("sub", a.shape(), std::move(out), {a, b}, [](Node<T>& n) {
        if (n.inputs[0]->requires_grad) {
            auto g = n.inputs[0]->grad_buffer();
            for (std::size_t i = 0; i < g.size(); ++i) g[i] += n.grad[i];
        }
        if (n.inputs[1]->requires_grad) {
            auto g = n.inputs[1]->grad_buffer();
            for (std::size_t i = 0; i < g.size(); ++i) g[i] -= n.grad[i];
        }
    });
}

template <typename T>
Tensor<T> mul(const Tensor<T>& a, const Tensor<T>& b) {
    require_same(a, b, "mul");
    std::vector<T> out(a.numel());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] * b.data()[i];
    return make_result<T>("mul", a.shape(), std::move(out), {a, b}, [](Node<T>& n) {
        Node<T>& x = *n.inputs[0];
        Node<T>& y = *n.inputs[1];
        if (x.requires_grad) {
            auto g = x.grad_buffer();
            for (std::size_t i = 0; i < g.size(); ++i) g[i] += n.grad[i] * y.value[i];
        }
        if (y.requires_grad) {
            auto g = y.grad_buffer();
            for (std::size_t i = 0; i < g.size(); ++i) g[i] += n.grad[i] * x.value[i];
        }
    });
}

template <typename T>
Tensor<T> scale(const Tensor<T>& a, T factor) {
    return unary<T>("scale", a, [factor](T x) { return factor * x; }, [factor](T, T) { return factor; });
}

template <typename T>
Tensor<T> add_scalar(const Tensor<T>& a, T offset) {
    return unary<T>("add_scalar", a, [offset](T x) { return x + offset; }, [](T, T) { return T(1); });
}

template <typename T>
Tensor<T> square(const Tensor<T>& a) {
    return unary<T>("square", a, [](T x) { return x * x; }, [](T x, T) { return T(2) * x; });
}

template <typename T>
Tensor<T> abs(const Tensor<T>& a) {
    return unary<T>("abs", a, [](T x) { return std::abs(x); },
                    [](T x, T) { return x > T(0) ? T(1) : (x < T(0) ? T(-1) : T(0)); });
}

template <typename T>
Tensor<T> log(const Tensor<T>& a) {
    return unary<T>("log", a, [](T x) { return std::log(x); }, [](T x, T) { return T(1) / x; });
}

template <typename T>
Tensor<T> tanh(const Tensor<T>& a) {
    return unary<T>("tanh", a, [](T x) { return std::tanh(x); }, [](T, T y) { return T(1) - y * y; });
}

template <typename T>
Tensor<T> leaky_relu(const Tensor<T>& a, T slope) {
    return unary<T>("leaky_relu", a, [slope](T x) { return x > T(0) ? x : slope * x; },
                    [slope](T x, T) { return x > T(0) ? T(1) : slope; });
}

template <typename T>
Tensor<T> snake(const Tensor<T>& x, const Tensor<T>& alpha) {
    require_rank(x, 3, "snake");
    const std::size_t B = x.dim(0), C = x.dim(1), L = x.dim(2);
    if (alpha.shape() != Shape{C})
        fail(ErrorKind::ShapeMismatch, "snake: alpha must be [" + std::to_string(C) + "]");
    constexpr T eps = T(1e-9);
    std::vector<T> out(x.numel());
    const auto xv = x.data();
    const auto av = alpha.data();
    for (std::size_t b = 0; b < B; ++b)
        for (std::size_t c = 0; c < C; ++c) {
            const T a = av[c], inv = T(1) / (a + eps);
            const std::size_t base = (b * C + c) * L;
            for (std::size_t t = 0; t < L; ++t) {
                const T s = std::sin(a * xv[base + t]);
                out[base + t] = xv[base + t] + s * s * inv;
            }
        }
    return make_result<T>("snake", x.shape(), std::move(out), {x, alpha}, [B, C, L](Node<T>& n) {
        Node<T>& xn = *n.inputs[0];
        Node<T>& an = *n.inputs[1];
        std::span<T> gx = xn.requires_grad ? xn.grad_buffer() : std::span<T>{};
        std::span<T> ga = an.requires_grad ? an.grad_buffer() : std::span<T>{};
        for (std::size_t b = 0; b < B; ++b)
            for (std::size_t c = 0; c < C; ++c) {
                const T a = an.value[c], inv = T(1) / (a + eps);
                const std::size_t base = (b * C + c) * L;
                T acc = 0;
                for (std::size_t t = 0; t < L; ++t) {
                    const T xv = xn.value[base + t];
                    const T g = n.grad[base + t];
                    const T s = std::sin(a * xv), s2 = T(2) * s * std::cos(a * xv);
                    if (!gx.empty()) gx[base + t] += g * (T(1) + s2 * a * inv);
                    acc += g * (xv * s2 * inv - s * s * inv * inv);
                }
                if (!ga.empty()) ga[c] += acc;
            }
    });
}

template <typename T>
Tensor<T> snake(const Tensor<T>& x, T alpha) {
    if (!(alpha > T(0))) fail(ErrorKind::InvalidConfig, "snake: alpha must be positive");
    return unary<T>(
        "snake", x, [alpha](T v) { const T s = std::sin(alpha * v); return v + s * s / alpha; },
        [alpha](T v, T) { return T(1) + std::sin(T(2) * alpha * v); });
}

template <typename T>
Tensor<T> sum(const Tensor<T>& a) {
    T s = 0;
    for (T v : a.data()) s += v;
    return make_result<T>("sum", {1}, {s}, {a}, [](Node<T>& n) {
        auto g = n.inputs[0]->grad_buffer();
        for (auto& v : g) v += n.grad[0];
    });
}

template <typename T>
Tensor<T> mean(const Tensor<T>& a) {
    T s = 0;
    for (T v : a.data()) s += v;
    const T inv = T(1) / T(a.numel());
    return make_result<T>("mean", {1}, {s * inv}, {a}, [inv](Node<T>& n) {
        auto g = n.inputs[0]->grad_buffer();
        for (auto& v : g) v += n.grad[0] * inv;
    });
}

template <typename T>
Tensor<T> reshape(const Tensor<T>& a, Shape shape) {
    if (numel(shape) != a.numel())
        fail(ErrorKind::ShapeMismatch, "reshape: " + to_string(a.shape()) + " -> " + to_string(shape));
    std::vector<T> out(a.data().begin(), a.data().end());
    return make_result<T>("reshape", std::move(shape), std::move(out), {a}, [](Node<T>& n) {
        auto g = n.inputs[0]->grad_buffer();
        for (std::size_t i = 0; i < g.size(); ++i) g[i] += n.grad[i];
    });
}

template <typename T>
Tensor<T> conv1d(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& bias, std::size_t stride,
                 std::size_t padding, std::size_t dilation) {
    require_rank(x, 3, "conv1d");
    require_rank(w, 3, "conv1d weight");
    if (w.dim(1) != x.dim(1))
        fail(ErrorKind::ShapeMismatch, "conv1d: input has " + std::to_string(x.dim(1)) + " channels, weight expects " +
                                           std::to_string(w.dim(1)));
    if (bias.defined() && bias.shape() != Shape{w.dim(0)})
        fail(ErrorKind::ShapeMismatch, "conv1d: bias must be [out_channels]");
    const auto g = kernels::Conv1dGeometry::make(x.dim(0), x.dim(1), w.dim(0), x.dim(2), w.dim(2), stride, padding,
                                                 dilation);
    std::vector<T> out(g.output_size());
    kp::conv1d_forward<T>(g, x.data(), w.data(), bias.defined() ? bias.data() : std::span<const T>{}, out);
    std::vector<Tensor<T>> inputs{x, w};
    if (bias.defined()) inputs.push_back(bias);
    return make_result<T>("conv1d", {g.batch, g.out_channels, g.out_length}, std::move(out), std::move(inputs),
                          [g](Node<T>& n) {
                              Node<T>& xn = *n.inputs[0];
                              Node<T>& wn = *n.inputs[1];
                              Node<T>* bn = n.inputs.size() > 2 ? n.inputs[2].get() : nullptr;
                              if (xn.requires_grad) kp::conv1d_backward_input<T>(g, n.grad, wn.value, xn.grad_buffer());
                              const bool want_b = bn && bn->requires_grad;
                              if (wn.requires_grad || want_b) {
                                  std::vector<T> discard;
                                  std::span<T> gw;
                                  if (wn.requires_grad) {
                                      gw = wn.grad_buffer();
                                  } else {
                                      discard.assign(wn.value.size(), T(0));
                                      gw = discard;
                                  }
                                  kp::conv1d_backward_weight<T>(g, xn.value, n.grad, gw,
                                                                want_b ? bn->grad_buffer() : std::span<T>{});
                              }
                          });
}

template <typename T>
Tensor<T> conv_transpose1d(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& bias, std::size_t stride,
                           std::size_t padding, std::size_t output_padding) {
    require_rank(x, 3, "conv_transpose1d");
    require_rank(w, 3, "conv_transpose1d weight");
    if (w.dim(0) != x.dim(1))
        fail(ErrorKind::ShapeMismatch, "conv_transpose1d: input has " + std::to_string(x.dim(1)) +
                                           " channels, weight expects " + std::to_string(w.dim(0)));
    if (stride < 1 || output_padding >= stride)
        fail(ErrorKind::ShapeMismatch, "conv_transpose1d: output_padding must be smaller than stride");
    const std::size_t B = x.dim(0), Cin = x.dim(1), Tin = x.dim(2), Cout = w.dim(1), K = w.dim(2);
    const long out_len = long((Tin - 1) * stride + K + output_padding) - long(2 * padding);
    if (out_len < 1) fail(ErrorKind::ShapeMismatch, "conv_transpose1d: empty output");
    if (bias.defined() && bias.shape() != Shape{Cout})
        fail(ErrorKind::ShapeMismatch, "conv_transpose1d: bias must be [out_channels]");
    // Seen as a conv1d from the output back to the input.
    const auto g = kernels::Conv1dGeometry::make(B, Cout, Cin, std::size_t(out_len), K, stride, padding, 1);
    if (g.out_length != Tin) fail(ErrorKind::ShapeMismatch, "conv_transpose1d: inconsistent geometry");
    std::vector<T> out(g.input_size(), T(0));
    kp::conv1d_backward_input<T>(g, x.data(), w.data(), out);
    if (bias.defined())
        for (std::size_t b = 0; b < B; ++b)
            for (std::size_t c = 0; c < Cout; ++c)
                for (std::size_t t = 0; t < g.in_length; ++t) out[(b * Cout + c) * g.in_length + t] += bias.data()[c];
    std::vector<Tensor<T>> inputs{x, w};
    if (bias.defined()) inputs.push_back(bias);
    return make_result<T>(
        "conv_transpose1d", {B, Cout, g.in_length}, std::move(out), std::move(inputs), [g](Node<T>& n) {
            Node<T>& xn = *n.inputs[0];
            Node<T>& wn = *n.inputs[1];
            Node<T>* bn = n.inputs.size() > 2 ? n.inputs[2].get() : nullptr;
            if (xn.requires_grad) {
                std::vector<T> tmp(g.output_size());
                kp::conv1d_forward<T>(g, n.grad, wn.value, {}, tmp);
                auto gx = xn.grad_buffer();
                for (std::size_t i = 0; i < tmp.size(); ++i) gx[i] += tmp[i];
            }
            if (wn.requires_grad) kp::conv1d_backward_weight<T>(g, n.grad, xn.value, wn.grad_buffer(), {});
            if (bn && bn->requires_grad) {
                auto gb = bn->grad_buffer();
                for (std::size_t b = 0; b < g.batch; ++b)
                    for (std::size_t c = 0; c < g.in_channels; ++c) {
                        T s = 0;
                        for (std::size_t t = 0; t < g.in_length; ++t) s += n.grad[(b * g.in_channels + c) * g.in_length + t];
                        gb[c] += s;
                    }
            }
        });
}

template <typename T>
Tensor<T> pad_time(const Tensor<T>& x, std::size_t left, std::size_t right) {
    require_rank(x, 3, "pad_time");
    const std::size_t rows = x.dim(0) * x.dim(1), L = x.dim(2), Lo = L + left + right;
    std::vector<T> out(rows * Lo, T(0));
    for (std::size_t r = 0; r < rows; ++r)
        std::copy_n(x.data().begin() + std::ptrdiff_t(r * L), L, out.begin() + std::ptrdiff_t(r * Lo + left));
    return make_result<T>("pad_time", {x.dim(0), x.dim(1), Lo}, std::move(out), {x}, [rows, L, Lo, left](Node<T>& n) {
        auto g = n.inputs[0]->grad_buffer();
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t t = 0; t < L; ++t) g[r * L + t] += n.grad[r * Lo + left + t];
    });
}

template <typename T>
Tensor<T> crop_time(const Tensor<T>& x, std::size_t start, std::size_t length) {
    require_rank(x, 3, "crop_time");
    const std::size_t rows = x.dim(0) * x.dim(1), L = x.dim(2);
    if (start + length > L) fail(ErrorKind::ShapeMismatch, "crop_time: window exceeds signal");
    std::vector<T> out(rows * length);
    for (std::size_t r = 0; r < rows; ++r)
        std::copy_n(x.data().begin() + std::ptrdiff_t(r * L + start), length, out.begin() + std::ptrdiff_t(r * length));
    return make_result<T>("crop_time", {x.dim(0), x.dim(1), length}, std::move(out), {x},
                          [rows, L, start, length](Node<T>& n) {
                              auto g = n.inputs[0]->grad_buffer();
                              for (std::size_t r = 0; r < rows; ++r)
                                  for (std::size_t t = 0; t < length; ++t) g[r * L + start + t] += n.grad[r * length + t];
                          });
}

template <typename T>
Tensor<T> gather_columns(const Tensor<T>& table, const std::vector<int>& index, std::size_t batch,
                         std::size_t frames) {
    require_rank(table, 2, "gather_columns");
    const std::size_t K = table.dim(0), D = table.dim(1);
    if (index.size() != batch * frames) fail(ErrorKind::ShapeMismatch, "gather_columns: index count mismatch");
    for (int i : index)
        if (i < 0 || std::size_t(i) >= K)
            fail(ErrorKind::InvalidToken, "token " + std::to_string(i) + " outside [0, " + std::to_string(K) + ")");
    std::vector<T> out(batch * D * frames);
    const auto tv = table.data();
    for (std::size_t b = 0; b < batch; ++b)
        for (std::size_t f = 0; f < frames; ++f) {
            const std::size_t row = std::size_t(index[b * frames + f]) * D;
            for (std::size_t d = 0; d < D; ++d) out[(b * D + d) * frames + f] = tv[row + d];
        }
    return make_result<T>("gather_columns", {batch, D, frames}, std::move(out), {table},
                          [index, batch, frames, D](Node<T>& n) {
                              auto g = n.inputs[0]->grad_buffer();
                              for (std::size_t b = 0; b < batch; ++b)
                                  for (std::size_t f = 0; f < frames; ++f) {
                                      const std::size_t row = std::size_t(index[b * frames + f]) * D;
                                      for (std::size_t d = 0; d < D; ++d) g[row + d] += n.grad[(b * D + d) * frames + f];
                                  }
                          });
}

template <typename T>
Tensor<T> matmul_const(const Tensor<T>& x, const std::vector<T>& matrix, std::size_t m) {
    const std::size_t n_in = x.shape().back();
    if (matrix.size() != m * n_in) fail(ErrorKind::ShapeMismatch, "matmul_const: matrix does not match input width");
    const std::size_t rows = x.numel() / n_in;
    std::vector<T> out(rows * m, T(0));
    const auto xv = x.data();
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t i = 0; i < m; ++i) {
            T s = 0;
            const T* w = matrix.data() + i * n_in;
            const T* v = xv.data() + r * n_in;
            for (std::size_t j = 0; j < n_in; ++j) s += w[j] * v[j];
            out[r * m + i] = s;
        }
    Shape shape = x.shape();
    shape.back() = m;
    return make_result<T>("matmul_const", std::move(shape), std::move(out), {x},
                          [matrix, rows, m, n_in](Node<T>& n) {
                              auto g = n.inputs[0]->grad_buffer();
                              for (std::size_t r = 0; r < rows; ++r)
                                  for (std::size_t i = 0; i < m; ++i) {
                                      const T gi = n.grad[r * m + i];
                                      if (gi == T(0)) continue;
                                      const T* w = matrix.data() + i * n_in;
                                      T* dst = g.data() + r * n_in;
                                      for (std::size_t j = 0; j < n_in; ++j) dst[j] += gi * w[j];
                                  }
                          });
}

template <typename T>
Tensor<T> upsample(const Tensor<T>& x, const PolyphaseUpsampler& up) {
    require_rank(x, 3, "upsample");
    const std::size_t rows = x.dim(0) * x.dim(1), L = x.dim(2), f = std::size_t(up.factor());
    std::vector<T> out(rows * L * f);
    for (std::size_t r = 0; r < rows; ++r)
        up.apply<T>(x.data().subspan(r * L, L), std::span<T>(out).subspan(r * L * f, L * f));
    // The interpolator is captured by value so the graph owns its taps.
    return make_result<T>("upsample", {x.dim(0), x.dim(1), L * f}, std::move(out), {x},
                          [up, rows, L, f](Node<T>& n) {
                              auto g = n.inputs[0]->grad_buffer();
                              for (std::size_t r = 0; r < rows; ++r)
                                  up.apply_adjoint<T>(std::span<const T>(n.grad).subspan(r * L * f, L * f),
                                                      g.subspan(r * L, L));
                          });
}

#define SDC_INSTANTIATE(T)                                                                                        \
    template Tensor<T> add(const Tensor<T>&, const Tensor<T>&);                                                   \
    template Tensor<T> sub(const Tensor<T>&, const Tensor<T>&);                                                   \
    template Tensor<T> mul(const Tensor<T>&, const Tensor<T>&);                                                   \
    template Tensor<T> scale(const Tensor<T>&, T);                                                                \
    template Tensor<T> add_scalar(const Tensor<T>&, T);                                                           \
    template Tensor<T> square(const Tensor<T>&);                                                                  \
    template Tensor<T> abs(const Tensor<T>&);                                                                     \
    template Tensor<T> log(const Tensor<T>&);                                                                     \
    template Tensor<T> tanh(const Tensor<T>&);                                                                    \
    template Tensor<T> leaky_relu(const Tensor<T>&, T);                                                           \
    template Tensor<T> snake(const Tensor<T>&, const Tensor<T>&);                                                 \
    template Tensor<T> snake(const Tensor<T>&, T);                                                                \
    template Tensor<T> sum(const Tensor<T>&);                                                                     \
    template Tensor<T> mean(const Tensor<T>&);                                                                    \
    template Tensor<T> reshape(const Tensor<T>&, Shape);                                                          \
    template Tensor<T> conv1d(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&, std::size_t, std::size_t,     \
                              std::size_t);                                                                       \
    template Tensor<T> conv_transpose1d(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&, std::size_t,        \
                                        std::size_t, std::size_t);                                                \
    template Tensor<T> pad_time(const Tensor<T>&, std::size_t, std::size_t);                                      \
    template Tensor<T> crop_time(const Tensor<T>&, std::size_t, std::size_t);                                     \
    template Tensor<T> gather_columns(const Tensor<T>&, const std::vector<int>&, std::size_t, std::size_t);       \
    template Tensor<T> matmul_const(const Tensor<T>&, const std::vector<T>&, std::size_t);                        \
    template Tensor<T> upsample(const Tensor<T>&, const PolyphaseUpsampler&);

SDC_INSTANTIATE(float)
SDC_INSTANTIATE(double)
#undef SDC_INSTANTIATE

}  // namespace sdc::ad
