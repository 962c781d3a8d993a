#include "sdc/kernels/conv.hpp"

namespace sdc::kernels::serial {

template <typename T>
void gemm(std::size_t M, std::size_t N, std::size_t K, const T* A, std::size_t lda, const T* B, std::size_t ldb,
          T* C, std::size_t ldc) {
    for (std::size_t i = 0; i < M; ++i)
        for (std::size_t j = 0; j < N; ++j) {
            T s = 0;
            for (std::size_t k = 0; k < K; ++k) s += A[i * lda + k] * B[k * ldb + j];
            C[i * ldc + j] += s;
        }
}

template <typename T>
void conv1d_forward(const Conv1dGeometry& g, std::span<const T> in, std::span<const T> weight,
                    std::span<const T> bias, std::span<T> out) {
    for (std::size_t b = 0; b < g.batch; ++b)
        for (std::size_t co = 0; co < g.out_channels; ++co)
            for (std::size_t t = 0; t < g.out_length; ++t) {
                T s = bias.empty() ? T(0) : bias[co];
                for (std::size_t ci = 0; ci < g.in_channels; ++ci)
                    for (std::size_t k = 0; k < g.kernel; ++k) {
                        const long src = long(t * g.stride + k * g.dilation) - long(g.padding);
                        if (src < 0 || src >= long(g.in_length)) continue;
                        s += weight[(co * g.in_channels + ci) * g.kernel + k] *
                             in[(b * g.in_channels + ci) * g.in_length + std::size_t(src)];
                    }
                out[(b * g.out_channels + co) * g.out_length + t] = s;
            }
}

template <typename T>
void conv1d_backward_input(const Conv1dGeometry& g, std::span<const T> grad_out, std::span<const T> weight,
                           std::span<T> grad_in) {
    for (std::size_t b = 0; b < g.batch; ++b)
        for (std::size_t co = 0; co < g.out_channels; ++co)
            for (std::size_t t = 0; t < g.out_length; ++t) {
                const T dy = grad_out[(b * g.out_channels + co) * g.out_length + t];
                for (std::size_t ci = 0; ci < g.in_channels; ++ci)
                    for (std::size_t k = 0; k < g.kernel; ++k) {
                        const long src = long(t * g.stride + k * g.dilation) - long(g.padding);
                        if (src < 0 || src >= long(g.in_length)) continue;
                        grad_in[(b * g.in_channels + ci) * g.in_length + std::size_t(src)] +=
                            weight[(co * g.in_channels + ci) * g.kernel + k] * dy;
                    }
            }
}

template <typename T>
void conv1d_backward_weight(const Conv1dGeometry& g, std::span<const T> in, std::span<const T> grad_out,
                            std::span<T> grad_weight, std::span<T> grad_bias) {
    for (std::size_t b = 0; b < g.batch; ++b)
        for (std::size_t co = 0; co < g.out_channels; ++co)
            for (std::size_t t = 0; t < g.out_length; ++t) {
                const T dy = grad_out[(b * g.out_channels + co) * g.out_length + t];
                if (!grad_bias.empty()) grad_bias[co] += dy;
                for (std::size_t ci = 0; ci < g.in_channels; ++ci)
                    for (std::size_t k = 0; k < g.kernel; ++k) {
                        const long src = long(t * g.stride + k * g.dilation) - long(g.padding);
                        if (src < 0 || src >= long(g.in_length)) continue;
                        grad_weight[(co * g.in_channels + ci) * g.kernel + k] +=
                            dy * in[(b * g.in_channels + ci) * g.in_length + std::size_t(src)];
                    }
            }
}

template <typename T>
void nearest_codewords(std::span<const T> vectors, std::size_t batch, std::size_t dim, std::size_t frames,
                       std::span<const T> codebook, std::size_t entries, std::span<int> tokens) {
    for (std::size_t b = 0; b < batch; ++b)
        for (std::size_t f = 0; f < frames; ++f) {
            int best = 0;
            T best_dist = T(0);
            for (std::size_t e = 0; e < entries; ++e) {
                T dist = 0;
                for (std::size_t d = 0; d < dim; ++d) {
                    const T diff = vectors[(b * dim + d) * frames + f] - codebook[e * dim + d];
                    dist += diff * diff;
                }
                if (e == 0 || dist < best_dist) {
                    best_dist = dist;
                    best = int(e);
                }
            }
            tokens[b * frames + f] = best;
        }
}

#define SDC_INSTANTIATE(T)                                                                                     \
    template void gemm<T>(std::size_t, std::size_t, std::size_t, const T*, std::size_t, const T*, std::size_t, \
                          T*, std::size_t);                                                                    \
    template void conv1d_forward<T>(const Conv1dGeometry&, std::span<const T>, std::span<const T>,             \
                                    std::span<const T>, std::span<T>);                                         \
    template void conv1d_backward_input<T>(const Conv1dGeometry&, std::span<const T>, std::span<const T>,      \
                                           std::span<T>);                                                      \
    template void conv1d_backward_weight<T>(const Conv1dGeometry&, std::span<const T>, std::span<const T>,     \
                                            std::span<T>, std::span<T>);                                       \
    template void nearest_codewords<T>(std::span<const T>, std::size_t, std::size_t, std::size_t,              \
                                       std::span<const T>, std::size_t, std::span<int>);

SDC_INSTANTIATE(float)
SDC_INSTANTIATE(double)
#undef SDC_INSTANTIATE

}  // namespace sdc::kernels::serial
