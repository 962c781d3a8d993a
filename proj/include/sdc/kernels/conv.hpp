#pragma once

#include <cstddef>
#include <span>

// Dense kernels behind the autodiff ops. Every kernel exists twice:
// `parallel::` is the OpenMP/im2col/GEMM path used at runtime, `serial::` is a
// direct transcription of the definition kept as the test reference.
// Parallel kernels split work so that each output element is owned by exactly
// one thread, which keeps results independent of the thread count.

namespace sdc::kernels {

// input [batch, in_channels, in_length], weight [out_channels, in_channels, kernel],
// output [batch, out_channels, out_length].
struct Conv1dGeometry {
    std::size_t batch = 1;
    std::size_t in_channels = 1;
    std::size_t out_channels = 1;
    std::size_t in_length = 1;
    std::size_t out_length = 1;
    std::size_t kernel = 1;
    std::size_t stride = 1;
    std::size_t padding = 0;
    std::size_t dilation = 1;

    // Computes out_length; throws ShapeMismatch when it would be < 1.
    static Conv1dGeometry make(std::size_t batch, std::size_t in_channels, std::size_t out_channels,
                               std::size_t in_length, std::size_t kernel, std::size_t stride = 1,
                               std::size_t padding = 0, std::size_t dilation = 1);

    std::size_t input_size() const { return batch * in_channels * in_length; }
    std::size_t output_size() const { return batch * out_channels * out_length; }
    std::size_t weight_size() const { return out_channels * in_channels * kernel; }
};

namespace parallel {

// C[M x N] += A[M x K] * B[K x N], row-major with leading dimensions.
template <typename T>
void gemm(std::size_t M, std::size_t N, std::size_t K, const T* A, std::size_t lda, const T* B,
          std::size_t ldb, T* C, std::size_t ldc);

// out = conv(in, weight) + bias. bias may be empty.
template <typename T>
void conv1d_forward(const Conv1dGeometry& g, std::span<const T> in, std::span<const T> weight,
                    std::span<const T> bias, std::span<T> out);

// grad_in += d out / d in applied to grad_out.
template <typename T>
void conv1d_backward_input(const Conv1dGeometry& g, std::span<const T> grad_out, std::span<const T> weight,
                           std::span<T> grad_in);

// grad_weight += ..., grad_bias += ... (grad_bias may be empty).
template <typename T>
void conv1d_backward_weight(const Conv1dGeometry& g, std::span<const T> in, std::span<const T> grad_out,
                            std::span<T> grad_weight, std::span<T> grad_bias);

// vectors laid out [batch, dim, frames]; codebook [entries, dim].
// tokens[b * frames + f] receives the nearest entry (lowest index on ties).
template <typename T>
void nearest_codewords(std::span<const T> vectors, std::size_t batch, std::size_t dim, std::size_t frames,
                       std::span<const T> codebook, std::size_t entries, std::span<int> tokens);

}  // namespace parallel

namespace serial {

template <typename T>
void gemm(std::size_t M, std::size_t N, std::size_t K, const T* A, std::size_t lda, const T* B,
          std::size_t ldb, T* C, std::size_t ldc);

template <typename T>
void conv1d_forward(const Conv1dGeometry& g, std::span<const T> in, std::span<const T> weight,
                    std::span<const T> bias, std::span<T> out);

template <typename T>
void conv1d_backward_input(const Conv1dGeometry& g, std::span<const T> grad_out, std::span<const T> weight,
                           std::span<T> grad_in);

template <typename T>
void conv1d_backward_weight(const Conv1dGeometry& g, std::span<const T> in, std::span<const T> grad_out,
                            std::span<T> grad_weight, std::span<T> grad_bias);

template <typename T>
void nearest_codewords(std::span<const T> vectors, std::size_t batch, std::size_t dim, std::size_t frames,
                       std::span<const T> codebook, std::size_t entries, std::span<int> tokens);

}  // namespace serial

}  // namespace sdc::kernels
