#include <algorithm>
#include <cstring>
#include <vector>

#include "sdc/kernels/conv.hpp"

namespace sdc::kernels::parallel {
namespace {

constexpr std::size_t kRowBlock = 4;
constexpr std::size_t kColBlock = 32;

template <typename T>
std::vector<T>& scratch(int slot) {
    thread_local std::vector<T> buffers[3];
    return buffers[slot];
}

// out[c][r] = in[r][c] for an R x C matrix.
template <typename T>
void transpose(const T* in, std::size_t rows, std::size_t cols, T* out) {
#pragma omp parallel for schedule(static)
    for (long c = 0; c < long(cols); ++c)
        for (std::size_t r = 0; r < rows; ++r) out[std::size_t(c) * rows + r] = in[r * cols + std::size_t(c)];
}

// col[(ci * kernel + k) * out_length + t] = in[ci][t * stride + k * dilation - padding].
template <typename T>
void im2col(const Conv1dGeometry& g, const T* in, T* col) {
    const long rows = long(g.in_channels * g.kernel);
#pragma omp parallel for schedule(static)
    for (long row = 0; row < rows; ++row) {
        const std::size_t ci = std::size_t(row) / g.kernel, k = std::size_t(row) % g.kernel;
        const T* x = in + ci * g.in_length;
        T* dst = col + std::size_t(row) * g.out_length;
        const long offset = long(k * g.dilation) - long(g.padding);
        for (std::size_t t = 0; t < g.out_length; ++t) {
            const long src = long(t * g.stride) + offset;
            dst[t] = (src >= 0 && src < long(g.in_length)) ? x[src] : T(0);
        }
    }
}

// Scatter-add of im2col's transpose; each thread owns whole input channels.
template <typename T>
void col2im_add(const Conv1dGeometry& g, const T* col, T* in) {
#pragma omp parallel for schedule(static)
    for (long ci = 0; ci < long(g.in_channels); ++ci) {
        T* x = in + std::size_t(ci) * g.in_length;
        for (std::size_t k = 0; k < g.kernel; ++k) {
            const T* src = col + (std::size_t(ci) * g.kernel + k) * g.out_length;
            const long offset = long(k * g.dilation) - long(g.padding);
            for (std::size_t t = 0; t < g.out_length; ++t) {
                const long dst = long(t * g.stride) + offset;
                if (dst >= 0 && dst < long(g.in_length)) x[dst] += src[t];
            }
        }
    }
}

// The tile kernels read B through a table of row pointers: row k of B starts
// at brows[k] + n0. A plain matrix uses B + k * ldb; an unpadded unit-stride
// convolution points straight into shifted views of its (padded) input.
template <typename T>
void gemm_full_tile(std::size_t K, const T* A, std::size_t lda, const T* const* brows, std::size_t n0, T* C,
                    std::size_t ldc) {
    // GCC vector extension: one 64-byte register per lane group.
    typedef T Vec __attribute__((vector_size(64)));
    constexpr std::size_t L = 64 / sizeof(T), NV = kColBlock / L;
    Vec acc[kRowBlock][NV] = {};
    for (std::size_t k = 0; k < K; ++k) {
        const T* b = brows[k] + n0;
        Vec bv[NV];
        for (std::size_t v = 0; v < NV; ++v) std::memcpy(&bv[v], b + v * L, sizeof(Vec));
        for (std::size_t i = 0; i < kRowBlock; ++i) {
            const T w = A[i * lda + k];
            for (std::size_t v = 0; v < NV; ++v) acc[i][v] += w * bv[v];
        }
    }
    for (std::size_t i = 0; i < kRowBlock; ++i)
        for (std::size_t v = 0; v < NV; ++v) {
            T lanes[L];
            std::memcpy(lanes, &acc[i][v], sizeof(Vec));
            T* c = C + i * ldc + v * L;
            for (std::size_t j = 0; j < L; ++j) c[j] += lanes[j];
        }
}

// Partial tiles are zero-padded into packed buffers so they run through the
// same vectorised kernel as full tiles.
template <typename T>
void gemm_edge_tile(std::size_t rows, std::size_t cols, std::size_t K, const T* A, std::size_t lda,
                    const T* const* brows, std::size_t n0, T* C, std::size_t ldc) {
    thread_local std::vector<T> a_pack, b_pack;
    thread_local std::vector<const T*> b_rows;
    a_pack.assign(kRowBlock * K, T(0));
    b_pack.assign(K * kColBlock, T(0));
    b_rows.resize(K);
    for (std::size_t i = 0; i < rows; ++i) std::copy_n(A + i * lda, K, a_pack.data() + i * K);
    for (std::size_t k = 0; k < K; ++k) {
        std::copy_n(brows[k] + n0, cols, b_pack.data() + k * kColBlock);
        b_rows[k] = b_pack.data() + k * kColBlock;
    }
    T c_tile[kRowBlock * kColBlock] = {};
    gemm_full_tile(K, a_pack.data(), K, b_rows.data(), 0, c_tile, kColBlock);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) C[i * ldc + j] += c_tile[i * kColBlock + j];
}

// C[M x N] += A[M x K] * B, B given by row pointers.
template <typename T>
void gemm_rows(std::size_t M, std::size_t N, std::size_t K, const T* A, std::size_t lda, const T* const* brows, T* C,
               std::size_t ldc) {
    // Column blocks outermost so a K x kColBlock panel of B stays in cache
    // while every row block of A passes over it.
    const long col_blocks = long((N + kColBlock - 1) / kColBlock);
#pragma omp parallel for schedule(static)
    for (long cb = 0; cb < col_blocks; ++cb) {
        const std::size_t n0 = std::size_t(cb) * kColBlock;
        const std::size_t cols = std::min(kColBlock, N - n0);
        for (std::size_t m0 = 0; m0 < M; m0 += kRowBlock) {
            const std::size_t rows = std::min(kRowBlock, M - m0);
            if (rows == kRowBlock && cols == kColBlock)
                gemm_full_tile(K, A + m0 * lda, lda, brows, n0, C + m0 * ldc + n0, ldc);
            else
                gemm_edge_tile(rows, cols, K, A + m0 * lda, lda, brows, n0, C + m0 * ldc + n0, ldc);
        }
    }
}

template <typename T>
std::vector<const T*>& row_table(std::size_t K) {
    thread_local std::vector<const T*> table;
    table.resize(K);
    return table;
}

// C[M x N] += A[M x K] * B^T where row j of B starts at brows[j]: every output
// is a dot product of two contiguous rows.
template <typename T>
void gemm_nt_rows(std::size_t M, std::size_t N, std::size_t K, const T* A, std::size_t lda, const T* const* brows,
                  T* C, std::size_t ldc) {
    constexpr std::size_t R = 4, V = 64 / sizeof(T);
    const std::size_t kv = K / V * V;
    const long row_blocks = long((M + R - 1) / R);
#pragma omp parallel for schedule(static)
    for (long rb = 0; rb < row_blocks; ++rb) {
        const std::size_t i0 = std::size_t(rb) * R, ri = std::min(R, M - i0);
        for (std::size_t j0 = 0; j0 < N; j0 += R) {
            const std::size_t rj = std::min(R, N - j0);
            T acc[R][R][V] = {};
            if (ri == R && rj == R) {
                for (std::size_t k = 0; k < kv; k += V)
                    for (std::size_t i = 0; i < R; ++i) {
                        const T* a = A + (i0 + i) * lda + k;
                        for (std::size_t j = 0; j < R; ++j) {
                            const T* b = brows[j0 + j] + k;
#pragma omp simd
                            for (std::size_t v = 0; v < V; ++v) acc[i][j][v] += a[v] * b[v];
                        }
                    }
            } else {
                for (std::size_t k = 0; k < kv; k += V)
                    for (std::size_t i = 0; i < ri; ++i)
                        for (std::size_t j = 0; j < rj; ++j)
                            for (std::size_t v = 0; v < V; ++v)
                                acc[i][j][v] += A[(i0 + i) * lda + k + v] * brows[j0 + j][k + v];
            }
            for (std::size_t i = 0; i < ri; ++i)
                for (std::size_t j = 0; j < rj; ++j) {
                    T s = 0;
                    for (std::size_t v = 0; v < V; ++v) s += acc[i][j][v];
                    for (std::size_t k = kv; k < K; ++k) s += A[(i0 + i) * lda + k] * brows[j0 + j][k];
                    C[(i0 + i) * ldc + j0 + j] += s;
                }
        }
    }
}

// Zero-padded copy of one batch item: [channels, padding + length + padding].
template <typename T>
void pad_input(const Conv1dGeometry& g, const T* in, std::vector<T>& out) {
    const std::size_t lp = g.in_length + 2 * g.padding;
    out.assign(g.in_channels * lp, T(0));
    for (std::size_t c = 0; c < g.in_channels; ++c)
        std::copy_n(in + c * g.in_length, g.in_length, out.data() + c * lp + g.padding);
}

// Row (ci * kernel + k) of the implicit im2col matrix of a unit-stride conv.
template <typename T>
void shifted_rows(const Conv1dGeometry& g, const T* padded, std::vector<const T*>& table) {
    const std::size_t lp = g.in_length + 2 * g.padding;
    table.resize(g.in_channels * g.kernel);
    for (std::size_t c = 0; c < g.in_channels; ++c)
        for (std::size_t k = 0; k < g.kernel; ++k) table[c * g.kernel + k] = padded + c * lp + k * g.dilation;
}

}  // namespace

template <typename T>
void gemm(std::size_t M, std::size_t N, std::size_t K, const T* A, std::size_t lda, const T* B, std::size_t ldb,
          T* C, std::size_t ldc) {
    auto& table = row_table<T>(K);
    for (std::size_t k = 0; k < K; ++k) table[k] = B + k * ldb;
    gemm_rows(M, N, K, A, lda, table.data(), C, ldc);
}

template <typename T>
void conv1d_forward(const Conv1dGeometry& g, std::span<const T> in, std::span<const T> weight,
                    std::span<const T> bias, std::span<T> out) {
    const std::size_t rows = g.in_channels * g.kernel;
    auto& col = scratch<T>(0);
    std::vector<const T*> table;
    for (std::size_t b = 0; b < g.batch; ++b) {
        const T* x = in.data() + b * g.in_channels * g.in_length;
        T* y = out.data() + b * g.out_channels * g.out_length;
        for (std::size_t co = 0; co < g.out_channels; ++co)
            std::fill_n(y + co * g.out_length, g.out_length, bias.empty() ? T(0) : bias[co]);
        if (g.stride == 1) {
            pad_input(g, x, col);
            shifted_rows(g, col.data(), table);
        } else {
            col.resize(rows * g.out_length);
            im2col(g, x, col.data());
            table.resize(rows);
            for (std::size_t r = 0; r < rows; ++r) table[r] = col.data() + r * g.out_length;
        }
        gemm_rows<T>(g.out_channels, g.out_length, rows, weight.data(), rows, table.data(), y, g.out_length);
    }
}

template <typename T>
void conv1d_backward_input(const Conv1dGeometry& g, std::span<const T> grad_out, std::span<const T> weight,
                           std::span<T> grad_in) {
    const std::size_t reach = (g.kernel - 1) * g.dilation;
    if (g.stride == 1 && reach >= g.padding) {
        // With unit stride the input gradient is itself a convolution of
        // grad_out with the channel-swapped, time-reversed kernel.
        auto& flipped = scratch<T>(1);
        flipped.resize(g.weight_size());
        for (std::size_t co = 0; co < g.out_channels; ++co)
            for (std::size_t ci = 0; ci < g.in_channels; ++ci)
                for (std::size_t k = 0; k < g.kernel; ++k)
                    flipped[(ci * g.out_channels + co) * g.kernel + (g.kernel - 1 - k)] =
                        weight[(co * g.in_channels + ci) * g.kernel + k];
        Conv1dGeometry back = g;
        back.in_channels = g.out_channels;
        back.out_channels = g.in_channels;
        back.in_length = g.out_length;
        back.out_length = g.in_length;
        back.padding = reach - g.padding;
        auto& tmp = scratch<T>(2);
        tmp.resize(back.output_size());
        conv1d_forward<T>(back, grad_out, flipped, {}, tmp);
        for (std::size_t i = 0; i < tmp.size(); ++i) grad_in[i] += tmp[i];
        return;
    }
    const std::size_t rows = g.in_channels * g.kernel;
    auto& wt = scratch<T>(1);
    wt.resize(rows * g.out_channels);
    transpose(weight.data(), g.out_channels, rows, wt.data());
    auto& col = scratch<T>(0);
    col.resize(rows * g.out_length);
    for (std::size_t b = 0; b < g.batch; ++b) {
        std::fill(col.begin(), col.end(), T(0));
        gemm<T>(rows, g.out_length, g.out_channels, wt.data(), g.out_channels,
                grad_out.data() + b * g.out_channels * g.out_length, g.out_length, col.data(), g.out_length);
        col2im_add(g, col.data(), grad_in.data() + b * g.in_channels * g.in_length);
    }
}

template <typename T>
void conv1d_backward_weight(const Conv1dGeometry& g, std::span<const T> in, std::span<const T> grad_out,
                            std::span<T> grad_weight, std::span<T> grad_bias) {
    const std::size_t rows = g.in_channels * g.kernel;
    auto& col = scratch<T>(0);
    std::vector<const T*> table;
    for (std::size_t b = 0; b < g.batch; ++b) {
        const T* dy = grad_out.data() + b * g.out_channels * g.out_length;
        const T* x = in.data() + b * g.in_channels * g.in_length;
        if (g.out_length >= 512) {
            // dW[co][r] = <dy[co], row r of im2col>; unit stride reads the rows in place.
            if (g.stride == 1) {
                pad_input(g, x, col);
                shifted_rows(g, col.data(), table);
            } else {
                col.resize(rows * g.out_length);
                im2col(g, x, col.data());
                table.resize(rows);
                for (std::size_t r = 0; r < rows; ++r) table[r] = col.data() + r * g.out_length;
            }
            gemm_nt_rows<T>(g.out_channels, rows, g.out_length, dy, g.out_length, table.data(), grad_weight.data(),
                            rows);
        } else {
            // Short rows: a transposed copy feeds the register-tiled kernel better.
            col.resize(rows * g.out_length);
            im2col(g, x, col.data());
            auto& colt = scratch<T>(2);
            colt.resize(rows * g.out_length);
            transpose(col.data(), rows, g.out_length, colt.data());
            gemm<T>(g.out_channels, rows, g.out_length, dy, g.out_length, colt.data(), rows, grad_weight.data(),
                    rows);
        }
        if (!grad_bias.empty()) {
            for (std::size_t co = 0; co < g.out_channels; ++co) {
                T s = 0;
                const T* row = dy + co * g.out_length;
                for (std::size_t t = 0; t < g.out_length; ++t) s += row[t];
                grad_bias[co] += s;
            }
        }
    }
}

template <typename T>
void nearest_codewords(std::span<const T> vectors, std::size_t batch, std::size_t dim, std::size_t frames,
                       std::span<const T> codebook, std::size_t entries, std::span<int> tokens) {
    const long columns = long(batch * frames);
#pragma omp parallel for schedule(static)
    for (long c = 0; c < columns; ++c) {
        const std::size_t b = std::size_t(c) / frames, f = std::size_t(c) % frames;
        T v[512];
        std::vector<T> heap;
        T* vec = v;
        if (dim > 512) {
            heap.resize(dim);
            vec = heap.data();
        }
        for (std::size_t d = 0; d < dim; ++d) vec[d] = vectors[(b * dim + d) * frames + f];
        int best = 0;
        T best_dist = T(0);
        for (std::size_t e = 0; e < entries; ++e) {
            const T* row = codebook.data() + e * dim;
            T dist = 0;
            for (std::size_t d = 0; d < dim; ++d) {
                const T diff = vec[d] - row[d];
                dist += diff * diff;
            }
            if (e == 0 || dist < best_dist) {
                best_dist = dist;
                best = int(e);
            }
        }
        tokens[std::size_t(c)] = best;
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

}  // namespace sdc::kernels::parallel
