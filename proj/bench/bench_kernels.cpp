// Serial reference vs parallel kernels on shapes taken from the default branches.
// Run with OMP_NUM_THREADS to compare thread counts.
#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "sdc/kernels/conv.hpp"

namespace k = sdc::kernels;

namespace {

std::vector<float> noise(std::size_t n, unsigned seed) {
    std::mt19937 rng(seed);
    std::normal_distribution<float> d(0.f, 1.f);
    std::vector<float> v(n);
    for (auto& x : v) x = d(rng);
    return v;
}

// args: channels, length, kernel, stride
k::Conv1dGeometry geometry(const benchmark::State& st) {
    const auto c = static_cast<std::size_t>(st.range(0));
    const auto len = static_cast<std::size_t>(st.range(1));
    const auto ker = static_cast<std::size_t>(st.range(2));
    const auto stride = static_cast<std::size_t>(st.range(3));
    return k::Conv1dGeometry::make(1, c, stride > 1 ? 2 * c : c, len, ker, stride, stride > 1 ? 0 : ker / 2);
}

void conv_args(benchmark::internal::Benchmark* b) {
    b->Args({16, 8000, 7, 1})->Args({32, 4000, 3, 1})->Args({64, 1000, 3, 1})->Args({16, 8000, 4, 2})
        ->Args({64, 1000, 10, 5});
}

template <bool Parallel>
void BM_gemm(benchmark::State& st) {
    const auto M = static_cast<std::size_t>(st.range(0)), N = static_cast<std::size_t>(st.range(1)),
               K = static_cast<std::size_t>(st.range(2));
    const auto A = noise(M * K, 1), B = noise(K * N, 2);
    std::vector<float> C(M * N);
    for (auto _ : st) {
        if constexpr (Parallel)
            k::parallel::gemm(M, N, K, A.data(), K, B.data(), N, C.data(), N);
        else
            k::serial::gemm(M, N, K, A.data(), K, B.data(), N, C.data(), N);
        benchmark::DoNotOptimize(C.data());
    }
    st.counters["GFLOP/s"] =
        benchmark::Counter(2e-9 * double(M * N * K), benchmark::Counter::kIsIterationInvariantRate);
}

template <bool Parallel>
void BM_conv_forward(benchmark::State& st) {
    const auto g = geometry(st);
    const auto in = noise(g.input_size(), 3), w = noise(g.weight_size(), 4), bias = noise(g.out_channels, 5);
    std::vector<float> out(g.output_size());
    for (auto _ : st) {
        if constexpr (Parallel)
            k::parallel::conv1d_forward<float>(g, in, w, bias, out);
        else
            k::serial::conv1d_forward<float>(g, in, w, bias, out);
        benchmark::DoNotOptimize(out.data());
    }
}

template <bool Parallel>
void BM_conv_backward_input(benchmark::State& st) {
    const auto g = geometry(st);
    const auto go = noise(g.output_size(), 6), w = noise(g.weight_size(), 7);
    std::vector<float> gi(g.input_size());
    for (auto _ : st) {
        if constexpr (Parallel)
            k::parallel::conv1d_backward_input<float>(g, go, w, gi);
        else
            k::serial::conv1d_backward_input<float>(g, go, w, gi);
        benchmark::DoNotOptimize(gi.data());
    }
}

template <bool Parallel>
void BM_conv_backward_weight(benchmark::State& st) {
    const auto g = geometry(st);
    const auto in = noise(g.input_size(), 8), go = noise(g.output_size(), 9);
    std::vector<float> gw(g.weight_size()), gb(g.out_channels);
    for (auto _ : st) {
        if constexpr (Parallel)
            k::parallel::conv1d_backward_weight<float>(g, in, go, gw, gb);
        else
            k::serial::conv1d_backward_weight<float>(g, in, go, gw, gb);
        benchmark::DoNotOptimize(gw.data());
    }
}

// args: frames, entries, dim
template <bool Parallel>
void BM_nearest(benchmark::State& st) {
    const auto frames = static_cast<std::size_t>(st.range(0)), entries = static_cast<std::size_t>(st.range(1)),
               dim = static_cast<std::size_t>(st.range(2));
    const auto v = noise(dim * frames, 10), book = noise(entries * dim, 11);
    std::vector<int> tokens(frames);
    for (auto _ : st) {
        if constexpr (Parallel)
            k::parallel::nearest_codewords<float>(v, 1, dim, frames, book, entries, tokens);
        else
            k::serial::nearest_codewords<float>(v, 1, dim, frames, book, entries, tokens);
        benchmark::DoNotOptimize(tokens.data());
    }
}

}  // namespace

BENCHMARK(BM_gemm<false>)->Args({16, 8000, 112})->Args({64, 1000, 192})->Args({256, 256, 256});
BENCHMARK(BM_gemm<true>)->Args({16, 8000, 112})->Args({64, 1000, 192})->Args({256, 256, 256});
BENCHMARK(BM_conv_forward<false>)->Apply(conv_args);
BENCHMARK(BM_conv_forward<true>)->Apply(conv_args);
BENCHMARK(BM_conv_backward_input<false>)->Apply(conv_args);
BENCHMARK(BM_conv_backward_input<true>)->Apply(conv_args);
BENCHMARK(BM_conv_backward_weight<false>)->Apply(conv_args);
BENCHMARK(BM_conv_backward_weight<true>)->Apply(conv_args);
BENCHMARK(BM_nearest<false>)->Args({25, 1024, 64})->Args({50, 1024, 64});
BENCHMARK(BM_nearest<true>)->Args({25, 1024, 64})->Args({50, 1024, 64});

BENCHMARK_MAIN();
