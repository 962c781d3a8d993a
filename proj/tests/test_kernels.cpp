#include <omp.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "sdc/error.hpp"
#include "sdc/kernels/conv.hpp"

using namespace sdc::kernels;

namespace {

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

Conv1dGeometry random_geometry(std::mt19937_64& rng) {
    auto pick = [&](std::size_t lo, std::size_t hi) { return std::uniform_int_distribution<std::size_t>(lo, hi)(rng); };
    const std::size_t k = pick(1, 9), dil = pick(1, 3), stride = pick(1, 5);
    const std::size_t span = (k - 1) * dil + 1;
    const std::size_t len = span + pick(0, 150);
    return Conv1dGeometry::make(pick(1, 3), pick(1, 17), pick(1, 33), len, k, stride, pick(0, span / 2 + 1), dil);
}

// Straight from the definition, independent of both kernel namespaces.
std::vector<double> direct_conv(const Conv1dGeometry& g, const std::vector<double>& in, const std::vector<double>& w,
                                const std::vector<double>& b) {
    std::vector<double> out(g.output_size(), 0.0);
    for (std::size_t n = 0; n < g.batch; ++n)
        for (std::size_t o = 0; o < g.out_channels; ++o)
            for (std::size_t t = 0; t < g.out_length; ++t) {
                double acc = b.empty() ? 0.0 : b[o];
                for (std::size_t c = 0; c < g.in_channels; ++c)
                    for (std::size_t j = 0; j < g.kernel; ++j) {
                        const long pos = long(t * g.stride + j * g.dilation) - long(g.padding);
                        if (pos < 0 || pos >= long(g.in_length)) continue;
                        acc += w[(o * g.in_channels + c) * g.kernel + j] * in[(n * g.in_channels + c) * g.in_length + std::size_t(pos)];
                    }
                out[(n * g.out_channels + o) * g.out_length + t] = acc;
            }
    return out;
}

struct ThreadCount {
    int previous = omp_get_max_threads();
    explicit ThreadCount(int n) { omp_set_num_threads(n); }
    ~ThreadCount() { omp_set_num_threads(previous); }
};

}  // namespace

TEST_CASE("geometry") {
    const auto g = Conv1dGeometry::make(2, 3, 4, 100, 7, 2, 3, 1);
    CHECK(g.out_length == 50);
    CHECK(Conv1dGeometry::make(1, 1, 1, 10, 3, 1, 0, 4).out_length == 2);
    CHECK_THROWS_AS(Conv1dGeometry::make(1, 1, 1, 4, 5), sdc::Error);
}

TEST_CASE("gemm matches serial on ragged shapes") {
    std::mt19937_64 rng(11);
    for (int threads : {1, 4}) {
        ThreadCount tc(threads);
        for (std::size_t M : {1, 5, 16, 37})
            for (std::size_t N : {1, 7, 64, 131})
                for (std::size_t K : {1, 3, 70}) {
                    const std::size_t lda = K + 2, ldb = N + 1, ldc = N + 3;
                    const auto A = oracle::uniform(M * lda, rng), B = oracle::uniform(K * ldb, rng);
                    auto C1 = oracle::uniform(M * ldc, rng);
                    auto C2 = C1;
                    parallel::gemm(M, N, K, A.data(), lda, B.data(), ldb, C1.data(), ldc);
                    serial::gemm(M, N, K, A.data(), lda, B.data(), ldb, C2.data(), ldc);
                    CHECK(max_abs_diff(C1, C2) < 1e-11);
                }
    }
}

TEST_CASE("serial conv equals the definition") {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 20; ++trial) {
        const auto g = random_geometry(rng);
        const auto in = oracle::uniform(g.input_size(), rng), w = oracle::uniform(g.weight_size(), rng);
        const auto b = trial % 2 ? oracle::uniform(g.out_channels, rng) : std::vector<double>{};
        std::vector<double> out(g.output_size());
        serial::conv1d_forward<double>(g, in, w, b, out);
        CHECK(max_abs_diff(out, direct_conv(g, in, w, b)) < 1e-12);
    }
}

TEST_CASE("parallel conv matches serial") {
    std::mt19937_64 rng(13);
    for (int threads : {1, 4}) {
        ThreadCount tc(threads);
        for (int trial = 0; trial < 30; ++trial) {
            CAPTURE(trial);
            const auto g = random_geometry(rng);
            const auto in = oracle::uniform(g.input_size(), rng), w = oracle::uniform(g.weight_size(), rng);
            const auto b = oracle::uniform(g.out_channels, rng);
            const auto go = oracle::uniform(g.output_size(), rng);

            std::vector<double> o1(g.output_size()), o2(g.output_size());
            parallel::conv1d_forward<double>(g, in, w, b, o1);
            serial::conv1d_forward<double>(g, in, w, b, o2);
            CHECK(max_abs_diff(o1, o2) < 1e-11);

            // backward kernels accumulate, so start from a non-zero buffer
            auto gi1 = oracle::uniform(g.input_size(), rng);
            auto gi2 = gi1;
            parallel::conv1d_backward_input<double>(g, go, w, gi1);
            serial::conv1d_backward_input<double>(g, go, w, gi2);
            CHECK(max_abs_diff(gi1, gi2) < 1e-11);

            auto gw1 = oracle::uniform(g.weight_size(), rng), gb1 = oracle::uniform(g.out_channels, rng);
            auto gw2 = gw1, gb2 = gb1;
            parallel::conv1d_backward_weight<double>(g, in, go, gw1, gb1);
            serial::conv1d_backward_weight<double>(g, in, go, gw2, gb2);
            CHECK(max_abs_diff(gw1, gw2) < 1e-10);
            CHECK(max_abs_diff(gb1, gb2) < 1e-11);
        }
    }
}

TEST_CASE("backward kernels are adjoint to forward") {
    // <conv(x), y> == <x, conv^T(y)> and the same in the weight argument.
    std::mt19937_64 rng(14);
    for (int trial = 0; trial < 10; ++trial) {
        const auto g = random_geometry(rng);
        const auto x = oracle::uniform(g.input_size(), rng), w = oracle::uniform(g.weight_size(), rng);
        const auto y = oracle::uniform(g.output_size(), rng);
        const auto out = direct_conv(g, x, w, {});
        double lhs = 0;
        for (std::size_t i = 0; i < y.size(); ++i) lhs += out[i] * y[i];
        std::vector<double> gx(g.input_size(), 0.0), gw(g.weight_size(), 0.0);
        parallel::conv1d_backward_input<double>(g, y, w, gx);
        parallel::conv1d_backward_weight<double>(g, x, y, gw, {});
        double rx = 0, rw = 0;
        for (std::size_t i = 0; i < x.size(); ++i) rx += x[i] * gx[i];
        for (std::size_t i = 0; i < w.size(); ++i) rw += w[i] * gw[i];
        CHECK(rx == doctest::Approx(lhs).epsilon(1e-10));
        CHECK(rw == doctest::Approx(lhs).epsilon(1e-10));
    }
}

TEST_CASE("float kernels agree with serial") {
    std::mt19937_64 rng(15);
    const auto g = Conv1dGeometry::make(2, 32, 64, 400, 7, 1, 9, 3);
    auto cast = [](const std::vector<double>& v) { return std::vector<float>(v.begin(), v.end()); };
    const auto in = cast(oracle::uniform(g.input_size(), rng)), w = cast(oracle::uniform(g.weight_size(), rng));
    std::vector<float> o1(g.output_size()), o2(g.output_size());
    parallel::conv1d_forward<float>(g, in, w, {}, o1);
    serial::conv1d_forward<float>(g, in, w, {}, o2);
    float worst = 0;
    for (std::size_t i = 0; i < o1.size(); ++i) worst = std::max(worst, std::abs(o1[i] - o2[i]));
    CHECK(worst < 1e-4f);
}

TEST_CASE("nearest codewords match serial with lowest-index ties") {
    std::mt19937_64 rng(16);
    for (int threads : {1, 4}) {
        ThreadCount tc(threads);
        const std::size_t batch = 2, dim = 8, frames = 37, entries = 64;
        auto book = oracle::uniform(entries * dim, rng);
        // duplicate entries force ties
        std::copy(book.begin() + 5 * dim, book.begin() + 6 * dim, book.begin() + 40 * dim);
        auto vec = oracle::uniform(batch * dim * frames, rng);
        for (std::size_t d = 0; d < dim; ++d) vec[d * frames] = book[5 * dim + d];
        std::vector<int> t1(batch * frames), t2(batch * frames);
        parallel::nearest_codewords<double>(vec, batch, dim, frames, book, entries, t1);
        serial::nearest_codewords<double>(vec, batch, dim, frames, book, entries, t2);
        CHECK(t1 == t2);
        CHECK(t1[0] == 5);
        // brute force
        for (std::size_t b = 0; b < batch; ++b)
            for (std::size_t f = 0; f < frames; ++f) {
                double best = 1e300;
                int arg = -1;
                for (std::size_t e = 0; e < entries; ++e) {
                    double d2 = 0;
                    for (std::size_t d = 0; d < dim; ++d) {
                        const double diff = vec[(b * dim + d) * frames + f] - book[e * dim + d];
                        d2 += diff * diff;
                    }
                    if (d2 < best) best = d2, arg = int(e);
                }
                CHECK(t1[b * frames + f] == arg);
            }
    }
}
