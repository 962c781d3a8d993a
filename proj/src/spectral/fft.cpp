#include "sdc/spectral/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>
#include <vector>

namespace sdc {
namespace {

struct Plans {
    fftw_plan forward;
    fftw_plan inverse;
};

Plans plans_for(std::size_t n) {
    static std::mutex mutex;
    static std::map<std::size_t, Plans> cache;
    std::lock_guard lock(mutex);
    if (auto it = cache.find(n); it != cache.end()) return it->second;
    double* real = fftw_alloc_real(n);
    fftw_complex* spec = fftw_alloc_complex(n / 2 + 1);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    Plans p{fftw_plan_dft_r2c_1d(int(n), real, spec, flags), fftw_plan_dft_c2r_1d(int(n), spec, real, flags)};
    fftw_free(real);
    fftw_free(spec);
    cache.emplace(n, p);
    return p;
}

}  // namespace

RealFft::RealFft(std::size_t n) : n_(n) {
    const Plans p = plans_for(n);
    forward_plan_ = p.forward;
    inverse_plan_ = p.inverse;
}

void RealFft::forward(std::span<const double> in, std::span<std::complex<double>> out) const {
    // r2c never writes its input.
    fftw_execute_dft_r2c(static_cast<fftw_plan>(forward_plan_), const_cast<double*>(in.data()),
                         reinterpret_cast<fftw_complex*>(out.data()));
}

void RealFft::inverse(std::span<const std::complex<double>> in, std::span<double> out) const {
    // c2r destroys its input.
    thread_local std::vector<std::complex<double>> scratch;
    scratch.assign(in.begin(), in.end());
    fftw_execute_dft_c2r(static_cast<fftw_plan>(inverse_plan_), reinterpret_cast<fftw_complex*>(scratch.data()),
                         out.data());
}

}  // namespace sdc
