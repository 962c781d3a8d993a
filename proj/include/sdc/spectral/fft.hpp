#pragma once

#include <complex>
#include <cstddef>
#include <span>

namespace sdc {

// Unnormalised real FFT of arbitrary length backed by FFTW. Plans are created
// once per length and shared; execution is thread-safe.
class RealFft {
public:
    explicit RealFft(std::size_t n);

    std::size_t size() const { return n_; }
    std::size_t bins() const { return n_ / 2 + 1; }

    // out[k] = sum_n in[n] exp(-2 pi i k n / N), k = 0 .. N/2.
    void forward(std::span<const double> in, std::span<std::complex<double>> out) const;

    // Hermitian inverse without the 1/N factor. Imaginary parts of the DC and
    // Nyquist bins are ignored.
    void inverse(std::span<const std::complex<double>> in, std::span<double> out) const;

private:
    std::size_t n_;
    void* forward_plan_;
    void* inverse_plan_;
};

}  // namespace sdc
