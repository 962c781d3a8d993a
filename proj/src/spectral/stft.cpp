#include "sdc/spectral/stft.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "sdc/error.hpp"
#include "sdc/spectral/fft.hpp"

namespace sdc {

void StftConfig::validate() const {
    if (fft_size < 16 || (fft_size & (fft_size - 1)) != 0)
        fail(ErrorKind::InvalidConfig, "fft_size must be a power of two >= 16, got " + std::to_string(fft_size));
    if (hop < 1 || hop > fft_size) fail(ErrorKind::InvalidConfig, "hop must be in [1, fft_size]");
}

std::size_t StftConfig::frames(std::size_t length) const {
    if (length < fft_size)
        fail(ErrorKind::SignalTooShort,
             "signal of " + std::to_string(length) + " samples is shorter than one " + std::to_string(fft_size) +
                 "-point frame");
    return 1 + (length - fft_size) / hop;
}

std::vector<double> hann_window(std::size_t n) {
    std::vector<double> w(n, 1.0);
    if (n < 2) return w;
    for (std::size_t i = 0; i < n; ++i) w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * double(i) / double(n - 1));
    return w;
}

Spectrogram stft_mag(std::span<const double> x, const StftConfig& cfg) {
    cfg.validate();
    const std::size_t N = cfg.fft_size;
    Spectrogram s;
    s.frames = cfg.frames(x.size());
    s.bins = cfg.bins();
    s.data.resize(s.frames * s.bins);
    const auto w = hann_window(N);
    const RealFft fft(N);
    std::vector<double> frame(N);
    std::vector<std::complex<double>> spec(s.bins);
    for (std::size_t f = 0; f < s.frames; ++f) {
        for (std::size_t n = 0; n < N; ++n) frame[n] = x[f * cfg.hop + n] * w[n];
        fft.forward(frame, spec);
        for (std::size_t k = 0; k < s.bins; ++k) s.data[f * s.bins + k] = std::abs(spec[k]);
    }
    return s;
}

Spectrogram stft_mag(const AudioBuffer& x, const StftConfig& cfg) { return stft_mag(x.view(), cfg); }

namespace ad {

template <typename T>
Tensor<T> stft_magnitude(const Tensor<T>& x, const StftConfig& cfg) {
    cfg.validate();
    if (!(x.rank() == 2 || (x.rank() == 3 && x.dim(1) == 1)))
        fail(ErrorKind::ShapeMismatch, "stft_magnitude expects [B, 1, L] or [B, L], got " + to_string(x.shape()));
    const std::size_t B = x.dim(0), L = x.shape().back(), N = cfg.fft_size, hop = cfg.hop;
    const std::size_t F = cfg.frames(L), K = cfg.bins();
    const auto w = hann_window(N);
    const RealFft fft(N);

    std::vector<T> out(B * F * K);
    // Complex spectra are kept for the backward pass.
    std::vector<std::complex<double>> spectra(B * F * K);
    std::vector<double> frame(N);
    const auto xv = x.data();
    for (std::size_t b = 0; b < B; ++b)
        for (std::size_t f = 0; f < F; ++f) {
            for (std::size_t n = 0; n < N; ++n) frame[n] = double(xv[b * L + f * hop + n]) * w[n];
            std::span<std::complex<double>> spec(spectra.data() + (b * F + f) * K, K);
            fft.forward(frame, spec);
            for (std::size_t k = 0; k < K; ++k) out[(b * F + f) * K + k] = T(std::abs(spec[k]));
        }

    return make_result<T>(
        "stft_magnitude", {B, F, K}, std::move(out), {x},
        [spectra = std::move(spectra), w, B, F, K, L, N, hop](Node<T>& node) {
            const RealFft fft(N);
            auto gx = node.inputs[0]->grad_buffer();
            std::vector<std::complex<double>> y(K);
            std::vector<double> back(N);
            for (std::size_t b = 0; b < B; ++b)
                for (std::size_t f = 0; f < F; ++f) {
                    const std::size_t base = (b * F + f) * K;
                    // d|X_k|/dx_n = w_n Re(conj(X_k)/|X_k| e^{-i 2 pi k n / N}); the
                    // inverse real FFT counts interior bins twice, hence the 0.5.
                    for (std::size_t k = 0; k < K; ++k) {
                        const std::complex<double> X = spectra[base + k];
                        const double m = std::abs(X);
                        const double g = double(node.grad[base + k]);
                        if (m == 0.0 || g == 0.0) {
                            y[k] = 0.0;
                            continue;
                        }
                        const bool edge = k == 0 || 2 * k == N;
                        y[k] = (edge ? 1.0 : 0.5) * g * X / m;
                    }
                    fft.inverse(y, back);
                    for (std::size_t n = 0; n < N; ++n) gx[b * L + f * hop + n] += T(back[n] * w[n]);
                }
        });
}

template Tensor<float> stft_magnitude(const Tensor<float>&, const StftConfig&);
template Tensor<double> stft_magnitude(const Tensor<double>&, const StftConfig&);

}  // namespace ad
}  // namespace sdc
