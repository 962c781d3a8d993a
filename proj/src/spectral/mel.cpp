#include "sdc/spectral/mel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sdc/error.hpp"

namespace sdc {

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

MelFilterbank::MelFilterbank(std::size_t n_mels, std::size_t fft_size, int sample_rate, double f_min, double f_max)
    : n_mels_(n_mels), bins_(fft_size / 2 + 1), f_min_(f_min), f_max_(f_max > 0.0 ? f_max : sample_rate / 2.0) {
    if (n_mels == 0 || fft_size < 2 || sample_rate <= 0)
        fail(ErrorKind::InvalidConfig, "mel filterbank needs n_mels >= 1, fft_size >= 2 and a positive rate");
    if (f_min_ < 0.0 || f_min_ >= f_max_ || f_max_ > sample_rate / 2.0)
        fail(ErrorKind::InvalidConfig, "mel filterbank needs 0 <= f_min < f_max <= Nyquist");

    const double m_lo = hz_to_mel(f_min_), m_hi = hz_to_mel(f_max_);
    std::vector<double> edges(n_mels + 2);
    for (std::size_t i = 0; i < edges.size(); ++i)
        edges[i] = mel_to_hz(m_lo + (m_hi - m_lo) * double(i) / double(n_mels + 1));

    weights_.assign(n_mels * bins_, 0.0);
    const double bin_hz = double(sample_rate) / double(fft_size);
    for (std::size_t m = 0; m < n_mels; ++m) {
        const double lo = edges[m], mid = edges[m + 1], hi = edges[m + 2];
        for (std::size_t k = 0; k < bins_; ++k) {
            const double f = double(k) * bin_hz;
            const double up = (f - lo) / (mid - lo), down = (hi - f) / (hi - mid);
            weights_[m * bins_ + k] = std::max(0.0, std::min(up, down));
        }
    }
    for (std::size_t m = 0; m < n_mels; ++m) {
        double support = 0.0;
        for (std::size_t k = 0; k < bins_; ++k) support += weights_[m * bins_ + k];
        if (support <= 0.0)
            fail(ErrorKind::InvalidConfig, "mel band " + std::to_string(m) + " falls between FFT bins; use fewer bands (" +
                                               std::to_string(n_mels) + ") or a larger FFT (" +
                                               std::to_string(fft_size) + ")");
    }
    weights_f32_.assign(weights_.begin(), weights_.end());
}

template <>
const std::vector<double>& MelFilterbank::weights_as<double>() const {
    return weights_;
}
template <>
const std::vector<float>& MelFilterbank::weights_as<float>() const {
    return weights_f32_;
}

}  // namespace sdc
