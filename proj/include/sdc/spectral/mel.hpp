#pragma once

#include <cstddef>
#include <vector>

namespace sdc {

double hz_to_mel(double hz);
double mel_to_hz(double mel);

// Triangular filters equally spaced on the HTK mel scale between f_min and
// f_max, evaluated at the FFT bin centre frequencies. Unnormalised (peak 1).
class MelFilterbank {
public:
    // f_max <= 0 selects the Nyquist frequency.
    MelFilterbank(std::size_t n_mels, std::size_t fft_size, int sample_rate, double f_min = 0.0,
                  double f_max = 0.0);

    std::size_t n_mels() const { return n_mels_; }
    std::size_t bins() const { return bins_; }
    double f_min() const { return f_min_; }
    double f_max() const { return f_max_; }
    double weight(std::size_t mel, std::size_t bin) const { return weights_[mel * bins_ + bin]; }

    // Row-major n_mels x bins.
    const std::vector<double>& weights() const { return weights_; }
    const std::vector<float>& weights_f32() const { return weights_f32_; }
    template <typename T>
    const std::vector<T>& weights_as() const;

private:
    std::size_t n_mels_;
    std::size_t bins_;
    double f_min_;
    double f_max_;
    std::vector<double> weights_;
    std::vector<float> weights_f32_;
};

}  // namespace sdc
