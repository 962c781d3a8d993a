#pragma once

#include <cstddef>
#include <vector>

#include "sdc/ad/tensor.hpp"
#include "sdc/signal/audio.hpp"

namespace sdc {

enum class StftWindow { Hann };

// Frames start at 0 and advance by hop; no centre padding, so a signal of
// length L yields 1 + (L - fft_size) / hop frames.
struct StftConfig {
    std::size_t fft_size = 512;
    std::size_t hop = 128;
    StftWindow window = StftWindow::Hann;

    void validate() const;
    std::size_t bins() const { return fft_size / 2 + 1; }
    // SignalTooShort when length < fft_size.
    std::size_t frames(std::size_t length) const;
};

// Symmetric Hann window of length n.
std::vector<double> hann_window(std::size_t n);

// Row-major frames x bins magnitude matrix.
struct Spectrogram {
    std::size_t frames = 0;
    std::size_t bins = 0;
    std::vector<double> data;

    double at(std::size_t frame, std::size_t bin) const { return data[frame * bins + bin]; }
};

Spectrogram stft_mag(const AudioBuffer& x, const StftConfig& cfg);
Spectrogram stft_mag(std::span<const double> x, const StftConfig& cfg);

namespace ad {

// Differentiable magnitude STFT of x [B, 1, L] or [B, L]; result [B, frames, bins].
// The subgradient at a zero-magnitude bin is taken as 0.
template <typename T>
Tensor<T> stft_magnitude(const Tensor<T>& x, const StftConfig& cfg);

}  // namespace ad

}  // namespace sdc
