#pragma once

#include <string_view>
#include <vector>

#include "sdc/ad/tensor.hpp"
#include "sdc/signal/audio.hpp"
#include "sdc/spectral/mel.hpp"
#include "sdc/spectral/stft.hpp"

namespace sdc {

enum class LossKind { Mel, Stft, Waveform, Gen, Fm, Cb, Cmt };

std::string_view to_string(LossKind kind);

struct LossValue {
    LossKind kind;
    double value = 0.0;
};

inline constexpr double kLogFloor = 1e-5;

struct SpectralScale {
    StftConfig stft;
    MelFilterbank mel;
};

// fft sizes {2048, 512, 128}, hop = fft / 4, {80, 40, 10} mel bands, 0 Hz to Nyquist.
std::vector<SpectralScale> default_scales(int sample_rate);

// Builds scales from parallel lists of fft sizes and mel counts (hop = fft / 4).
std::vector<SpectralScale> make_scales(int sample_rate, const std::vector<std::size_t>& fft_sizes,
                                       const std::vector<std::size_t>& n_mels);

namespace ad {

// Tensor forms take [B, 1, L] signals and return scalars. `ref` is treated as
// a constant; gradients flow into `est`.
template <typename T>
Tensor<T> mel_loss(const Tensor<T>& ref, const Tensor<T>& est, const std::vector<SpectralScale>& scales);
template <typename T>
Tensor<T> stft_loss(const Tensor<T>& ref, const Tensor<T>& est, const std::vector<SpectralScale>& scales);
template <typename T>
Tensor<T> waveform_loss(const Tensor<T>& ref, const Tensor<T>& est);

// log(mel(|STFT(x)|) + floor), [B, frames, n_mels].
template <typename T>
Tensor<T> log_mel(const Tensor<T>& x, const SpectralScale& scale);

}  // namespace ad

// Evaluation forms in double precision. ShapeMismatch on rate/length mismatch.
LossValue mel_loss(const AudioBuffer& ref, const AudioBuffer& est, const std::vector<SpectralScale>& scales);
LossValue stft_loss(const AudioBuffer& ref, const AudioBuffer& est, const std::vector<SpectralScale>& scales);
LossValue waveform_loss(const AudioBuffer& ref, const AudioBuffer& est);

}  // namespace sdc
