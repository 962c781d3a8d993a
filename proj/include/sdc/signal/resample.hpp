#pragma once

#include <span>
#include <vector>

#include "sdc/signal/audio.hpp"

namespace sdc {

enum class SincWindow { Hann, Blackman };

// Windowed-sinc interpolation kernel. zero_crossings_per_side counts sinc
// zero crossings on each side of the centre tap; cutoff_ratio scales the
// passband edge relative to the lower of the two Nyquist frequencies.
struct SincKernel {
    int zero_crossings_per_side = 64;
    SincWindow window = SincWindow::Hann;
    double cutoff_ratio = 1.0;

    void validate() const;
};

// Integer-factor polyphase interpolator (the U operator). Output sample
// n*factor + p is a weighted sum of input samples n-K .. n+K with the taps of
// phase p. Every phase is normalised to unity DC gain.
class PolyphaseUpsampler {
public:
    PolyphaseUpsampler(int factor, const SincKernel& kernel = {});

    int factor() const { return factor_; }
    int half_width() const { return half_width_; }
    std::span<const double> phase(int p) const;

    // out.size() must equal in.size() * factor. Samples outside the input are zero.
    template <typename T>
    void apply(std::span<const T> in, std::span<T> out) const;

    // Accumulates the transpose of apply: grad_in += U^T grad_out.
    template <typename T>
    void apply_adjoint(std::span<const T> grad_out, std::span<T> grad_in) const;

private:
    int factor_;
    int half_width_;
    std::vector<double> taps_;  // factor_ rows of (2 * half_width_ + 1)
};

// Integer-factor anti-aliased decimator (the D operator). Trailing samples
// that do not fill a whole output period are dropped.
class Decimator {
public:
    Decimator(int factor, const SincKernel& kernel = {});

    int factor() const { return factor_; }
    int half_width() const { return half_width_; }
    std::span<const double> taps() const { return taps_; }

    template <typename T>
    void apply(std::span<const T> in, std::span<T> out) const;

private:
    int factor_;
    int half_width_;
    std::vector<double> taps_;
};

AudioBuffer resample_up(const AudioBuffer& x, int factor, const SincKernel& kernel = {});
AudioBuffer resample_down(const AudioBuffer& x, int factor, const SincKernel& kernel = {});

// Arbitrary-ratio conversion by direct windowed-sinc evaluation. Only used for
// ingesting files whose rate is not native to the codec.
AudioBuffer resample_to_rate(const AudioBuffer& x, int target_rate, const SincKernel& kernel = {});

}  // namespace sdc
