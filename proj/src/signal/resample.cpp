#include "sdc/signal/resample.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "sdc/error.hpp"

namespace sdc {
namespace {

double sinc(double x) {
    if (std::abs(x) < 1e-12) return 1.0;
    const double px = std::numbers::pi * x;
    return std::sin(px) / px;
}

// v in [-1, 1] spans the whole window.
double window_at(SincWindow w, double v) {
    if (std::abs(v) >= 1.0) return 0.0;
    const double a = std::numbers::pi * v;
    switch (w) {
        case SincWindow::Hann: return 0.5 + 0.5 * std::cos(a);
        case SincWindow::Blackman: return 0.42 + 0.5 * std::cos(a) + 0.08 * std::cos(2.0 * a);
    }
    return 0.0;
}

// Lowpass interpolation kernel with cutoff `c` in cycles per input sample
// relative to input Nyquist, evaluated at offset u (in input samples).
double lowpass(const SincKernel& k, double c, double u) {
    const double support = k.zero_crossings_per_side / c;
    return c * sinc(c * u) * window_at(k.window, u / support);
}

void check_factor(int factor) {
    if (factor < 2) fail(ErrorKind::InvalidFactor, "resampling factor must be >= 2, got " + std::to_string(factor));
}

}  // namespace

void SincKernel::validate() const {
    if (zero_crossings_per_side < 1) fail(ErrorKind::InvalidConfig, "sinc kernel needs at least one zero crossing");
    if (!(cutoff_ratio > 0.0 && cutoff_ratio <= 1.0))
        fail(ErrorKind::InvalidConfig, "sinc cutoff_ratio must lie in (0, 1]");
}

PolyphaseUpsampler::PolyphaseUpsampler(int factor, const SincKernel& kernel) : factor_(factor) {
    check_factor(factor);
    kernel.validate();
    const double c = kernel.cutoff_ratio;
    half_width_ = int(std::ceil(kernel.zero_crossings_per_side / c));
    const int width = 2 * half_width_ + 1;
    taps_.assign(std::size_t(factor_) * width, 0.0);
    for (int p = 0; p < factor_; ++p) {
        double* row = taps_.data() + std::size_t(p) * width;
        double sum = 0.0;
        for (int k = -half_width_; k <= half_width_; ++k) {
            row[k + half_width_] = lowpass(kernel, c, double(p) / factor_ - k);
            sum += row[k + half_width_];
        }
        for (int j = 0; j < width; ++j) row[j] /= sum;
    }
}

std::span<const double> PolyphaseUpsampler::phase(int p) const {
    const std::size_t width = std::size_t(2 * half_width_ + 1);
    return std::span<const double>(taps_).subspan(std::size_t(p) * width, width);
}

template <typename T>
void PolyphaseUpsampler::apply(std::span<const T> in, std::span<T> out) const {
    const long n_in = long(in.size());
    const int width = 2 * half_width_ + 1;
    for (long n = 0; n < n_in; ++n) {
        const long lo = std::max<long>(-half_width_, -n);
        const long hi = std::min<long>(half_width_, n_in - 1 - n);
        for (int p = 0; p < factor_; ++p) {
            const double* row = taps_.data() + std::size_t(p) * width + half_width_;
            double acc = 0.0;
            for (long k = lo; k <= hi; ++k) acc += double(in[n + k]) * row[k];
            out[std::size_t(n) * factor_ + p] = T(acc);
        }
    }
}

template <typename T>
void PolyphaseUpsampler::apply_adjoint(std::span<const T> grad_out, std::span<T> grad_in) const {
    const long n_in = long(grad_in.size());
    const int width = 2 * half_width_ + 1;
    // Gather form: grad_in[m] = sum over (n, p) with n + k = m.
    for (long m = 0; m < n_in; ++m) {
        double acc = 0.0;
        const long lo = std::max<long>(-half_width_, m - (n_in - 1));
        const long hi = std::min<long>(half_width_, m);
        for (long k = lo; k <= hi; ++k) {
            const long n = m - k;
            for (int p = 0; p < factor_; ++p)
                acc += taps_[std::size_t(p) * width + std::size_t(k + half_width_)] *
                       double(grad_out[std::size_t(n) * factor_ + p]);
        }
        grad_in[m] += T(acc);
    }
}

Decimator::Decimator(int factor, const SincKernel& kernel) : factor_(factor) {
    check_factor(factor);
    kernel.validate();
    const double c = kernel.cutoff_ratio / factor;
    half_width_ = int(std::ceil(kernel.zero_crossings_per_side / c));
    taps_.resize(std::size_t(2 * half_width_ + 1));
    double sum = 0.0;
    for (int j = -half_width_; j <= half_width_; ++j) {
        taps_[j + half_width_] = lowpass(kernel, c, double(j));
        sum += taps_[j + half_width_];
    }
    for (double& t : taps_) t /= sum;
}

template <typename T>
void Decimator::apply(std::span<const T> in, std::span<T> out) const {
    const long n_in = long(in.size());
    const double* h = taps_.data() + half_width_;
    for (std::size_t n = 0; n < out.size(); ++n) {
        const long centre = long(n) * factor_;
        const long lo = std::max<long>(-half_width_, -centre);
        const long hi = std::min<long>(half_width_, n_in - 1 - centre);
        double acc = 0.0;
        for (long j = lo; j <= hi; ++j) acc += double(in[centre + j]) * h[j];
        out[n] = T(acc);
    }
}

template void PolyphaseUpsampler::apply<float>(std::span<const float>, std::span<float>) const;
template void PolyphaseUpsampler::apply<double>(std::span<const double>, std::span<double>) const;
template void PolyphaseUpsampler::apply_adjoint<float>(std::span<const float>, std::span<float>) const;
template void PolyphaseUpsampler::apply_adjoint<double>(std::span<const double>, std::span<double>) const;
template void Decimator::apply<float>(std::span<const float>, std::span<float>) const;
template void Decimator::apply<double>(std::span<const double>, std::span<double>) const;

AudioBuffer resample_up(const AudioBuffer& x, int factor, const SincKernel& kernel) {
    if (x.empty()) fail(ErrorKind::EmptySignal, "resample_up: empty input");
    check_factor(factor);
    PolyphaseUpsampler up(factor, kernel);
    AudioBuffer out = AudioBuffer::zeros(x.size() * std::size_t(factor), x.sample_rate * factor);
    up.apply<double>(x.samples, out.samples);
    return out;
}

AudioBuffer resample_down(const AudioBuffer& x, int factor, const SincKernel& kernel) {
    if (x.empty()) fail(ErrorKind::EmptySignal, "resample_down: empty input");
    check_factor(factor);
    if (x.sample_rate % factor != 0)
        fail(ErrorKind::InvalidFactor, "resample_down: rate " + std::to_string(x.sample_rate) +
                                           " not divisible by " + std::to_string(factor));
    Decimator down(factor, kernel);
    AudioBuffer out = AudioBuffer::zeros(x.size() / std::size_t(factor), x.sample_rate / factor);
    down.apply<double>(x.samples, out.samples);
    return out;
}

AudioBuffer resample_to_rate(const AudioBuffer& x, int target_rate, const SincKernel& kernel) {
    if (x.empty()) fail(ErrorKind::EmptySignal, "resample_to_rate: empty input");
    if (target_rate <= 0) fail(ErrorKind::InvalidFactor, "target rate must be positive");
    kernel.validate();
    if (target_rate == x.sample_rate) return x;
    const double step = double(x.sample_rate) / target_rate;
    const double c = kernel.cutoff_ratio * std::min(1.0, double(target_rate) / x.sample_rate);
    const double support = kernel.zero_crossings_per_side / c;
    const std::size_t n_out = std::size_t(double(x.size()) * target_rate / x.sample_rate);
    AudioBuffer out = AudioBuffer::zeros(n_out, target_rate);
    const long n_in = long(x.size());
    for (std::size_t n = 0; n < n_out; ++n) {
        const double t = double(n) * step;
        const long lo = std::max<long>(0, long(std::ceil(t - support)));
        const long hi = std::min<long>(n_in - 1, long(std::floor(t + support)));
        double acc = 0.0, wsum = 0.0;
        for (long m = lo; m <= hi; ++m) {
            const double w = lowpass(kernel, c, t - double(m));
            acc += w * x.samples[std::size_t(m)];
            wsum += w;
        }
        out.samples[n] = wsum != 0.0 ? acc / wsum : 0.0;
    }
    return out;
}

}  // namespace sdc
