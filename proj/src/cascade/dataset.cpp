#include "sdc/cascade/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sdc/error.hpp"
#include "sdc/metrics/metrics.hpp"
#include "sdc/signal/wav.hpp"

namespace sdc {
namespace {

void scale_to_rms(std::vector<double>& x, double target) {
    const double rms = std::sqrt(energy(x) / double(x.size()));
    if (rms <= 0) return;
    for (double& v : x) v *= target / rms;
}

std::vector<double> tone_layer(std::size_t n, int rate, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> out(n, 0.0);
    const double nyq_guard = std::min(15000.0, 0.47 * rate);
    for (int voice = 0; voice < 2; ++voice) {
        std::size_t t = std::size_t(u(rng) * 0.2 * rate);
        while (t < n) {
            const std::size_t len = std::size_t((0.25 + 0.75 * u(rng)) * rate);
            const double f0 = 110.0 * std::pow(8.0, u(rng));
            const double tau = 0.2 + 0.6 * u(rng);
            const double tilt = 0.4 + 0.4 * u(rng);
            std::vector<double> amp, phase;
            for (int h = 1; h * f0 < nyq_guard; ++h) {
                amp.push_back(std::pow(double(h), -tilt) * (0.5 + 0.5 * u(rng)));
                phase.push_back(2 * std::numbers::pi * u(rng));
            }
            const std::size_t attack = std::size_t(0.01 * rate);
            for (std::size_t i = 0; i < len && t + i < n; ++i) {
                const double time = double(i) / rate;
                const double env = std::min(1.0, double(i) / double(attack)) * std::exp(-time / tau);
                double s = 0;
                for (std::size_t h = 0; h < amp.size(); ++h)
                    s += amp[h] * std::sin(2 * std::numbers::pi * f0 * double(h + 1) * time + phase[h]);
                out[t + i] += env * s;
            }
            t += len;
        }
    }
    return out;
}

std::vector<double> noise_layer(std::size_t n, int rate, const BandSpec& band, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    AudioBuffer white = AudioBuffer::zeros(n, rate);
    for (double& v : white.samples) v = g(rng);
    AudioBuffer shaped = band_filter(white, band);
    // slow amplitude modulation
    const double fm = 0.5 + 3.5 * u(rng), ph = 2 * std::numbers::pi * u(rng);
    for (std::size_t i = 0; i < n; ++i)
        shaped.samples[i] *= 0.6 + 0.4 * std::sin(2 * std::numbers::pi * fm * double(i) / rate + ph);
    return shaped.samples;
}

}  // namespace

Dataset Dataset::from_wideband(const std::vector<AudioBuffer>& clips, int factor, const SincKernel& kernel) {
    Dataset d;
    d.factor_ = factor;
    for (const auto& c : clips) {
        if (c.size() < std::size_t(factor)) fail(ErrorKind::SignalTooShort, "clip shorter than one low-rate sample");
        AudioBuffer s32 = c;
        s32.samples.resize(c.size() - c.size() % std::size_t(factor));
        AudioBuffer s16 = resample_down(s32, factor, kernel);
        d.clips_.push_back({std::move(s16), std::move(s32)});
    }
    return d;
}

Dataset Dataset::load_dir(const std::filesystem::path& dir, int rate, bool auto_resample, int factor) {
    std::error_code ec;
    if (!std::filesystem::is_directory(dir, ec)) fail(ErrorKind::IoError, "not a directory: " + dir.string());
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(dir))
        if (e.is_regular_file() && e.path().extension() == ".wav") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    std::vector<AudioBuffer> clips;
    for (const auto& f : files) clips.push_back(read_wav_for_codec(f, rate, auto_resample));
    return from_wideband(clips, factor);
}

double Dataset::seconds() const {
    double s = 0;
    for (const auto& c : clips_) s += c.s32.duration();
    return s;
}

Batch Dataset::sample(std::size_t batch, std::size_t crop_low, std::mt19937_64& rng) const {
    if (clips_.empty()) fail(ErrorKind::NoData, "dataset has no clips");
    const std::size_t f = std::size_t(factor_);
    std::vector<float> lo(batch * crop_low, 0.0f), hi(batch * crop_low * f, 0.0f);
    for (std::size_t b = 0; b < batch; ++b) {
        const auto& clip = clips_[std::uniform_int_distribution<std::size_t>(0, clips_.size() - 1)(rng)];
        const std::size_t n = clip.s16.size();
        const std::size_t start =
            n > crop_low ? std::uniform_int_distribution<std::size_t>(0, n - crop_low)(rng) : 0;
        for (std::size_t i = 0; i < crop_low && start + i < n; ++i)
            lo[b * crop_low + i] = float(clip.s16.samples[start + i]);
        for (std::size_t i = 0; i < crop_low * f && start * f + i < clip.s32.size(); ++i)
            hi[b * crop_low * f + i] = float(clip.s32.samples[start * f + i]);
    }
    return {ad::Tensor<float>::from({batch, 1, crop_low}, std::move(lo)),
            ad::Tensor<float>::from({batch, 1, crop_low * f}, std::move(hi))};
}

std::vector<AudioBuffer> synthetic_corpus(std::size_t clips, double seconds, std::uint64_t seed, int rate) {
    if (seconds <= 0) fail(ErrorKind::InvalidConfig, "clip length must be positive");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const std::size_t n = std::size_t(seconds * rate);
    const double nyq = 0.5 * rate;
    std::vector<AudioBuffer> out;
    for (std::size_t c = 0; c < clips; ++c) {
        auto tones = tone_layer(n, rate, rng);
        auto low = noise_layer(n, rate, {50.0, std::min(8000.0, nyq)}, rng);
        scale_to_rms(tones, 1.0);
        scale_to_rms(low, 0.2 + 0.2 * u(rng));
        std::vector<double> mix(n);
        for (std::size_t i = 0; i < n; ++i) mix[i] = tones[i] + low[i];
        if (nyq > 8000.0) {
            auto high = noise_layer(n, rate, {8000.0, std::min(15000.0, nyq)}, rng);
            scale_to_rms(high, 0.6 + 0.3 * u(rng));
            for (std::size_t i = 0; i < n; ++i) mix[i] += high[i];
        }
        double peak = 0;
        for (double v : mix) peak = std::max(peak, std::abs(v));
        for (double& v : mix) v *= 0.7 / peak;
        out.emplace_back(std::move(mix), rate);
    }
    return out;
}

}  // namespace sdc
