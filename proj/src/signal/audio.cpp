#include "sdc/signal/audio.hpp"

#include <cmath>
#include <string>

#include "sdc/error.hpp"

namespace sdc {

void AudioBuffer::validate() const {
    if (sample_rate <= 0) fail(ErrorKind::ShapeMismatch, "sample rate must be positive");
    for (double v : samples)
        if (!std::isfinite(v)) fail(ErrorKind::ShapeMismatch, "signal contains NaN or Inf");
}

double energy(std::span<const double> x) {
    double e = 0.0;
    for (double v : x) e += v * v;
    return e;
}

void require_same_shape(const AudioBuffer& a, const AudioBuffer& b, const char* what) {
    if (a.sample_rate != b.sample_rate || a.size() != b.size())
        fail(ErrorKind::ShapeMismatch,
             std::string(what) + ": signals differ in rate or length (" + std::to_string(a.size()) +
                 "@" + std::to_string(a.sample_rate) + " vs " + std::to_string(b.size()) + "@" +
                 std::to_string(b.sample_rate) + ")");
}

AudioBuffer operator+(const AudioBuffer& a, const AudioBuffer& b) {
    require_same_shape(a, b, "add");
    AudioBuffer out = a;
    for (std::size_t i = 0; i < out.size(); ++i) out.samples[i] += b.samples[i];
    return out;
}

AudioBuffer operator-(const AudioBuffer& a, const AudioBuffer& b) {
    require_same_shape(a, b, "subtract");
    AudioBuffer out = a;
    for (std::size_t i = 0; i < out.size(); ++i) out.samples[i] -= b.samples[i];
    return out;
}

AudioBuffer operator*(double gain, const AudioBuffer& a) {
    AudioBuffer out = a;
    for (double& v : out.samples) v *= gain;
    return out;
}

}  // namespace sdc
