#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace sdc {

// Mono time-domain signal. Samples are nominally in [-1, 1].
struct AudioBuffer {
    std::vector<double> samples;
    int sample_rate = 0;

    AudioBuffer() = default;
    AudioBuffer(std::vector<double> s, int rate) : samples(std::move(s)), sample_rate(rate) {}

    static AudioBuffer zeros(std::size_t n, int rate) { return {std::vector<double>(n, 0.0), rate}; }

    std::size_t size() const { return samples.size(); }
    bool empty() const { return samples.empty(); }
    double duration() const { return sample_rate > 0 ? double(size()) / sample_rate : 0.0; }
    std::span<const double> view() const { return samples; }

    // Throws ShapeMismatch on non-finite samples or a non-positive rate.
    void validate() const;
};

double energy(std::span<const double> x);

AudioBuffer operator+(const AudioBuffer& a, const AudioBuffer& b);
AudioBuffer operator-(const AudioBuffer& a, const AudioBuffer& b);
AudioBuffer operator*(double gain, const AudioBuffer& a);

// Same rate and length, or ShapeMismatch.
void require_same_shape(const AudioBuffer& a, const AudioBuffer& b, const char* what);

}  // namespace sdc
