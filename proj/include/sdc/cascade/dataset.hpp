#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <vector>

#include "sdc/ad/tensor.hpp"
#include "sdc/signal/audio.hpp"
#include "sdc/signal/resample.hpp"

namespace sdc {

// One training clip at both rates; s16 = D(s32).
struct ClipPair {
    AudioBuffer s16;
    AudioBuffer s32;
};

struct Batch {
    ad::Tensor<float> s16;  // [B, 1, L]
    ad::Tensor<float> s32;  // [B, 1, 2L]
};

class Dataset {
public:
    Dataset() = default;

    // Clips at the high rate; odd trailing samples are dropped.
    static Dataset from_wideband(const std::vector<AudioBuffer>& clips, int factor = 2, const SincKernel& kernel = {});
    // Every *.wav under dir in lexicographic order, read at `rate`.
    static Dataset load_dir(const std::filesystem::path& dir, int rate, bool auto_resample, int factor = 2);

    std::size_t size() const { return clips_.size(); }
    bool empty() const { return clips_.empty(); }
    const ClipPair& operator[](std::size_t i) const { return clips_[i]; }
    double seconds() const;

    // Random aligned crops of crop_low samples at the low rate (clips that are
    // too short are zero-padded). NoData when empty.
    Batch sample(std::size_t batch, std::size_t crop_low, std::mt19937_64& rng) const;

private:
    std::vector<ClipPair> clips_;
    int factor_ = 2;
};

// Seeded full-band test material at `rate`: harmonic notes with partials up
// to 15 kHz plus band-limited noise on both sides of 8 kHz, peak 0.7.
std::vector<AudioBuffer> synthetic_corpus(std::size_t clips, double seconds, std::uint64_t seed, int rate = 32000);

}  // namespace sdc
