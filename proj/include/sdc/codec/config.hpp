#pragma once

#include <map>
#include <string>
#include <vector>

namespace sdc {

enum class Activation { Snake, Tanh };

struct BranchConfig {
    int sample_rate = 16000;
    std::vector<int> strides{2, 4, 5, 8};
    int base_channels = 16;
    int max_channels = 0;  // 0 leaves channel doubling uncapped
    int latent_dim = 64;
    int n_quantizers = 4;
    int codebook_bits = 10;
    int residual_units = 1;
    Activation activation = Activation::Snake;
    int disc_channels = 16;
    int killed_after = 100;

    static BranchConfig defaults_16k();
    static BranchConfig defaults_32k();

    int hop() const;  // product of strides
    int frame_rate() const;
    int codebook_size() const { return 1 << codebook_bits; }
    // Encoder channel count after block i (i = -1 for the input conv).
    int channels_at(int block) const;
    int bitrate() const { return frame_rate() * n_quantizers * codebook_bits; }

    void validate() const;

    std::map<std::string, std::string> to_manifest(const std::string& prefix) const;
    static BranchConfig from_manifest(const std::map<std::string, std::string>& m, const std::string& prefix);
    bool operator==(const BranchConfig&) const = default;
};

struct LossWeights {
    double gen = 1.0;
    double fm = 2.0;
    double mel = 15.0;
    double cb = 1.0;
    double cmt = 0.25;

    void validate() const;
};

}  // namespace sdc
