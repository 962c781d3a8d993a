#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "sdc/ad/param.hpp"
#include "sdc/codec/config.hpp"
#include "sdc/codec/layers.hpp"
#include "sdc/rvq/rvq.hpp"
#include "sdc/signal/audio.hpp"

namespace sdc {

template <typename T>
struct BranchResult {
    ad::Tensor<T> decoded;  // [B, 1, L], same length as the input
    RVQResult<T> rvq;
    std::size_t frames = 0;  // ceil(L / hop)
};

// Encoder -> RVQ -> decoder at one sample rate. Inputs are zero-padded up to
// a whole number of frames and the output is cropped back.
template <typename T>
class CodecBranch {
public:
    CodecBranch(const BranchConfig& cfg, std::uint64_t seed);

    const BranchConfig& config() const { return cfg_; }

    // x is [B, 1, L] with L >= hop (SignalTooShort otherwise).
    BranchResult<T> forward(const ad::Tensor<T>& x, const std::vector<std::vector<int>>* forced = nullptr) const;

    // Decoder output for tokens[stage][b * frames + f]; [B, 1, frames * hop].
    ad::Tensor<T> decode_tokens(const std::vector<std::vector<int>>& tokens, std::size_t batch,
                                std::size_t frames) const;

    ad::Tensor<T> encode_latent(const ad::Tensor<T>& x) const;

    std::vector<Codebook<T>>& codebooks() { return books_; }
    const std::vector<Codebook<T>>& codebooks() const { return books_; }

    // Stable-ordered parameters: encoder.*, rvq.book<i>, decoder.*.
    ad::ParameterList<T> parameters() const;

private:
    BranchConfig cfg_;
    Encoder<T> encoder_;
    std::vector<Codebook<T>> books_;
    Decoder<T> decoder_;
};

extern template class CodecBranch<float>;
extern template class CodecBranch<double>;

}  // namespace sdc
