#pragma once

#include <random>
#include <string>
#include <vector>

#include "sdc/ad/param.hpp"
#include "sdc/codec/config.hpp"

namespace sdc {

template <typename T>
struct Conv1d {
    ad::Tensor<T> weight;  // [out, in, k]
    ad::Tensor<T> bias;    // [out]
    std::size_t stride = 1, padding = 0, dilation = 1;

    Conv1d() = default;
    Conv1d(std::size_t in, std::size_t out, std::size_t k, std::mt19937_64& rng, std::size_t stride = 1,
           std::size_t padding = 0, std::size_t dilation = 1);
    ad::Tensor<T> operator()(const ad::Tensor<T>& x) const;
    void collect(const std::string& name, ad::ParameterList<T>& out) const;
};

template <typename T>
struct ConvTranspose1d {
    ad::Tensor<T> weight;  // [in, out, k]
    ad::Tensor<T> bias;    // [out]
    std::size_t stride = 1, padding = 0, output_padding = 0;

    ConvTranspose1d() = default;
    ConvTranspose1d(std::size_t in, std::size_t out, std::size_t k, std::mt19937_64& rng, std::size_t stride,
                    std::size_t padding, std::size_t output_padding);
    ad::Tensor<T> operator()(const ad::Tensor<T>& x) const;
    void collect(const std::string& name, ad::ParameterList<T>& out) const;
};

// Snake with learnable per-channel alpha (initialised to 1), or tanh.
template <typename T>
struct Activation1d {
    Activation kind = Activation::Snake;
    ad::Tensor<T> alpha;

    Activation1d() = default;
    Activation1d(Activation kind, std::size_t channels);
    ad::Tensor<T> operator()(const ad::Tensor<T>& x) const;
    void collect(const std::string& name, ad::ParameterList<T>& out) const;
};

// x + conv1x1(act(conv_k7_dilated(act(x)))).
template <typename T>
struct ResidualUnit {
    Activation1d<T> act1, act2;
    Conv1d<T> conv1, conv2;

    ResidualUnit(Activation kind, std::size_t channels, std::size_t dilation, std::mt19937_64& rng);
    ad::Tensor<T> operator()(const ad::Tensor<T>& x) const;
    void collect(const std::string& name, ad::ParameterList<T>& out) const;
};

// Waveform [B, 1, L] -> latent [B, latent_dim, L / hop].
template <typename T>
class Encoder {
public:
    Encoder(const BranchConfig& cfg, std::mt19937_64& rng);
    ad::Tensor<T> operator()(const ad::Tensor<T>& x) const;
    void collect(const std::string& name, ad::ParameterList<T>& out) const;

private:
    struct Block {
        std::vector<ResidualUnit<T>> units;
        Activation1d<T> act;
        Conv1d<T> down;
    };
    Conv1d<T> conv_in_;
    std::vector<Block> blocks_;
    Activation1d<T> act_out_;
    Conv1d<T> conv_out_;
};

// Latent [B, latent_dim, F] -> waveform [B, 1, F * hop], tanh-bounded.
template <typename T>
class Decoder {
public:
    Decoder(const BranchConfig& cfg, std::mt19937_64& rng);
    ad::Tensor<T> operator()(const ad::Tensor<T>& z) const;
    void collect(const std::string& name, ad::ParameterList<T>& out) const;

private:
    struct Block {
        Activation1d<T> act;
        ConvTranspose1d<T> up;
        std::vector<ResidualUnit<T>> units;
    };
    Conv1d<T> conv_in_;
    std::vector<Block> blocks_;
    Activation1d<T> act_out_;
    Conv1d<T> conv_out_;
};

}  // namespace sdc
