#pragma once

#include <cstdint>
#include <vector>

#include "sdc/ad/param.hpp"
#include "sdc/codec/layers.hpp"

namespace sdc {

template <typename T>
struct DiscOutput {
    std::vector<ad::Tensor<T>> logits;                 // one per scale
    std::vector<std::vector<ad::Tensor<T>>> features;  // per scale, per hidden layer
};

// Waveform discriminator evaluated on the signal and on a 2x average-pooled
// copy. Each scale: three strided conv + leaky ReLU layers and a logit conv.
template <typename T>
class Discriminator {
public:
    static constexpr std::size_t kScales = 2;

    Discriminator(std::size_t channels, std::uint64_t seed);

    DiscOutput<T> operator()(const ad::Tensor<T>& x) const;
    ad::ParameterList<T> parameters() const;

private:
    struct Scale {
        std::vector<Conv1d<T>> layers;
        Conv1d<T> out;
    };
    std::vector<Scale> scales_;
    ad::Tensor<T> pool_;  // constant [1, 1, 2] averaging kernel
};

extern template class Discriminator<float>;
extern template class Discriminator<double>;

}  // namespace sdc
