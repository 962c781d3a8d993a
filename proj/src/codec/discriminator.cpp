#include "sdc/codec/discriminator.hpp"

#include <random>
#include <string>

#include "sdc/ad/ops.hpp"

namespace sdc {

template <typename T>
Discriminator<T>::Discriminator(std::size_t channels, std::uint64_t seed)
    : pool_(ad::Tensor<T>::from({1, 1, 2}, {T(0.5), T(0.5)})) {
    std::mt19937_64 rng(seed ^ 0xd15c0ull);
    const std::size_t c = channels;
    for (std::size_t s = 0; s < kScales; ++s) {
        Scale sc;
        sc.layers.emplace_back(1, c, 15, rng, 1, 7);
        sc.layers.emplace_back(c, 2 * c, 15, rng, 4, 7);
        sc.layers.emplace_back(2 * c, 4 * c, 15, rng, 4, 7);
        sc.out = Conv1d<T>(4 * c, 1, 3, rng, 1, 1);
        scales_.push_back(std::move(sc));
    }
}

template <typename T>
DiscOutput<T> Discriminator<T>::operator()(const ad::Tensor<T>& x) const {
    DiscOutput<T> out;
    ad::Tensor<T> input = x;
    for (std::size_t s = 0; s < scales_.size(); ++s) {
        if (s > 0) input = ad::conv1d(input, pool_, ad::Tensor<T>(), 2);
        std::vector<ad::Tensor<T>> feats;
        ad::Tensor<T> h = input;
        for (const auto& layer : scales_[s].layers) {
            h = ad::leaky_relu(layer(h), T(0.2));
            feats.push_back(h);
        }
        out.logits.push_back(scales_[s].out(h));
        out.features.push_back(std::move(feats));
    }
    return out;
}

template <typename T>
ad::ParameterList<T> Discriminator<T>::parameters() const {
    ad::ParameterList<T> p;
    for (std::size_t s = 0; s < scales_.size(); ++s) {
        const std::string prefix = "scale" + std::to_string(s);
        for (std::size_t l = 0; l < scales_[s].layers.size(); ++l)
            scales_[s].layers[l].collect(prefix + ".conv" + std::to_string(l), p);
        scales_[s].out.collect(prefix + ".out", p);
    }
    return p;
}

template class Discriminator<float>;
template class Discriminator<double>;

}  // namespace sdc
