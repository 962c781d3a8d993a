#include "sdc/codec/layers.hpp"

#include <algorithm>

#include "sdc/ad/ops.hpp"

namespace sdc {

template <typename T>
Conv1d<T>::Conv1d(std::size_t in, std::size_t out, std::size_t k, std::mt19937_64& rng, std::size_t stride_,
                  std::size_t padding_, std::size_t dilation_)
    : weight(ad::Tensor<T>::zeros({out, in, k}, true)),
      bias(ad::Tensor<T>::zeros({out}, true)),
      stride(stride_),
      padding(padding_),
      dilation(dilation_) {
    ad::kaiming_uniform(weight, in * k, rng);
}

template <typename T>
ad::Tensor<T> Conv1d<T>::operator()(const ad::Tensor<T>& x) const {
    return ad::conv1d(x, weight, bias, stride, padding, dilation);
}

template <typename T>
void Conv1d<T>::collect(const std::string& name, ad::ParameterList<T>& out) const {
    out.add(name + ".weight", weight);
    out.add(name + ".bias", bias);
}

template <typename T>
ConvTranspose1d<T>::ConvTranspose1d(std::size_t in, std::size_t out, std::size_t k, std::mt19937_64& rng,
                                    std::size_t stride_, std::size_t padding_, std::size_t output_padding_)
    : weight(ad::Tensor<T>::zeros({in, out, k}, true)),
      bias(ad::Tensor<T>::zeros({out}, true)),
      stride(stride_),
      padding(padding_),
      output_padding(output_padding_) {
    // Each output sample sees about in * k / stride weights.
    ad::kaiming_uniform(weight, std::max<std::size_t>(1, in * k / stride), rng);
}

template <typename T>
ad::Tensor<T> ConvTranspose1d<T>::operator()(const ad::Tensor<T>& x) const {
    return ad::conv_transpose1d(x, weight, bias, stride, padding, output_padding);
}

template <typename T>
void ConvTranspose1d<T>::collect(const std::string& name, ad::ParameterList<T>& out) const {
    out.add(name + ".weight", weight);
    out.add(name + ".bias", bias);
}

template <typename T>
Activation1d<T>::Activation1d(Activation kind_, std::size_t channels) : kind(kind_) {
    if (kind == Activation::Snake) alpha = ad::Tensor<T>::full({channels}, T(1), true);
}

template <typename T>
ad::Tensor<T> Activation1d<T>::operator()(const ad::Tensor<T>& x) const {
    return kind == Activation::Snake ? ad::snake(x, alpha) : ad::tanh(x);
}

template <typename T>
void Activation1d<T>::collect(const std::string& name, ad::ParameterList<T>& out) const {
    if (kind == Activation::Snake) out.add(name + ".alpha", alpha);
}

template <typename T>
ResidualUnit<T>::ResidualUnit(Activation kind, std::size_t channels, std::size_t dilation, std::mt19937_64& rng)
    : act1(kind, channels),
      act2(kind, channels),
      conv1(channels, channels, 7, rng, 1, 3 * dilation, dilation),
      conv2(channels, channels, 1, rng) {}

template <typename T>
ad::Tensor<T> ResidualUnit<T>::operator()(const ad::Tensor<T>& x) const {
    return ad::add(x, conv2(act2(conv1(act1(x)))));
}

template <typename T>
void ResidualUnit<T>::collect(const std::string& name, ad::ParameterList<T>& out) const {
    act1.collect(name + ".act1", out);
    conv1.collect(name + ".conv1", out);
    act2.collect(name + ".act2", out);
    conv2.collect(name + ".conv2", out);
}

namespace {

std::size_t dilation_for(int unit) {
    std::size_t d = 1;
    for (int i = 0; i < unit; ++i) d *= 3;
    return d;
}

}  // namespace

template <typename T>
Encoder<T>::Encoder(const BranchConfig& cfg, std::mt19937_64& rng)
    : conv_in_(1, std::size_t(cfg.channels_at(-1)), 7, rng, 1, 3) {
    for (std::size_t i = 0; i < cfg.strides.size(); ++i) {
        const auto c = std::size_t(cfg.channels_at(int(i) - 1));
        const auto next = std::size_t(cfg.channels_at(int(i)));
        const auto s = std::size_t(cfg.strides[i]);
        Block b;
        for (int u = 0; u < cfg.residual_units; ++u) b.units.emplace_back(cfg.activation, c, dilation_for(u), rng);
        b.act = Activation1d<T>(cfg.activation, c);
        b.down = Conv1d<T>(c, next, 2 * s, rng, s, (s + 1) / 2);
        blocks_.push_back(std::move(b));
    }
    const auto last = std::size_t(cfg.channels_at(int(cfg.strides.size()) - 1));
    act_out_ = Activation1d<T>(cfg.activation, last);
    conv_out_ = Conv1d<T>(last, std::size_t(cfg.latent_dim), 3, rng, 1, 1);
}

template <typename T>
ad::Tensor<T> Encoder<T>::operator()(const ad::Tensor<T>& x) const {
    auto h = conv_in_(x);
    for (const auto& b : blocks_) {
        for (const auto& u : b.units) h = u(h);
        h = b.down(b.act(h));
    }
    return conv_out_(act_out_(h));
}

template <typename T>
void Encoder<T>::collect(const std::string& name, ad::ParameterList<T>& out) const {
    conv_in_.collect(name + ".conv_in", out);
    for (std::size_t i = 0; i < blocks_.size(); ++i) {
        const std::string p = name + ".block" + std::to_string(i);
        for (std::size_t u = 0; u < blocks_[i].units.size(); ++u)
            blocks_[i].units[u].collect(p + ".res" + std::to_string(u), out);
        blocks_[i].act.collect(p + ".act", out);
        blocks_[i].down.collect(p + ".down", out);
    }
    act_out_.collect(name + ".act_out", out);
    conv_out_.collect(name + ".conv_out", out);
}

template <typename T>
Decoder<T>::Decoder(const BranchConfig& cfg, std::mt19937_64& rng) {
    const int n = int(cfg.strides.size());
    conv_in_ = Conv1d<T>(std::size_t(cfg.latent_dim), std::size_t(cfg.channels_at(n - 1)), 7, rng, 1, 3);
    for (int i = n - 1; i >= 0; --i) {
        const auto c = std::size_t(cfg.channels_at(i));
        const auto next = std::size_t(cfg.channels_at(i - 1));
        const auto s = std::size_t(cfg.strides[std::size_t(i)]);
        const std::size_t pad = (s + 1) / 2;
        Block b;
        b.act = Activation1d<T>(cfg.activation, c);
        // Output length is exactly s times the input length.
        b.up = ConvTranspose1d<T>(c, next, 2 * s, rng, s, pad, 2 * pad - s);
        for (int u = 0; u < cfg.residual_units; ++u) b.units.emplace_back(cfg.activation, next, dilation_for(u), rng);
        blocks_.push_back(std::move(b));
    }
    const auto first = std::size_t(cfg.channels_at(-1));
    act_out_ = Activation1d<T>(cfg.activation, first);
    conv_out_ = Conv1d<T>(first, 1, 7, rng, 1, 3);
    // Starts silent; the hidden activations are far from unit scale and a
    // random projection would saturate the tanh.
    std::fill(conv_out_.weight.mutable_data().begin(), conv_out_.weight.mutable_data().end(), T(0));
}

template <typename T>
ad::Tensor<T> Decoder<T>::operator()(const ad::Tensor<T>& z) const {
    auto h = conv_in_(z);
    for (const auto& b : blocks_) {
        h = b.up(b.act(h));
        for (const auto& u : b.units) h = u(h);
    }
    return ad::tanh(conv_out_(act_out_(h)));
}

template <typename T>
void Decoder<T>::collect(const std::string& name, ad::ParameterList<T>& out) const {
    conv_in_.collect(name + ".conv_in", out);
    for (std::size_t i = 0; i < blocks_.size(); ++i) {
        const std::string p = name + ".block" + std::to_string(i);
        blocks_[i].act.collect(p + ".act", out);
        blocks_[i].up.collect(p + ".up", out);
        for (std::size_t u = 0; u < blocks_[i].units.size(); ++u)
            blocks_[i].units[u].collect(p + ".res" + std::to_string(u), out);
    }
    act_out_.collect(name + ".act_out", out);
    conv_out_.collect(name + ".conv_out", out);
}

#define SDC_INSTANTIATE(T)                 \
    template struct Conv1d<T>;             \
    template struct ConvTranspose1d<T>;    \
    template struct Activation1d<T>;       \
    template struct ResidualUnit<T>;       \
    template class Encoder<T>;             \
    template class Decoder<T>;
SDC_INSTANTIATE(float)
SDC_INSTANTIATE(double)
#undef SDC_INSTANTIATE

}  // namespace sdc
