#include "sdc/codec/branch.hpp"

#include <string>

#include "sdc/ad/ops.hpp"
#include "sdc/error.hpp"

namespace sdc {
namespace {

// Separate streams keep encoder, codebook and decoder initialisation
// independent of each other's sizes.
std::mt19937_64 stream(std::uint64_t seed, std::uint64_t salt) {
    std::seed_seq seq{std::uint32_t(seed), std::uint32_t(seed >> 32), std::uint32_t(salt)};
    return std::mt19937_64(seq);
}

template <typename T>
Encoder<T> make_encoder(const BranchConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    auto rng = stream(seed, 1);
    return Encoder<T>(cfg, rng);
}

}  // namespace

template <typename T>
CodecBranch<T>::CodecBranch(const BranchConfig& cfg, std::uint64_t seed)
    : cfg_(cfg), encoder_(make_encoder<T>(cfg, seed)), decoder_([&] {
          auto rng = stream(seed, 3);
          return Decoder<T>(cfg, rng);
      }()) {
    auto rng = stream(seed, 2);
    for (int i = 0; i < cfg.n_quantizers; ++i)
        books_.push_back(Codebook<T>::random(std::size_t(cfg.codebook_size()), std::size_t(cfg.latent_dim), rng));
}

template <typename T>
ad::Tensor<T> CodecBranch<T>::encode_latent(const ad::Tensor<T>& x) const {
    if (x.rank() != 3 || x.dim(1) != 1)
        fail(ErrorKind::ShapeMismatch, "branch input must be [B, 1, L], got " + ad::to_string(x.shape()));
    const std::size_t L = x.dim(2), hop = std::size_t(cfg_.hop());
    if (L < hop)
        fail(ErrorKind::SignalTooShort, std::to_string(L) + " samples is shorter than one " + std::to_string(hop) +
                                            "-sample frame");
    const std::size_t padded = (L + hop - 1) / hop * hop;
    return encoder_(padded == L ? x : ad::pad_time(x, 0, padded - L));
}

template <typename T>
BranchResult<T> CodecBranch<T>::forward(const ad::Tensor<T>& x, const std::vector<std::vector<int>>* forced) const {
    const auto z = encode_latent(x);
    BranchResult<T> r;
    r.frames = z.dim(2);
    r.rvq = rvq_encode(z, books_, forced);
    auto y = decoder_(r.rvq.quantized);
    const std::size_t L = x.dim(2);
    r.decoded = y.dim(2) == L ? y : ad::crop_time(y, 0, L);
    return r;
}

template <typename T>
ad::Tensor<T> CodecBranch<T>::decode_tokens(const std::vector<std::vector<int>>& tokens, std::size_t batch,
                                            std::size_t frames) const {
    return decoder_(rvq_decode(tokens, books_, batch, frames));
}

template <typename T>
ad::ParameterList<T> CodecBranch<T>::parameters() const {
    ad::ParameterList<T> p;
    encoder_.collect("encoder", p);
    for (std::size_t i = 0; i < books_.size(); ++i) p.add("rvq.book" + std::to_string(i), books_[i].entries);
    decoder_.collect("decoder", p);
    return p;
}

template class CodecBranch<float>;
template class CodecBranch<double>;

}  // namespace sdc
