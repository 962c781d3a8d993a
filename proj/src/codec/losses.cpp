#include "sdc/codec/losses.hpp"

#include <string>

#include "sdc/ad/ops.hpp"
#include "sdc/error.hpp"

namespace sdc {
namespace {

constexpr LossKind kTerms[] = {LossKind::Gen, LossKind::Fm, LossKind::Mel, LossKind::Cb, LossKind::Cmt};

bool halved(LossKind k) { return k == LossKind::Gen || k == LossKind::Fm || k == LossKind::Mel; }

template <typename V>
const V& term(const LossBreakdown<V>& b, LossKind k, const char* which) {
    auto it = b.find(k);
    if (it == b.end())
        fail(ErrorKind::IncompleteBreakdown, std::string(which) + " breakdown lacks the " + std::string(to_string(k)) + " term");
    return it->second;
}

template <typename T>
ad::Tensor<T> accumulate(ad::Tensor<T> acc, const ad::Tensor<T>& v, double c) {
    auto scaled = ad::scale(v, T(c));
    return acc.defined() ? ad::add(acc, scaled) : scaled;
}

}  // namespace

double weight_of(const LossWeights& w, LossKind kind) {
    switch (kind) {
        case LossKind::Gen: return w.gen;
        case LossKind::Fm: return w.fm;
        case LossKind::Mel: return w.mel;
        case LossKind::Cb: return w.cb;
        case LossKind::Cmt: return w.cmt;
        default: fail(ErrorKind::InvalidConfig, "no training weight for " + std::string(to_string(kind)));
    }
}

template <typename T>
GeneratorAdversarial<T> generator_adversarial(const Discriminator<T>& disc, const ad::Tensor<T>& real,
                                              const ad::Tensor<T>& fake) {
    if (real.shape() != fake.shape())
        fail(ErrorKind::ShapeMismatch, "adversarial losses need equal shapes, got " + ad::to_string(real.shape()) +
                                           " and " + ad::to_string(fake.shape()));
    DiscOutput<T> r;
    {
        ad::NoGradGuard guard;
        r = disc(real.detach());
    }
    const DiscOutput<T> f = disc(fake);
    ad::Tensor<T> gen, fm;
    std::size_t layers = 0;
    for (std::size_t s = 0; s < f.logits.size(); ++s) {
        gen = accumulate(gen, ad::mean(ad::square(ad::add_scalar(f.logits[s], T(-1)))), 1.0);
        for (std::size_t l = 0; l < f.features[s].size(); ++l, ++layers)
            fm = accumulate(fm, ad::l1(r.features[s][l], f.features[s][l]), 1.0);
    }
    return {ad::scale(gen, T(1) / T(f.logits.size())), ad::scale(fm, T(1) / T(layers))};
}

template <typename T>
ad::Tensor<T> discriminator_loss(const Discriminator<T>& disc, const ad::Tensor<T>& real, const ad::Tensor<T>& fake) {
    if (real.shape() != fake.shape()) fail(ErrorKind::ShapeMismatch, "discriminator loss needs equal shapes");
    const auto r = disc(real.detach());
    const auto f = disc(fake.detach());
    ad::Tensor<T> total;
    for (std::size_t s = 0; s < r.logits.size(); ++s) {
        total = accumulate(total, ad::mean(ad::square(ad::add_scalar(r.logits[s], T(-1)))), 1.0);
        total = accumulate(total, ad::mean(ad::square(f.logits[s])), 1.0);
    }
    return ad::scale(total, T(1) / T(r.logits.size()));
}

double weighted_total(const LossBreakdown<double>& terms, const LossWeights& w) {
    double total = 0.0;
    for (LossKind k : kTerms) total += weight_of(w, k) * term(terms, k, "branch");
    return total;
}

template <typename T>
ad::Tensor<T> weighted_total(const LossBreakdown<ad::Tensor<T>>& terms, const LossWeights& w) {
    ad::Tensor<T> total;
    for (LossKind k : kTerms) total = accumulate(total, term(terms, k, "branch"), weight_of(w, k));
    return total;
}

double finetune_total(const LossBreakdown<double>& low, const LossBreakdown<double>& high, const LossWeights& w_low,
                      const LossWeights& w_high) {
    double total = 0.0;
    for (LossKind k : kTerms) {
        const double sum = weight_of(w_high, k) * term(high, k, "32 kHz") + weight_of(w_low, k) * term(low, k, "16 kHz");
        total += halved(k) ? 0.5 * sum : sum;
    }
    return total;
}

template <typename T>
ad::Tensor<T> finetune_total(const LossBreakdown<ad::Tensor<T>>& low, const LossBreakdown<ad::Tensor<T>>& high,
                             const LossWeights& w_low, const LossWeights& w_high) {
    ad::Tensor<T> total;
    for (LossKind k : kTerms) {
        const double c = halved(k) ? 0.5 : 1.0;
        total = accumulate(total, term(high, k, "32 kHz"), c * weight_of(w_high, k));
        total = accumulate(total, term(low, k, "16 kHz"), c * weight_of(w_low, k));
    }
    return total;
}

#define SDC_INSTANTIATE(T)                                                                                        \
    template GeneratorAdversarial<T> generator_adversarial(const Discriminator<T>&, const ad::Tensor<T>&,         \
                                                           const ad::Tensor<T>&);                                 \
    template ad::Tensor<T> discriminator_loss(const Discriminator<T>&, const ad::Tensor<T>&, const ad::Tensor<T>&); \
    template ad::Tensor<T> weighted_total(const LossBreakdown<ad::Tensor<T>>&, const LossWeights&);               \
    template ad::Tensor<T> finetune_total(const LossBreakdown<ad::Tensor<T>>&, const LossBreakdown<ad::Tensor<T>>&, \
                                          const LossWeights&, const LossWeights&);
SDC_INSTANTIATE(float)
SDC_INSTANTIATE(double)
#undef SDC_INSTANTIATE

}  // namespace sdc
