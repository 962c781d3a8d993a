#pragma once

#include <map>

#include "sdc/ad/tensor.hpp"
#include "sdc/codec/config.hpp"
#include "sdc/codec/discriminator.hpp"
#include "sdc/spectral/loss.hpp"

namespace sdc {

// Per-term losses of one branch, keyed by gen/fm/mel/cb/cmt.
template <typename V>
using LossBreakdown = std::map<LossKind, V>;

// Least-squares generator terms: gen = mean over scales of mean((D(fake) - 1)^2);
// fm = mean over every hidden layer of the L1 distance between the feature
// maps of real (held constant) and fake.
template <typename T>
struct GeneratorAdversarial {
    ad::Tensor<T> gen;
    ad::Tensor<T> fm;
};

template <typename T>
GeneratorAdversarial<T> generator_adversarial(const Discriminator<T>& disc, const ad::Tensor<T>& real,
                                              const ad::Tensor<T>& fake);

// mean over scales of mean((D(real) - 1)^2) + mean(D(fake)^2), with fake detached.
template <typename T>
ad::Tensor<T> discriminator_loss(const Discriminator<T>& disc, const ad::Tensor<T>& real, const ad::Tensor<T>& fake);

// sum over terms of weight * loss. IncompleteBreakdown if a term is missing.
double weighted_total(const LossBreakdown<double>& terms, const LossWeights& w);
template <typename T>
ad::Tensor<T> weighted_total(const LossBreakdown<ad::Tensor<T>>& terms, const LossWeights& w);

// Joint finetuning objective: gen, fm and mel enter as the mean of the two
// weighted branch terms, cb and cmt as their sum.
double finetune_total(const LossBreakdown<double>& low, const LossBreakdown<double>& high, const LossWeights& w_low,
                      const LossWeights& w_high);
template <typename T>
ad::Tensor<T> finetune_total(const LossBreakdown<ad::Tensor<T>>& low, const LossBreakdown<ad::Tensor<T>>& high,
                             const LossWeights& w_low, const LossWeights& w_high);

double weight_of(const LossWeights& w, LossKind kind);

}  // namespace sdc
