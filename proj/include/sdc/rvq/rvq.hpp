#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "sdc/ad/param.hpp"
#include "sdc/ad/tensor.hpp"

namespace sdc {

// One RVQ stage: entries [K, D] plus the bookkeeping for dead-entry revival.
template <typename T>
struct Codebook {
    ad::Tensor<T> entries;
    std::vector<std::int64_t> usage_counts;  // total selections
    std::vector<int> idle_steps;             // consecutive training steps without selection

    static Codebook random(std::size_t entries, std::size_t dim, std::mt19937_64& rng, double scale = 1.0);
    static Codebook from(std::size_t entries, std::size_t dim, std::vector<T> values);

    std::size_t size() const { return entries.dim(0); }
    std::size_t dim() const { return entries.dim(1); }
};

template <typename T>
struct RVQResult {
    // tokens[stage][b * frames + f]
    std::vector<std::vector<int>> tokens;
    // Forward value is the sum of chosen entries; its gradient w.r.t. the
    // latent is the identity (straight-through).
    ad::Tensor<T> quantized;
    // Energy of the residual left after each stage.
    std::vector<double> residual_energy;
    ad::Tensor<T> cb_loss;
    ad::Tensor<T> cmt_loss;
    // Per-stage residual values (stage input), kept for dead-entry revival.
    std::vector<std::vector<T>> stage_inputs;
};

// latent is [B, D, F]. Stage i quantizes r_i = z - sg(e_0 + ... + e_{i-1}) to
// its nearest entry e_i (lowest index on ties); cb = sum_i mean |sg(r_i) - e_i|^2,
// cmt = sum_i mean |r_i - sg(e_i)|^2. `forced` pins the tokens instead of
// searching (used to differentiate at a fixed assignment).
template <typename T>
RVQResult<T> rvq_encode(const ad::Tensor<T>& latent, const std::vector<Codebook<T>>& books,
                        const std::vector<std::vector<int>>* forced = nullptr);

// Sum of indexed entries, [batch, D, frames]. InvalidToken on out-of-range indices.
template <typename T>
ad::Tensor<T> rvq_decode(const std::vector<std::vector<int>>& tokens, const std::vector<Codebook<T>>& books,
                         std::size_t batch, std::size_t frames);

// Counts selections from one training step and reseeds every entry that has
// been idle for `killed_after` consecutive steps with a random stage input
// vector from this step. Returns the number of reseeded entries.
template <typename T>
std::size_t update_usage(std::vector<Codebook<T>>& books, const RVQResult<T>& result, std::size_t batch,
                         std::size_t frames, int killed_after, std::mt19937_64& rng);

}  // namespace sdc
