#include "sdc/rvq/rvq.hpp"

#include <string>

#include "sdc/ad/ops.hpp"
#include "sdc/error.hpp"
#include "sdc/kernels/conv.hpp"

namespace sdc {

template <typename T>
Codebook<T> Codebook<T>::random(std::size_t entries, std::size_t dim, std::mt19937_64& rng, double scale) {
    std::normal_distribution<double> dist(0.0, scale);
    std::vector<T> values(entries * dim);
    for (auto& v : values) v = T(dist(rng));
    return from(entries, dim, std::move(values));
}

template <typename T>
Codebook<T> Codebook<T>::from(std::size_t entries, std::size_t dim, std::vector<T> values) {
    if (entries == 0 || dim == 0) fail(ErrorKind::InvalidConfig, "codebook needs at least one entry and dimension");
    Codebook book;
    book.entries = ad::Tensor<T>::from({entries, dim}, std::move(values), true);
    book.usage_counts.assign(entries, 0);
    book.idle_steps.assign(entries, 0);
    return book;
}

template <typename T>
RVQResult<T> rvq_encode(const ad::Tensor<T>& latent, const std::vector<Codebook<T>>& books,
                        const std::vector<std::vector<int>>* forced) {
    if (books.empty()) fail(ErrorKind::InvalidConfig, "rvq_encode needs at least one codebook");
    if (latent.rank() != 3) fail(ErrorKind::ShapeMismatch, "rvq latent must be [B, D, F], got " + ad::to_string(latent.shape()));
    const std::size_t B = latent.dim(0), D = latent.dim(1), F = latent.dim(2);
    for (std::size_t i = 0; i < books.size(); ++i)
        if (books[i].dim() != D)
            fail(ErrorKind::ShapeMismatch, "codebook " + std::to_string(i) + " has dimension " +
                                               std::to_string(books[i].dim()) + ", latent has " + std::to_string(D));
    if (forced && forced->size() != books.size())
        fail(ErrorKind::ShapeMismatch, "forced tokens must cover every stage");

    RVQResult<T> res;
    std::vector<T> acc(latent.numel(), T(0));
    std::vector<T> residual(latent.data().begin(), latent.data().end());
    ad::Tensor<T> cb, cmt;
    for (std::size_t i = 0; i < books.size(); ++i) {
        const auto& book = books[i];
        std::vector<int> tokens(B * F);
        if (forced) {
            tokens = (*forced)[i];
        } else {
            kernels::parallel::nearest_codewords<T>(residual, B, D, F, book.entries.data(), book.size(), tokens);
        }
        const ad::Tensor<T> r = i == 0 ? latent : ad::sub(latent, ad::Tensor<T>::from(latent.shape(), acc));
        const ad::Tensor<T> e = ad::gather_columns(book.entries, tokens, B, F);
        const auto cb_i = ad::mse(r.detach(), e);
        const auto cmt_i = ad::mse(r, e.detach());
        cb = cb.defined() ? ad::add(cb, cb_i) : cb_i;
        cmt = cmt.defined() ? ad::add(cmt, cmt_i) : cmt_i;

        res.stage_inputs.push_back(residual);
        double left = 0.0;
        const auto ev = e.data();
        for (std::size_t j = 0; j < acc.size(); ++j) {
            acc[j] += ev[j];
            residual[j] -= ev[j];
            left += double(residual[j]) * double(residual[j]);
        }
        res.residual_energy.push_back(left);
        res.tokens.push_back(std::move(tokens));
    }
    // z + sg(q - z): the value of q with the gradient of z.
    std::vector<T> offset(acc.size());
    for (std::size_t j = 0; j < acc.size(); ++j) offset[j] = acc[j] - latent.data()[j];
    res.quantized = ad::add(latent, ad::Tensor<T>::from(latent.shape(), std::move(offset)));
    // Bit-exact value regardless of the rounding in z + (q - z).
    std::copy(acc.begin(), acc.end(), res.quantized.mutable_data().begin());
    res.cb_loss = cb;
    res.cmt_loss = cmt;
    return res;
}

template <typename T>
ad::Tensor<T> rvq_decode(const std::vector<std::vector<int>>& tokens, const std::vector<Codebook<T>>& books,
                         std::size_t batch, std::size_t frames) {
    if (tokens.size() != books.size())
        fail(ErrorKind::ShapeMismatch, "rvq_decode: " + std::to_string(tokens.size()) + " token rows for " +
                                           std::to_string(books.size()) + " codebooks");
    if (books.empty()) fail(ErrorKind::InvalidConfig, "rvq_decode needs at least one codebook");
    ad::NoGradGuard guard;
    const std::size_t D = books[0].dim();
    std::vector<T> acc(batch * D * frames, T(0));
    for (std::size_t i = 0; i < books.size(); ++i) {
        const auto e = ad::gather_columns(books[i].entries, tokens[i], batch, frames);
        const auto ev = e.data();
        for (std::size_t j = 0; j < acc.size(); ++j) acc[j] += ev[j];
    }
    return ad::Tensor<T>::from({batch, D, frames}, std::move(acc));
}

template <typename T>
std::size_t update_usage(std::vector<Codebook<T>>& books, const RVQResult<T>& result, std::size_t batch,
                         std::size_t frames, int killed_after, std::mt19937_64& rng) {
    std::size_t revived = 0;
    for (std::size_t i = 0; i < books.size(); ++i) {
        auto& book = books[i];
        std::vector<bool> used(book.size(), false);
        for (int t : result.tokens[i]) {
            used[std::size_t(t)] = true;
            ++book.usage_counts[std::size_t(t)];
        }
        const std::size_t D = book.dim();
        const auto& inputs = result.stage_inputs[i];
        std::uniform_int_distribution<std::size_t> pick(0, batch * frames - 1);
        auto values = book.entries.mutable_data();
        for (std::size_t k = 0; k < book.size(); ++k) {
            book.idle_steps[k] = used[k] ? 0 : book.idle_steps[k] + 1;
            if (book.idle_steps[k] < killed_after) continue;
            const std::size_t col = pick(rng), b = col / frames, f = col % frames;
            for (std::size_t d = 0; d < D; ++d) values[k * D + d] = inputs[(b * D + d) * frames + f];
            book.idle_steps[k] = 0;
            ++revived;
        }
    }
    return revived;
}

#define SDC_INSTANTIATE(T)                                                                                    \
    template struct Codebook<T>;                                                                              \
    template RVQResult<T> rvq_encode(const ad::Tensor<T>&, const std::vector<Codebook<T>>&,                   \
                                     const std::vector<std::vector<int>>*);                                  \
    template ad::Tensor<T> rvq_decode(const std::vector<std::vector<int>>&, const std::vector<Codebook<T>>&,  \
                                      std::size_t, std::size_t);                                              \
    template std::size_t update_usage(std::vector<Codebook<T>>&, const RVQResult<T>&, std::size_t,            \
                                      std::size_t, int, std::mt19937_64&);
SDC_INSTANTIATE(float)
SDC_INSTANTIATE(double)
#undef SDC_INSTANTIATE

}  // namespace sdc
