#include "sdc/cascade/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>

#include "json.hpp"
#include "sdc/ad/ops.hpp"
#include "sdc/error.hpp"
#include "sdc/io/log.hpp"

namespace sdc {
namespace {

using Tensorf = ad::Tensor<float>;
using Terms = LossBreakdown<Tensorf>;

Terms branch_terms(const Discriminator<float>& disc, const Tensorf& real, const Tensorf& fake,
                   const RVQResult<float>& rvq, const std::vector<SpectralScale>& scales) {
    auto adv = generator_adversarial(disc, real, fake);
    return {{LossKind::Gen, adv.gen},
            {LossKind::Fm, adv.fm},
            {LossKind::Mel, ad::mel_loss(real, fake, scales)},
            {LossKind::Cb, rvq.cb_loss},
            {LossKind::Cmt, rvq.cmt_loss}};
}

LossBreakdown<double> values(const Terms& t, int stage, int step, const char* branch) {
    LossBreakdown<double> out;
    for (const auto& [kind, v] : t) {
        const double x = v.item();
        if (!std::isfinite(x))
            fail(ErrorKind::NanLoss, "stage " + std::to_string(stage) +
                                         (step < 0 ? std::string(" probe") : " step " + std::to_string(step)) + ": " +
                                         std::string(to_string(kind)) + " loss of the " + branch +
                                         " branch is not finite");
        out[kind] = x;
    }
    return out;
}

double disc_step(const Discriminator<float>& disc, ad::Adam<float>& opt, const Tensorf& real, const Tensorf& fake,
                 int stage, int step) {
    opt.zero_grad();
    auto loss = discriminator_loss(disc, real, fake);
    const double v = loss.item();
    if (!std::isfinite(v))
        fail(ErrorKind::NanLoss, "stage " + std::to_string(stage) + " step " + std::to_string(step) +
                                     ": discriminator loss is not finite");
    loss.backward();
    opt.step();
    return v;
}

// Discriminator parameters stay out of the generator graph.
class FrozenDisc {
public:
    explicit FrozenDisc(std::vector<ad::ParameterList<float>> lists) : lists_(std::move(lists)) {
        for (auto& l : lists_) l.set_requires_grad(false);
    }
    ~FrozenDisc() {
        for (auto& l : lists_) l.set_requires_grad(true);
    }

private:
    std::vector<ad::ParameterList<float>> lists_;
};

constexpr int kProbeBatches = 8;

class Trainer {
public:
    Trainer(CascadeModel& m, const Dataset& d, const TrainOptions& o)
        : m_(m),
          data_(d),
          opt_(o),
          rng_(o.seed),
          reseed_rng_(o.seed ^ 0x5eedULL),
          probe_rng_(o.seed ^ 0x9b0beULL),
          scales_low_(default_scales(m.config.low.sample_rate)),
          scales_high_(default_scales(m.config.high.sample_rate)),
          disc_low_opt_(m.disc_low.parameters(), o.discriminator),
          disc_high_opt_(m.disc_high.parameters(), o.discriminator) {
        if (data_.empty()) fail(ErrorKind::NoData, "training dataset is empty");
        if (opt_.batch == 0) fail(ErrorKind::InvalidConfig, "batch size must be >= 1");
        crop_ = std::size_t(std::lround(opt_.crop_seconds * m.config.low.sample_rate));
        const std::size_t hop = std::size_t(m.config.low.hop());
        crop_ = (crop_ + hop - 1) / hop * hop;
        if (crop_ < 2048) fail(ErrorKind::InvalidConfig, "crop must span at least 2048 low-rate samples");
        if (!opt_.out_dir.empty()) {
            std::filesystem::create_directories(opt_.out_dir);
            log_.open(opt_.out_dir / "train_log.jsonl");
            if (!log_) fail(ErrorKind::IoError, "cannot write " + (opt_.out_dir / "train_log.jsonl").string());
        }
    }

    TrainReport run() {
        TrainReport report;
        const auto& s = m_.config.schedule;
        report.stages.push_back(stage(1, s.stage1));
        checkpoint("stage1");
        report.stages.push_back(stage(2, s.stage2));
        checkpoint("stage2");
        report.stages.push_back(stage(3, s.finetune));
        checkpoint("final");
        return report;
    }

private:
    StageReport stage(int id, int steps) {
        StageReport rep;
        rep.stage = id;
        event({{"event", "stage_start"}, {"stage", id}, {"steps", steps}});
        log(LogLevel::Info, "stage " + std::to_string(id) + ": " + std::to_string(steps) + " steps");
        const auto t0 = std::chrono::steady_clock::now();
        probe(id, rep);

        auto low_params = m_.low.parameters();
        auto high_params = m_.high.parameters();
        std::unique_ptr<ad::Adam<float>> gen_opt;
        std::vector<float> frozen;
        if (id == 1) {
            low_params.set_requires_grad(true);
            high_params.set_requires_grad(false);
            gen_opt = std::make_unique<ad::Adam<float>>(low_params, opt_.generator);
        } else if (id == 2) {
            low_params.set_requires_grad(false);
            high_params.set_requires_grad(true);
            gen_opt = std::make_unique<ad::Adam<float>>(high_params, opt_.generator);
            if (opt_.verify_freeze) frozen = low_params.snapshot();
        } else {
            low_params.set_requires_grad(true);
            high_params.set_requires_grad(true);
            ad::ParameterList<float> both;
            both.extend("low", low_params);
            both.extend("high", high_params);
            gen_opt = std::make_unique<ad::Adam<float>>(both, opt_.generator);
        }

        for (int step = 0; step < steps; ++step) {
            StepRecord r = id == 1 ? step_low(*gen_opt, step) : id == 2 ? step_high(*gen_opt, step)
                                                                          : step_joint(*gen_opt, step);
            if (id == 2 && opt_.verify_freeze) {
                const auto now = low_params.snapshot();
                if (now.size() != frozen.size() ||
                    std::memcmp(now.data(), frozen.data(), now.size() * sizeof(float)) != 0)
                    rep.freeze_held = false;
            }
            rep.total.push_back(r.total);
            if (id == 1)
                rep.mel.push_back(r.low.at(LossKind::Mel));
            else if (id == 2)
                rep.mel.push_back(r.high.at(LossKind::Mel));
            else
                rep.mel.push_back(0.5 * (r.low.at(LossKind::Mel) + r.high.at(LossKind::Mel)));
            record(r);
            if (opt_.on_step) opt_.on_step(r);
            if (opt_.log_every > 0 && (step + 1) % opt_.log_every == 0) {
                const std::size_t w = std::size_t(opt_.log_every);
                char buf[160];
                std::snprintf(buf, sizeof buf, "stage %d step %d/%d total %.4f mel %.4f disc %.4f", id, step + 1,
                              steps, curve_mean(rep.total, w, false), curve_mean(rep.mel, w, false), r.disc);
                log(LogLevel::Info, buf);
            }
        }
        low_params.set_requires_grad(true);
        high_params.set_requires_grad(true);
        rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        event({{"event", "stage_end"},
               {"stage", id},
               {"steps", steps},
               {"seconds", rep.seconds},
               {"init_total", rep.init_total},
               {"init_mel", rep.init_mel},
               {"total_drop", rep.total.empty() ? 0.0 : drop_from(rep.init_total, rep.total)},
               {"mel_drop", rep.mel.empty() ? 0.0 : drop_from(rep.init_mel, rep.mel)},
               {"freeze_held", rep.freeze_held}});
        return rep;
    }

    // Stage objective of the model as it enters the stage, averaged over
    // kProbeBatches batches from a separate stream. Nothing is updated.
    void probe(int id, StageReport& rep) {
        ad::NoGradGuard nograd;
        double total = 0, mel = 0;
        for (int i = 0; i < kProbeBatches; ++i) {
            const Batch b = data_.sample(opt_.batch, crop_, probe_rng_);
            if (id == 1) {
                const auto r = m_.low.forward(b.s16);
                const auto t = branch_terms(m_.disc_low, b.s16, r.decoded, r.rvq, scales_low_);
                total += weighted_total(t, m_.config.low_weights).item();
                mel += values(t, id, -1, "low").at(LossKind::Mel);
                continue;
            }
            const auto r16 = m_.low.forward(b.s16);
            const Tensorf u = ad::upsample(r16.decoded, m_.up);
            const auto r32 = m_.high.forward(ad::sub(b.s32, u));
            const Tensorf s_hat = ad::add(u, r32.decoded);
            const auto high = branch_terms(m_.disc_high, b.s32, s_hat, r32.rvq, scales_high_);
            const double mel_high = values(high, id, -1, "high").at(LossKind::Mel);
            if (id == 2) {
                total += weighted_total(high, m_.config.high_weights).item();
                mel += mel_high;
                continue;
            }
            const auto low = branch_terms(m_.disc_low, b.s16, r16.decoded, r16.rvq, scales_low_);
            total += finetune_total(low, high, m_.config.low_weights, m_.config.high_weights).item();
            mel += 0.5 * (values(low, id, -1, "low").at(LossKind::Mel) + mel_high);
        }
        rep.init_total = total / kProbeBatches;
        rep.init_mel = mel / kProbeBatches;
    }

    StepRecord step_low(ad::Adam<float>& gen_opt, int step) {
        const Batch b = data_.sample(opt_.batch, crop_, rng_);
        auto r = m_.low.forward(b.s16);
        StepRecord rec;
        rec.stage = 1;
        rec.step = step;
        rec.disc = disc_step(m_.disc_low, disc_low_opt_, b.s16, r.decoded, 1, step);
        gen_opt.zero_grad();
        Tensorf total;
        {
            FrozenDisc guard({m_.disc_low.parameters()});
            const auto terms = branch_terms(m_.disc_low, b.s16, r.decoded, r.rvq, scales_low_);
            rec.low = values(terms, 1, step, "low");
            total = weighted_total(terms, m_.config.low_weights);
        }
        rec.total = total.item();
        total.backward();
        gen_opt.step();
        rec.reseeded = update_usage(m_.low.codebooks(), r.rvq, opt_.batch, r.frames, m_.config.low.killed_after,
                                    reseed_rng_);
        return rec;
    }

    StepRecord step_high(ad::Adam<float>& gen_opt, int step) {
        const Batch b = data_.sample(opt_.batch, crop_, rng_);
        Tensorf u, residual;
        {
            ad::NoGradGuard nograd;
            const auto d16 = m_.low.forward(b.s16);
            u = ad::upsample(d16.decoded, m_.up);
            residual = ad::sub(b.s32, u);
        }
        auto r = m_.high.forward(residual);
        const Tensorf s_hat = ad::add(u, r.decoded);
        StepRecord rec;
        rec.stage = 2;
        rec.step = step;
        rec.disc = disc_step(m_.disc_high, disc_high_opt_, b.s32, s_hat, 2, step);
        gen_opt.zero_grad();
        Tensorf total;
        {
            FrozenDisc guard({m_.disc_high.parameters()});
            const auto terms = branch_terms(m_.disc_high, b.s32, s_hat, r.rvq, scales_high_);
            rec.high = values(terms, 2, step, "high");
            total = weighted_total(terms, m_.config.high_weights);
        }
        rec.total = total.item();
        total.backward();
        gen_opt.step();
        rec.reseeded = update_usage(m_.high.codebooks(), r.rvq, opt_.batch, r.frames, m_.config.high.killed_after,
                                    reseed_rng_);
        return rec;
    }

    StepRecord step_joint(ad::Adam<float>& gen_opt, int step) {
        const Batch b = data_.sample(opt_.batch, crop_, rng_);
        auto r16 = m_.low.forward(b.s16);
        const Tensorf u = ad::upsample(r16.decoded, m_.up);
        auto r32 = m_.high.forward(ad::sub(b.s32, u));
        const Tensorf s_hat = ad::add(u, r32.decoded);
        StepRecord rec;
        rec.stage = 3;
        rec.step = step;
        rec.disc = disc_step(m_.disc_low, disc_low_opt_, b.s16, r16.decoded, 3, step) +
                   disc_step(m_.disc_high, disc_high_opt_, b.s32, s_hat, 3, step);
        gen_opt.zero_grad();
        Tensorf total;
        {
            FrozenDisc guard({m_.disc_low.parameters(), m_.disc_high.parameters()});
            const auto low = branch_terms(m_.disc_low, b.s16, r16.decoded, r16.rvq, scales_low_);
            const auto high = branch_terms(m_.disc_high, b.s32, s_hat, r32.rvq, scales_high_);
            rec.low = values(low, 3, step, "low");
            rec.high = values(high, 3, step, "high");
            total = finetune_total(low, high, m_.config.low_weights, m_.config.high_weights);
        }
        rec.total = total.item();
        total.backward();
        gen_opt.step();
        rec.reseeded = update_usage(m_.low.codebooks(), r16.rvq, opt_.batch, r16.frames,
                                    m_.config.low.killed_after, reseed_rng_) +
                       update_usage(m_.high.codebooks(), r32.rvq, opt_.batch, r32.frames,
                                    m_.config.high.killed_after, reseed_rng_);
        return rec;
    }

    void record(const StepRecord& r) {
        if (!log_.is_open()) return;
        nlohmann::ordered_json j{{"event", "step"}, {"stage", r.stage}, {"step", r.step}, {"total", r.total},
                                 {"disc", r.disc}};
        for (const auto& [kind, v] : r.low) j[std::string(to_string(kind)) + "_low"] = v;
        for (const auto& [kind, v] : r.high) j[std::string(to_string(kind)) + "_high"] = v;
        if (r.reseeded) j["reseeded"] = r.reseeded;
        log_ << j.dump() << '\n';
    }

    void event(const nlohmann::ordered_json& j) {
        if (log_.is_open()) log_ << j.dump() << std::endl;
    }

    void checkpoint(const std::string& tag) {
        if (opt_.out_dir.empty()) return;
        const auto path = opt_.out_dir / (tag + ".sdck");
        save_checkpoint(path, m_.to_checkpoint(tag));
        event({{"event", "checkpoint"}, {"stage", tag}, {"path", path.string()}});
        log(LogLevel::Info, "wrote " + path.string());
    }

    CascadeModel& m_;
    const Dataset& data_;
    TrainOptions opt_;
    std::mt19937_64 rng_;
    std::mt19937_64 reseed_rng_;
    std::mt19937_64 probe_rng_;
    std::vector<SpectralScale> scales_low_, scales_high_;
    ad::Adam<float> disc_low_opt_, disc_high_opt_;
    std::size_t crop_ = 0;
    std::ofstream log_;
};

}  // namespace

double curve_mean(const std::vector<double>& curve, std::size_t window, bool head) {
    if (curve.empty()) fail(ErrorKind::NoData, "empty loss curve");
    window = std::clamp<std::size_t>(window, 1, curve.size());
    const auto first = head ? curve.begin() : curve.end() - std::ptrdiff_t(window);
    return std::accumulate(first, first + std::ptrdiff_t(window), 0.0) / double(window);
}

double smoothed_drop(const std::vector<double>& curve) {
    const std::size_t w = std::clamp<std::size_t>(curve.size() / 10, 1, 50);
    const double start = curve_mean(curve, w, true);
    if (start == 0.0) return 0.0;
    return 1.0 - curve_mean(curve, w, false) / start;
}

double drop_from(double init, const std::vector<double>& curve) {
    if (init == 0.0) return 0.0;
    const std::size_t w = std::clamp<std::size_t>(curve.size() / 10, 1, 50);
    return 1.0 - curve_mean(curve, w, false) / init;
}

TrainReport train_cascade(CascadeModel& model, const Dataset& data, const TrainOptions& opt) {
    return Trainer(model, data, opt).run();
}

}  // namespace sdc
