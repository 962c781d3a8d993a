#include "sdc/cascade/cascade.hpp"

#include <cmath>
#include <string>

#include "sdc/ad/ops.hpp"
#include "sdc/error.hpp"

namespace sdc {
namespace {

AudioBuffer upsample(const PolyphaseUpsampler& up, const AudioBuffer& x) {
    AudioBuffer y = AudioBuffer::zeros(x.size() * std::size_t(up.factor()), x.sample_rate * up.factor());
    up.apply<double>(x.samples, y.samples);
    return y;
}

}  // namespace

void CascadeConfig::validate() const {
    low.validate();
    high.validate();
    low_weights.validate();
    high_weights.validate();
    if (low.sample_rate >= high.sample_rate || high.sample_rate % low.sample_rate != 0)
        fail(ErrorKind::InvalidConfig, "branch rates must ascend by an integer factor");
    if (low.frame_rate() != high.frame_rate())
        fail(ErrorKind::InvalidConfig, "branches must share one frame rate (" + std::to_string(low.frame_rate()) +
                                           " vs " + std::to_string(high.frame_rate()) + " Hz)");
    if (schedule.stage1 < 0 || schedule.stage2 < 0 || schedule.finetune < 0)
        fail(ErrorKind::InvalidConfig, "stage budgets must be >= 0");
}

CodecOutput IdentityCodec::process(const AudioBuffer& x) const {
    if (x.sample_rate != rate_) fail(ErrorKind::RateMismatch, "identity codec runs at " + std::to_string(rate_) + " Hz");
    return {x, {}};
}

CodecOutput ZeroCodec::process(const AudioBuffer& x) const {
    if (x.sample_rate != rate_) fail(ErrorKind::RateMismatch, "zero codec runs at " + std::to_string(rate_) + " Hz");
    return {AudioBuffer::zeros(x.size(), rate_), {}};
}

CodecOutput NeuralCodec::process(const AudioBuffer& x) const {
    if (x.sample_rate != sample_rate())
        fail(ErrorKind::RateMismatch, "branch runs at " + std::to_string(sample_rate()) + " Hz, input is " +
                                          std::to_string(x.sample_rate) + " Hz");
    ad::NoGradGuard guard;
    std::vector<float> v(x.samples.begin(), x.samples.end());
    const auto r = branch_.forward(ad::Tensor<float>::from({1, 1, x.size()}, std::move(v)));
    CodecOutput out;
    out.decoded = AudioBuffer({r.decoded.data().begin(), r.decoded.data().end()}, x.sample_rate);
    out.tokens = r.rvq.tokens;
    return out;
}

CascadeOutput cascade_forward(const AudioBuffer& s16, const AudioBuffer& s32, const BranchCodec& low,
                              const BranchCodec& high, const PolyphaseUpsampler& up) {
    if (s16.sample_rate != low.sample_rate() || s32.sample_rate != high.sample_rate())
        fail(ErrorKind::ShapeMismatch, "cascade inputs must be at " + std::to_string(low.sample_rate()) + " and " +
                                           std::to_string(high.sample_rate()) + " Hz");
    if (s32.size() != s16.size() * std::size_t(up.factor()))
        fail(ErrorKind::ShapeMismatch, "high-rate input must be exactly " + std::to_string(up.factor()) +
                                           "x the low-rate length");
    CascadeOutput out;
    auto low_out = low.process(s16);
    out.d_hat_16 = std::move(low_out.decoded);
    out.tokens_16 = std::move(low_out.tokens);
    out.s_hat_16 = out.d_hat_16;
    out.u_d_hat_16 = upsample(up, out.d_hat_16);
    auto high_out = high.process(s32 - out.u_d_hat_16);
    out.d_hat_32 = std::move(high_out.decoded);
    out.tokens_32 = std::move(high_out.tokens);
    out.s_hat_32 = out.u_d_hat_16 + out.d_hat_32;
    return out;
}

CascadeOutput inpaint(const AudioBuffer& s16, const BranchCodec& low, const BranchCodec& high,
                      const PolyphaseUpsampler& up) {
    return cascade_forward(s16, upsample(up, s16), low, high, up);
}

MetricReport disentanglement_report(const AudioBuffer& s32, const CascadeOutput& out) {
    MetricReport r;
    r.set("d32_sdr_" + kLowBand.label(), band_sdr(s32, out.d_hat_32, kLowBand));
    r.set("d32_sdr_" + kHighBand.label(), band_sdr(s32, out.d_hat_32, kHighBand));
    const double e = energy(out.d_hat_32.samples);
    r.set("d32_energy_fraction_" + kLowBand.label(), e > 0 ? band_energy_fraction(out.d_hat_32, kLowBand) : 0.0);
    r.set("d32_energy_fraction_" + kHighBand.label(), e > 0 ? band_energy_fraction(out.d_hat_32, kHighBand) : 0.0);
    const double interface_sdr = band_sdr(s32, out.s_hat_32, kInterfaceBand);
    const double overall = sdr(s32, out.s_hat_32);
    r.set("s32_sdr_interface_" + kInterfaceBand.label(), interface_sdr);
    r.set("s32_sdr_overall", overall);
    r.set("s32_interface_gap", std::abs(interface_sdr - overall));
    return r;
}

}  // namespace sdc
