#pragma once

#include <memory>
#include <vector>

#include "sdc/codec/branch.hpp"
#include "sdc/codec/config.hpp"
#include "sdc/metrics/metrics.hpp"
#include "sdc/signal/audio.hpp"
#include "sdc/signal/resample.hpp"

namespace sdc {

struct Schedule {
    int stage1 = 2000;
    int stage2 = 2000;
    int finetune = 1000;
};

struct CascadeConfig {
    BranchConfig low = BranchConfig::defaults_16k();
    BranchConfig high = BranchConfig::defaults_32k();
    LossWeights low_weights;
    LossWeights high_weights;
    Schedule schedule;

    // Rates ascend and divide, frame rates agree.
    void validate() const;
    int factor() const { return high.sample_rate / low.sample_rate; }
};

struct CodecOutput {
    AudioBuffer decoded;
    std::vector<std::vector<int>> tokens;  // empty for stand-in codecs
};

// A branch as seen by the cascade: one signal in, one decoded signal out.
class BranchCodec {
public:
    virtual ~BranchCodec() = default;
    virtual int sample_rate() const = 0;
    virtual CodecOutput process(const AudioBuffer& x) const = 0;
};

// Test double: decoded = input.
class IdentityCodec final : public BranchCodec {
public:
    explicit IdentityCodec(int rate) : rate_(rate) {}
    int sample_rate() const override { return rate_; }
    CodecOutput process(const AudioBuffer& x) const override;

private:
    int rate_;
};

// Test double: decoded = zeros.
class ZeroCodec final : public BranchCodec {
public:
    explicit ZeroCodec(int rate) : rate_(rate) {}
    int sample_rate() const override { return rate_; }
    CodecOutput process(const AudioBuffer& x) const override;

private:
    int rate_;
};

// Inference through a trained branch (no graph recorded).
class NeuralCodec final : public BranchCodec {
public:
    explicit NeuralCodec(const CodecBranch<float>& branch) : branch_(branch) {}
    int sample_rate() const override { return branch_.config().sample_rate; }
    CodecOutput process(const AudioBuffer& x) const override;

private:
    const CodecBranch<float>& branch_;
};

struct CascadeOutput {
    AudioBuffer s_hat_16;
    AudioBuffer s_hat_32;
    AudioBuffer d_hat_16;
    AudioBuffer d_hat_32;
    AudioBuffer u_d_hat_16;  // U(d_hat_16)
    std::vector<std::vector<int>> tokens_16;
    std::vector<std::vector<int>> tokens_32;
};

// d16 = low(s16); d32 = high(s32 - U(d16)); s_hat_32 = U(d16) + d32.
CascadeOutput cascade_forward(const AudioBuffer& s16, const AudioBuffer& s32, const BranchCodec& low,
                              const BranchCodec& high, const PolyphaseUpsampler& up);

// cascade_forward(s16, U(s16)): the high branch sees no content above 8 kHz.
CascadeOutput inpaint(const AudioBuffer& s16, const BranchCodec& low, const BranchCodec& high,
                      const PolyphaseUpsampler& up);

// Band SDRs of d_hat_32 against s32, energy fractions of d_hat_32, and
// interface-band versus overall SDR of s_hat_32.
MetricReport disentanglement_report(const AudioBuffer& s32, const CascadeOutput& out);

}  // namespace sdc
