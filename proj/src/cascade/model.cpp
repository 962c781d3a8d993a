#include "sdc/cascade/model.hpp"

#include <cstdio>

#include "sdc/error.hpp"

namespace sdc {
namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void put_weights(std::map<std::string, std::string>& m, const std::string& prefix, const LossWeights& w) {
    m[prefix + ".gen"] = num(w.gen);
    m[prefix + ".fm"] = num(w.fm);
    m[prefix + ".mel"] = num(w.mel);
    m[prefix + ".cb"] = num(w.cb);
    m[prefix + ".cmt"] = num(w.cmt);
}

double get_number(const std::map<std::string, std::string>& m, const std::string& key) {
    const auto it = m.find(key);
    if (it == m.end()) fail(ErrorKind::ConfigMismatch, "manifest lacks " + key);
    try {
        std::size_t used = 0;
        const double v = std::stod(it->second, &used);
        if (used == it->second.size()) return v;
    } catch (const std::exception&) {
    }
    fail(ErrorKind::ConfigMismatch, "manifest value " + key + " is not a number");
}

LossWeights get_weights(const std::map<std::string, std::string>& m, const std::string& prefix) {
    LossWeights w;
    w.gen = get_number(m, prefix + ".gen");
    w.fm = get_number(m, prefix + ".fm");
    w.mel = get_number(m, prefix + ".mel");
    w.cb = get_number(m, prefix + ".cb");
    w.cmt = get_number(m, prefix + ".cmt");
    return w;
}

}  // namespace

CascadeModel::CascadeModel(const CascadeConfig& cfg, std::uint64_t seed)
    : config((cfg.validate(), cfg)),
      low(cfg.low, seed),
      high(cfg.high, seed + 1000),
      disc_low(std::size_t(cfg.low.disc_channels), seed + 2000),
      disc_high(std::size_t(cfg.high.disc_channels), seed + 3000),
      up(cfg.factor()) {}

Checkpoint CascadeModel::to_checkpoint(const std::string& stage) const {
    Checkpoint ck;
    ck.manifest = config.low.to_manifest("low");
    ck.manifest.merge(config.high.to_manifest("high"));
    put_weights(ck.manifest, "weights.low", config.low_weights);
    put_weights(ck.manifest, "weights.high", config.high_weights);
    ck.manifest["schedule.stage1"] = std::to_string(config.schedule.stage1);
    ck.manifest["schedule.stage2"] = std::to_string(config.schedule.stage2);
    ck.manifest["schedule.finetune"] = std::to_string(config.schedule.finetune);
    ck.manifest["stage"] = stage;
    ck.add("low", low.parameters());
    ck.add("high", high.parameters());
    ck.add("disc_low", disc_low.parameters());
    ck.add("disc_high", disc_high.parameters());
    return ck;
}

CascadeModel CascadeModel::from_checkpoint(const Checkpoint& ckpt) {
    CascadeConfig cfg;
    cfg.low = BranchConfig::from_manifest(ckpt.manifest, "low");
    cfg.high = BranchConfig::from_manifest(ckpt.manifest, "high");
    cfg.low_weights = get_weights(ckpt.manifest, "weights.low");
    cfg.high_weights = get_weights(ckpt.manifest, "weights.high");
    cfg.schedule.stage1 = int(get_number(ckpt.manifest, "schedule.stage1"));
    cfg.schedule.stage2 = int(get_number(ckpt.manifest, "schedule.stage2"));
    cfg.schedule.finetune = int(get_number(ckpt.manifest, "schedule.finetune"));
    try {
        cfg.validate();
    } catch (const Error& e) {
        fail(ErrorKind::ConfigMismatch, std::string("checkpoint config invalid: ") + e.what());
    }
    CascadeModel m(cfg, 0);
    auto p = m.low.parameters();
    ckpt.load_into("low", p);
    p = m.high.parameters();
    ckpt.load_into("high", p);
    p = m.disc_low.parameters();
    ckpt.load_into("disc_low", p);
    p = m.disc_high.parameters();
    ckpt.load_into("disc_high", p);
    return m;
}

}  // namespace sdc
