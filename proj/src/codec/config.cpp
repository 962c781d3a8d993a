#include "sdc/codec/config.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sdc/error.hpp"

namespace sdc {

BranchConfig BranchConfig::defaults_16k() { return {}; }

BranchConfig BranchConfig::defaults_32k() {
    BranchConfig c;
    c.sample_rate = 32000;
    c.strides = {2, 4, 8, 10};
    return c;
}

int BranchConfig::hop() const {
    int p = 1;
    for (int s : strides) p *= s;
    return p;
}

int BranchConfig::frame_rate() const { return sample_rate / hop(); }

int BranchConfig::channels_at(int block) const {
    int c = base_channels << (block + 1);
    return max_channels > 0 ? std::min(c, max_channels) : c;
}

void BranchConfig::validate() const {
    auto bad = [](const std::string& m) { fail(ErrorKind::InvalidConfig, m); };
    if (sample_rate <= 0) bad("sample_rate must be positive");
    if (strides.empty()) bad("encoder needs at least one stride");
    for (int s : strides)
        if (s < 2) bad("every stride must be >= 2");
    if (sample_rate % hop() != 0)
        bad("stride product " + std::to_string(hop()) + " does not divide sample rate " + std::to_string(sample_rate));
    if (base_channels < 1 || latent_dim < 1 || n_quantizers < 1 || residual_units < 0 || disc_channels < 1)
        bad("channel counts, latent_dim and n_quantizers must be positive");
    if (max_channels < 0) bad("max_channels must be >= 0");
    if (codebook_bits < 1 || codebook_bits > 16) bad("codebook_bits must be in [1, 16]");
    if (killed_after < 1) bad("killed_after must be >= 1");
}

std::map<std::string, std::string> BranchConfig::to_manifest(const std::string& prefix) const {
    std::ostringstream s;
    for (std::size_t i = 0; i < strides.size(); ++i) s << (i ? "," : "") << strides[i];
    return {
        {prefix + ".sample_rate", std::to_string(sample_rate)},
        {prefix + ".strides", s.str()},
        {prefix + ".base_channels", std::to_string(base_channels)},
        {prefix + ".max_channels", std::to_string(max_channels)},
        {prefix + ".latent_dim", std::to_string(latent_dim)},
        {prefix + ".n_quantizers", std::to_string(n_quantizers)},
        {prefix + ".codebook_bits", std::to_string(codebook_bits)},
        {prefix + ".residual_units", std::to_string(residual_units)},
        {prefix + ".activation", activation == Activation::Snake ? "snake" : "tanh"},
        {prefix + ".disc_channels", std::to_string(disc_channels)},
        {prefix + ".killed_after", std::to_string(killed_after)},
    };
}

BranchConfig BranchConfig::from_manifest(const std::map<std::string, std::string>& m, const std::string& prefix) {
    auto get = [&](const std::string& key) -> const std::string& {
        auto it = m.find(prefix + "." + key);
        if (it == m.end()) fail(ErrorKind::ConfigMismatch, "manifest lacks " + prefix + "." + key);
        return it->second;
    };
    auto num = [&](const std::string& key) {
        try {
            return std::stoi(get(key));
        } catch (const std::logic_error&) {
            fail(ErrorKind::ConfigMismatch, "manifest value " + prefix + "." + key + " is not an integer");
        }
    };
    BranchConfig c;
    c.sample_rate = num("sample_rate");
    c.strides.clear();
    std::stringstream s(get("strides"));
    for (std::string part; std::getline(s, part, ',');) c.strides.push_back(std::stoi(part));
    c.base_channels = num("base_channels");
    c.max_channels = num("max_channels");
    c.latent_dim = num("latent_dim");
    c.n_quantizers = num("n_quantizers");
    c.codebook_bits = num("codebook_bits");
    c.residual_units = num("residual_units");
    c.activation = get("activation") == "tanh" ? Activation::Tanh : Activation::Snake;
    c.disc_channels = num("disc_channels");
    c.killed_after = num("killed_after");
    c.validate();
    return c;
}

void LossWeights::validate() const {
    for (double w : {gen, fm, mel, cb, cmt})
        if (!std::isfinite(w) || w < 0.0) fail(ErrorKind::InvalidConfig, "loss weights must be finite and >= 0");
}

}  // namespace sdc
