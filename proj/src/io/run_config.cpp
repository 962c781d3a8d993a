#include "sdc/io/run_config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include "sdc/error.hpp"

namespace sdc {
namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const auto p = s.find(sep, start);
        parts.push_back(trim(s.substr(start, p == std::string_view::npos ? s.npos : p - start)));
        if (p == std::string_view::npos) return parts;
        start = p + 1;
    }
}

class Parser {
public:
    Parser(std::string_view text, std::filesystem::path base) : text_(text), base_(std::move(base)) { bind(); }

    RunConfig run() {
        std::size_t line_no = 0;
        std::string section;
        std::istringstream in{std::string(text_)};
        for (std::string raw; std::getline(in, raw);) {
            ++line_no;
            std::string_view line = raw;
            if (const auto hash = line.find('#'); hash != line.npos) line = line.substr(0, hash);
            line = trim(line);
            if (line.empty()) continue;
            where_ = "line " + std::to_string(line_no);
            if (line.front() == '[') {
                if (line.back() != ']') bad("unterminated section header");
                section = std::string(trim(line.substr(1, line.size() - 2)));
                if (!sections_.count(section)) bad("unknown section [" + section + "]");
                continue;
            }
            const auto eq = line.find('=');
            if (eq == line.npos) bad("expected key = value");
            const std::string key(trim(line.substr(0, eq)));
            const std::string_view value = trim(line.substr(eq + 1));
            if (section.empty()) bad("key '" + key + "' outside any section");
            const std::string full = section + "." + key;
            const auto it = setters_.find(full);
            if (it == setters_.end()) bad("unknown key '" + key + "' in [" + section + "]");
            if (!seen_.insert(full).second) bad("duplicate key '" + full + "'");
            where_ += " (" + full + ")";
            it->second(value);
        }
        where_ = "config";
        try {
            cfg_.validate();
        } catch (const Error& e) {
            fail(ErrorKind::InvalidConfig, e.what());
        }
        return cfg_;
    }

private:
    [[noreturn]] void bad(const std::string& msg) const { fail(ErrorKind::InvalidConfig, where_ + ": " + msg); }

    template <typename N>
    N number(std::string_view v) const {
        N out{};
        const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
        if (r.ec != std::errc() || r.ptr != v.data() + v.size()) bad("'" + std::string(v) + "' is not a number");
        return out;
    }
    bool boolean(std::string_view v) const {
        if (v == "true" || v == "1" || v == "yes") return true;
        if (v == "false" || v == "0" || v == "no") return false;
        bad("'" + std::string(v) + "' is not a boolean");
    }
    std::filesystem::path path(std::string_view v) const {
        std::filesystem::path p{std::string(v)};
        return p.is_relative() && !base_.empty() ? base_ / p : p;
    }

    void on(const std::string& key, std::function<void(std::string_view)> f) {
        sections_.insert(key.substr(0, key.rfind('.')));
        setters_[key] = std::move(f);
    }

    void bind_branch(const std::string& s, BranchConfig& b) {
        on(s + ".sample_rate", [&](auto v) { b.sample_rate = number<int>(v); });
        on(s + ".strides", [&, this](auto v) {
            b.strides.clear();
            for (auto part : split(v, ',')) b.strides.push_back(number<int>(part));
        });
        on(s + ".base_channels", [&](auto v) { b.base_channels = number<int>(v); });
        on(s + ".max_channels", [&](auto v) { b.max_channels = number<int>(v); });
        on(s + ".latent_dim", [&](auto v) { b.latent_dim = number<int>(v); });
        on(s + ".n_quantizers", [&](auto v) { b.n_quantizers = number<int>(v); });
        on(s + ".codebook_bits", [&](auto v) { b.codebook_bits = number<int>(v); });
        on(s + ".residual_units", [&](auto v) { b.residual_units = number<int>(v); });
        on(s + ".disc_channels", [&](auto v) { b.disc_channels = number<int>(v); });
        on(s + ".killed_after", [&](auto v) { b.killed_after = number<int>(v); });
        on(s + ".activation", [&, this](auto v) {
            if (v == "snake")
                b.activation = Activation::Snake;
            else if (v == "tanh")
                b.activation = Activation::Tanh;
            else
                bad("activation must be snake or tanh");
        });
    }

    void bind_weights(const std::string& s, LossWeights& w) {
        on(s + ".gen", [&](auto v) { w.gen = number<double>(v); });
        on(s + ".fm", [&](auto v) { w.fm = number<double>(v); });
        on(s + ".mel", [&](auto v) { w.mel = number<double>(v); });
        on(s + ".cb", [&](auto v) { w.cb = number<double>(v); });
        on(s + ".cmt", [&](auto v) { w.cmt = number<double>(v); });
    }

    void bind() {
        auto& c = cfg_;
        on("run.seed", [&](auto v) { c.seed = number<std::uint64_t>(v); });
        on("run.out_dir", [&](auto v) { c.out_dir = path(v); });
        on("run.data_dir", [&](auto v) {
            c.data_dir = path(v);
            std::error_code ec;
            if (!std::filesystem::is_directory(c.data_dir, ec)) bad("data_dir " + c.data_dir.string() + " does not exist");
        });
        on("run.auto_resample", [&](auto v) { c.auto_resample = boolean(v); });
        on("run.synthetic_clips", [&](auto v) { c.synthetic_clips = number<std::size_t>(v); });
        on("run.synthetic_seconds", [&](auto v) { c.synthetic_seconds = number<double>(v); });
        on("run.batch", [&](auto v) { c.batch = number<std::size_t>(v); });
        on("run.crop_seconds", [&](auto v) { c.crop_seconds = number<double>(v); });
        on("run.log_every", [&](auto v) { c.log_every = number<int>(v); });
        on("optim.lr", [&](auto v) { c.generator.lr = number<double>(v); });
        on("optim.beta1", [&](auto v) { c.generator.beta1 = number<double>(v); });
        on("optim.beta2", [&](auto v) { c.generator.beta2 = number<double>(v); });
        on("optim.eps", [&](auto v) { c.generator.eps = number<double>(v); });
        on("optim.disc_lr", [&](auto v) { c.discriminator.lr = number<double>(v); });
        on("optim.disc_beta1", [&](auto v) { c.discriminator.beta1 = number<double>(v); });
        on("optim.disc_beta2", [&](auto v) { c.discriminator.beta2 = number<double>(v); });
        on("schedule.stage1", [&](auto v) { c.cascade.schedule.stage1 = number<int>(v); });
        on("schedule.stage2", [&](auto v) { c.cascade.schedule.stage2 = number<int>(v); });
        on("schedule.finetune", [&](auto v) { c.cascade.schedule.finetune = number<int>(v); });
        bind_branch("low", c.cascade.low);
        bind_branch("high", c.cascade.high);
        bind_weights("weights.low", c.cascade.low_weights);
        bind_weights("weights.high", c.cascade.high_weights);
        on("metrics.bands", [&](auto v) {
            c.bands.clear();
            for (auto part : split(v, ',')) c.bands.push_back(parse_band(part));
        });
    }

    std::string_view text_;
    std::filesystem::path base_;
    RunConfig cfg_;
    std::string where_;
    std::set<std::string> sections_;
    std::set<std::string> seen_;
    std::map<std::string, std::function<void(std::string_view)>> setters_;
};

}  // namespace

void RunConfig::validate() const {
    cascade.validate();
    if (batch == 0) fail(ErrorKind::InvalidConfig, "batch must be >= 1");
    if (!(crop_seconds > 0)) fail(ErrorKind::InvalidConfig, "crop_seconds must be positive");
    if (data_dir.empty() && (synthetic_clips == 0 || !(synthetic_seconds > 0)))
        fail(ErrorKind::InvalidConfig, "synthetic corpus needs clips and seconds > 0");
    for (const auto* o : {&generator, &discriminator})
        if (!(o->lr > 0) || o->beta1 < 0 || o->beta1 >= 1 || o->beta2 < 0 || o->beta2 >= 1 || !(o->eps > 0))
            fail(ErrorKind::InvalidConfig, "optimizer needs lr > 0, betas in [0, 1), eps > 0");
    for (const auto& b : bands) b.validate(0.5 * cascade.high.sample_rate);
}

BandSpec parse_band(std::string_view text) {
    const auto dash = text.find('-');
    auto num = [&](std::string_view v) {
        v = trim(v);
        double out = 0;
        const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
        if (v.empty() || r.ec != std::errc() || r.ptr != v.data() + v.size())
            fail(ErrorKind::InvalidConfig, "band '" + std::string(text) + "' is not low-high in Hz");
        return out;
    };
    if (dash == text.npos) fail(ErrorKind::InvalidConfig, "band '" + std::string(text) + "' is not low-high in Hz");
    return {num(text.substr(0, dash)), num(text.substr(dash + 1))};
}

RunConfig parse_run_config(std::string_view text, const std::filesystem::path& base_dir) {
    return Parser(text, base_dir).run();
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) fail(ErrorKind::IoError, "cannot read config " + path.string());
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_run_config(ss.str(), path.parent_path());
}

}  // namespace sdc
