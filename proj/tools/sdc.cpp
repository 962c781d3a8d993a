// sdc: command-line front end for training, coding and evaluating the cascade.
#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "sdc/app/commands.hpp"
#include "sdc/error.hpp"
#include "sdc/io/log.hpp"

namespace {

// Exit codes: 1 for a failed command, 2 for bad usage.
int report_error(std::string_view kind, std::string message, int code = 1) {
    for (char& c : message)
        if (c == '\n' || c == '\r') c = ' ';
    std::fprintf(stderr, "sdc: error: %.*s: %s\n", int(kind.size()), kind.data(), message.c_str());
    return code;
}

int parse_band(const std::string& band) {
    if (band.empty()) return 0;
    if (band == "16k") return 16000;
    if (band == "32k") return 32000;
    sdc::fail(sdc::ErrorKind::InvalidConfig, "--band must be 16k or 32k");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-branch frequency-disentangled neural audio codec"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    auto* train = app.add_subcommand("train", "train the cascade from a config file");
    train->add_option("--config", config_path, "run config")->required();
    train->add_option("--seed", seed, "override the config seed");

    std::string in, out, ckpt, band, ref_dir, out_dir;
    std::optional<std::string> ref;
    bool low_only = false, auto_resample = false;

    auto* encode = app.add_subcommand("encode", "WAV (16 or 32 kHz) to token stream");
    encode->add_option("--in", in)->required();
    encode->add_option("--ckpt", ckpt)->required();
    encode->add_option("--out", out)->required();
    encode->add_flag("--low-only", low_only, "code only the 16 kHz branch");
    encode->add_flag("--auto-resample", auto_resample, "resample other input rates to 32 kHz");

    auto* decode = app.add_subcommand("decode", "token stream to WAV");
    decode->add_option("--in", in)->required();
    decode->add_option("--ckpt", ckpt)->required();
    decode->add_option("--out", out)->required();
    decode->add_option("--band", band, "16k or 32k (default: highest in the stream)");

    auto* eval = app.add_subcommand("eval", "metric reports for a directory of 32 kHz references");
    eval->add_option("--ref-dir", ref_dir)->required();
    eval->add_option("--ckpt", ckpt)->required();
    eval->add_option("--out-dir", out_dir)->required();
    eval->add_flag("--auto-resample", auto_resample);

    auto* inpaint = app.add_subcommand("inpaint", "fill the 8-16 kHz band of a 16 kHz input");
    inpaint->add_option("--in", in)->required();
    inpaint->add_option("--ckpt", ckpt)->required();
    inpaint->add_option("--out", out)->required();
    inpaint->add_option("--ref", ref, "32 kHz original for the comparison report");
    inpaint->add_flag("--auto-resample", auto_resample);

    std::size_t clips = 32;
    double seconds = 4.0;
    std::uint64_t synth_seed = 0;
    auto* synth = app.add_subcommand("synth", "write the seeded synthetic corpus as WAV files");
    synth->add_option("--out-dir", out_dir)->required();
    synth->add_option("--clips", clips);
    synth->add_option("--seconds", seconds);
    synth->add_option("--seed", synth_seed);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        return report_error("Usage", e.what(), 2);
    }

    try {
        sdc::log_level();
        if (*train) {
            auto cfg = sdc::load_run_config(config_path);
            if (seed) cfg.seed = *seed;
            sdc::cmd_train(cfg);
        } else if (*encode) {
            sdc::cmd_encode(in, ckpt, out, low_only, auto_resample);
        } else if (*decode) {
            sdc::cmd_decode(in, ckpt, out, parse_band(band));
        } else if (*eval) {
            const auto agg = sdc::cmd_eval(ref_dir, ckpt, out_dir, {}, auto_resample);
            std::fputs(agg.to_text().c_str(), stdout);
        } else if (*inpaint) {
            std::optional<std::filesystem::path> ref_path;
            if (ref) ref_path = *ref;
            const auto r = sdc::cmd_inpaint(in, ckpt, out, ref_path, auto_resample);
            std::fputs(r.to_text().c_str(), stdout);
        } else if (*synth) {
            sdc::cmd_synth(out_dir, clips, seconds, synth_seed);
        }
    } catch (const sdc::Error& e) {
        return report_error(sdc::to_string(e.kind()), e.what());
    } catch (const std::filesystem::filesystem_error& e) {
        return report_error("IoError", e.what());
    } catch (const std::exception& e) {
        return report_error("Internal", e.what());
    }
    return 0;
}
