#include "sdc/app/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include "sdc/ad/tensor.hpp"
#include "sdc/cascade/dataset.hpp"
#include "sdc/error.hpp"
#include "sdc/io/log.hpp"
#include "sdc/signal/wav.hpp"

namespace sdc {
namespace {

BranchTokens pack(const BranchConfig& cfg, const std::vector<std::vector<int>>& tokens) {
    BranchTokens b;
    b.sample_rate = std::uint32_t(cfg.sample_rate);
    b.n_quantizers = std::uint8_t(cfg.n_quantizers);
    b.codebook_bits = std::uint8_t(cfg.codebook_bits);
    b.frame_count = tokens.empty() ? 0 : std::uint32_t(tokens.front().size());
    b.tokens = tokens;
    return b;
}

void check_branch(const BranchConfig& cfg, const BranchTokens& b, std::size_t index) {
    if (b.sample_rate != std::uint32_t(cfg.sample_rate) || b.n_quantizers != std::uint8_t(cfg.n_quantizers) ||
        b.codebook_bits != std::uint8_t(cfg.codebook_bits))
        fail(ErrorKind::ConfigMismatch,
             "stream branch " + std::to_string(index) + " (" + std::to_string(b.sample_rate) + " Hz, " +
                 std::to_string(b.n_quantizers) + "x" + std::to_string(b.codebook_bits) +
                 " bits) does not match the checkpoint (" + std::to_string(cfg.sample_rate) + " Hz, " +
                 std::to_string(cfg.n_quantizers) + "x" + std::to_string(cfg.codebook_bits) + " bits)");
}

AudioBuffer decode_branch(const CodecBranch<float>& branch, const BranchTokens& b) {
    ad::NoGradGuard nograd;
    const auto y = branch.decode_tokens(b.tokens, 1, b.frame_count);
    return AudioBuffer({y.data().begin(), y.data().end()}, branch.config().sample_rate);
}

AudioBuffer upsample(const PolyphaseUpsampler& up, const AudioBuffer& x) {
    AudioBuffer y = AudioBuffer::zeros(x.size() * std::size_t(up.factor()), x.sample_rate * up.factor());
    up.apply<double>(x.samples, y.samples);
    return y;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream f(path);
    if (!f) fail(ErrorKind::IoError, "cannot write " + path.string());
    f << text;
    if (!f) fail(ErrorKind::IoError, "write failed for " + path.string());
}

void write_report(const std::filesystem::path& stem, const MetricReport& r) {
    write_text(stem.string() + ".json", r.to_json() + "\n");
    write_text(stem.string() + ".txt", r.to_text());
}

void append(MetricReport& dst, const std::string& prefix, const MetricReport& src) {
    for (const auto& e : src.entries) dst.set(prefix + e.name, e.value);
}

double db(double fraction) { return 10.0 * std::log10(std::max(fraction, 1e-30)); }

CascadeModel load_model(const std::filesystem::path& ckpt) { return CascadeModel::from_checkpoint(load_checkpoint(ckpt)); }

}  // namespace

TokenStream encode_audio(const CascadeModel& model, const AudioBuffer& x, bool low_only) {
    const auto& cfg = model.config;
    x.validate();
    NeuralCodec low(model.low), high(model.high);
    TokenStream s;
    s.frame_rate = std::uint32_t(cfg.low.frame_rate());
    if (x.sample_rate == cfg.low.sample_rate) {
        s.branches.push_back(pack(cfg.low, low.process(x).tokens));
        return s;
    }
    if (x.sample_rate != cfg.high.sample_rate)
        fail(ErrorKind::RateMismatch, "encoder takes " + std::to_string(cfg.low.sample_rate) + " or " +
                                          std::to_string(cfg.high.sample_rate) + " Hz input, got " +
                                          std::to_string(x.sample_rate));
    AudioBuffer s32 = x;
    s32.samples.resize(x.size() - x.size() % std::size_t(cfg.factor()));
    const AudioBuffer s16 = resample_down(s32, cfg.factor());
    if (low_only) {
        s.branches.push_back(pack(cfg.low, low.process(s16).tokens));
        return s;
    }
    const auto out = cascade_forward(s16, s32, low, high, model.up);
    s.branches.push_back(pack(cfg.low, out.tokens_16));
    s.branches.push_back(pack(cfg.high, out.tokens_32));
    return s;
}

AudioBuffer decode_audio(const CascadeModel& model, const TokenStream& stream, int rate) {
    const auto& cfg = model.config;
    if (stream.branches.empty() || stream.branches.size() > 2)
        fail(ErrorKind::ConfigMismatch, "stream carries " + std::to_string(stream.branches.size()) +
                                            " branches, the model has 2");
    if (stream.frame_rate != std::uint32_t(cfg.low.frame_rate()))
        fail(ErrorKind::ConfigMismatch, "stream frame rate " + std::to_string(stream.frame_rate) +
                                            " Hz, model runs at " + std::to_string(cfg.low.frame_rate()) + " Hz");
    check_branch(cfg.low, stream.branches[0], 0);
    if (rate == 0) rate = stream.branches.size() == 2 ? cfg.high.sample_rate : cfg.low.sample_rate;
    if (rate != cfg.low.sample_rate && rate != cfg.high.sample_rate)
        fail(ErrorKind::InvalidConfig, "decode rate must be " + std::to_string(cfg.low.sample_rate) + " or " +
                                           std::to_string(cfg.high.sample_rate));
    const AudioBuffer d16 = decode_branch(model.low, stream.branches[0]);
    if (rate == cfg.low.sample_rate) return d16;
    if (stream.branches.size() < 2)
        fail(ErrorKind::ConfigMismatch, "stream holds only the " + std::to_string(cfg.low.sample_rate) +
                                            " Hz branch; decode it at that rate");
    check_branch(cfg.high, stream.branches[1], 1);
    if (stream.branches[1].frame_count != stream.branches[0].frame_count)
        fail(ErrorKind::CorruptStream, "branches disagree on frame count");
    const AudioBuffer d32 = decode_branch(model.high, stream.branches[1]);
    return upsample(model.up, d16) + d32;
}

TrainReport cmd_train(const RunConfig& cfg) {
    cfg.validate();
    Dataset data;
    const int rate = cfg.cascade.high.sample_rate;
    if (cfg.data_dir.empty()) {
        log(LogLevel::Info, "generating " + std::to_string(cfg.synthetic_clips) + " synthetic clips");
        data = Dataset::from_wideband(synthetic_corpus(cfg.synthetic_clips, cfg.synthetic_seconds, cfg.seed, rate),
                                      cfg.cascade.factor());
    } else {
        data = Dataset::load_dir(cfg.data_dir, rate, cfg.auto_resample, cfg.cascade.factor());
    }
    if (data.empty()) fail(ErrorKind::NoData, "no training clips found");
    log(LogLevel::Info, "training on " + std::to_string(data.size()) + " clips, " +
                            std::to_string(int(std::lround(data.seconds()))) + " s");
    CascadeModel model(cfg.cascade, cfg.seed);
    TrainOptions opt;
    opt.seed = cfg.seed;
    opt.batch = cfg.batch;
    opt.crop_seconds = cfg.crop_seconds;
    opt.generator = cfg.generator;
    opt.discriminator = cfg.discriminator;
    opt.out_dir = cfg.out_dir;
    opt.log_every = cfg.log_every;
    return train_cascade(model, data, opt);
}

void cmd_encode(const std::filesystem::path& in, const std::filesystem::path& ckpt, const std::filesystem::path& out,
                bool low_only, bool auto_resample) {
    const auto model = load_model(ckpt);
    AudioBuffer x = read_wav(in);
    const auto& cfg = model.config;
    if (x.sample_rate != cfg.low.sample_rate && x.sample_rate != cfg.high.sample_rate) {
        if (!auto_resample)
            fail(ErrorKind::RateMismatch, in.string() + " is " + std::to_string(x.sample_rate) + " Hz; expected " +
                                              std::to_string(cfg.low.sample_rate) + " or " +
                                              std::to_string(cfg.high.sample_rate) + " Hz");
        x = resample_to_rate(x, cfg.high.sample_rate);
    }
    const auto stream = encode_audio(model, x, low_only);
    write_stream(out, stream);
    log(LogLevel::Info, "wrote " + out.string() + " (" + std::to_string(stream.branches.size()) + " branch, " +
                            std::to_string(int(stream.bitrate())) + " bps)");
}

void cmd_decode(const std::filesystem::path& in, const std::filesystem::path& ckpt, const std::filesystem::path& out,
                int rate) {
    const auto model = load_model(ckpt);
    write_wav(out, decode_audio(model, read_stream(in), rate));
}

MetricReport evaluate_clip(const CascadeModel& model, const AudioBuffer& clip, const std::vector<BandSpec>& bands) {
    const auto& cfg = model.config;
    AudioBuffer s32 = clip;
    s32.samples.resize(clip.size() - clip.size() % std::size_t(cfg.factor()));
    const AudioBuffer s16 = resample_down(s32, cfg.factor());
    NeuralCodec low(model.low), high(model.high);
    const auto out = cascade_forward(s16, s32, low, high, model.up);

    std::vector<BandSpec> low_bands;
    for (const auto& b : bands)
        if (b.high <= 0.5 * cfg.low.sample_rate) low_bands.push_back(b);
    MetricReport r;
    append(r, "s32_", build_report(s32, out.s_hat_32, bands, default_scales(cfg.high.sample_rate)));
    append(r, "s16_", build_report(s16, out.s_hat_16, low_bands, default_scales(cfg.low.sample_rate)));
    append(r, "", disentanglement_report(s32, out));
    return r;
}

MetricReport cmd_eval(const std::filesystem::path& ref_dir, const std::filesystem::path& ckpt,
                      const std::filesystem::path& out_dir, const std::vector<BandSpec>& bands_in,
                      bool auto_resample) {
    const auto model = load_model(ckpt);
    const std::vector<BandSpec> bands =
        bands_in.empty() ? std::vector<BandSpec>{kLowBand, kHighBand, kInterfaceBand} : bands_in;
    std::error_code ec;
    if (!std::filesystem::is_directory(ref_dir, ec)) fail(ErrorKind::IoError, "not a directory: " + ref_dir.string());
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(ref_dir))
        if (e.is_regular_file() && e.path().extension() == ".wav") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    if (files.empty()) fail(ErrorKind::NoData, "no .wav files in " + ref_dir.string());
    std::filesystem::create_directories(out_dir);

    std::vector<MetricReport> reports(files.size());
    std::vector<std::string> errors(files.size());
    std::vector<ErrorKind> kinds(files.size(), ErrorKind::IoError);
#pragma omp parallel for schedule(dynamic)
    for (std::size_t i = 0; i < files.size(); ++i) {
        try {
            const AudioBuffer x = read_wav_for_codec(files[i], model.config.high.sample_rate, auto_resample);
            reports[i] = evaluate_clip(model, x, bands);
        } catch (const Error& e) {
            kinds[i] = e.kind();
            errors[i] = files[i].filename().string() + ": " + e.what();
        }
    }
    for (std::size_t i = 0; i < files.size(); ++i)
        if (!errors[i].empty()) fail(kinds[i], errors[i]);

    MetricReport aggregate;
    for (std::size_t i = 0; i < files.size(); ++i) {
        write_report(out_dir / files[i].stem(), reports[i]);
        for (const auto& e : reports[i].entries)
            aggregate.set(e.name, (aggregate.has(e.name) ? aggregate.get(e.name) : 0.0) + e.value / double(files.size()));
    }
    aggregate.set("files", double(files.size()));
    write_report(out_dir / "aggregate", aggregate);
    return aggregate;
}

InpaintResult inpaint_clip(const CascadeModel& model, const AudioBuffer& s16, const AudioBuffer* ref32) {
    const auto& cfg = model.config;
    if (s16.sample_rate != cfg.low.sample_rate)
        fail(ErrorKind::RateMismatch, "inpainting takes " + std::to_string(cfg.low.sample_rate) + " Hz input");
    NeuralCodec low(model.low), high(model.high);
    InpaintResult res;
    res.output = inpaint(s16, low, high, model.up);
    const auto& y = res.output.s_hat_32;
    auto& r = res.report;
    const double hf = energy(y.samples) > 0 ? band_energy_fraction(y, kHighBand) : 0.0;
    r.set("inp_energy_fraction_" + kHighBand.label(), hf);
    r.set("inp_energy_db_" + kHighBand.label(), db(hf));
    const double e32 = energy(res.output.d_hat_32.samples);
    r.set("d32_energy_fraction_" + kLowBand.label(), e32 > 0 ? band_energy_fraction(res.output.d_hat_32, kLowBand) : 0);
    r.set("d32_energy_fraction_" + kHighBand.label(), e32 > 0 ? band_energy_fraction(res.output.d_hat_32, kHighBand) : 0);
    if (ref32) {
        if (ref32->sample_rate != cfg.high.sample_rate || ref32->size() < y.size())
            fail(ErrorKind::ShapeMismatch, "reference must be a " + std::to_string(cfg.high.sample_rate) +
                                               " Hz clip covering the input");
        AudioBuffer ref = *ref32;
        ref.samples.resize(y.size());
        const AudioBuffer u_s16 = res.output.u_d_hat_16;
        const AudioBuffer ud = upsample(model.up, resample_down(y, cfg.factor()));
        const auto scales = default_scales(cfg.high.sample_rate);
        const std::pair<const char*, const AudioBuffer*> rows[] = {
            {"u_s16", &u_s16}, {"ud_inp", &ud}, {"inp", &y}};
        for (const auto& [name, sig] : rows) {
            const std::string p = std::string(name) + "_";
            r.set(p + "mel", mel_loss(ref, *sig, scales).value);
            r.set(p + "stft", stft_loss(ref, *sig, scales).value);
            r.set(p + "sdr", sdr(ref, *sig));
            r.set(p + "si_sdr", si_sdr(ref, *sig));
        }
    }
    return res;
}

MetricReport cmd_inpaint(const std::filesystem::path& in, const std::filesystem::path& ckpt,
                         const std::filesystem::path& out, const std::optional<std::filesystem::path>& ref,
                         bool auto_resample) {
    const auto model = load_model(ckpt);
    const AudioBuffer s16 = read_wav_for_codec(in, model.config.low.sample_rate, auto_resample);
    std::optional<AudioBuffer> ref32;
    if (ref) ref32 = read_wav_for_codec(*ref, model.config.high.sample_rate, auto_resample);
    auto res = inpaint_clip(model, s16, ref32 ? &*ref32 : nullptr);
    write_wav(out, res.output.s_hat_32);
    auto stem = out;
    stem.replace_extension();
    write_report(stem.string() + ".report", res.report);
    return res.report;
}

void cmd_synth(const std::filesystem::path& out_dir, std::size_t clips, double seconds, std::uint64_t seed, int rate) {
    std::filesystem::create_directories(out_dir);
    const auto corpus = synthetic_corpus(clips, seconds, seed, rate);
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "clip_%04zu.wav", i);
        write_wav(out_dir / name, corpus[i]);
    }
}

}  // namespace sdc
