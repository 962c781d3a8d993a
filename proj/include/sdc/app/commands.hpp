#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "sdc/cascade/model.hpp"
#include "sdc/cascade/trainer.hpp"
#include "sdc/io/bitstream.hpp"
#include "sdc/io/run_config.hpp"
#include "sdc/metrics/metrics.hpp"

namespace sdc {

// A 16 kHz clip is coded by the low branch alone; a 32 kHz clip by the
// cascade (odd trailing samples dropped), unless low_only is set.
TokenStream encode_audio(const CascadeModel& model, const AudioBuffer& x, bool low_only = false);

// Decodes at `rate` (16000 or 32000; 0 picks the highest rate present).
// Output length is frame_count * hop of that rate. ConfigMismatch when the
// stream was not produced with this model's dimensions.
AudioBuffer decode_audio(const CascadeModel& model, const TokenStream& stream, int rate = 0);

TrainReport cmd_train(const RunConfig& cfg);
void cmd_encode(const std::filesystem::path& in, const std::filesystem::path& ckpt, const std::filesystem::path& out,
                bool low_only = false, bool auto_resample = false);
void cmd_decode(const std::filesystem::path& in, const std::filesystem::path& ckpt, const std::filesystem::path& out,
                int rate = 0);

// One <stem>.json / <stem>.txt report per reference file plus aggregate.*
// (arithmetic mean over files). Returns the aggregate.
MetricReport cmd_eval(const std::filesystem::path& ref_dir, const std::filesystem::path& ckpt,
                      const std::filesystem::path& out_dir, const std::vector<BandSpec>& bands = {},
                      bool auto_resample = false);

// Per-file metrics of the cascade output against s32 (and of the low branch
// against s16), plus the band split of d_hat_32.
MetricReport evaluate_clip(const CascadeModel& model, const AudioBuffer& s32, const std::vector<BandSpec>& bands);

// Inpainted 32 kHz signal and its band report. With a 32 kHz reference the
// report adds mel/stft/SDR of U(s_hat_16), U(D(s_hat_32_inp)) and
// s_hat_32_inp against it.
struct InpaintResult {
    CascadeOutput output;
    MetricReport report;
};
InpaintResult inpaint_clip(const CascadeModel& model, const AudioBuffer& s16, const AudioBuffer* ref32 = nullptr);
MetricReport cmd_inpaint(const std::filesystem::path& in, const std::filesystem::path& ckpt,
                         const std::filesystem::path& out, const std::optional<std::filesystem::path>& ref = {},
                         bool auto_resample = false);

// Writes `clips` seeded synthetic clips (float32 WAV) into out_dir.
void cmd_synth(const std::filesystem::path& out_dir, std::size_t clips, double seconds, std::uint64_t seed,
               int rate = 32000);

}  // namespace sdc
