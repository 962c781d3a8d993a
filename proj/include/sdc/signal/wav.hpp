#pragma once

#include <filesystem>

#include "sdc/signal/audio.hpp"

namespace sdc {

enum class WavEncoding { Pcm16, Float32 };

// Reads PCM16 or IEEE float32 RIFF/WAVE files. Multi-channel input is
// averaged down to mono. Any sample rate is accepted.
AudioBuffer read_wav(const std::filesystem::path& path);

void write_wav(const std::filesystem::path& path, const AudioBuffer& x,
               WavEncoding encoding = WavEncoding::Float32);

// Loads a file for a codec path that runs at `expected_rate`. A different
// rate raises RateMismatch unless auto_resample is set.
AudioBuffer read_wav_for_codec(const std::filesystem::path& path, int expected_rate,
                               bool auto_resample = false);

}  // namespace sdc
