#include "sdc/signal/wav.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "sdc/error.hpp"
#include "sdc/signal/resample.hpp"

namespace sdc {
namespace {

static_assert(std::endian::native == std::endian::little, "WAV I/O assumes a little-endian host");

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

template <typename T>
T load(const std::uint8_t* p) {
    T v;
    std::memcpy(&v, p, sizeof(T));
    return v;
}

template <typename T>
void store(std::vector<std::uint8_t>& out, T v) {
    const auto* p = reinterpret_cast<const std::uint8_t*>(&v);
    out.insert(out.end(), p, p + sizeof(T));
}

std::vector<std::uint8_t> slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::IoError, "cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

AudioBuffer read_wav(const std::filesystem::path& path) {
    const auto bytes = slurp(path);
    const std::string name = path.string();
    if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
        std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
        fail(ErrorKind::MalformedWav, name + ": missing RIFF/WAVE header");

    std::uint16_t format = 0, channels = 0, bits = 0;
    std::uint32_t rate = 0;
    const std::uint8_t* data = nullptr;
    std::size_t data_size = 0;
    bool have_fmt = false;

    std::size_t pos = 12;
    while (pos + 8 <= bytes.size()) {
        const std::uint8_t* chunk = bytes.data() + pos;
        const auto size = load<std::uint32_t>(chunk + 4);
        if (pos + 8 + size > bytes.size()) fail(ErrorKind::MalformedWav, name + ": truncated chunk");
        if (std::memcmp(chunk, "fmt ", 4) == 0) {
            if (size < 16) fail(ErrorKind::MalformedWav, name + ": short fmt chunk");
            format = load<std::uint16_t>(chunk + 8);
            channels = load<std::uint16_t>(chunk + 10);
            rate = load<std::uint32_t>(chunk + 12);
            bits = load<std::uint16_t>(chunk + 22);
            if (format == kFormatExtensible && size >= 26) format = load<std::uint16_t>(chunk + 32);
            have_fmt = true;
        } else if (std::memcmp(chunk, "data", 4) == 0) {
            data = chunk + 8;
            data_size = size;
        }
        pos += 8 + size + (size & 1u);
    }
    if (!have_fmt || data == nullptr) fail(ErrorKind::MalformedWav, name + ": missing fmt or data chunk");
    if (channels == 0 || rate == 0) fail(ErrorKind::MalformedWav, name + ": zero channels or rate");

    const bool pcm16 = format == kFormatPcm && bits == 16;
    const bool f32 = format == kFormatFloat && bits == 32;
    if (!pcm16 && !f32)
        fail(ErrorKind::UnsupportedWav, name + ": only PCM16 and float32 are supported (format " +
                                            std::to_string(format) + ", " + std::to_string(bits) + " bits)");

    const std::size_t frame_bytes = std::size_t(channels) * (bits / 8);
    const std::size_t frames = data_size / frame_bytes;
    AudioBuffer out = AudioBuffer::zeros(frames, int(rate));
    for (std::size_t i = 0; i < frames; ++i) {
        double acc = 0.0;
        for (std::size_t c = 0; c < channels; ++c) {
            const std::uint8_t* p = data + i * frame_bytes + c * (bits / 8);
            acc += pcm16 ? load<std::int16_t>(p) / 32768.0 : double(load<float>(p));
        }
        out.samples[i] = acc / channels;
    }
    out.validate();
    return out;
}

void write_wav(const std::filesystem::path& path, const AudioBuffer& x, WavEncoding encoding) {
    if (x.sample_rate <= 0) fail(ErrorKind::ShapeMismatch, "write_wav: sample rate must be positive");
    const bool pcm16 = encoding == WavEncoding::Pcm16;
    const std::uint16_t bits = pcm16 ? 16 : 32;
    const std::uint32_t data_size = std::uint32_t(x.size() * (bits / 8));

    std::vector<std::uint8_t> out;
    out.reserve(44 + data_size);
    out.insert(out.end(), {'R', 'I', 'F', 'F'});
    store<std::uint32_t>(out, 36 + data_size);
    out.insert(out.end(), {'W', 'A', 'V', 'E', 'f', 'm', 't', ' '});
    store<std::uint32_t>(out, 16);
    store<std::uint16_t>(out, pcm16 ? kFormatPcm : kFormatFloat);
    store<std::uint16_t>(out, 1);
    store<std::uint32_t>(out, std::uint32_t(x.sample_rate));
    store<std::uint32_t>(out, std::uint32_t(x.sample_rate) * (bits / 8));
    store<std::uint16_t>(out, bits / 8);
    store<std::uint16_t>(out, bits);
    out.insert(out.end(), {'d', 'a', 't', 'a'});
    store<std::uint32_t>(out, data_size);
    for (double v : x.samples) {
        if (pcm16) {
            const double q = std::clamp(std::round(v * 32768.0), -32768.0, 32767.0);
            store<std::int16_t>(out, std::int16_t(q));
        } else {
            store<float>(out, float(v));
        }
    }

    std::ofstream f(path, std::ios::binary);
    if (!f) fail(ErrorKind::IoError, "cannot write " + path.string());
    f.write(reinterpret_cast<const char*>(out.data()), std::streamsize(out.size()));
    if (!f) fail(ErrorKind::IoError, "short write to " + path.string());
}

AudioBuffer read_wav_for_codec(const std::filesystem::path& path, int expected_rate, bool auto_resample) {
    AudioBuffer x = read_wav(path);
    if (x.sample_rate == expected_rate) return x;
    if (!auto_resample)
        fail(ErrorKind::RateMismatch, path.string() + ": sample rate " + std::to_string(x.sample_rate) +
                                          " but codec expects " + std::to_string(expected_rate));
    if (x.empty()) fail(ErrorKind::EmptySignal, path.string() + ": no samples");
    if (expected_rate % x.sample_rate == 0) return resample_up(x, expected_rate / x.sample_rate);
    if (x.sample_rate % expected_rate == 0) return resample_down(x, x.sample_rate / expected_rate);
    return resample_to_rate(x, expected_rate);
}

}  // namespace sdc
