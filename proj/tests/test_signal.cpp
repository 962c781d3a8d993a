#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "sdc/error.hpp"
#include "sdc/signal/resample.hpp"
#include "sdc/signal/wav.hpp"

using namespace sdc;

namespace {

std::filesystem::path temp_path(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "sdc_test_signal";
    std::filesystem::create_directories(dir);
    return dir / name;
}

// Minimal RIFF writer for formats the library does not produce itself.
void write_raw_wav(const std::filesystem::path& path, std::uint16_t format, std::uint16_t channels, std::uint32_t rate,
                   std::uint16_t bits, const std::vector<std::uint8_t>& payload) {
    std::vector<std::uint8_t> b;
    auto u32 = [&](std::uint32_t v) { for (int i = 0; i < 4; ++i) b.push_back(std::uint8_t(v >> (8 * i))); };
    auto u16 = [&](std::uint16_t v) { for (int i = 0; i < 2; ++i) b.push_back(std::uint8_t(v >> (8 * i))); };
    b.insert(b.end(), {'R', 'I', 'F', 'F'});
    u32(36 + std::uint32_t(payload.size()));
    b.insert(b.end(), {'W', 'A', 'V', 'E', 'f', 'm', 't', ' '});
    u32(16);
    u16(format);
    u16(channels);
    u32(rate);
    u32(rate * channels * bits / 8);
    u16(std::uint16_t(channels * bits / 8));
    u16(bits);
    b.insert(b.end(), {'d', 'a', 't', 'a'});
    u32(std::uint32_t(payload.size()));
    b.insert(b.end(), payload.begin(), payload.end());
    std::ofstream(path, std::ios::binary).write(reinterpret_cast<const char*>(b.data()), std::streamsize(b.size()));
}

const std::size_t kEdge = 256;  // beyond the 64-crossing kernel reach at both rates

}  // namespace

TEST_SUITE("resample") {
    TEST_CASE("every polyphase branch has unity DC gain") {
        for (int factor : {2, 3, 4}) {
            PolyphaseUpsampler up(factor);
            double total = 0;
            for (int p = 0; p < factor; ++p) {
                double s = 0;
                for (double t : up.phase(p)) s += t;
                CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
                total += s;
            }
            CHECK(std::abs(total - factor) < 1e-6);
        }
        Decimator down(2);
        double s = 0;
        for (double t : down.taps()) s += t;
        CHECK(std::abs(s - 1.0) < 1e-6);
    }

    TEST_CASE("zeros in, zeros out") {
        const auto y = resample_up(AudioBuffer::zeros(1000, 16000), 2);
        CHECK(y.sample_rate == 32000);
        CHECK(y.size() == 2000);
        for (double v : y.samples) CHECK(v == 0.0);
        const auto z = resample_down(AudioBuffer::zeros(1000, 32000), 2);
        CHECK(z.sample_rate == 16000);
        CHECK(z.size() == 500);
        for (double v : z.samples) CHECK(v == 0.0);
    }

    TEST_CASE("constant stays constant on interior samples") {
        const auto y = resample_up(AudioBuffer(std::vector<double>(16000, 1.0), 16000), 2);
        for (std::size_t i = kEdge; i + kEdge < y.size(); ++i) REQUIRE(std::abs(y.samples[i] - 1.0) < 1e-3);
    }

    TEST_CASE("1 kHz sine upsampled matches the analytic 32 kHz sine") {
        const auto y = resample_up(AudioBuffer(oracle::sine(1000, 16000, 16000), 16000), 2);
        const auto ref = oracle::sine(1000, 32000, 32000);
        CHECK(oracle::snr_db(ref, y.samples, kEdge) >= 60.0);
    }

    TEST_CASE("10 kHz tone is removed by downsampling to 16 kHz") {
        const auto x = oracle::sine(10000, 32000, 32000);
        const auto y = resample_down(AudioBuffer(x, 32000), 2);
        CHECK(oracle::rms(y.samples, kEdge) <= 1e-3 * oracle::rms(x));
    }

    TEST_CASE("D(U(x)) reproduces band-limited noise") {
        for (std::uint64_t seed : {1u, 2u, 3u}) {
            const oracle::Multitone tones(40, 7000.0, seed);
            const auto x = tones.sample(16000, 8000);
            const auto back = resample_down(resample_up(AudioBuffer(x, 16000), 2), 2);
            CHECK(oracle::snr_db(x, back.samples, kEdge) >= 60.0);
        }
    }

    TEST_CASE("odd length truncates on downsampling") {
        CHECK(resample_down(AudioBuffer::zeros(1001, 32000), 2).size() == 500);
    }

    TEST_CASE("linearity") {
        std::mt19937_64 rng(11);
        const auto a = oracle::uniform(600, rng), b = oracle::uniform(600, rng);
        for (double ca : {-0.7, 2.5})
            for (double cb : {0.3, -1.1}) {
                std::vector<double> mix(600);
                for (std::size_t i = 0; i < 600; ++i) mix[i] = ca * a[i] + cb * b[i];
                const auto ym = resample_up(AudioBuffer(mix, 16000), 2);
                const auto ya = resample_up(AudioBuffer(a, 16000), 2);
                const auto yb = resample_up(AudioBuffer(b, 16000), 2);
                for (std::size_t i = 0; i < ym.size(); ++i)
                    REQUIRE(std::abs(ym.samples[i] - (ca * ya.samples[i] + cb * yb.samples[i])) < 1e-9);
            }
    }

    TEST_CASE("integer shift commutes with upsampling away from the edges") {
        std::mt19937_64 rng(5);
        const auto x = oracle::uniform(800, rng);
        const std::size_t k = 7;
        std::vector<double> shifted(800, 0.0);
        for (std::size_t i = k; i < 800; ++i) shifted[i] = x[i - k];
        const auto y = resample_up(AudioBuffer(x, 16000), 2);
        const auto ys = resample_up(AudioBuffer(shifted, 16000), 2);
        for (std::size_t n = 2 * k + kEdge; n + kEdge < ys.size(); ++n)
            REQUIRE(std::abs(ys.samples[n] - y.samples[n - 2 * k]) < 1e-12);
    }

    TEST_CASE("upsampling injects no energy above the input Nyquist") {
        // Content stops short of 8 kHz: the kernel's transition band straddles
        // Nyquist, so tones right at the edge would leak by construction.
        const oracle::Multitone tones(40, 7500.0, 4);
        auto y = resample_up(AudioBuffer(tones.sample(16000, 2048), 16000), 2).samples;
        for (std::size_t i = 0; i < y.size(); ++i)
            y[i] *= 0.5 - 0.5 * std::cos(2 * std::numbers::pi * double(i) / double(y.size() - 1));
        CHECK(10 * std::log10(oracle::energy_above(y, 32000, 8000.0)) <= -60.0);
    }

    TEST_CASE("adjoint satisfies <Ux, y> = <x, U^T y>") {
        std::mt19937_64 rng(3);
        PolyphaseUpsampler up(2);
        const auto x = oracle::uniform(300, rng), y = oracle::uniform(600, rng);
        std::vector<double> ux(600), uty(300, 0.0);
        up.apply<double>(x, ux);
        up.apply_adjoint<double>(y, uty);
        double lhs = 0, rhs = 0;
        for (std::size_t i = 0; i < 600; ++i) lhs += ux[i] * y[i];
        for (std::size_t i = 0; i < 300; ++i) rhs += x[i] * uty[i];
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }

    TEST_CASE("errors") {
        CHECK_THROWS_AS(resample_up(AudioBuffer({}, 16000), 2), Error);
        try {
            resample_up(AudioBuffer({}, 16000), 2);
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::EmptySignal);
        }
        try {
            resample_up(AudioBuffer({1.0}, 16000), 1);
            FAIL("expected InvalidFactor");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::InvalidFactor);
        }
        try {
            resample_down(AudioBuffer({1.0, 2.0}, 32000), 0);
            FAIL("expected InvalidFactor");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::InvalidFactor);
        }
    }

    TEST_CASE("arbitrary-ratio conversion keeps a low tone") {
        const auto x = AudioBuffer(oracle::sine(440, 44100, 44100), 44100);
        const auto y = resample_to_rate(x, 32000);
        CHECK(y.sample_rate == 32000);
        CHECK(y.size() == 32000);
        CHECK(oracle::snr_db(oracle::sine(440, 32000, 32000), y.samples, kEdge) >= 60.0);
    }
}

TEST_SUITE("wav") {
    TEST_CASE("float32 round trip is bit-identical") {
        std::mt19937_64 rng(1);
        std::vector<double> v = oracle::uniform(1000, rng);
        for (double& x : v) x = double(float(x));
        const auto path = temp_path("f32.wav");
        write_wav(path, AudioBuffer(v, 16000), WavEncoding::Float32);
        const auto back = read_wav(path);
        CHECK(back.sample_rate == 16000);
        REQUIRE(back.size() == v.size());
        CHECK(std::memcmp(back.samples.data(), v.data(), v.size() * sizeof(double)) == 0);
    }

    TEST_CASE("PCM16 keeps 0.5 within one quantization step") {
        const auto path = temp_path("pcm.wav");
        write_wav(path, AudioBuffer(std::vector<double>(10, 0.5), 32000), WavEncoding::Pcm16);
        for (double v : read_wav(path).samples) CHECK(std::abs(v - 0.5) <= std::ldexp(1.0, -15));
    }

    TEST_CASE("stereo is averaged") {
        std::vector<std::uint8_t> payload;
        for (std::int16_t v : {std::int16_t(16384), std::int16_t(0), std::int16_t(-8192), std::int16_t(8192)})
            for (int i = 0; i < 2; ++i) payload.push_back(std::uint8_t(std::uint16_t(v) >> (8 * i)));
        const auto path = temp_path("stereo.wav");
        write_raw_wav(path, 1, 2, 16000, 16, payload);
        const auto x = read_wav(path);
        REQUIRE(x.size() == 2);
        CHECK(x.samples[0] == 0.25);
        CHECK(x.samples[1] == 0.0);
    }

    TEST_CASE("44.1 kHz input needs the auto-resample flag") {
        const auto path = temp_path("cd.wav");
        write_wav(path, AudioBuffer(oracle::sine(440, 44100, 4410), 44100));
        try {
            read_wav_for_codec(path, 32000);
            FAIL("expected RateMismatch");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::RateMismatch);
        }
        const auto x = read_wav_for_codec(path, 32000, true);
        CHECK(x.sample_rate == 32000);
        CHECK(x.size() == 3200);
    }

    TEST_CASE("24-bit PCM is unsupported") {
        const auto path = temp_path("pcm24.wav");
        write_raw_wav(path, 1, 1, 16000, 24, std::vector<std::uint8_t>(30, 0));
        try {
            read_wav(path);
            FAIL("expected UnsupportedWav");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::UnsupportedWav);
        }
    }

    TEST_CASE("garbage header is malformed") {
        const auto path = temp_path("junk.wav");
        std::ofstream(path) << "this is not a wave file at all";
        try {
            read_wav(path);
            FAIL("expected MalformedWav");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::MalformedWav);
        }
    }
}
