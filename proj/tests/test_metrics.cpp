#include <cmath>
#include <random>

#include "doctest.h"
#include "json.hpp"
#include "oracles.hpp"
#include "sdc/error.hpp"
#include "sdc/metrics/metrics.hpp"

using namespace sdc;

namespace {

AudioBuffer noise(std::size_t n, int rate, std::uint64_t seed, double amp = 1.0) {
    std::mt19937_64 rng(seed);
    return {oracle::uniform(n, rng, -amp, amp), rate};
}

}  // namespace

TEST_SUITE("sdr") {
    TEST_CASE("half-scale estimate is 20 log10 2 dB") {
        const auto ref = noise(1000, 16000, 1);
        CHECK(sdr(ref, 0.5 * ref) == doctest::Approx(20 * std::log10(2.0)).epsilon(1e-12));
        CHECK(std::abs(sdr(ref, 0.5 * ref) - 6.0206) < 1e-3);
    }

    TEST_CASE("zero estimate is 0 dB") { CHECK(std::abs(sdr(noise(500, 16000, 2), AudioBuffer::zeros(500, 16000))) < 1e-9); }

    TEST_CASE("perfect estimate hits the cap") {
        const auto ref = noise(500, 16000, 3);
        CHECK(sdr(ref, ref) == kDbCap);
        CHECK(si_sdr(ref, ref) == kDbCap);
        CHECK(sdr(ref, -1.0 * ref) == doctest::Approx(10 * std::log10(0.25)));
    }

    TEST_CASE("all-zero reference is undefined") {
        try {
            sdr(AudioBuffer::zeros(10, 16000), noise(10, 16000, 1));
            FAIL("expected UndefinedReference");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::UndefinedReference);
        }
    }

    TEST_CASE("shape mismatch") {
        CHECK_THROWS_AS(sdr(noise(10, 16000, 1), noise(11, 16000, 1)), Error);
        CHECK_THROWS_AS(sdr(noise(10, 16000, 1), noise(10, 32000, 1)), Error);
    }

    TEST_CASE("SI-SDR ignores estimate scaling") {
        const auto ref = noise(2000, 16000, 4);
        const auto est = ref + noise(2000, 16000, 5, 0.3);
        const double base = si_sdr(ref, est);
        for (double c : {0.1, 1.0, 10.0}) CHECK(std::abs(si_sdr(ref, c * est) - base) < 1e-9);
        // and against its closed form
        double rr = 0, er = 0;
        for (std::size_t i = 0; i < ref.size(); ++i) {
            rr += ref.samples[i] * ref.samples[i];
            er += est.samples[i] * ref.samples[i];
        }
        double num = 0, den = 0;
        for (std::size_t i = 0; i < ref.size(); ++i) {
            const double t = er / rr * ref.samples[i];
            num += t * t;
            den += (est.samples[i] - t) * (est.samples[i] - t);
        }
        CHECK(base == doctest::Approx(10 * std::log10(num / den)).epsilon(1e-12));
    }
}

TEST_SUITE("bands") {
    TEST_CASE("band filter keeps a tone in band and removes it out of band") {
        const AudioBuffer tone(oracle::sine(1000, 32000, 3200), 32000);
        CHECK(energy(band_filter(tone, kHighBand).samples) < 1e-20 * energy(tone.samples));
        CHECK(band_energy_fraction(tone, kLowBand) == doctest::Approx(1.0).epsilon(1e-12));
    }

    TEST_CASE("complementary bands partition energy") {
        const auto x = noise(4000, 32000, 6);
        CHECK(band_energy_fraction(x, kLowBand) + band_energy_fraction(x, kHighBand) ==
              doctest::Approx(1.0).epsilon(1e-12));
    }

    TEST_CASE("band SDRs recombine into the full-band SDR") {
        // Parseval on a partition: |e|^2 = |e_lo|^2 + |e_hi|^2 and likewise for the reference.
        const auto ref = noise(8000, 32000, 7);
        const auto est = ref + noise(8000, 32000, 8, 0.4);
        const double r_lo = energy(band_filter(ref, kLowBand).samples);
        const double r_hi = energy(band_filter(ref, kHighBand).samples);
        const double e_lo = r_lo * std::pow(10.0, -band_sdr(ref, est, kLowBand) / 10);
        const double e_hi = r_hi * std::pow(10.0, -band_sdr(ref, est, kHighBand) / 10);
        const double e_full = energy(ref.samples) * std::pow(10.0, -sdr(ref, est) / 10);
        CHECK(std::abs((e_lo + e_hi) / e_full - 1.0) < 0.01);
    }

    TEST_CASE("empty reference band is undefined") {
        const AudioBuffer tone(oracle::sine(1000, 32000, 3200), 32000);
        try {
            band_sdr(tone, tone, kHighBand);
            FAIL("expected UndefinedReference");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::UndefinedReference);
        }
    }

    TEST_CASE("band validation and labels") {
        CHECK(kInterfaceBand.label() == "7900-8100");
        CHECK_THROWS_AS(band_filter(noise(100, 16000, 1), kHighBand), Error);  // above Nyquist of 16 kHz audio
        CHECK_THROWS_AS((BandSpec{500, 100}.validate(8000)), Error);
    }
}

TEST_SUITE("report") {
    TEST_CASE("self-evaluation gives zero losses and capped SDRs") {
        const auto x = noise(4096, 32000, 9);
        const auto r = build_report(x, x, {kLowBand, kHighBand, kInterfaceBand}, default_scales(32000));
        CHECK(r.get("mel") == 0.0);
        CHECK(r.get("stft") == 0.0);
        CHECK(r.get("waveform") == 0.0);
        CHECK(r.get("sdr") == kDbCap);
        CHECK(r.get("si_sdr") == kDbCap);
        CHECK(r.get("sdr_0-8000") == kDbCap);
        CHECK(r.get("sdr_8000-16000") == kDbCap);
        CHECK(r.get("sdr_7900-8100") == kDbCap);
    }

    TEST_CASE("text and json keep insertion order") {
        MetricReport r;
        r.set("b", 2.0);
        r.set("a", 1.5);
        r.set("b", 3.0);
        CHECK(r.to_text() == "b\t3.000000\na\t1.500000\n");
        const auto j = nlohmann::ordered_json::parse(r.to_json());
        CHECK(j.begin().key() == "b");
        CHECK(j["a"].get<double>() == 1.5);
        CHECK_THROWS_AS(r.get("missing"), Error);
    }

    TEST_CASE("errors name the metric") {
        try {
            build_report(AudioBuffer::zeros(4096, 32000), noise(4096, 32000, 1), {}, default_scales(32000));
            FAIL("expected an error");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::UndefinedReference);
            CHECK(std::string(e.what()).rfind("si_sdr", 0) == 0);
        }
    }
}
