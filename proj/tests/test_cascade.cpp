#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "sdc/cascade/cascade.hpp"
#include "sdc/cascade/dataset.hpp"
#include "sdc/cascade/model.hpp"
#include "sdc/cascade/trainer.hpp"
#include "sdc/error.hpp"
#include "sdc/io/log.hpp"
#include "sdc/metrics/metrics.hpp"

using namespace sdc;

namespace {

bool bit_equal(const AudioBuffer& a, const AudioBuffer& b) {
    return a.size() == b.size() && a.sample_rate == b.sample_rate &&
           std::memcmp(a.samples.data(), b.samples.data(), a.size() * sizeof(double)) == 0;
}

std::size_t argmax_abs(const std::vector<double>& x) {
    return std::size_t(std::max_element(x.begin(), x.end(), [](double a, double b) { return std::abs(a) < std::abs(b); }) -
                       x.begin());
}

// Full-band test pair: multitone reaching 15 kHz at 32 kHz and its decimation.
std::pair<AudioBuffer, AudioBuffer> wideband_pair(std::size_t n32, std::uint64_t seed) {
    const AudioBuffer s32(oracle::Multitone(12, 15000, seed).sample(32000, n32), 32000);
    return {resample_down(s32, 2), s32};
}

CascadeConfig tiny_cascade() {
    CascadeConfig c;
    c.low.strides = {2, 2};
    c.high.strides = {2, 4};
    for (auto* b : {&c.low, &c.high}) {
        b->base_channels = 2;
        b->latent_dim = 4;
        b->n_quantizers = 2;
        b->codebook_bits = 3;
        b->disc_channels = 2;
        b->killed_after = 2;
    }
    c.schedule = {3, 3, 2};
    return c;
}

TrainOptions tiny_options() {
    TrainOptions o;
    o.seed = 7;
    o.batch = 1;
    o.crop_seconds = 2048.0 / 16000.0;
    o.generator.lr = 1e-3;
    return o;
}

Dataset tiny_data(std::size_t clips = 2) { return Dataset::from_wideband(synthetic_corpus(clips, 0.3, 5)); }

ErrorKind kind_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("no error raised");
    return ErrorKind::InvalidConfig;
}

struct QuietLog {
    LogLevel previous = log_level();
    QuietLog() { set_log_level(LogLevel::Quiet); }
    ~QuietLog() { set_log_level(previous); }
};

}  // namespace

TEST_SUITE("cascade algebra") {
    const PolyphaseUpsampler up(2);

    TEST_CASE("identity branches telescope back to the wideband input") {
        for (std::uint64_t seed : {1, 2, 3}) {
            const auto [s16, s32] = wideband_pair(8000, seed);
            const auto out = cascade_forward(s16, s32, IdentityCodec(16000), IdentityCodec(32000), up);
            CHECK(sdr(s32, out.s_hat_32) >= 60.0);
            CHECK(bit_equal(out.s_hat_16, s16));
        }
    }

    TEST_CASE("a silent high branch leaves exactly U(d16)") {
        const auto [s16, s32] = wideband_pair(4000, 4);
        const auto out = cascade_forward(s16, s32, IdentityCodec(16000), ZeroCodec(32000), up);
        CHECK(bit_equal(out.s_hat_32, out.u_d_hat_16));
        CHECK(bit_equal(out.s_hat_32, resample_up(s16, 2)));
    }

    TEST_CASE("summation residue is exactly zero") {
        const auto [s16, s32] = wideband_pair(4000, 5);
        for (int variant = 0; variant < 2; ++variant) {
            const auto out = variant ? cascade_forward(s16, s32, ZeroCodec(16000), IdentityCodec(32000), up)
                                     : cascade_forward(s16, s32, IdentityCodec(16000), IdentityCodec(32000), up);
            for (std::size_t i = 0; i < s32.size(); ++i)
                CHECK(out.s_hat_32.samples[i] - out.u_d_hat_16.samples[i] - out.d_hat_32.samples[i] == 0.0);
        }
    }

    TEST_CASE("inpainting with identity branches adds nothing above 8 kHz") {
        const auto [s16, s32] = wideband_pair(4000, 6);
        const auto out = inpaint(s16, IdentityCodec(16000), IdentityCodec(32000), up);
        for (double v : out.d_hat_32.samples) CHECK(v == 0.0);
        CHECK(bit_equal(out.s_hat_32, resample_up(s16, 2)));
    }

    TEST_CASE("no delay between the branches") {
        AudioBuffer s16 = AudioBuffer::zeros(2048, 16000);
        s16.samples[1000] = 1.0;
        const auto s32 = resample_up(s16, 2);
        CHECK(argmax_abs(s32.samples) == 2000);
        const auto out = cascade_forward(s16, s32, IdentityCodec(16000), IdentityCodec(32000), up);
        const auto peak = argmax_abs(out.s_hat_32.samples);
        CHECK(std::abs(long(peak) - 2000) <= 1);
        CHECK(argmax_abs(resample_down(out.s_hat_32, 2).samples) == 1000);
    }

    TEST_CASE("identity report caps interface and overall SDR") {
        const auto [s16, s32] = wideband_pair(8000, 7);
        const auto out = cascade_forward(s16, s32, IdentityCodec(16000), IdentityCodec(32000), up);
        const auto r = disentanglement_report(s32, out);
        CHECK(r.get("s32_sdr_overall") == kDbCap);
        CHECK(r.get("s32_sdr_interface_7900-8100") == kDbCap);
        CHECK(r.get("s32_interface_gap") == 0.0);
        const auto z = cascade_forward(s16, s32, IdentityCodec(16000), ZeroCodec(32000), up);
        CHECK(disentanglement_report(s32, z).get("d32_energy_fraction_8000-16000") == 0.0);
    }

    TEST_CASE("shape and rate errors") {
        const auto [s16, s32] = wideband_pair(4000, 8);
        const AudioBuffer short32(std::vector<double>(s32.samples.begin(), s32.samples.end() - 2), 32000);
        CHECK(kind_of([&] { cascade_forward(s16, short32, IdentityCodec(16000), IdentityCodec(32000), up); }) ==
              ErrorKind::ShapeMismatch);
        CHECK(kind_of([&] { cascade_forward(s32, s32, IdentityCodec(16000), IdentityCodec(32000), up); }) ==
              ErrorKind::ShapeMismatch);
        CHECK(kind_of([&] { IdentityCodec(16000).process(s32); }) == ErrorKind::RateMismatch);
    }

    TEST_CASE("config validation") {
        CascadeConfig c;
        CHECK_NOTHROW(c.validate());
        CHECK(c.factor() == 2);
        c.high.strides = {2, 4, 5, 8};
        CHECK(kind_of([&] { c.validate(); }) == ErrorKind::InvalidConfig);
        c = CascadeConfig{};
        c.high.sample_rate = 24000;
        c.high.strides = {2, 4, 6, 10};
        CHECK(kind_of([&] { c.validate(); }) == ErrorKind::InvalidConfig);
    }
}

TEST_SUITE("dataset") {
    TEST_CASE("synthetic corpus") {
        const auto a = synthetic_corpus(3, 0.5, 11), b = synthetic_corpus(3, 0.5, 11), c = synthetic_corpus(3, 0.5, 12);
        REQUIRE(a.size() == 3);
        CHECK(bit_equal(a[1], b[1]));
        CHECK_FALSE(bit_equal(a[1], c[1]));
        for (const auto& x : a) {
            CHECK(x.size() == 16000);
            CHECK(x.sample_rate == 32000);
            double peak = 0;
            for (double v : x.samples) peak = std::max(peak, std::abs(v));
            CHECK(peak == doctest::Approx(0.7).epsilon(1e-12));
            const double hi = band_energy_fraction(x, kHighBand);
            CHECK(hi > 0.1);
            CHECK(hi < 0.9);
        }
    }

    TEST_CASE("pairs are decimations and crops stay aligned") {
        const auto clips = synthetic_corpus(2, 0.5, 13);
        const auto d = Dataset::from_wideband(clips);
        REQUIRE(d.size() == 2);
        CHECK(d.seconds() == doctest::Approx(1.0));
        CHECK(bit_equal(d[0].s16, resample_down(clips[0], 2)));

        std::mt19937_64 rng(1);
        const auto b = d.sample(3, 1000, rng);
        CHECK(b.s16.shape() == ad::Shape{3, 1, 1000});
        CHECK(b.s32.shape() == ad::Shape{3, 1, 2000});
        for (std::size_t k = 0; k < 3; ++k) {
            // locate the crop in one of the clips and check the wideband crop starts at twice the offset
            bool found = false;
            for (std::size_t c = 0; c < d.size() && !found; ++c)
                for (std::size_t off = 0; off + 1000 <= d[c].s16.size() && !found; ++off) {
                    bool match = true;
                    for (std::size_t i = 0; i < 1000 && match; i += 97)
                        match = float(d[c].s16.samples[off + i]) == b.s16.data()[k * 1000 + i];
                    if (!match) continue;
                    found = true;
                    for (std::size_t i = 0; i < 2000; i += 31)
                        CHECK(float(d[c].s32.samples[2 * off + i]) == b.s32.data()[k * 2000 + i]);
                }
            CHECK(found);
        }
        // longer than the clips: zero padded
        const auto p = d.sample(1, 20000, rng);
        CHECK(p.s16.data()[19999] == 0.0f);
        Dataset empty;
        CHECK(kind_of([&] { empty.sample(1, 100, rng); }) == ErrorKind::NoData);
    }
}

TEST_SUITE("trainer") {
    TEST_CASE("smoothed drop") {
        std::vector<double> c(100);
        for (std::size_t i = 0; i < c.size(); ++i) c[i] = i < 50 ? 4.0 : 1.0;
        CHECK(smoothed_drop(c) == doctest::Approx(0.75));
        CHECK(curve_mean(c, 10, true) == 4.0);
        CHECK(curve_mean(c, 10, false) == 1.0);
        CHECK(smoothed_drop({2.0, 1.0}) == doctest::Approx(0.5));
        CHECK(kind_of([] { smoothed_drop({}); }) == ErrorKind::NoData);
        CHECK(drop_from(8.0, c) == doctest::Approx(1.0 - 1.0 / 8.0));
        CHECK(drop_from(0.0, c) == 0.0);
    }

    TEST_CASE("each stage records the loss of the model it starts from") {
        QuietLog quiet;
        CascadeModel m(tiny_cascade(), 3);
        const auto rep = train_cascade(m, tiny_data(), tiny_options());
        for (const auto& st : rep.stages) {
            CAPTURE(st.stage);
            CHECK(std::isfinite(st.init_total));
            CHECK(st.init_mel > 0);
            CHECK(st.init_total >= st.init_mel);
        }
    }

    TEST_CASE("stages run in order, the low branch stays frozen, and runs repeat") {
        QuietLog quiet;
        const auto data = tiny_data();
        auto run = [&] {
            CascadeModel m(tiny_cascade(), 3);
            std::vector<std::pair<int, int>> order;
            auto opt = tiny_options();
            opt.on_step = [&](const StepRecord& r) {
                order.emplace_back(r.stage, r.step);
                CHECK(std::isfinite(r.total));
                CHECK(r.low.empty() == (r.stage == 2));
                CHECK(r.high.empty() == (r.stage == 1));
            };
            const auto before = m.low.parameters().snapshot();
            auto rep = train_cascade(m, data, opt);
            CHECK(before != m.low.parameters().snapshot());
            return std::tuple{rep, order, m.high.parameters().snapshot()};
        };
        const auto [rep, order, high] = run();
        REQUIRE(rep.stages.size() == 3);
        CHECK(rep.stages[0].total.size() == 3);
        CHECK(rep.stages[1].total.size() == 3);
        CHECK(rep.stages[2].total.size() == 2);
        CHECK(rep.stages[1].freeze_held);
        const std::vector<std::pair<int, int>> expect{{1, 0}, {1, 1}, {1, 2}, {2, 0}, {2, 1}, {2, 2}, {3, 0}, {3, 1}};
        CHECK(order == expect);

        const auto [rep2, order2, high2] = run();
        CHECK(rep2.stages[2].total == rep.stages[2].total);
        CHECK(high2 == high);
    }

    TEST_CASE("stage 2 leaves every low-branch bit untouched") {
        QuietLog quiet;
        auto cfg = tiny_cascade();
        cfg.schedule = {0, 4, 0};
        CascadeModel m(cfg, 4);
        const auto before = m.low.parameters().snapshot();
        const auto rep = train_cascade(m, tiny_data(), tiny_options());
        const auto after = m.low.parameters().snapshot();
        CHECK(rep.stages[1].freeze_held);
        CHECK(std::memcmp(before.data(), after.data(), before.size() * sizeof(float)) == 0);
    }

    TEST_CASE("checkpoints and log") {
        QuietLog quiet;
        const auto dir = std::filesystem::temp_directory_path() / "sdc_test_trainer";
        std::filesystem::remove_all(dir);
        CascadeModel m(tiny_cascade(), 5);
        auto opt = tiny_options();
        opt.out_dir = dir;
        opt.log_every = 1;
        train_cascade(m, tiny_data(), opt);
        for (const char* f : {"stage1.sdck", "stage2.sdck", "final.sdck", "train_log.jsonl"})
            CHECK(std::filesystem::exists(dir / f));
        const auto back = CascadeModel::from_checkpoint(load_checkpoint(dir / "final.sdck"));
        CHECK(back.low.parameters().snapshot() == m.low.parameters().snapshot());
        CHECK(back.high.parameters().snapshot() == m.high.parameters().snapshot());
        CHECK(back.config.schedule.finetune == 2);
        std::filesystem::remove_all(dir);
    }

    TEST_CASE("errors") {
        QuietLog quiet;
        CascadeModel m(tiny_cascade(), 6);
        CHECK(kind_of([&] { train_cascade(m, Dataset{}, tiny_options()); }) == ErrorKind::NoData);
        auto opt = tiny_options();
        opt.crop_seconds = 0.01;
        CHECK(kind_of([&] { train_cascade(m, tiny_data(), opt); }) == ErrorKind::InvalidConfig);

        auto clips = synthetic_corpus(1, 0.3, 5);
        std::fill(clips[0].samples.begin(), clips[0].samples.end(), std::numeric_limits<double>::quiet_NaN());
        try {
            train_cascade(m, Dataset::from_wideband(clips), tiny_options());
            FAIL("expected NanLoss");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::NanLoss);
            CHECK(std::string(e.what()).find("stage 1 probe") != std::string::npos);
        }
    }
}
