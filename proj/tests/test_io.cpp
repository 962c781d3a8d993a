#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "sdc/app/commands.hpp"
#include "sdc/error.hpp"
#include "sdc/io/bitstream.hpp"
#include "sdc/io/log.hpp"
#include "sdc/io/run_config.hpp"
#include "sdc/signal/wav.hpp"

using namespace sdc;
namespace fs = std::filesystem;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("no error raised");
    return ErrorKind::InvalidConfig;
}

std::string message_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.what();
    }
    return {};
}

BranchTokens random_branch(std::uint32_t rate, int n_q, int bits, std::uint32_t frames, std::mt19937_64& rng) {
    BranchTokens b{rate, std::uint8_t(n_q), std::uint8_t(bits), frames, {}};
    std::uniform_int_distribution<int> tok(0, (1 << bits) - 1);
    b.tokens.assign(std::size_t(n_q), std::vector<int>(frames));
    for (auto& row : b.tokens)
        for (auto& t : row) t = tok(rng);
    return b;
}

CascadeConfig small_cascade() {
    CascadeConfig c;
    for (auto* b : {&c.low, &c.high}) {
        b->base_channels = 2;
        b->latent_dim = 8;
    }
    return c;
}

fs::path scratch(const char* name) {
    const auto dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_SUITE("bitstream") {
    TEST_CASE("byte layout") {
        TokenStream s;
        s.frame_rate = 50;
        s.branches.push_back({16000, 2, 3, 3, {{1, 2, 3}, {4, 5, 7}}});
        const auto bytes = encode_stream(s);
        // 001 010 011 100 101 111, MSB first, padded
        const std::vector<std::uint8_t> expect{'S', 'D', 'C', '1', 1, 0, 50, 0, 0, 0, 1, 0x80, 0x3e, 0, 0, 2, 3, 3, 0, 0, 0,
                                               0x29, 0xcb, 0xc0};
        CHECK(bytes == expect);
        const auto back = decode_stream(bytes);
        CHECK(back.frame_rate == 50);
        CHECK(back.branches[0].tokens == s.branches[0].tokens);
    }

    TEST_CASE("round trip over widths and branch counts") {
        std::mt19937_64 rng(1);
        for (int bits : {1, 3, 7, 10, 13, 16})
            for (int branches : {1, 2, 3}) {
                TokenStream s;
                s.frame_rate = 50;
                for (int b = 0; b < branches; ++b)
                    s.branches.push_back(random_branch(16000u << b, 1 + b, bits, 17 + std::uint32_t(b), rng));
                const auto bytes = encode_stream(s);
                const auto back = decode_stream(bytes);
                REQUIRE(back.branches.size() == std::size_t(branches));
                for (int b = 0; b < branches; ++b) {
                    CHECK(back.branches[std::size_t(b)].tokens == s.branches[std::size_t(b)].tokens);
                    CHECK(back.branches[std::size_t(b)].sample_rate == s.branches[std::size_t(b)].sample_rate);
                }
                CHECK(encode_stream(back) == bytes);
            }
    }

    TEST_CASE("default rates: 250 payload bytes per branch-second, 2000 and 4000 bps") {
        std::mt19937_64 rng(2);
        TokenStream s;
        s.frame_rate = 50;
        s.branches.push_back(random_branch(16000, 4, 10, 50, rng));
        const auto one = encode_stream(s).size();
        s.branches.push_back(random_branch(32000, 4, 10, 50, rng));
        const auto two = encode_stream(s).size();
        CHECK(s.bitrate(1) == 2000.0);
        CHECK(s.bitrate() == 4000.0);
        CHECK(s.branches[0].payload_bits() == 2000);
        const std::size_t header = 4 + 2 + 4 + 1;
        CHECK(one == header + 10 + 250);
        CHECK(two == header + 20 + 500);
    }

    TEST_CASE("invalid tokens and shapes") {
        TokenStream s;
        s.frame_rate = 50;
        s.branches.push_back({16000, 1, 3, 2, {{0, 8}}});
        CHECK(kind_of([&] { encode_stream(s); }) == ErrorKind::InvalidToken);
        s.branches[0].tokens = {{0, -1}};
        CHECK(kind_of([&] { encode_stream(s); }) == ErrorKind::InvalidToken);
        s.branches[0].tokens = {{0}};
        CHECK(kind_of([&] { encode_stream(s); }) == ErrorKind::InvalidToken);
        s.branches.clear();
        CHECK(kind_of([&] { encode_stream(s); }) == ErrorKind::InvalidToken);
    }

    TEST_CASE("corrupt streams are rejected") {
        std::mt19937_64 rng(3);
        TokenStream s;
        s.frame_rate = 50;
        s.branches.push_back(random_branch(16000, 4, 10, 20, rng));
        const auto good = encode_stream(s);
        auto corrupt = [&](auto edit) {
            auto b = good;
            edit(b);
            return kind_of([&] { decode_stream(b); });
        };
        CHECK(corrupt([](auto& b) { b[0] = 'X'; }) == ErrorKind::CorruptStream);
        CHECK(corrupt([](auto& b) { b[4] = 9; }) == ErrorKind::CorruptStream);
        CHECK(corrupt([](auto& b) { b.resize(8); }) == ErrorKind::CorruptStream);
        CHECK(corrupt([](auto& b) { b.pop_back(); }) == ErrorKind::CorruptStream);
        CHECK(corrupt([](auto& b) { b.push_back(0); }) == ErrorKind::CorruptStream);
        CHECK(corrupt([](auto& b) { b[17] = 0xff; }) == ErrorKind::CorruptStream);  // frame count beyond the data
        CHECK(corrupt([](auto& b) { b.clear(); }) == ErrorKind::CorruptStream);
        CHECK(kind_of([] { read_stream("/nonexistent/x.sdc"); }) == ErrorKind::IoError);
    }
}

TEST_SUITE("run config") {
    TEST_CASE("defaults") {
        const auto c = parse_run_config("");
        CHECK(c.seed == 0);
        CHECK(c.cascade.schedule.stage1 == 2000);
        CHECK(c.cascade.schedule.stage2 == 2000);
        CHECK(c.cascade.schedule.finetune == 1000);
        CHECK(c.generator.lr == 1e-4);
        CHECK(c.generator.beta1 == 0.8);
        CHECK(c.generator.beta2 == 0.99);
        CHECK(c.crop_seconds == 0.5);
        CHECK(c.bands.size() == 3);
    }

    TEST_CASE("full file") {
        const auto dir = scratch("sdc_test_cfg");
        fs::create_directories(dir / "data");
        const auto c = parse_run_config(R"(
# toy run
[run]
seed = 42
out_dir = out        # relative to the file
data_dir = data
batch = 2

[optim]
lr = 3e-4
disc_lr = 1e-4

[schedule]
stage1 = 10
stage2 = 20
finetune = 5

[low]
base_channels = 8
activation = tanh

[high]
strides = 2, 4, 8, 10
n_quantizers = 2

[weights.high]
mel = 30

[metrics]
bands = 0-4000, 4000-16000
)",
                                        dir);
        CHECK(c.seed == 42);
        CHECK(c.out_dir == dir / "out");
        CHECK(c.data_dir == dir / "data");
        CHECK(c.batch == 2);
        CHECK(c.generator.lr == 3e-4);
        CHECK(c.discriminator.lr == 1e-4);
        CHECK(c.cascade.schedule.stage2 == 20);
        CHECK(c.cascade.low.base_channels == 8);
        CHECK(c.cascade.low.activation == Activation::Tanh);
        CHECK(c.cascade.high.n_quantizers == 2);
        CHECK(c.cascade.high_weights.mel == 30);
        CHECK(c.cascade.low_weights.mel == 15);
        REQUIRE(c.bands.size() == 2);
        CHECK(c.bands[1].low == 4000);
        fs::remove_all(dir);
    }

    TEST_CASE("rejections name the line") {
        auto reject = [](const char* text) {
            CHECK(kind_of([&] { parse_run_config(text); }) == ErrorKind::InvalidConfig);
            return message_of([&] { parse_run_config(text); });
        };
        CHECK(reject("[run]\nbogus = 1\n").find("line 2") != std::string::npos);
        CHECK(reject("[nowhere]\n").find("line 1") != std::string::npos);
        reject("seed = 1\n");
        reject("[run]\nseed = 1\nseed = 2\n");
        reject("[run]\nseed = abc\n");
        reject("[run]\nbatch = 1.5\n");
        reject("[run]\ndata_dir = /nonexistent/dir\n");
        reject("[low]\nactivation = relu\n");
        reject("[run\n");
        reject("[metrics]\nbands = 8000-4000\n");
        // frame rates no longer agree
        reject("[high]\nstrides = 2, 4, 5, 8\n");
    }

    TEST_CASE("band parsing") {
        const auto b = parse_band(" 7900-8100 ");
        CHECK(b.low == 7900);
        CHECK(b.high == 8100);
        CHECK(kind_of([] { parse_band("8000"); }) == ErrorKind::InvalidConfig);
    }

    TEST_CASE("log levels") {
        CHECK(parse_log_level("debug") == LogLevel::Debug);
        CHECK(parse_log_level("quiet") == LogLevel::Quiet);
        CHECK(kind_of([] { parse_log_level("loud"); }) == ErrorKind::InvalidConfig);
    }
}

TEST_SUITE("coding") {
    TEST_CASE("encode and decode agree with the cascade") {
        const CascadeModel model(small_cascade(), 1);
        const AudioBuffer x(oracle::Multitone(8, 15000, 4).sample(32000, 32001), 32000);  // odd tail sample is dropped
        const auto stream = encode_audio(model, x);
        REQUIRE(stream.branches.size() == 2);
        CHECK(stream.frame_rate == 50);
        CHECK(stream.branches[0].frame_count == 50);
        CHECK(stream.branches[1].frame_count == 50);
        CHECK(stream.bitrate() == 4000.0);

        const auto bytes = encode_stream(stream);
        CHECK(bytes.size() == 11 + 20 + 500);
        CHECK(encode_stream(decode_stream(bytes)) == bytes);
        CHECK(encode_stream(encode_audio(model, x)) == bytes);

        const auto y32 = decode_audio(model, decode_stream(bytes));
        const auto y16 = decode_audio(model, decode_stream(bytes), 16000);
        CHECK(y32.sample_rate == 32000);
        CHECK(y32.size() == 32000);
        CHECK(y16.size() == 16000);

        const auto low = encode_audio(model, x, true);
        CHECK(low.branches.size() == 1);
        CHECK(low.branches[0].tokens == stream.branches[0].tokens);
        CHECK(kind_of([&] { decode_audio(model, low, 32000); }) == ErrorKind::ConfigMismatch);
    }

    TEST_CASE("streams from another model are rejected") {
        const CascadeModel model(small_cascade(), 1);
        auto cfg = small_cascade();
        cfg.low.n_quantizers = 2;
        cfg.high.n_quantizers = 2;
        const CascadeModel other(cfg, 1);
        const AudioBuffer x(oracle::Multitone(4, 7000, 5).sample(16000, 16000), 16000);
        const auto s = encode_audio(other, x);
        CHECK(kind_of([&] { decode_audio(model, s); }) == ErrorKind::ConfigMismatch);
    }

    TEST_CASE("file commands") {
        const auto dir = scratch("sdc_test_cmd");
        const CascadeModel model(small_cascade(), 2);
        save_checkpoint(dir / "m.sdck", model.to_checkpoint("final"));
        cmd_synth(dir / "ref", 2, 0.5, 9);
        CHECK(fs::exists(dir / "ref" / "clip_0001.wav"));

        cmd_encode(dir / "ref" / "clip_0000.wav", dir / "m.sdck", dir / "a.sdc");
        cmd_decode(dir / "a.sdc", dir / "m.sdck", dir / "a.wav");
        const auto y = read_wav(dir / "a.wav");
        CHECK(y.sample_rate == 32000);
        CHECK(y.size() == 16000);
        CHECK(fs::file_size(dir / "a.sdc") == 11 + 20 + 2 * 125);

        const auto agg = cmd_eval(dir / "ref", dir / "m.sdck", dir / "eval");
        CHECK(agg.get("files") == 2);
        CHECK(agg.has("s32_mel"));
        CHECK(fs::exists(dir / "eval" / "clip_0000.json"));
        CHECK(fs::exists(dir / "eval" / "aggregate.txt"));

        write_wav(dir / "in16.wav", resample_down(read_wav(dir / "ref" / "clip_0001.wav"), 2));
        const auto rep = cmd_inpaint(dir / "in16.wav", dir / "m.sdck", dir / "inp.wav", dir / "ref" / "clip_0001.wav");
        CHECK(rep.has("inp_mel"));
        CHECK(rep.has("ud_inp_mel"));
        CHECK(fs::exists(dir / "inp.report.json"));
        CHECK(read_wav(dir / "inp.wav").sample_rate == 32000);

        CHECK(kind_of([&] { cmd_decode(dir / "ref" / "clip_0000.wav", dir / "m.sdck", dir / "b.wav"); }) ==
              ErrorKind::CorruptStream);
        CHECK(kind_of([&] { cmd_encode(dir / "missing.wav", dir / "m.sdck", dir / "b.sdc"); }) == ErrorKind::IoError);
        fs::remove_all(dir);
    }
}
