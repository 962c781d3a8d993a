#pragma once

#include <cstdint>
#include <filesystem>
#include <string_view>
#include <vector>

#include "sdc/ad/optim.hpp"
#include "sdc/cascade/cascade.hpp"
#include "sdc/metrics/metrics.hpp"

namespace sdc {

// Everything `sdc train` reads. The file is line oriented:
//   [section]
//   key = value      # comment
// Sections: run, optim, schedule, low, high, weights.low, weights.high,
// metrics. Unknown sections or keys are errors.
struct RunConfig {
    std::uint64_t seed = 0;
    std::filesystem::path out_dir = "runs/default";
    std::filesystem::path data_dir;  // empty: generate the synthetic corpus
    bool auto_resample = false;
    std::size_t synthetic_clips = 32;
    double synthetic_seconds = 4.0;
    std::size_t batch = 1;
    double crop_seconds = 0.5;
    int log_every = 100;
    ad::AdamConfig generator;
    ad::AdamConfig discriminator;
    CascadeConfig cascade;
    std::vector<BandSpec> bands{kLowBand, kHighBand, kInterfaceBand};

    void validate() const;
};

// Relative paths resolve against base_dir. InvalidConfig on syntax errors,
// unknown keys, bad values or a data_dir that does not exist.
RunConfig parse_run_config(std::string_view text, const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);

// "8000-16000" -> {8000, 16000}.
BandSpec parse_band(std::string_view text);

}  // namespace sdc
