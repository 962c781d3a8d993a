#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "sdc/ad/optim.hpp"
#include "sdc/cascade/dataset.hpp"
#include "sdc/cascade/model.hpp"
#include "sdc/codec/losses.hpp"

namespace sdc {

struct StepRecord {
    int stage = 0;  // 1, 2 or 3 (finetune)
    int step = 0;
    double total = 0.0;
    double disc = 0.0;                 // summed discriminator losses of the step
    LossBreakdown<double> low, high;   // empty for a branch that is not trained
    std::size_t reseeded = 0;
};

struct StageReport {
    int stage = 0;
    std::vector<double> total;  // the stage objective, per step
    std::vector<double> mel;    // mel term of the trained branch (mean of both when finetuning)
    double init_total = 0.0;    // stage objective / mel term of the untrained stage, probe batches, no update
    double init_mel = 0.0;
    bool freeze_held = true;    // stage 2: low branch bit-identical after every step
    double seconds = 0.0;
};

struct TrainOptions {
    std::uint64_t seed = 0;
    std::size_t batch = 2;
    double crop_seconds = 0.5;
    ad::AdamConfig generator;
    ad::AdamConfig discriminator;
    // Stage checkpoints and train_log.jsonl go here; empty disables both.
    std::filesystem::path out_dir;
    bool verify_freeze = true;
    int log_every = 100;
    std::function<void(const StepRecord&)> on_step;
};

struct TrainReport {
    std::vector<StageReport> stages;
};

// Stage 1 trains the low branch on s16, stage 2 the high branch on
// s32 - U(d16) with the low branch frozen, stage 3 both branches on the joint
// objective. NoData on an empty dataset, NanLoss on a non-finite term.
TrainReport train_cascade(CascadeModel& model, const Dataset& data, const TrainOptions& opt);

// Mean of the first (head) or last window of a curve.
double curve_mean(const std::vector<double>& curve, std::size_t window, bool head);
// 1 - mean(last window) / mean(first window), window = clamp(n / 10, 1, 50).
double smoothed_drop(const std::vector<double>& curve);
// 1 - mean(last window) / init, same window.
double drop_from(double init, const std::vector<double>& curve);

}  // namespace sdc
