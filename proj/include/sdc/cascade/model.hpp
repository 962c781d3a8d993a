#pragma once

#include <cstdint>
#include <string>

#include "sdc/cascade/cascade.hpp"
#include "sdc/codec/branch.hpp"
#include "sdc/codec/discriminator.hpp"
#include "sdc/io/checkpoint.hpp"

namespace sdc {

// Everything a training run owns: both branches, their discriminators and U.
struct CascadeModel {
    CascadeConfig config;
    CodecBranch<float> low;
    CodecBranch<float> high;
    Discriminator<float> disc_low;
    Discriminator<float> disc_high;
    PolyphaseUpsampler up;

    CascadeModel(const CascadeConfig& cfg, std::uint64_t seed);

    // Manifest carries both branch configs, the weights and the stage tag.
    Checkpoint to_checkpoint(const std::string& stage) const;
    // ConfigMismatch when the checkpoint is incomplete or malformed.
    static CascadeModel from_checkpoint(const Checkpoint& ckpt);
};

}  // namespace sdc
