#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "sdc/ad/param.hpp"

namespace sdc {

struct StoredTensor {
    std::string name;
    std::vector<std::size_t> shape;
    std::vector<float> data;
};

// Container layout (little endian):
//   "SDCK" | u16 version | u32 manifest bytes | manifest text (key=value lines)
//   | u32 tensor count | per tensor: u16 name bytes, name, u8 rank, u32 dims..., f32 data...
struct Checkpoint {
    static constexpr std::uint16_t kVersion = 1;

    std::map<std::string, std::string> manifest;
    std::vector<StoredTensor> tensors;

    const StoredTensor* find(const std::string& name) const;

    void add(const std::string& prefix, const ad::ParameterList<float>& params);
    // Copies stored values into params; ConfigMismatch on missing names or shape differences.
    void load_into(const std::string& prefix, ad::ParameterList<float>& params) const;
};

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

std::vector<std::uint8_t> serialize(const Checkpoint& ckpt);
Checkpoint deserialize_checkpoint(const std::vector<std::uint8_t>& bytes);

}  // namespace sdc
