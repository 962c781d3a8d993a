#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace sdc {

struct BranchTokens {
    std::uint32_t sample_rate = 0;
    std::uint8_t n_quantizers = 0;
    std::uint8_t codebook_bits = 0;
    std::uint32_t frame_count = 0;
    std::vector<std::vector<int>> tokens;  // [stage][frame]

    std::uint64_t payload_bits() const { return std::uint64_t(n_quantizers) * frame_count * codebook_bits; }
};

// Compressed form of one clip. Layout (header integers little endian):
//   "SDC1" | u16 version | u32 frame_rate | u8 branch_count
//   | per branch: u32 sample_rate, u8 n_quantizers, u8 codebook_bits, u32 frame_count
//   | per branch payload: tokens stage-major, frame-minor, each codebook_bits
//     wide, most significant bit first, zero-padded to a byte boundary.
struct TokenStream {
    static constexpr std::uint16_t kVersion = 1;

    std::uint32_t frame_rate = 0;
    std::vector<BranchTokens> branches;

    // Payload bits per second of the first `branches` branches (all when 0).
    double bitrate(std::size_t branches = 0) const;
};

// InvalidToken if a token does not fit its width or shapes disagree.
std::vector<std::uint8_t> encode_stream(const TokenStream& s);
// CorruptStream on bad magic/version (checked before the payload), truncation
// or trailing bytes.
TokenStream decode_stream(const std::vector<std::uint8_t>& bytes);

void write_stream(const std::filesystem::path& path, const TokenStream& s);
TokenStream read_stream(const std::filesystem::path& path);

}  // namespace sdc
