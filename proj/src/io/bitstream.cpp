#include "sdc/io/bitstream.hpp"

#include <fstream>
#include <iterator>
#include <string>

#include "sdc/error.hpp"

namespace sdc {
namespace {

template <typename U>
void put(std::vector<std::uint8_t>& out, U v) {
    for (std::size_t i = 0; i < sizeof(U); ++i) out.push_back(std::uint8_t(v >> (8 * i)));
}

class BitWriter {
public:
    explicit BitWriter(std::vector<std::uint8_t>& out) : out_(out) {}
    void write(std::uint32_t v, int width) {
        for (int b = width - 1; b >= 0; --b) {
            if (fill_ == 0) out_.push_back(0);
            out_.back() |= std::uint8_t(((v >> b) & 1u) << (7 - fill_));
            fill_ = (fill_ + 1) % 8;
        }
    }
    void align() { fill_ = 0; }

private:
    std::vector<std::uint8_t>& out_;
    int fill_ = 0;
};

class Reader {
public:
    explicit Reader(const std::vector<std::uint8_t>& b) : bytes_(b) {}

    template <typename U>
    U get(const char* what) {
        need(sizeof(U), what);
        U v = 0;
        for (std::size_t i = 0; i < sizeof(U); ++i) v |= U(U(bytes_[pos_ + i]) << (8 * i));
        pos_ += sizeof(U);
        return v;
    }
    std::uint32_t bits(int width) {
        std::uint32_t v = 0;
        for (int b = 0; b < width; ++b) {
            if (bit_ == 0) need(1, "payload");
            v = (v << 1) | ((bytes_[pos_] >> (7 - bit_)) & 1u);
            if (++bit_ == 8) {
                bit_ = 0;
                ++pos_;
            }
        }
        return v;
    }
    void align() {
        if (bit_ != 0) {
            bit_ = 0;
            ++pos_;
        }
    }
    bool done() const { return pos_ == bytes_.size(); }

private:
    void need(std::size_t n, const char* what) const {
        if (pos_ + n > bytes_.size())
            fail(ErrorKind::CorruptStream, std::string("token stream truncated in ") + what);
    }
    const std::vector<std::uint8_t>& bytes_;
    std::size_t pos_ = 0;
    int bit_ = 0;
};

void check_shape(const BranchTokens& b) {
    if (b.codebook_bits == 0 || b.codebook_bits > 31)
        fail(ErrorKind::InvalidToken, "codebook width must be 1..31 bits");
    if (b.tokens.size() != b.n_quantizers)
        fail(ErrorKind::InvalidToken, "expected " + std::to_string(b.n_quantizers) + " token rows, got " +
                                          std::to_string(b.tokens.size()));
    for (const auto& row : b.tokens) {
        if (row.size() != b.frame_count)
            fail(ErrorKind::InvalidToken, "token row has " + std::to_string(row.size()) + " frames, header says " +
                                              std::to_string(b.frame_count));
        for (int t : row)
            if (t < 0 || std::uint64_t(t) >= (std::uint64_t(1) << b.codebook_bits))
                fail(ErrorKind::InvalidToken, "token " + std::to_string(t) + " does not fit " +
                                                  std::to_string(b.codebook_bits) + " bits");
    }
}

}  // namespace

double TokenStream::bitrate(std::size_t n) const {
    if (n == 0 || n > branches.size()) n = branches.size();
    double bits_per_frame = 0;
    for (std::size_t i = 0; i < n; ++i) bits_per_frame += double(branches[i].n_quantizers) * branches[i].codebook_bits;
    return bits_per_frame * frame_rate;
}

std::vector<std::uint8_t> encode_stream(const TokenStream& s) {
    if (s.branches.empty() || s.branches.size() > 255)
        fail(ErrorKind::InvalidToken, "a token stream carries 1..255 branches");
    for (const auto& b : s.branches) check_shape(b);
    std::vector<std::uint8_t> out{'S', 'D', 'C', '1'};
    put<std::uint16_t>(out, TokenStream::kVersion);
    put<std::uint32_t>(out, s.frame_rate);
    put<std::uint8_t>(out, std::uint8_t(s.branches.size()));
    for (const auto& b : s.branches) {
        put<std::uint32_t>(out, b.sample_rate);
        put<std::uint8_t>(out, b.n_quantizers);
        put<std::uint8_t>(out, b.codebook_bits);
        put<std::uint32_t>(out, b.frame_count);
    }
    BitWriter w(out);
    for (const auto& b : s.branches) {
        for (const auto& row : b.tokens)
            for (int t : row) w.write(std::uint32_t(t), b.codebook_bits);
        w.align();
    }
    return out;
}

TokenStream decode_stream(const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() < 4 || bytes[0] != 'S' || bytes[1] != 'D' || bytes[2] != 'C' || bytes[3] != '1')
        fail(ErrorKind::CorruptStream, "not a token stream (bad magic)");
    Reader r(bytes);
    r.get<std::uint32_t>("magic");
    const auto version = r.get<std::uint16_t>("header");
    if (version != TokenStream::kVersion)
        fail(ErrorKind::CorruptStream, "unsupported token stream version " + std::to_string(version));
    TokenStream s;
    s.frame_rate = r.get<std::uint32_t>("header");
    const auto count = r.get<std::uint8_t>("header");
    if (count == 0) fail(ErrorKind::CorruptStream, "token stream declares no branches");
    for (std::uint8_t i = 0; i < count; ++i) {
        BranchTokens b;
        b.sample_rate = r.get<std::uint32_t>("header");
        b.n_quantizers = r.get<std::uint8_t>("header");
        b.codebook_bits = r.get<std::uint8_t>("header");
        b.frame_count = r.get<std::uint32_t>("header");
        if (b.codebook_bits == 0 || b.codebook_bits > 31)
            fail(ErrorKind::CorruptStream, "codebook width " + std::to_string(b.codebook_bits) + " out of range");
        const std::uint64_t payload = (b.payload_bits() + 7) / 8;
        if (payload > bytes.size()) fail(ErrorKind::CorruptStream, "declared payload exceeds stream size");
        s.branches.push_back(std::move(b));
    }
    for (auto& b : s.branches) {
        b.tokens.assign(b.n_quantizers, std::vector<int>(b.frame_count));
        for (auto& row : b.tokens)
            for (int& t : row) t = int(r.bits(b.codebook_bits));
        r.align();
    }
    if (!r.done()) fail(ErrorKind::CorruptStream, "trailing bytes after payload");
    return s;
}

void write_stream(const std::filesystem::path& path, const TokenStream& s) {
    const auto bytes = encode_stream(s);
    std::ofstream f(path, std::ios::binary);
    if (!f) fail(ErrorKind::IoError, "cannot write " + path.string());
    f.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
    if (!f) fail(ErrorKind::IoError, "write failed for " + path.string());
}

TokenStream read_stream(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) fail(ErrorKind::IoError, "cannot read " + path.string());
    std::vector<std::uint8_t> bytes{std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
    return decode_stream(bytes);
}

}  // namespace sdc
