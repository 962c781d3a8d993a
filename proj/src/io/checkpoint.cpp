#include "sdc/io/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "sdc/error.hpp"

namespace sdc {
namespace {

template <typename U>
void put(std::vector<std::uint8_t>& out, U v) {
    for (std::size_t i = 0; i < sizeof(U); ++i) out.push_back(std::uint8_t(v >> (8 * i)));
}

class Reader {
public:
    explicit Reader(const std::vector<std::uint8_t>& b) : bytes_(b) {}

    template <typename U>
    U get() {
        need(sizeof(U));
        U v = 0;
        for (std::size_t i = 0; i < sizeof(U); ++i) v |= U(U(bytes_[pos_ + i]) << (8 * i));
        pos_ += sizeof(U);
        return v;
    }
    std::string text(std::size_t n) {
        need(n);
        std::string s(reinterpret_cast<const char*>(bytes_.data()) + pos_, n);
        pos_ += n;
        return s;
    }
    bool done() const { return pos_ == bytes_.size(); }

private:
    void need(std::size_t n) const {
        if (pos_ + n > bytes_.size()) fail(ErrorKind::CorruptStream, "checkpoint truncated");
    }
    const std::vector<std::uint8_t>& bytes_;
    std::size_t pos_ = 0;
};

}  // namespace

const StoredTensor* Checkpoint::find(const std::string& name) const {
    for (const auto& t : tensors)
        if (t.name == name) return &t;
    return nullptr;
}

void Checkpoint::add(const std::string& prefix, const ad::ParameterList<float>& params) {
    for (const auto& p : params.items())
        tensors.push_back({prefix + "." + p.name, p.tensor.shape(), {p.tensor.data().begin(), p.tensor.data().end()}});
}

void Checkpoint::load_into(const std::string& prefix, ad::ParameterList<float>& params) const {
    for (const auto& p : params.items()) {
        const std::string name = prefix + "." + p.name;
        const StoredTensor* t = find(name);
        if (!t) fail(ErrorKind::ConfigMismatch, "checkpoint lacks parameter " + name);
        if (t->shape != p.tensor.shape())
            fail(ErrorKind::ConfigMismatch, "parameter " + name + " stored as " + ad::to_string(t->shape) +
                                                ", model expects " + ad::to_string(p.tensor.shape()));
        auto dst = p.tensor;
        std::copy(t->data.begin(), t->data.end(), dst.mutable_data().begin());
    }
}

std::vector<std::uint8_t> serialize(const Checkpoint& ckpt) {
    std::vector<std::uint8_t> out{'S', 'D', 'C', 'K'};
    put<std::uint16_t>(out, Checkpoint::kVersion);
    std::string manifest;
    for (const auto& [k, v] : ckpt.manifest) manifest += k + "=" + v + "\n";
    put<std::uint32_t>(out, std::uint32_t(manifest.size()));
    out.insert(out.end(), manifest.begin(), manifest.end());
    put<std::uint32_t>(out, std::uint32_t(ckpt.tensors.size()));
    for (const auto& t : ckpt.tensors) {
        put<std::uint16_t>(out, std::uint16_t(t.name.size()));
        out.insert(out.end(), t.name.begin(), t.name.end());
        put<std::uint8_t>(out, std::uint8_t(t.shape.size()));
        for (auto d : t.shape) put<std::uint32_t>(out, std::uint32_t(d));
        for (float f : t.data) put<std::uint32_t>(out, std::bit_cast<std::uint32_t>(f));
    }
    return out;
}

Checkpoint deserialize_checkpoint(const std::vector<std::uint8_t>& bytes) {
    Reader r(bytes);
    if (r.text(4) != "SDCK") fail(ErrorKind::CorruptStream, "not a checkpoint (bad magic)");
    const auto version = r.get<std::uint16_t>();
    if (version != Checkpoint::kVersion)
        fail(ErrorKind::CorruptStream, "unsupported checkpoint version " + std::to_string(version));
    Checkpoint ckpt;
    std::istringstream manifest(r.text(r.get<std::uint32_t>()));
    for (std::string line; std::getline(manifest, line);) {
        const auto eq = line.find('=');
        if (eq == std::string::npos) fail(ErrorKind::CorruptStream, "bad manifest line: " + line);
        ckpt.manifest[line.substr(0, eq)] = line.substr(eq + 1);
    }
    const auto count = r.get<std::uint32_t>();
    for (std::uint32_t i = 0; i < count; ++i) {
        StoredTensor t;
        t.name = r.text(r.get<std::uint16_t>());
        const auto rank = r.get<std::uint8_t>();
        std::size_t n = 1;
        for (int d = 0; d < rank; ++d) {
            t.shape.push_back(r.get<std::uint32_t>());
            n *= t.shape.back();
        }
        t.data.resize(n);
        for (auto& f : t.data) f = std::bit_cast<float>(r.get<std::uint32_t>());
        ckpt.tensors.push_back(std::move(t));
    }
    if (!r.done()) fail(ErrorKind::CorruptStream, "trailing bytes after checkpoint");
    return ckpt;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
    const auto bytes = serialize(ckpt);
    std::ofstream f(path, std::ios::binary);
    if (!f) fail(ErrorKind::IoError, "cannot write " + path.string());
    f.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
    if (!f) fail(ErrorKind::IoError, "write failed for " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) fail(ErrorKind::IoError, "cannot open " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    return deserialize_checkpoint(bytes);
}

}  // namespace sdc
