#include "sdc/ad/param.hpp"

#include <cmath>

#include "sdc/error.hpp"

namespace sdc::ad {

template <typename T>
void ParameterList<T>::add(std::string name, Tensor<T> tensor) {
    for (const auto& p : items_)
        if (p.name == name) fail(ErrorKind::InvalidConfig, "duplicate parameter name " + name);
    items_.push_back({std::move(name), std::move(tensor)});
}

template <typename T>
void ParameterList<T>::extend(const std::string& prefix, const ParameterList& other) {
    for (const auto& p : other.items_) add(prefix + "." + p.name, p.tensor);
}

template <typename T>
std::size_t ParameterList<T>::numel() const {
    std::size_t n = 0;
    for (const auto& p : items_) n += p.tensor.numel();
    return n;
}

template <typename T>
const Tensor<T>* ParameterList<T>::find(const std::string& name) const {
    for (const auto& p : items_)
        if (p.name == name) return &p.tensor;
    return nullptr;
}

template <typename T>
void ParameterList<T>::set_requires_grad(bool on) {
    for (auto& p : items_) p.tensor.set_requires_grad(on);
}

template <typename T>
void ParameterList<T>::zero_grad() {
    for (auto& p : items_) p.tensor.zero_grad();
}

template <typename T>
std::vector<T> ParameterList<T>::snapshot() const {
    std::vector<T> out;
    out.reserve(numel());
    for (const auto& p : items_) out.insert(out.end(), p.tensor.data().begin(), p.tensor.data().end());
    return out;
}

template <typename T>
void kaiming_uniform(Tensor<T>& t, std::size_t fan_in, std::mt19937_64& rng) {
    const double bound = std::sqrt(3.0 / double(std::max<std::size_t>(fan_in, 1)));
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (auto& v : t.mutable_data()) v = T(dist(rng));
}

template <typename Dst, typename Src>
void copy_values(const ParameterList<Src>& src, ParameterList<Dst>& dst) {
    if (src.size() != dst.size()) fail(ErrorKind::ShapeMismatch, "parameter lists differ in length");
    for (std::size_t i = 0; i < src.size(); ++i) {
        const auto& s = src.items()[i];
        auto d = dst.items()[i].tensor;
        if (s.name != dst.items()[i].name || s.tensor.shape() != d.shape())
            fail(ErrorKind::ShapeMismatch, "parameter " + s.name + " does not match " + dst.items()[i].name);
        auto out = d.mutable_data();
        for (std::size_t j = 0; j < out.size(); ++j) out[j] = Dst(s.tensor.data()[j]);
    }
}

template class ParameterList<float>;
template class ParameterList<double>;
template void kaiming_uniform(Tensor<float>&, std::size_t, std::mt19937_64&);
template void kaiming_uniform(Tensor<double>&, std::size_t, std::mt19937_64&);
template void copy_values(const ParameterList<float>&, ParameterList<float>&);
template void copy_values(const ParameterList<float>&, ParameterList<double>&);
template void copy_values(const ParameterList<double>&, ParameterList<float>&);
template void copy_values(const ParameterList<double>&, ParameterList<double>&);

}  // namespace sdc::ad
