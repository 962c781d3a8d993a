#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "sdc/ad/tensor.hpp"

namespace sdc::ad {

template <typename T>
struct NamedParameter {
    std::string name;
    Tensor<T> tensor;
};

// Ordered list of trainable leaves. Names are dotted paths ("encoder.block0.conv.weight").
template <typename T>
class ParameterList {
public:
    void add(std::string name, Tensor<T> tensor);
    void extend(const std::string& prefix, const ParameterList& other);

    const std::vector<NamedParameter<T>>& items() const { return items_; }
    std::size_t size() const { return items_.size(); }
    std::size_t numel() const;

    // nullptr when absent.
    const Tensor<T>* find(const std::string& name) const;

    void set_requires_grad(bool on);
    void zero_grad();

    // Flat copy of every value, in list order.
    std::vector<T> snapshot() const;

private:
    std::vector<NamedParameter<T>> items_;
};

// Uniform in [-sqrt(3 / fan_in), sqrt(3 / fan_in)] (unit-variance gain).
template <typename T>
void kaiming_uniform(Tensor<T>& t, std::size_t fan_in, std::mt19937_64& rng);

// Copies values across precisions with identical names and shapes.
template <typename Dst, typename Src>
void copy_values(const ParameterList<Src>& src, ParameterList<Dst>& dst);

extern template class ParameterList<float>;
extern template class ParameterList<double>;

}  // namespace sdc::ad
