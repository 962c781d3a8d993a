#pragma once

#include <cstdint>
#include <vector>

#include "sdc/ad/param.hpp"

namespace sdc::ad {

struct AdamConfig {
    double lr = 1e-4;
    double beta1 = 0.8;
    double beta2 = 0.99;
    double eps = 1e-8;
};

// Adaptive-moment optimiser. Only parameters with requires_grad set are
// touched, so frozen parameters keep their exact bits.
template <typename T>
class Adam {
public:
    Adam(ParameterList<T> params, AdamConfig cfg = {});

    void step();
    void zero_grad() { params_.zero_grad(); }

    std::int64_t step_count() const { return steps_; }
    const AdamConfig& config() const { return cfg_; }
    const ParameterList<T>& parameters() const { return params_; }

private:
    ParameterList<T> params_;
    AdamConfig cfg_;
    std::int64_t steps_ = 0;
    std::vector<std::vector<double>> m_;
    std::vector<std::vector<double>> v_;
};

extern template class Adam<float>;
extern template class Adam<double>;

}  // namespace sdc::ad
