#include "sdc/ad/optim.hpp"

#include <cmath>

namespace sdc::ad {

template <typename T>
Adam<T>::Adam(ParameterList<T> params, AdamConfig cfg) : params_(std::move(params)), cfg_(cfg) {
    for (const auto& p : params_.items()) {
        m_.emplace_back(p.tensor.numel(), 0.0);
        v_.emplace_back(p.tensor.numel(), 0.0);
    }
}

template <typename T>
void Adam<T>::step() {
    ++steps_;
    const double c1 = 1.0 - std::pow(cfg_.beta1, double(steps_));
    const double c2 = 1.0 - std::pow(cfg_.beta2, double(steps_));
    for (std::size_t i = 0; i < params_.size(); ++i) {
        auto t = params_.items()[i].tensor;
        if (!t.requires_grad() || !t.has_grad()) continue;
        auto value = t.mutable_data();
        const auto grad = t.grad();
        auto& m = m_[i];
        auto& v = v_[i];
        for (std::size_t j = 0; j < value.size(); ++j) {
            const double g = grad[j];
            m[j] = cfg_.beta1 * m[j] + (1.0 - cfg_.beta1) * g;
            v[j] = cfg_.beta2 * v[j] + (1.0 - cfg_.beta2) * g * g;
            const double update = cfg_.lr * (m[j] / c1) / (std::sqrt(v[j] / c2) + cfg_.eps);
            if (update != 0.0) value[j] = T(double(value[j]) - update);
        }
    }
}

template class Adam<float>;
template class Adam<double>;

}  // namespace sdc::ad
