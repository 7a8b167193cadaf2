// SPDX-License-Identifier: Apache-2.0
#include "deshadow/nn/adam.hpp"

#include <cmath>

namespace deshadow::nn {

template <class T>
void Adam<T>::step(ParameterStore<T>& params, double learning_rate) {
    // Validate everything before touching any state.
    for (auto& p : params.items()) {
        if (p->frozen()) continue;
        if (p->grad().empty()) throw ContractViolation("adam_step: parameter '" + p->name() + "' has no gradient");
    }

    ++step_;
    const double t = static_cast<double>(step_);
    const double correction1 = 1.0 - std::pow(config_.beta1, t);
    const double correction2 = 1.0 - std::pow(config_.beta2, t);
    const T b1 = static_cast<T>(config_.beta1);
    const T b2 = static_cast<T>(config_.beta2);
    const T lr = static_cast<T>(learning_rate);
    const T c1 = static_cast<T>(correction1);
    const T c2 = static_cast<T>(correction2);
    const T eps = static_cast<T>(config_.epsilon);

    for (auto& p : params.items()) {
        if (p->frozen()) {
            if (!p->grad().empty()) p->mutable_grad() = Tensor<T>();
            continue;
        }
        auto [it, inserted] = moments_.try_emplace(p->name());
        Moments& mom = it->second;
        if (inserted) {
            mom.m = Tensor<T>(p->value().shape());
            mom.v = Tensor<T>(p->value().shape());
        }
        require_same_shape(mom.m.shape(), p->value().shape(), "adam_step");
        T* w = p->mutable_value().ptr();
        const T* g = p->grad().ptr();
        T* m = mom.m.ptr();
        T* v = mom.v.ptr();
        for (std::size_t i = 0, n = p->value().size(); i < n; ++i) {
            m[i] = b1 * m[i] + (T{1} - b1) * g[i];
            v[i] = b2 * v[i] + (T{1} - b2) * g[i] * g[i];
            const T m_hat = m[i] / c1;
            const T v_hat = v[i] / c2;
            w[i] -= lr * m_hat / (std::sqrt(v_hat) + eps);
        }
    }
}

template <class T>
void Adam<T>::restore(std::int64_t step, std::map<std::string, Moments> moments) {
    step_ = step;
    moments_ = std::move(moments);
}

template class Adam<float>;
template class Adam<double>;

}  // namespace deshadow::nn
