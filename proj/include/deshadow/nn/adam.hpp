// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "deshadow/nn/autodiff.hpp"

namespace deshadow::nn {

struct AdamConfig {
    double learning_rate = 5e-5;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

/// Adam with bias correction. Moments are keyed by parameter name so the
/// state survives a checkpoint round trip independently of object identity.
template <class T>
class Adam {
public:
    struct Moments {
        Tensor<T> m;
        Tensor<T> v;
    };

    explicit Adam(AdamConfig config = {}) : config_(config) {}

    /// One update of every non-frozen parameter. Frozen parameters are left
    /// untouched and their gradients are cleared.
    void step(ParameterStore<T>& params) { step(params, config_.learning_rate); }
    void step(ParameterStore<T>& params, double learning_rate);

    std::int64_t steps() const noexcept { return step_; }
    const AdamConfig& config() const noexcept { return config_; }
    const std::map<std::string, Moments>& moments() const noexcept { return moments_; }

    /// Reinstates persisted state.
    void restore(std::int64_t step, std::map<std::string, Moments> moments);

private:
    AdamConfig config_;
    std::int64_t step_ = 0;
    std::map<std::string, Moments> moments_;
};

extern template class Adam<float>;
extern template class Adam<double>;

}  // namespace deshadow::nn
