// SPDX-License-Identifier: Apache-2.0
//
// The two-branch shadow removal network. The identical-mapping branch (IMB)
// reconstructs its input and exposes features at the aggregation sites; the
// de-shadow branch (IDB) consumes cat(image, mask), fuses IMB features at
// each site, and is applied K times, feeding its clamped output back in.
#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <vector>

#include "deshadow/arch/arch.hpp"
#include "deshadow/model/sab.hpp"
#include "deshadow/nn/autodiff.hpp"

namespace deshadow::model {

/// IMB activations (post-ReLU) keyed by conv index. For the default site set
/// these are F_1, F_3 and F_{L-1}.
template <class T>
struct ImbTaps {
    std::map<int, nn::Var<T>> at;
};

template <class T>
struct ImbResult {
    nn::Var<T> reconstruction;  // 3 x S x S, unclamped
    ImbTaps<T> taps;
};

template <class T>
struct IdbPass {
    nn::Var<T> output;                   // 3 x S x S, unclamped
    std::vector<nn::Var<T>> soft_masks;  // one per site, ascending site order (gated modes only)
};

template <class T>
struct IterTrace {
    std::vector<IdbPass<T>> passes;  // passes[t] is iteration t + 1
    const nn::Var<T>& final_output() const { return passes.back().output; }
};

/// Name prefix of every identical-mapping parameter.
inline constexpr const char* kImbPrefix = "imb.";

template <class T>
class DualBranchNet {
public:
    DualBranchNet(arch::ArchSpec spec, AggregationMode mode, std::uint64_t seed);

    const arch::ArchSpec& spec() const noexcept { return spec_; }
    AggregationMode mode() const noexcept { return mode_; }
    const arch::LayerPlan& plan(arch::Branch b) const { return b == arch::Branch::imb ? imb_plan_ : idb_plan_; }
    const std::vector<int>& sites() const noexcept { return sites_; }

    nn::ParameterStore<T>& params() noexcept { return params_; }
    const nn::ParameterStore<T>& params() const noexcept { return params_; }

    void set_imb_frozen(bool frozen) { params_.set_frozen_prefix(kImbPrefix, frozen); }

    /// Called with the output shape of every planned layer as forward passes run.
    using LayerObserver = std::function<void(arch::Branch, std::size_t layer_index, const nn::Shape&)>;
    void set_layer_observer(LayerObserver observer) { observer_ = std::move(observer); }

    /// image: 3 x S x S.
    ImbResult<T> imb_forward(const nn::Tensor<T>& image) const;

    /// image: 3 x S x S (may carry history from a previous iteration),
    /// mask: 1 x S x S binary.
    IdbPass<T> idb_forward_once(const nn::Var<T>& image, const nn::Tensor<T>& mask, const ImbTaps<T>& taps) const;

    /// K refinement passes. Pass t > 1 consumes clamp(output of pass t-1) with
    /// the same mask and the same taps. With `truncate` the fed-back image is
    /// detached so gradients only flow through the last pass.
    IterTrace<T> idb_iterate(const nn::Tensor<T>& image, const nn::Tensor<T>& mask, const ImbTaps<T>& taps, int k,
                             bool truncate = false) const;

private:
    nn::Var<T> run_layer(arch::Branch branch, const arch::LayerDesc& layer, nn::Var<T> x) const;
    nn::Var<T> param(const std::string& name) const { return params_.get(name).var(); }
    void require_image(const nn::Shape& shape, int channels, const char* what) const;

    arch::ArchSpec spec_;
    AggregationMode mode_;
    arch::LayerPlan imb_plan_;
    arch::LayerPlan idb_plan_;
    std::vector<int> sites_;
    nn::ParameterStore<T> params_;
    LayerObserver observer_;
};

extern template class DualBranchNet<float>;
extern template class DualBranchNet<double>;

/// Converts between interleaved H x W x 3 pixel buffers and C x H x W tensors.
template <class T>
nn::Tensor<T> to_chw(const std::vector<double>& hwc, int height, int width, int channels);
template <class T>
std::vector<double> to_hwc(const nn::Tensor<T>& chw, bool clamp01);

}  // namespace deshadow::model
