// SPDX-License-Identifier: Apache-2.0
#include "deshadow/model/branches.hpp"

#include <algorithm>

#include "deshadow/error.hpp"
#include "deshadow/nn/ops.hpp"

namespace deshadow::model {

using arch::Branch;
using arch::LayerKind;

template <class T>
DualBranchNet<T>::DualBranchNet(arch::ArchSpec spec, AggregationMode mode, std::uint64_t seed)
    : spec_(std::move(spec)), mode_(mode) {
    spec_.validate();
    imb_plan_ = arch::build_plan(spec_, Branch::imb);
    idb_plan_ = arch::build_plan(spec_, Branch::idb);
    sites_ = spec_.resolved_sites();

    arch::init_params(imb_plan_, seed, params_);
    // Reconstruction head of the identical-mapping branch, mirroring the
    // de-shadow branch's output conv.
    nn::Rng head_rng(arch::derive_seed(seed, "imb.head"));
    const int c = spec_.channels();
    arch::init_conv(params_, "imb.head.weight", "imb.head.bias", {3, c, 7, 7}, c * 49, 3, head_rng);

    arch::init_params(idb_plan_, seed, params_);
    nn::Rng sab_rng(arch::derive_seed(seed, "sab"));
    for (int site : sites_) {
        const auto& layer = idb_plan_.layers[static_cast<std::size_t>(idb_plan_.layer_ending_at(site))];
        add_sab_params(params_, mode_, site, layer.out_ch, sab_rng);
    }
}

template <class T>
void DualBranchNet<T>::require_image(const nn::Shape& shape, int channels, const char* what) const {
    const nn::Shape expected{channels, spec_.input_size, spec_.input_size};
    if (shape != expected)
        throw ContractViolation(std::string(what) + ": expected " + nn::shape_str(expected) + ", got " +
                                nn::shape_str(shape));
}

template <class T>
nn::Var<T> DualBranchNet<T>::run_layer(Branch branch, const arch::LayerDesc& layer, nn::Var<T> x) const {
    auto w = [&](int l) { return param(arch::conv_param_name(branch, l, "weight")); };
    auto b = [&](int l) { return param(arch::conv_param_name(branch, l, "bias")); };
    const int l = layer.first_conv;
    switch (layer.kind) {
        case LayerKind::conv: {
            auto y = nn::conv2d(x, w(l), b(l), layer.stride, layer.pad);
            return layer.relu ? nn::relu(y) : y;
        }
        case LayerKind::convtran: {
            auto y = nn::conv_transpose2d(x, w(l), b(l), layer.stride, layer.pad);
            return layer.relu ? nn::relu(y) : y;
        }
        case LayerKind::resnet: {
            auto h = nn::relu(nn::conv2d(x, w(l), b(l), layer.stride, layer.pad));
            auto y = nn::conv2d(h, w(l + 1), b(l + 1), layer.stride, layer.pad);
            return nn::relu(nn::add(y, x));
        }
    }
    throw ContractViolation("run_layer: unknown layer kind");
}

template <class T>
ImbResult<T> DualBranchNet<T>::imb_forward(const nn::Tensor<T>& image) const {
    require_image(image.shape(), 3, "imb_forward");
    ImbResult<T> out;
    nn::Var<T> x(image);
    for (std::size_t i = 0; i < imb_plan_.layers.size(); ++i) {
        const auto& layer = imb_plan_.layers[i];
        x = run_layer(Branch::imb, layer, x);
        if (observer_) observer_(Branch::imb, i, x.shape());
        if (std::binary_search(sites_.begin(), sites_.end(), layer.last_conv)) out.taps.at[layer.last_conv] = x;
    }
    out.reconstruction = nn::conv2d(x, param("imb.head.weight"), param("imb.head.bias"), 1, 3);
    return out;
}

template <class T>
IdbPass<T> DualBranchNet<T>::idb_forward_once(const nn::Var<T>& image, const nn::Tensor<T>& mask,
                                              const ImbTaps<T>& taps) const {
    require_image(image.shape(), 3, "idb_forward_once image");
    require_image(mask.shape(), 1, "idb_forward_once mask");
    IdbPass<T> out;
    nn::Var<T> x = nn::concat_channels<T>({image, nn::Var<T>(mask)});
    for (std::size_t i = 0; i < idb_plan_.layers.size(); ++i) {
        const auto& layer = idb_plan_.layers[i];
        x = run_layer(Branch::idb, layer, x);
        if (observer_) observer_(Branch::idb, i, x.shape());
        const int site = layer.last_conv;
        if (!std::binary_search(sites_.begin(), sites_.end(), site)) continue;
        const auto tap = taps.at.find(site);
        if (tap == taps.at.end()) throw ContractViolation("idb_forward_once: no IMB tap for site " + std::to_string(site));
        if (tap->second.shape() != x.shape())
            throw ContractViolation("idb_forward_once: tap shape " + nn::shape_str(tap->second.shape()) +
                                    " does not match feature shape " + nn::shape_str(x.shape()) + " at site " +
                                    std::to_string(site));
        auto agg = aggregate(tap->second, x, mode_, sab_params(params_, mode_, site));
        x = agg.fused;
        if (agg.soft_mask.defined()) out.soft_masks.push_back(agg.soft_mask);
    }
    out.output = x;
    return out;
}

template <class T>
IterTrace<T> DualBranchNet<T>::idb_iterate(const nn::Tensor<T>& image, const nn::Tensor<T>& mask,
                                           const ImbTaps<T>& taps, int k, bool truncate) const {
    if (k < 1) throw ContractViolation("idb_iterate: iteration count must be >= 1, got " + std::to_string(k));
    std::map<int, std::uint64_t> tap_digest;
    for (const auto& [site, v] : taps.at) tap_digest[site] = nn::digest(v.value());

    IterTrace<T> trace;
    nn::Var<T> input(image);
    for (int t = 0; t < k; ++t) {
        trace.passes.push_back(idb_forward_once(input, mask, taps));
        for (const auto& [site, v] : taps.at)
            if (nn::digest(v.value()) != tap_digest[site])
                throw ContractViolation("idb_iterate: IMB features changed between iterations at site " +
                                        std::to_string(site));
        if (t + 1 < k) {
            input = nn::clamp01(trace.passes.back().output);
            if (truncate) input = nn::detach(input);
        }
    }
    return trace;
}

template <class T>
nn::Tensor<T> to_chw(const std::vector<double>& hwc, int height, int width, int channels) {
    if (hwc.size() != static_cast<std::size_t>(height) * width * channels)
        throw ContractViolation("to_chw: buffer length does not match extents");
    nn::Tensor<T> t({channels, height, width});
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x)
            for (int c = 0; c < channels; ++c)
                t.at(c, y, x) = static_cast<T>(hwc[(static_cast<std::size_t>(y) * width + x) * channels + c]);
    return t;
}

template <class T>
std::vector<double> to_hwc(const nn::Tensor<T>& chw, bool clamp01) {
    const int channels = chw.dim(0), height = chw.dim(1), width = chw.dim(2);
    std::vector<double> out(chw.size());
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x)
            for (int c = 0; c < channels; ++c) {
                double v = static_cast<double>(chw.at(c, y, x));
                if (clamp01) v = std::clamp(v, 0.0, 1.0);
                out[(static_cast<std::size_t>(y) * width + x) * channels + c] = v;
            }
    return out;
}

template class DualBranchNet<float>;
template class DualBranchNet<double>;
template nn::Tensor<float> to_chw(const std::vector<double>&, int, int, int);
template nn::Tensor<double> to_chw(const std::vector<double>&, int, int, int);
template std::vector<double> to_hwc(const nn::Tensor<float>&, bool);
template std::vector<double> to_hwc(const nn::Tensor<double>&, bool);

}  // namespace deshadow::model
