// SPDX-License-Identifier: Apache-2.0
#include "deshadow/model/sab.hpp"

#include <cstdio>

#include "deshadow/arch/arch.hpp"
#include "deshadow/error.hpp"
#include "deshadow/nn/ops.hpp"

namespace deshadow::model {

std::string to_string(AggregationMode mode) {
    switch (mode) {
        case AggregationMode::sab: return "sab";
        case AggregationMode::add: return "add";
        case AggregationMode::mul: return "mul";
        case AggregationMode::concat: return "concat";
        case AggregationMode::sab_no_softmask: return "sab_no_softmask";
    }
    return "?";
}

AggregationMode parse_aggregation(const std::string& name) {
    for (auto m : {AggregationMode::sab, AggregationMode::add, AggregationMode::mul, AggregationMode::concat,
                   AggregationMode::sab_no_softmask})
        if (to_string(m) == name) return m;
    throw ContractViolation("unknown aggregation mode '" + name + "' (expected sab|add|mul|concat|sab_no_softmask)");
}

bool has_gate(AggregationMode mode) { return mode == AggregationMode::sab || mode == AggregationMode::sab_no_softmask; }

std::string sab_param_name(int site, const char* conv, const char* field) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "sab.site%02d.%s.%s", site, conv, field);
    return buf;
}

template <class T>
SabOutput<T> sab_forward(const nn::Var<T>& f_imb, const nn::Var<T>& f_idb, const SabParams<T>& params,
                         bool use_soft_mask) {
    nn::require_same_shape(f_imb.shape(), f_idb.shape(), "sab_forward");
    if (!params.gate_weight.defined() || !params.agg_weight.defined())
        throw ContractViolation("sab_forward: missing gate or aggregation parameters");
    const int c = f_idb.shape()[0];
    const auto weights = nn::sigmoid(nn::conv2d(f_idb, params.gate_weight, params.gate_bias, 1, 1));
    const auto w_imb = nn::slice_channels(weights, 0, c);
    const auto w_idb = nn::slice_channels(weights, c, c);
    SabOutput<T> out;
    out.soft_mask = nn::channel_mean(weights);
    std::vector<nn::Var<T>> parts{nn::mul(f_imb, w_imb), nn::mul(f_idb, w_idb)};
    if (use_soft_mask) parts.push_back(out.soft_mask);
    out.fused = nn::conv2d(nn::concat_channels(parts), params.agg_weight, params.agg_bias, 1, 1);
    return out;
}

template <class T>
SabOutput<T> aggregate(const nn::Var<T>& f_imb, const nn::Var<T>& f_idb, AggregationMode mode,
                       const SabParams<T>& params) {
    nn::require_same_shape(f_imb.shape(), f_idb.shape(), "aggregate");
    switch (mode) {
        case AggregationMode::sab: return sab_forward(f_imb, f_idb, params, true);
        case AggregationMode::sab_no_softmask: return sab_forward(f_imb, f_idb, params, false);
        case AggregationMode::add: return {nn::add(f_imb, f_idb), {}};
        case AggregationMode::mul: return {nn::mul(f_imb, f_idb), {}};
        case AggregationMode::concat:
            return {nn::conv2d(nn::concat_channels<T>({f_imb, f_idb}), params.agg_weight, params.agg_bias, 1, 1), {}};
    }
    throw ContractViolation("aggregate: unknown mode");
}

template <class T>
void add_sab_params(nn::ParameterStore<T>& store, AggregationMode mode, int site, int channels, nn::Rng& rng) {
    const int c = channels;
    if (has_gate(mode))
        arch::init_conv(store, sab_param_name(site, "gate", "weight"), sab_param_name(site, "gate", "bias"),
                        {2 * c, c, 3, 3}, c * 9, 2 * c, rng);
    if (mode == AggregationMode::add || mode == AggregationMode::mul) return;
    const int agg_in = mode == AggregationMode::sab ? 2 * c + 1 : 2 * c;
    arch::init_conv(store, sab_param_name(site, "agg", "weight"), sab_param_name(site, "agg", "bias"),
                    {c, agg_in, 3, 3}, agg_in * 9, c, rng);
}

template <class T>
SabParams<T> sab_params(const nn::ParameterStore<T>& store, AggregationMode mode, int site) {
    SabParams<T> p;
    if (has_gate(mode)) {
        p.gate_weight = store.get(sab_param_name(site, "gate", "weight")).var();
        p.gate_bias = store.get(sab_param_name(site, "gate", "bias")).var();
    }
    if (mode != AggregationMode::add && mode != AggregationMode::mul) {
        p.agg_weight = store.get(sab_param_name(site, "agg", "weight")).var();
        p.agg_bias = store.get(sab_param_name(site, "agg", "bias")).var();
    }
    return p;
}

#define DESHADOW_INSTANTIATE_SAB(T)                                                                              \
    template SabOutput<T> sab_forward(const nn::Var<T>&, const nn::Var<T>&, const SabParams<T>&, bool);           \
    template SabOutput<T> aggregate(const nn::Var<T>&, const nn::Var<T>&, AggregationMode, const SabParams<T>&); \
    template void add_sab_params(nn::ParameterStore<T>&, AggregationMode, int, int, nn::Rng&);                  \
    template SabParams<T> sab_params(const nn::ParameterStore<T>&, AggregationMode, int);

DESHADOW_INSTANTIATE_SAB(float)
DESHADOW_INSTANTIATE_SAB(double)

}  // namespace deshadow::model
