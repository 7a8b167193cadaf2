// SPDX-License-Identifier: Apache-2.0
//
// Aggregation of identical-mapping features F (frozen branch) with de-shadow
// features F^ at one site of the de-shadow branch.
//
//   [W, W^] = sigmoid(gate_conv(F^))          gate_conv: C -> 2C, 3x3
//   M^      = mean over the 2C gate channels  (soft shadow mask, 1 channel)
//   F^'     = agg_conv(cat(F * W, F^ * W^, M^))  agg_conv: 2C+1 -> C, 3x3
//
// The first C gate channels weight F, the last C weight F^.
#pragma once

#include <string>

#include "deshadow/nn/autodiff.hpp"
#include "deshadow/nn/rng.hpp"

namespace deshadow::model {

enum class AggregationMode { sab, add, mul, concat, sab_no_softmask };

std::string to_string(AggregationMode mode);
/// Accepts "sab", "add", "mul", "concat", "sab_no_softmask".
AggregationMode parse_aggregation(const std::string& name);
/// True when the mode owns a gate conv and therefore emits a soft mask.
bool has_gate(AggregationMode mode);

template <class T>
struct SabParams {
    nn::Var<T> gate_weight, gate_bias;  // unset for add/mul/concat
    nn::Var<T> agg_weight, agg_bias;    // unset for add/mul
};

template <class T>
struct SabOutput {
    nn::Var<T> fused;      // C x H x W
    nn::Var<T> soft_mask;  // 1 x H x W, strictly inside (0, 1)
};

/// Full block with soft mask (mode sab), or without it (sab_no_softmask).
template <class T>
SabOutput<T> sab_forward(const nn::Var<T>& f_imb, const nn::Var<T>& f_idb, const SabParams<T>& params,
                         bool use_soft_mask = true);

/// Any aggregation mode. For gated modes the soft mask is returned as well;
/// otherwise `soft_mask` is left unset.
template <class T>
SabOutput<T> aggregate(const nn::Var<T>& f_imb, const nn::Var<T>& f_idb, AggregationMode mode,
                       const SabParams<T>& params);

/// Parameter names for the block at conv index `site`.
std::string sab_param_name(int site, const char* conv, const char* field);

/// Registers the parameters a mode needs at one site (biases zero).
template <class T>
void add_sab_params(nn::ParameterStore<T>& store, AggregationMode mode, int site, int channels, nn::Rng& rng);

template <class T>
SabParams<T> sab_params(const nn::ParameterStore<T>& store, AggregationMode mode, int site);

}  // namespace deshadow::model
