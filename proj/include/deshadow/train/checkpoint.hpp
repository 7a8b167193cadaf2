// SPDX-License-Identifier: Apache-2.0
//
// Binary checkpoint container (all integers little-endian):
//   magic "DSHDCKPT", u32 version
//   u32 length + arch spec text, u32 length + metadata text ("key = value")
//   u32 parameter count, then per parameter:
//     u32 name length, name, u32 rank, rank x u32 extents, f32 values
//   u32 moment count, records as above named "m/<param>" and "v/<param>"
//   u32 trace length, per record: i64 step, f64 loss, f64 rmse_shadow, f64 rmse_nonshadow
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "deshadow/arch/arch.hpp"
#include "deshadow/model/branches.hpp"
#include "deshadow/nn/adam.hpp"
#include "deshadow/train/config.hpp"

namespace deshadow::train {

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct TraceRecord {
    std::int64_t step = 0;
    double loss = 0.0;
    double rmse_shadow = 0.0;
    double rmse_nonshadow = 0.0;

    bool operator==(const TraceRecord&) const = default;
};

struct NamedTensor {
    std::string name;
    nn::Tensor<float> value;
};

struct Checkpoint {
    arch::ArchSpec arch;
    Phase phase = Phase::imb;
    model::AggregationMode aggregation = model::AggregationMode::sab;
    std::uint64_t seed = 0;
    std::int64_t step = 0;
    std::int64_t adam_step = 0;
    std::string rng_state;
    std::vector<NamedTensor> params;
    std::map<std::string, nn::Adam<float>::Moments> moments;
    std::vector<TraceRecord> trace;
};

std::string encode_checkpoint(const Checkpoint& ckpt);
/// Throws DataError on a bad magic, an unsupported version, or truncation.
Checkpoint decode_checkpoint(const std::string& bytes);

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// FNV-1a over parameter names, shapes and values.
std::uint64_t params_digest(const Checkpoint& ckpt);
/// Same digest restricted to parameters whose names start with `prefix`.
std::uint64_t params_digest(const nn::ParameterStore<float>& params, const std::string& prefix = "");

/// Checkpoint of a network's parameters with empty optimizer state.
Checkpoint capture(const model::DualBranchNet<float>& net, Phase phase, std::uint64_t seed);

/// Copies parameters from a checkpoint into a network. With a prefix, only
/// names starting with it are copied; every copied name must exist in both.
void apply_params(const Checkpoint& ckpt, model::DualBranchNet<float>& net, const std::string& prefix = "");

/// Network built from the checkpoint's arch, mode and seed, holding its parameters.
model::DualBranchNet<float> build_network(const Checkpoint& ckpt);

/// Trace as tab-separated text with a header row.
std::string format_trace(const std::vector<TraceRecord>& trace);
std::vector<TraceRecord> parse_trace(const std::string& text);

}  // namespace deshadow::train
