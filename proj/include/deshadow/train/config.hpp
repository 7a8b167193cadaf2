// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>

#include "deshadow/arch/arch.hpp"
#include "deshadow/imaging/dataset.hpp"
#include "deshadow/model/sab.hpp"

namespace deshadow::train {

enum class Phase { imb, idb };

std::string to_string(Phase p);
Phase parse_phase(const std::string& text);

struct TrainConfig {
    Phase phase = Phase::imb;
    int iterations = 20000;
    int batch_size = 8;
    double learning_rate = 5e-5;
    int eval_interval = 1000;
    int k_iterations = 4;
    std::uint64_t seed = 0;
    arch::ArchSpec arch = arch::ArchSpec::desk();
    model::AggregationMode aggregation = model::AggregationMode::sab;
    std::string data_root;
    imaging::Layout layout = imaging::Layout::istd;
    std::string imb_checkpoint;  // phase idb only
    std::string output;          // checkpoint path; empty keeps it in memory
    int checkpoint_interval = 0; // 0 writes only the final checkpoint
    bool truncate_bptt = false;
    /// Stop at the first evaluation whose train-set objective is below this
    /// value (reconstruction L1 for imb, shadow-region L1 for idb). 0 disables.
    double stop_below = 0.0;

    /// Throws ContractViolation naming the first invalid field.
    void validate() const;
};

/// "key = value" lines, one per field, keys matching the command-line flags.
std::string serialize(const TrainConfig& cfg);

}  // namespace deshadow::train
