// SPDX-License-Identifier: Apache-2.0
//
// Phase imb trains the identical-mapping branch to reproduce shadow images.
// Phase idb loads a phase-imb checkpoint, freezes that branch and trains the
// de-shadow branch and aggregation blocks on the final-iteration L1 loss.
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "deshadow/imaging/image.hpp"
#include "deshadow/train/checkpoint.hpp"
#include "deshadow/train/config.hpp"

namespace deshadow::train {

struct TrainHooks {
    std::function<void(const std::string&)> log;
    /// Called after every evaluation with the phase objective.
    std::function<void(const TraceRecord&, double objective)> on_eval;
};

struct TrainResult {
    Checkpoint checkpoint;
    double objective = 0.0;  // train-set objective at the last evaluation
    bool stopped_early = false;
};

TrainResult train_imb(const TrainConfig& cfg, const std::vector<imaging::Triplet>& data, const TrainHooks& hooks = {});
TrainResult train_idb(const TrainConfig& cfg, const std::vector<imaging::Triplet>& data, const Checkpoint& imb,
                      const TrainHooks& hooks = {});

/// Architectures agree on everything the identical-mapping branch depends on
/// (aggregation sites may differ).
bool imb_compatible(const arch::ArchSpec& a, const arch::ArchSpec& b);

}  // namespace deshadow::train
