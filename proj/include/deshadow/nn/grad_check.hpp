// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "deshadow/nn/autodiff.hpp"

namespace deshadow::nn {

struct GradCheckOptions {
    double step = 1e-5;        // central-difference half width
    double tolerance = 1e-4;   // max accepted relative error
    double abs_floor = 1e-6;   // denominator floor for near-zero gradients
    std::size_t max_entries_per_input = 0;  // 0 checks every element
    /// When non-zero, probes this many random +-1 directions per input
    /// instead of single elements: the analytic side is grad . d and the
    /// numeric side differentiates along d. Suited to deep graphs whose
    /// per-element gradients sink below the finite-difference noise floor.
    std::size_t directions_per_input = 0;
    /// Directional mode only: a direction whose two stencil points fall on
    /// different linear pieces (see BranchRecorder) straddles a kink, where
    /// the finite difference is not a derivative estimate. Such directions
    /// are redrawn, up to this many times each.
    std::size_t max_redraws = 0;
    std::uint64_t seed = 0;    // picks the entries or directions
};

struct GradCheckInput {
    std::string name;
    Var<double> var;  // grad-requiring leaf
};

struct GradCheckEntry {
    std::string name;
    std::size_t checked = 0;  // elements or directions
    double max_rel_error = 0.0;
    double max_abs_error = 0.0;
    std::size_t redrawn = 0;  // directions rejected for straddling a kink
};

struct GradCheckReport {
    std::vector<GradCheckEntry> entries;
    double max_rel_error = 0.0;
    double tolerance = 0.0;
    bool passed() const noexcept { return max_rel_error <= tolerance; }
};

/// Compares reverse-mode gradients of `forward()` (a scalar-valued graph
/// rebuilt from the current leaf values on every call) with central finite
/// differences. Relative error is |a - n| / max(|a|, |n|, abs_floor).
GradCheckReport grad_check(const std::function<Var<double>()>& forward, const std::vector<GradCheckInput>& inputs,
                           const GradCheckOptions& options = {});

}  // namespace deshadow::nn
