// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "deshadow/imaging/image.hpp"
#include "deshadow/metrics/metrics.hpp"
#include "deshadow/model/branches.hpp"
#include "deshadow/train/checkpoint.hpp"

namespace deshadow::diag {

using RmseTrace = std::vector<train::TraceRecord>;

struct Interference {
    std::size_t count = 0;
    double ratio = 0.0;  // count / (trace length - 1)
};

/// Counts consecutive evaluation pairs where the shadow and non-shadow RMSE
/// move in strictly opposite directions. A change with |delta| <= epsilon has
/// sign 0 and never conflicts. Requires at least two records with strictly
/// increasing steps.
Interference mutual_interference(const RmseTrace& trace, double epsilon = 1e-6);

struct SweepRow {
    int k = 0;
    double rmse_shadow = 0.0;
    double rmse_nonshadow = 0.0;
};

/// Mean region RMSE (L*a*b*) over the dataset after each of k = 1..k_max
/// refinement passes. Images without pixels in a region are skipped for it.
std::vector<SweepRow> iteration_sweep(const model::DualBranchNet<float>& net,
                                      const std::vector<imaging::Triplet>& data, int k_max,
                                      metrics::LabConvention convention = metrics::LabConvention::rmse);

struct TrendCheck {
    int inversions = 0;
    double worst_increase = 0.0;  // largest relative increase between neighbours
    bool passed = false;
};

/// Passes when the series never increases, except for at most
/// `allowed_inversions` steps each rising by at most `max_relative`.
TrendCheck check_non_increasing(const std::vector<double>& values, int allowed_inversions, double max_relative);

std::string format_interference(const Interference& result, std::size_t trace_length, double epsilon);
std::string format_sweep(const std::vector<SweepRow>& rows);
/// Two-column "x y" plot data for each series, blank line between blocks.
std::string trace_plot_data(const RmseTrace& trace);
std::string sweep_plot_data(const std::vector<SweepRow>& rows);

}  // namespace deshadow::diag
