// SPDX-License-Identifier: Apache-2.0
#include "deshadow/diag/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "deshadow/error.hpp"
#include "deshadow/imaging/ops.hpp"
#include "deshadow/train/inference.hpp"

namespace deshadow::diag {

namespace {

int sign(double delta, double epsilon) {
    if (std::abs(delta) <= epsilon) return 0;
    return delta > 0 ? 1 : -1;
}

}  // namespace

Interference mutual_interference(const RmseTrace& trace, double epsilon) {
    if (trace.size() < 2) throw DataError("mutual_interference: trace needs at least two records");
    if (!(epsilon >= 0.0)) throw ContractViolation("mutual_interference: epsilon must be non-negative");
    Interference out;
    for (std::size_t i = 1; i < trace.size(); ++i) {
        if (trace[i].step <= trace[i - 1].step)
            throw DataError("mutual_interference: trace steps are not strictly increasing at record " +
                            std::to_string(i));
        const int s = sign(trace[i].rmse_shadow - trace[i - 1].rmse_shadow, epsilon);
        const int n = sign(trace[i].rmse_nonshadow - trace[i - 1].rmse_nonshadow, epsilon);
        if (s * n < 0) ++out.count;
    }
    out.ratio = static_cast<double>(out.count) / static_cast<double>(trace.size() - 1);
    return out;
}

std::vector<SweepRow> iteration_sweep(const model::DualBranchNet<float>& net, const std::vector<imaging::Triplet>& data,
                                      int k_max, metrics::LabConvention convention) {
    if (k_max < 1) throw ContractViolation("iteration_sweep: k_max must be at least 1");
    if (data.empty()) throw DataError("iteration_sweep: dataset is empty");
    std::vector<double> shadow(static_cast<std::size_t>(k_max)), nonshadow(static_cast<std::size_t>(k_max));
    int n_shadow = 0, n_nonshadow = 0;
    for (const auto& t : data) {
        // Pass t of a k_max-pass run is exactly the output of a t-pass run.
        const auto r = train::restore(net, t.shadow, t.mask, k_max);
        const imaging::ShadowMask mask = imaging::binarize(t.mask);
        const imaging::ShadowMask inv = imaging::invert(mask);
        const bool has_shadow = mask.count_on() > 0, has_non = inv.count_on() > 0;
        n_shadow += has_shadow;
        n_nonshadow += has_non;
        for (int k = 0; k < k_max; ++k) {
            const auto& pred = r.passes[static_cast<std::size_t>(k)];
            if (has_shadow) shadow[static_cast<std::size_t>(k)] += metrics::rmse_lab(pred, t.shadow_free, mask, convention);
            if (has_non) nonshadow[static_cast<std::size_t>(k)] += metrics::rmse_lab(pred, t.shadow_free, inv, convention);
        }
    }
    std::vector<SweepRow> rows;
    for (int k = 0; k < k_max; ++k)
        rows.push_back({k + 1, n_shadow ? shadow[static_cast<std::size_t>(k)] / n_shadow : 0.0,
                        n_nonshadow ? nonshadow[static_cast<std::size_t>(k)] / n_nonshadow : 0.0});
    return rows;
}

TrendCheck check_non_increasing(const std::vector<double>& values, int allowed_inversions, double max_relative) {
    TrendCheck out;
    bool within = true;
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (values[i] <= values[i - 1]) continue;
        ++out.inversions;
        const double rel = values[i - 1] > 0 ? (values[i] - values[i - 1]) / values[i - 1] : INFINITY;
        out.worst_increase = std::max(out.worst_increase, rel);
        within = within && rel <= max_relative;
    }
    out.passed = within && out.inversions <= allowed_inversions;
    return out;
}

std::string format_interference(const Interference& result, std::size_t trace_length, double epsilon) {
    std::ostringstream os;
    os << "records\tpairs\tepsilon\tcount\tratio\n"
       << trace_length << '\t' << (trace_length ? trace_length - 1 : 0) << '\t' << epsilon << '\t' << result.count
       << '\t' << result.ratio << '\n';
    return os.str();
}

std::string format_sweep(const std::vector<SweepRow>& rows) {
    std::ostringstream os;
    os.precision(6);
    os << std::fixed << "k\trmse_shadow\trmse_nonshadow\n";
    for (const auto& r : rows) os << r.k << '\t' << r.rmse_shadow << '\t' << r.rmse_nonshadow << '\n';
    return os.str();
}

std::string trace_plot_data(const RmseTrace& trace) {
    std::ostringstream os;
    os.precision(10);
    os << "# rmse_shadow\n# step rmse\n";
    for (const auto& r : trace) os << r.step << ' ' << r.rmse_shadow << '\n';
    os << "\n\n# rmse_nonshadow\n# step rmse\n";
    for (const auto& r : trace) os << r.step << ' ' << r.rmse_nonshadow << '\n';
    return os.str();
}

std::string sweep_plot_data(const std::vector<SweepRow>& rows) {
    std::ostringstream os;
    os.precision(10);
    os << "# rmse_shadow\n# k rmse\n";
    for (const auto& r : rows) os << r.k << ' ' << r.rmse_shadow << '\n';
    os << "\n\n# rmse_nonshadow\n# k rmse\n";
    for (const auto& r : rows) os << r.k << ' ' << r.rmse_nonshadow << '\n';
    return os.str();
}

}  // namespace deshadow::diag
