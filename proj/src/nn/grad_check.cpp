// SPDX-License-Identifier: Apache-2.0
#include "deshadow/nn/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "deshadow/nn/ops.hpp"
#include "deshadow/nn/rng.hpp"

namespace deshadow::nn {

GradCheckReport grad_check(const std::function<Var<double>()>& forward, const std::vector<GradCheckInput>& inputs,
                           const GradCheckOptions& options) {
    for (const auto& in : inputs) {
        if (!in.var.requires_grad() || in.var.node()->backward_fn)
            throw ContractViolation("grad_check: input '" + in.name + "' is not a grad-requiring leaf");
        in.var.node()->grad = Tensor<double>();
    }

    Var<double> loss = forward();
    backward(loss);

    GradCheckReport report;
    report.tolerance = options.tolerance;
    Rng rng(options.seed);

    for (const auto& in : inputs) {
        Node<double>& node = *in.var.node();
        const Tensor<double> analytic = node.grad.empty() ? Tensor<double>(node.value.shape()) : node.grad;

        auto record = [&](GradCheckEntry& entry, double a, double numeric) {
            const double abs_err = std::abs(a - numeric);
            const double rel_err = abs_err / std::max({std::abs(a), std::abs(numeric), options.abs_floor});
            entry.max_abs_error = std::max(entry.max_abs_error, abs_err);
            entry.max_rel_error = std::max(entry.max_rel_error, rel_err);
        };
        GradCheckEntry entry{in.name, 0, 0.0, 0.0, 0};
        if (options.directions_per_input) {
            const Tensor<double> saved = node.value;
            Tensor<double> dir(saved.shape());
            auto evaluate = [&](double sign, std::uint64_t& pattern) {
                for (std::size_t i = 0; i < dir.size(); ++i) node.value[i] = saved[i] + sign * options.step * dir[i];
                BranchRecorder rec;
                const double f = forward().item();
                pattern = rec.digest();
                return f;
            };
            for (std::size_t d = 0; d < options.directions_per_input; ++d) {
                double a = 0.0, f_plus = 0.0, f_minus = 0.0;
                for (std::size_t attempt = 0;; ++attempt) {
                    a = 0.0;
                    for (std::size_t i = 0; i < dir.size(); ++i) {
                        dir[i] = rng.uniform() < 0.5 ? -1.0 : 1.0;
                        a += analytic[i] * dir[i];
                    }
                    std::uint64_t p_plus = 0, p_minus = 0;
                    f_plus = evaluate(1.0, p_plus);
                    f_minus = evaluate(-1.0, p_minus);
                    if (p_plus == p_minus || attempt >= options.max_redraws) break;
                    ++entry.redrawn;
                }
                node.value = saved;
                record(entry, a, (f_plus - f_minus) / (2.0 * options.step));
                ++entry.checked;
            }
        } else {
            std::vector<std::size_t> indices(node.value.size());
            std::iota(indices.begin(), indices.end(), std::size_t{0});
            if (options.max_entries_per_input && indices.size() > options.max_entries_per_input) {
                // Partial Fisher-Yates.
                for (std::size_t i = 0; i < options.max_entries_per_input; ++i) {
                    const std::size_t j = i + rng.below(indices.size() - i);
                    std::swap(indices[i], indices[j]);
                }
                indices.resize(options.max_entries_per_input);
            }
            for (std::size_t idx : indices) {
                const double saved = node.value[idx];
                node.value[idx] = saved + options.step;
                const double f_plus = forward().item();
                node.value[idx] = saved - options.step;
                const double f_minus = forward().item();
                node.value[idx] = saved;
                record(entry, analytic[idx], (f_plus - f_minus) / (2.0 * options.step));
                ++entry.checked;
            }
        }
        report.max_rel_error = std::max(report.max_rel_error, entry.max_rel_error);
        report.entries.push_back(std::move(entry));
    }
    return report;
}

}  // namespace deshadow::nn
