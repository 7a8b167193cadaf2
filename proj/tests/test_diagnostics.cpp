// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <limits>

#include "deshadow/diag/diagnostics.hpp"
#include "deshadow/error.hpp"
#include "deshadow/imaging/synth.hpp"
#include "deshadow/metrics/metrics.hpp"
#include "deshadow/train/inference.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace deshadow;
using diag::RmseTrace;

namespace {

RmseTrace make_trace(const std::vector<double>& shadow, const std::vector<double>& nonshadow) {
    RmseTrace t;
    for (std::size_t i = 0; i < shadow.size(); ++i)
        t.push_back({static_cast<std::int64_t>((i + 1) * 100), 0.0, shadow[i], nonshadow[i]});
    return t;
}

// Exhaustive sign comparison written out directly.
std::size_t conflict_oracle(const std::vector<double>& s, const std::vector<double>& n, double eps) {
    std::size_t c = 0;
    for (std::size_t i = 1; i < s.size(); ++i) {
        const double ds = s[i] - s[i - 1], dn = n[i] - n[i - 1];
        const bool s_up = ds > eps, s_down = ds < -eps, n_up = dn > eps, n_down = dn < -eps;
        if ((s_up && n_down) || (s_down && n_up)) ++c;
    }
    return c;
}

arch::ArchSpec tiny() { return arch::ArchSpec{16, 1, 16, 2, {1, 3, -1}}; }

}  // namespace

TEST_SUITE("diagnostics") {

TEST_CASE("interference on hand-built traces") {
    auto r = diag::mutual_interference(make_trace({5, 4, 3}, {3, 2, 1}));
    CHECK(r.count == 0);
    CHECK(r.ratio == 0.0);
    r = diag::mutual_interference(make_trace({5, 4, 5}, {3, 3.5, 2}));
    CHECK(r.count == 2);
    CHECK(r.ratio == 1.0);
    r = diag::mutual_interference(make_trace({5, 4, 4, 6}, {3, 3.5, 1, 1}));
    CHECK(r.count == 1);
    CHECK(r.ratio == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("interference matches the sign oracle on random traces") {
    nn::Rng rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t len = 2 + static_cast<std::size_t>(rng.uniform(0.0, 30.0));
        std::vector<double> s(len), n(len);
        for (std::size_t i = 0; i < len; ++i) {
            // Coarse values so ties and near-ties occur.
            s[i] = std::round(rng.uniform(0.0, 8.0)) * 0.5;
            n[i] = std::round(rng.uniform(0.0, 8.0)) * 0.5 + (rng.uniform() < 0.2 ? 1e-9 : 0.0);
        }
        const double eps = trial % 2 ? 1e-6 : 0.4;
        const auto r = diag::mutual_interference(make_trace(s, n), eps);
        CHECK(r.count == conflict_oracle(s, n, eps));
        CHECK((r.ratio >= 0.0 && r.ratio <= 1.0));
        CHECK(r.ratio == doctest::Approx(static_cast<double>(r.count) / static_cast<double>(len - 1)));
    }
}

TEST_CASE("infinite tolerance never conflicts and offsets do not matter") {
    const std::vector<double> s{5, 4, 5, 2, 3}, n{3, 3.5, 2, 4, 1};
    CHECK(diag::mutual_interference(make_trace(s, n), std::numeric_limits<double>::infinity()).count == 0);
    std::vector<double> s2 = s, n2 = n;
    for (double& v : s2) v += 10.0;
    for (double& v : n2) v -= 0.5;
    CHECK(diag::mutual_interference(make_trace(s2, n2)).count == diag::mutual_interference(make_trace(s, n)).count);
}

TEST_CASE("interference input errors") {
    CHECK_THROWS_AS(diag::mutual_interference(make_trace({1}, {1})), DataError);
    CHECK_THROWS_AS(diag::mutual_interference({}), DataError);
    auto t = make_trace({1, 2, 3}, {1, 2, 3});
    t[2].step = t[1].step;
    CHECK_THROWS_WITH_AS(diag::mutual_interference(t), doctest::Contains("strictly increasing"), DataError);
    CHECK_THROWS_AS(diag::mutual_interference(make_trace({1, 2}, {1, 2}), -1.0), ContractViolation);
}

TEST_CASE("non-increasing trend check") {
    CHECK(diag::check_non_increasing({3, 2, 2, 1}, 0, 0.0).passed);
    auto r = diag::check_non_increasing({3, 2, 2.05, 1}, 1, 0.05);
    CHECK(r.passed);
    CHECK(r.inversions == 1);
    CHECK(r.worst_increase == doctest::Approx(0.025));
    CHECK_FALSE(diag::check_non_increasing({3, 2, 2.05, 1}, 0, 0.05).passed);
    CHECK_FALSE(diag::check_non_increasing({3, 2, 2.5, 1}, 1, 0.05).passed);
    CHECK_FALSE(diag::check_non_increasing({3, 3.1, 2, 2.1}, 1, 0.05).passed);
    CHECK(diag::check_non_increasing({}, 0, 0.0).passed);
}

TEST_CASE("sweep rows equal independent per-k evaluation") {
    const model::DualBranchNet<float> net(tiny(), model::AggregationMode::sab, 3);
    auto data = imaging::synth_dataset(8, 3, 16);
    // A shadowless image contributes to the non-shadow mean only.
    data[2].mask = imaging::ShadowMask(16, 16, 0.0);
    const auto rows = diag::iteration_sweep(net, data, 3);
    REQUIRE(rows.size() == 3);
    for (int k = 1; k <= 3; ++k) {
        double s = 0.0, n = 0.0;
        for (std::size_t i = 0; i < data.size(); ++i) {
            const auto out = train::restore(net, data[i].shadow, data[i].mask, k).passes.back();
            const auto mask = imaging::binarize(data[i].mask);
            if (i < 2) s += metrics::rmse_lab(out, data[i].shadow_free, mask);
            n += metrics::rmse_lab(out, data[i].shadow_free, imaging::invert(mask));
        }
        CHECK(rows[k - 1].k == k);
        CHECK(rows[k - 1].rmse_shadow == doctest::Approx(s / 2).epsilon(1e-12));
        CHECK(rows[k - 1].rmse_nonshadow == doctest::Approx(n / 3).epsilon(1e-12));
    }
    const auto single = diag::iteration_sweep(net, data, 1);
    REQUIRE(single.size() == 1);
    CHECK(single[0].rmse_shadow == rows[0].rmse_shadow);
    CHECK_THROWS_AS(diag::iteration_sweep(net, data, 0), ContractViolation);
    CHECK_THROWS_AS(diag::iteration_sweep(net, {}, 2), DataError);
}

TEST_CASE("report and plot formats") {
    const auto t = make_trace({5, 4, 5}, {3, 3.5, 2});
    const std::string table = diag::format_interference(diag::mutual_interference(t), t.size(), 1e-6);
    CHECK(table.starts_with("records\tpairs\tepsilon\tcount\tratio\n3\t2\t"));
    const std::string plot = diag::trace_plot_data(t);
    CHECK(plot == "# rmse_shadow\n# step rmse\n100 5\n200 4\n300 5\n\n\n# rmse_nonshadow\n# step rmse\n100 3\n200 3.5\n300 2\n");
    const std::vector<diag::SweepRow> rows{{1, 2.5, 1.25}, {2, 2.0, 1.0}};
    CHECK(diag::format_sweep(rows) == "k\trmse_shadow\trmse_nonshadow\n1\t2.500000\t1.250000\n2\t2.000000\t1.000000\n");
    CHECK(diag::sweep_plot_data(rows) ==
          "# rmse_shadow\n# k rmse\n1 2.5\n2 2\n\n\n# rmse_nonshadow\n# k rmse\n1 1.25\n2 1\n");
}

}  // TEST_SUITE
