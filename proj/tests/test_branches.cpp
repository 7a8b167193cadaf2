// SPDX-License-Identifier: Apache-2.0
#include <cmath>

#include "deshadow/error.hpp"
#include "deshadow/model/branches.hpp"
#include "deshadow/nn/grad_check.hpp"
#include "deshadow/nn/ops.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace deshadow;
using namespace deshadow::model;
using arch::ArchSpec;
using nn::Shape;
using nn::Tensor;
using nn::Var;

namespace {

// 16 x 16 input, 8 channels, one residual block: sites 1, 3, 7.
ArchSpec tiny() { return ArchSpec{16, 1, 16, 2, {1, 3, -1}}; }

template <class T>
Tensor<T> image_of(int s, std::uint64_t seed) {
    return test::random_tensor<T>({3, s, s}, seed, 0.0, 1.0);
}

template <class T>
Tensor<T> mask_of(int s) {
    Tensor<T> m({1, s, s});
    for (int y = s / 4; y < s / 2 + s / 4; ++y)
        for (int x = s / 4; x < s / 2; ++x) m.at(0, y, x) = T{1};
    return m;
}

// Moves the network off the zero-bias ReLU kinks and scales weights up so
// gradients do not vanish across the stack.
template <class T>
void condition(nn::ParameterStore<T>& store, std::uint64_t seed) {
    nn::Rng rng(seed);
    for (auto& p : store.items()) {
        if (p->name().ends_with(".bias"))
            for (T& v : p->mutable_value().data()) v = static_cast<T>(rng.uniform(-0.1, 0.1));
        else
            for (T& v : p->mutable_value().data()) v *= T(2.5);
    }
}

}  // namespace

TEST_SUITE("branches") {

TEST_CASE("desk forward shapes") {
    const DualBranchNet<float> net(ArchSpec::desk(), AggregationMode::sab, 1);
    CHECK(net.sites() == std::vector<int>{1, 3, 9});
    const auto img = image_of<float>(64, 2);
    const auto imb = net.imb_forward(img);
    CHECK(imb.reconstruction.shape() == Shape{3, 64, 64});
    REQUIRE(imb.taps.at.size() == 3);
    CHECK(imb.taps.at.at(1).shape() == Shape{8, 64, 64});
    CHECK(imb.taps.at.at(3).shape() == Shape{32, 16, 16});
    CHECK(imb.taps.at.at(9).shape() == Shape{8, 64, 64});
    const auto pass = net.idb_forward_once(Var<float>(img), mask_of<float>(64), imb.taps);
    CHECK(pass.output.shape() == Shape{3, 64, 64});
    REQUIRE(pass.soft_masks.size() == 3);
    CHECK(pass.soft_masks[0].shape() == Shape{1, 64, 64});
    CHECK(pass.soft_masks[1].shape() == Shape{1, 16, 16});
    CHECK(pass.soft_masks[2].shape() == Shape{1, 64, 64});
    // Untrained gates are exactly symmetric at the first site only if the
    // gate weights vanish; random weights still keep masks inside (0, 1).
    for (const auto& m : pass.soft_masks)
        for (float v : m.value().data()) CHECK((v > 0.0f && v < 1.0f));
}

TEST_CASE("zeroed gate weights give half soft masks at every site") {
    DualBranchNet<double> net(tiny(), AggregationMode::sab, 3);
    for (auto& p : net.params().items())
        if (p->name().find(".gate.") != std::string::npos) p->mutable_value().fill(0.0);
    const auto img = image_of<double>(16, 4);
    const auto trace = net.idb_iterate(img, mask_of<double>(16), net.imb_forward(img).taps, 2);
    for (const auto& pass : trace.passes) {
        REQUIRE(pass.soft_masks.size() == 3);
        for (const auto& m : pass.soft_masks)
            for (double v : m.value().data()) CHECK(v == 0.5);
    }
}

TEST_CASE("forward contracts") {
    const DualBranchNet<float> net(ArchSpec::desk(), AggregationMode::sab, 1);
    CHECK_THROWS_AS(net.imb_forward(image_of<float>(32, 1)), ContractViolation);
    const auto img = image_of<float>(64, 1);
    const auto taps = net.imb_forward(img).taps;
    CHECK_THROWS_AS(net.idb_iterate(img, mask_of<float>(64), taps, 0), ContractViolation);
    CHECK_THROWS_AS(net.idb_iterate(img, mask_of<float>(32), taps, 1), ContractViolation);
    ImbTaps<float> partial = taps;
    partial.at.erase(3);
    CHECK_THROWS_AS(net.idb_forward_once(Var<float>(img), mask_of<float>(64), partial), ContractViolation);
    ImbTaps<float> wrong = taps;
    wrong.at[3] = Var<float>(Tensor<float>({8, 16, 16}));
    CHECK_THROWS_AS(net.idb_forward_once(Var<float>(img), mask_of<float>(64), wrong), ContractViolation);
}

TEST_CASE("identical inputs give bit-identical taps and outputs") {
    const DualBranchNet<float> a(ArchSpec::desk(), AggregationMode::sab, 5);
    const DualBranchNet<float> b(ArchSpec::desk(), AggregationMode::sab, 5);
    const auto img = image_of<float>(64, 6);
    const auto ra = a.imb_forward(img), rb = b.imb_forward(img), rc = a.imb_forward(img);
    for (const auto& [site, v] : ra.taps.at) {
        CHECK(v.value().bit_equal(rb.taps.at.at(site).value()));
        CHECK(v.value().bit_equal(rc.taps.at.at(site).value()));
    }
    const auto ta = a.idb_iterate(img, mask_of<float>(64), ra.taps, 3);
    const auto tb = b.idb_iterate(img, mask_of<float>(64), rb.taps, 3);
    for (int t = 0; t < 3; ++t) CHECK(ta.passes[t].output.value().bit_equal(tb.passes[t].output.value()));
}

TEST_CASE("taps are unchanged by the iteration loop") {
    const DualBranchNet<float> net(ArchSpec::desk(), AggregationMode::sab, 7);
    const auto img = image_of<float>(64, 8);
    const auto taps = net.imb_forward(img).taps;
    std::map<int, Tensor<float>> before;
    for (const auto& [site, v] : taps.at) before[site] = v.value();
    const auto trace = net.idb_iterate(img, mask_of<float>(64), taps, 4);
    CHECK(trace.passes.size() == 4);
    for (const auto& [site, v] : taps.at) CHECK(v.value().bit_equal(before.at(site)));
}

TEST_CASE("later passes consume the clamped previous output") {
    const DualBranchNet<double> net(tiny(), AggregationMode::sab, 9);
    const auto img = image_of<double>(16, 10);
    const auto mask = mask_of<double>(16);
    const auto taps = net.imb_forward(img).taps;
    const auto trace = net.idb_iterate(img, mask, taps, 3);
    CHECK(trace.passes[0].output.value().bit_equal(net.idb_forward_once(Var<double>(img), mask, taps).output.value()));
    for (int t = 1; t < 3; ++t) {
        Tensor<double> fed = trace.passes[t - 1].output.value();
        for (double& v : fed.data()) v = std::clamp(v, 0.0, 1.0);
        const auto once = net.idb_forward_once(Var<double>(fed), mask, taps);
        CHECK(trace.passes[t].output.value().bit_equal(once.output.value()));
    }
    const auto single = net.idb_iterate(img, mask, taps, 1);
    REQUIRE(single.passes.size() == 1);
    CHECK(single.final_output().value().bit_equal(trace.passes[0].output.value()));
}

TEST_CASE("fixed-seed untrained output matches the golden checksum") {
    const DualBranchNet<double> net(ArchSpec::desk(), AggregationMode::sab, 2024);
    const auto img = image_of<double>(64, 77);
    const auto trace = net.idb_iterate(img, mask_of<double>(64), net.imb_forward(img).taps, 2);
    double sum = 0.0, sq = 0.0;
    for (double v : trace.final_output().value().data()) {
        sum += v;
        sq += v * v;
    }
    CHECK(sum == doctest::Approx(-164.43556036131596).epsilon(1e-9));
    CHECK(sq == doctest::Approx(4.7583541405402947).epsilon(1e-9));
}

TEST_CASE("with the identical-mapping branch frozen only de-shadow parameters get gradients") {
    DualBranchNet<double> net(tiny(), AggregationMode::sab, 11);
    condition(net.params(), 12);
    net.set_imb_frozen(true);
    const auto img = image_of<double>(16, 13);
    const auto gt = image_of<double>(16, 14);
    const auto trace = net.idb_iterate(img, mask_of<double>(16), net.imb_forward(img).taps, 3);
    nn::backward(nn::l1_loss(trace.final_output(), Var<double>(gt)));
    std::size_t idb = 0;
    for (const auto& p : net.params().items()) {
        const bool imb = p->name().starts_with(kImbPrefix);
        bool any = false;
        for (double g : p->grad().data()) any = any || g != 0.0;
        INFO(p->name());
        if (imb) {
            CHECK_FALSE(any);
        } else {
            CHECK(any);
            ++idb;
        }
    }
    CHECK(idb == 2 * 8 + 2 * 2 * 3);
}

TEST_CASE("truncated iteration only backpropagates through the last pass") {
    DualBranchNet<double> net(tiny(), AggregationMode::sab, 15);
    condition(net.params(), 16);
    // Lift the output into (0, 1) so the feedback clamp passes gradients.
    net.params().get("idb.conv08.bias").mutable_value().fill(0.5);
    net.set_imb_frozen(true);
    const auto img = image_of<double>(16, 17);
    const auto mask = mask_of<double>(16);
    const auto taps = net.imb_forward(img).taps;
    const auto gt = image_of<double>(16, 18);

    auto grads = [&](int k, bool truncate) {
        net.params().zero_grad();
        const auto trace = net.idb_iterate(img, mask, taps, k, truncate);
        nn::backward(nn::l1_loss(trace.final_output(), Var<double>(gt)));
        return net.params().get("idb.conv01.weight").grad();
    };
    // Truncated with k=2 equals a single pass fed the detached first output.
    const auto truncated = grads(2, true);
    const auto full = grads(2, false);
    net.params().zero_grad();
    Tensor<double> fed = net.idb_iterate(img, mask, taps, 1).final_output().value();
    for (double& v : fed.data()) v = std::clamp(v, 0.0, 1.0);
    nn::backward(nn::l1_loss(net.idb_forward_once(Var<double>(fed), mask, taps).output, Var<double>(gt)));
    const auto manual = net.params().get("idb.conv01.weight").grad();
    CHECK(test::max_abs_diff(truncated, manual) < 1e-15);
    double scale = 0.0;
    for (double g : full.data()) scale = std::max(scale, std::abs(g));
    CHECK(test::max_abs_diff(truncated, full) > 1e-3 * scale);
}

TEST_CASE("single de-shadow pass gradients match finite differences") {
    DualBranchNet<double> net(tiny(), AggregationMode::sab, 19);
    condition(net.params(), 20);
    net.set_imb_frozen(true);
    const auto img = image_of<double>(16, 21);
    const auto mask = mask_of<double>(16);
    const auto gt = image_of<double>(16, 22);
    const auto taps = net.imb_forward(img).taps;
    std::vector<nn::GradCheckInput> inputs;
    for (const auto& p : net.params().items())
        if (!p->frozen()) inputs.push_back({p->name(), p->var()});
    auto forward = [&] {
        return nn::l1_loss(net.idb_iterate(img, mask, taps, 1).final_output(), Var<double>(gt));
    };
    nn::GradCheckOptions opt;
    opt.directions_per_input = 4;
    opt.seed = 23;
    opt.step = 1e-6;
    opt.max_redraws = 8;
    const auto report = nn::grad_check(forward, inputs, opt);
    std::string worst;
    double w = 0.0;
    for (const auto& e : report.entries)
        if (e.max_rel_error > w) {
            w = e.max_rel_error;
            worst = e.name;
        }
    INFO("worst ", worst, " ", w);
    CHECK(report.passed());
}

}  // TEST_SUITE
