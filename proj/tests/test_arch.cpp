// SPDX-License-Identifier: Apache-2.0
#include <cmath>

#include "deshadow/arch/arch.hpp"
#include "deshadow/error.hpp"
#include "doctest.h"

using namespace deshadow;
using namespace deshadow::arch;

namespace {

std::vector<int> channel_chain(const LayerPlan& plan) {
    std::vector<int> out{plan.layers.front().in_ch};
    for (const auto& l : plan.layers) {
        const int convs = l.last_conv - l.first_conv + 1;
        for (int i = 0; i < convs; ++i) out.push_back(l.out_ch);
    }
    return out;
}

}  // namespace

TEST_SUITE("arch") {

TEST_CASE("full-scale plans chain channels and sizes of the reference layer table") {
    const ArchSpec spec = ArchSpec::full();
    CHECK(spec.conv_layers() == 22);
    const auto imb = build_plan(spec, Branch::imb);
    const auto idb = build_plan(spec, Branch::idb);

    std::vector<int> imb_channels{3, 64, 128, 256};
    for (int i = 0; i < 16; ++i) imb_channels.push_back(256);
    imb_channels.push_back(128);
    imb_channels.push_back(64);
    CHECK(channel_chain(imb) == imb_channels);

    std::vector<int> idb_channels = imb_channels;
    idb_channels.front() = 4;
    idb_channels.push_back(3);
    CHECK(channel_chain(idb) == idb_channels);

    std::vector<int> sizes{256, 128, 64};
    for (int i = 0; i < 16; ++i) sizes.push_back(64);
    sizes.push_back(128);
    sizes.push_back(256);
    CHECK(output_sizes(imb) == sizes);
    sizes.push_back(256);
    CHECK(output_sizes(idb) == sizes);

    const auto& head = idb.layers.front();
    CHECK((head.kernel == 7 && head.stride == 1 && head.pad == 3 && head.relu));
    const auto& last = idb.layers.back();
    CHECK((last.kind == LayerKind::conv && last.in_ch == 64 && last.out_ch == 3 && last.kernel == 7 && !last.relu));
    CHECK(idb.layers[idb.layers.size() - 2].kind == LayerKind::convtran);
    CHECK(idb.layers[3].kind == LayerKind::resnet);
    CHECK((idb.layers[3].kernel == 3 && idb.layers[3].pad == 1));
}

TEST_CASE("branch plans differ only in input channels and the output conv") {
    const ArchSpec spec = ArchSpec::desk();
    const auto imb = build_plan(spec, Branch::imb);
    const auto idb = build_plan(spec, Branch::idb);
    REQUIRE(idb.layers.size() == imb.layers.size() + 1);
    for (std::size_t i = 0; i < imb.layers.size(); ++i) {
        const auto& a = imb.layers[i];
        const auto& b = idb.layers[i];
        CHECK(a.kind == b.kind);
        CHECK((i == 0 || a.in_ch == b.in_ch));
        CHECK(a.out_ch == b.out_ch);
        CHECK(a.kernel == b.kernel);
        CHECK(a.stride == b.stride);
        CHECK(a.pad == b.pad);
        CHECK(a.out_size == b.out_size);
        CHECK(a.first_conv == b.first_conv);
    }
    CHECK(imb.layers.front().in_ch == 3);
    CHECK(idb.layers.front().in_ch == 4);
}

TEST_CASE("desk configuration divides channels by eight") {
    const ArchSpec spec = ArchSpec::desk();
    CHECK(spec.channels() == 8);
    CHECK(spec.conv_layers() == 10);
    CHECK(spec.resolved_sites() == std::vector<int>{1, 3, 9});
    const auto idb = build_plan(spec, Branch::idb);
    CHECK(channel_chain(idb) == std::vector<int>{4, 8, 16, 32, 32, 32, 32, 32, 16, 8, 3});
    CHECK(output_sizes(idb) == std::vector<int>{64, 32, 16, 16, 16, 16, 16, 32, 64, 64});
}

TEST_CASE("full-scale de-shadow parameter count equals a per-layer hand sum") {
    nn::ParameterStore<float> store;
    init_params(build_plan(ArchSpec::full(), Branch::idb), 1, store);
    const std::size_t expected = (4 * 64 * 49 + 64) + (64 * 128 * 16 + 128) + (128 * 256 * 16 + 256) +
                                 16 * (256 * 256 * 9 + 256) + (256 * 128 * 16 + 128) + (128 * 64 * 16 + 64) +
                                 (64 * 3 * 49 + 3);
    CHECK(store.scalar_count() == expected);
    CHECK(store.size() == 2 * 22);
}

TEST_CASE("initialization respects the fan-in bound and zero biases") {
    nn::ParameterStore<double> store;
    const auto plan = build_plan(ArchSpec::desk(), Branch::idb);
    init_params(plan, 9, store);
    for (const auto& layer : plan.layers) {
        for (int l = layer.first_conv; l <= layer.last_conv; ++l) {
            const int ci = l == layer.first_conv ? layer.in_ch : layer.out_ch;
            const double bound = std::sqrt(1.0 / (ci * layer.kernel * layer.kernel));
            const auto& w = store.get(conv_param_name(Branch::idb, l, "weight")).value();
            double peak = 0.0;
            for (double v : w.data()) {
                CHECK(std::abs(v) <= bound);
                peak = std::max(peak, std::abs(v));
            }
            CHECK(peak > 0.5 * bound);
            for (double v : store.get(conv_param_name(Branch::idb, l, "bias")).value().data()) CHECK(v == 0.0);
        }
    }
    const auto& t = store.get("idb.conv09.weight").value();
    CHECK(t.shape() == nn::Shape{16, 8, 4, 4});
}

TEST_CASE("initialization is a pure function of the seed") {
    const auto plan = build_plan(ArchSpec::desk(), Branch::imb);
    nn::ParameterStore<float> a, b, c;
    init_params(plan, 42, a);
    init_params(plan, 42, b);
    init_params(plan, 43, c);
    bool any_diff = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a.items()[i]->value().bit_equal(b.items()[i]->value()));
        any_diff = any_diff || !a.items()[i]->value().bit_equal(c.items()[i]->value());
    }
    CHECK(any_diff);
}

TEST_CASE("sites resolve relative to the layer count and are validated") {
    ArchSpec spec = ArchSpec::full();
    CHECK(spec.resolved_sites() == std::vector<int>{1, 3, 21});
    spec.sab_sites = {2};
    CHECK_NOTHROW(spec.validate());
    spec.sab_sites = {4};  // inside a residual block
    CHECK_THROWS_AS(spec.validate(), ContractViolation);
    spec.sab_sites = {0};  // output conv exists only in the de-shadow branch
    CHECK_THROWS_AS(spec.validate(), ContractViolation);
    spec.sab_sites = {1, 1};
    CHECK_THROWS_AS(spec.validate(), ContractViolation);
    spec = ArchSpec::full();
    spec.scale_divisor = 3;
    CHECK_THROWS_AS(spec.validate(), ContractViolation);
    spec = ArchSpec::full();
    spec.input_size = 250;
    CHECK_THROWS_AS(spec.validate(), ContractViolation);
}

TEST_CASE("arch spec text round-trips") {
    ArchSpec spec = ArchSpec::desk();
    spec.sab_sites = {1, 5, -1, 0};
    CHECK(format_sites(spec.sab_sites) == "1,5,L-1,L");
    CHECK(parse_arch(serialize(spec)) == spec);
    CHECK(parse_sites("") == std::vector<int>{});
    CHECK(parse_sites(" 1 , L-2 ") == std::vector<int>{1, -2});
    CHECK_THROWS_AS(parse_sites("x"), ContractViolation);
    CHECK_THROWS_AS(parse_sites("0"), ContractViolation);
    CHECK_THROWS_AS(parse_arch("base_channels = 8\n"), DataError);
}

}  // TEST_SUITE
