// SPDX-License-Identifier: Apache-2.0
//
// Declarative layer plans for the two encoder-decoder branches. One
// parameterization produces both the full-size network (scale_divisor 1,
// 256 x 256 input, 8 residual blocks) and the reduced desk configuration.
//
// Layers are numbered by convolution index l = 1..L, where for the
// de-shadow branch L = 2 * resnet_blocks + 6:
//   1        Conv(in, c, 7, 1, 3) + ReLU
//   2, 3     Conv(c, 2c, 4, 2, 1), Conv(2c, 4c, 4, 2, 1) + ReLU
//   4..L-3   residual blocks, two Conv(4c, 4c, 3, 1, 1) each
//   L-2, L-1 ConvTran(4c, 2c, 4, 2, 1), ConvTran(2c, c, 4, 2, 1) + ReLU
//   L        Conv(c, 3, 7, 1, 3), de-shadow branch only, no activation
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "deshadow/nn/autodiff.hpp"
#include "deshadow/nn/rng.hpp"

namespace deshadow::arch {

enum class Branch { imb, idb };

std::string to_string(Branch b);

struct ArchSpec {
    int base_channels = 64;
    int resnet_blocks = 8;
    int input_size = 256;
    int scale_divisor = 1;
    /// Conv indices after which the aggregation block runs. Non-positive
    /// entries are relative to L: 0 is L, -1 is L-1.
    std::vector<int> sab_sites{1, 3, -1};

    static ArchSpec full() { return ArchSpec{}; }
    /// 64 x 64 input, channels divided by 8, two residual blocks.
    static ArchSpec desk() { return ArchSpec{64, 2, 64, 8, {1, 3, -1}}; }

    int channels() const { return base_channels / scale_divisor; }
    /// Number of conv layers in the de-shadow branch.
    int conv_layers() const { return 2 * resnet_blocks + 6; }
    /// Sites with relative entries resolved, sorted ascending.
    std::vector<int> resolved_sites() const;

    /// Throws ContractViolation describing the first invalid field.
    void validate() const;

    bool operator==(const ArchSpec&) const = default;
};

/// "key = value" lines; sab_sites are written as e.g. "1,3,L-1".
std::string serialize(const ArchSpec& spec);
ArchSpec parse_arch(const std::string& text);
/// Parses a site list such as "1,3,L-1" (empty string is the empty set).
std::vector<int> parse_sites(const std::string& text);
std::string format_sites(const std::vector<int>& sites);

enum class LayerKind { conv, convtran, resnet };

struct LayerDesc {
    LayerKind kind;
    int in_ch;
    int out_ch;
    int kernel;
    int stride;
    int pad;
    bool relu;
    int out_size;       // spatial extent (square) after this layer
    int first_conv;     // conv index of the layer's first convolution
    int last_conv;      // equal to first_conv except for residual blocks
};

struct LayerPlan {
    Branch branch;
    std::vector<LayerDesc> layers;

    /// Index into `layers` of the layer ending at conv index `l`, or -1.
    int layer_ending_at(int conv_index) const;
};

LayerPlan build_plan(const ArchSpec& spec, Branch branch);

/// Output size of every conv index, derived by chaining the plan's layers.
std::vector<int> output_sizes(const LayerPlan& plan);

/// Parameter name of conv `conv_index` in `branch`, e.g. "idb.conv03.weight".
std::string conv_param_name(Branch branch, int conv_index, const char* field);

/// Kernel-shaped initialization: uniform(-b, b) with b = sqrt(1 / (C_in k k)),
/// zero biases.
template <class T>
void init_conv(nn::ParameterStore<T>& store, const std::string& weight_name, const std::string& bias_name,
               nn::Shape kernel_shape, int fan_in, int bias_len, nn::Rng& rng);

/// Adds every conv parameter of `plan` to `store`, deterministically per seed.
template <class T>
void init_params(const LayerPlan& plan, std::uint64_t seed, nn::ParameterStore<T>& store);

/// Seed for a named sub-stream of a base seed.
std::uint64_t derive_seed(std::uint64_t seed, const std::string& stream);

}  // namespace deshadow::arch
