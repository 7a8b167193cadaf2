// SPDX-License-Identifier: Apache-2.0
#include "deshadow/arch/arch.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "deshadow/error.hpp"
#include "deshadow/nn/ops.hpp"

namespace deshadow::arch {

std::string to_string(Branch b) { return b == Branch::imb ? "imb" : "idb"; }

std::vector<int> ArchSpec::resolved_sites() const {
    std::vector<int> out;
    for (int s : sab_sites) out.push_back(s <= 0 ? conv_layers() + s : s);
    std::sort(out.begin(), out.end());
    return out;
}

void ArchSpec::validate() const {
    if (base_channels < 1 || resnet_blocks < 0 || input_size < 1 || scale_divisor < 1)
        throw ContractViolation("arch: counts must be positive (base_channels, input_size, scale_divisor) "
                                "and resnet_blocks non-negative");
    if (base_channels % scale_divisor != 0)
        throw ContractViolation("arch: base_channels " + std::to_string(base_channels) +
                                " not divisible by scale_divisor " + std::to_string(scale_divisor));
    if (input_size % 4 != 0)
        throw ContractViolation("arch: input_size " + std::to_string(input_size) +
                                " must be divisible by 4 so the decoder restores it");
    const LayerPlan plan = build_plan(*this, Branch::imb);
    const auto sites = resolved_sites();
    for (std::size_t i = 0; i < sites.size(); ++i) {
        if (i && sites[i] == sites[i - 1])
            throw ContractViolation("arch: duplicate sab site " + std::to_string(sites[i]));
        if (plan.layer_ending_at(sites[i]) < 0)
            throw ContractViolation("arch: sab site " + std::to_string(sites[i]) +
                                    " is not a layer boundary shared by both branches (L = " +
                                    std::to_string(conv_layers()) + ")");
    }
}

std::string format_sites(const std::vector<int>& sites) {
    std::string out;
    for (std::size_t i = 0; i < sites.size(); ++i) {
        if (i) out += ',';
        const int s = sites[i];
        out += s < 0 ? "L-" + std::to_string(-s) : (s == 0 ? std::string("L") : std::to_string(s));
    }
    return out;
}

std::vector<int> parse_sites(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        tok.erase(std::remove_if(tok.begin(), tok.end(), [](unsigned char c) { return std::isspace(c); }), tok.end());
        if (tok.empty()) continue;
        try {
            if (tok == "L") {
                out.push_back(0);
            } else if (tok.starts_with("L-")) {
                const int v = std::stoi(tok.substr(2));
                if (v < 1) throw ContractViolation("");
                out.push_back(-v);
            } else {
                std::size_t used = 0;
                const int v = std::stoi(tok, &used);
                if (used != tok.size() || v < 1) throw ContractViolation("");
                out.push_back(v);
            }
        } catch (const std::exception&) {
            throw ContractViolation("arch: malformed sab site '" + tok + "'");
        }
    }
    return out;
}

std::string serialize(const ArchSpec& spec) {
    std::ostringstream os;
    os << "base_channels = " << spec.base_channels << '\n'
       << "resnet_blocks = " << spec.resnet_blocks << '\n'
       << "input_size = " << spec.input_size << '\n'
       << "scale_divisor = " << spec.scale_divisor << '\n'
       << "sab_sites = " << format_sites(spec.sab_sites) << '\n';
    return os.str();
}

ArchSpec parse_arch(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    auto int_field = [&](const char* key) {
        const auto it = kv.find(key);
        if (it == kv.end()) throw DataError(std::string("arch spec missing field '") + key + "'");
        try {
            return std::stoi(it->second);
        } catch (const std::exception&) {
            throw DataError(std::string("arch spec field '") + key + "' is not an integer");
        }
    };
    ArchSpec spec;
    spec.base_channels = int_field("base_channels");
    spec.resnet_blocks = int_field("resnet_blocks");
    spec.input_size = int_field("input_size");
    spec.scale_divisor = int_field("scale_divisor");
    const auto it = kv.find("sab_sites");
    if (it == kv.end()) throw DataError("arch spec missing field 'sab_sites'");
    spec.sab_sites = parse_sites(it->second);
    return spec;
}

int LayerPlan::layer_ending_at(int conv_index) const {
    for (std::size_t i = 0; i < layers.size(); ++i)
        if (layers[i].last_conv == conv_index) return static_cast<int>(i);
    return -1;
}

LayerPlan build_plan(const ArchSpec& spec, Branch branch) {
    if (spec.base_channels < 1 || spec.scale_divisor < 1 || spec.base_channels % spec.scale_divisor != 0 ||
        spec.input_size < 4 || spec.input_size % 4 != 0 || spec.resnet_blocks < 0)
        throw ContractViolation("build_plan: invalid arch spec");
    const int c = spec.channels();
    const int s = spec.input_size;
    const int in_ch = branch == Branch::imb ? 3 : 4;

    LayerPlan plan{branch, {}};
    int l = 1;
    auto push = [&](LayerKind kind, int ci, int co, int k, int st, int p, bool relu, int out) {
        const int last = kind == LayerKind::resnet ? l + 1 : l;
        plan.layers.push_back({kind, ci, co, k, st, p, relu, out, l, last});
        l = last + 1;
    };
    push(LayerKind::conv, in_ch, c, 7, 1, 3, true, s);
    push(LayerKind::conv, c, 2 * c, 4, 2, 1, true, s / 2);
    push(LayerKind::conv, 2 * c, 4 * c, 4, 2, 1, true, s / 4);
    for (int b = 0; b < spec.resnet_blocks; ++b) push(LayerKind::resnet, 4 * c, 4 * c, 3, 1, 1, true, s / 4);
    push(LayerKind::convtran, 4 * c, 2 * c, 4, 2, 1, true, s / 2);
    push(LayerKind::convtran, 2 * c, c, 4, 2, 1, true, s);
    if (branch == Branch::idb) push(LayerKind::conv, c, 3, 7, 1, 3, false, s);
    return plan;
}

std::vector<int> output_sizes(const LayerPlan& plan) {
    std::vector<int> sizes;
    if (plan.layers.empty()) return sizes;
    // Input extent implied by the first (size-preserving) layer.
    int size = plan.layers.front().out_size;
    for (const auto& layer : plan.layers) {
        const int convs = layer.last_conv - layer.first_conv + 1;
        for (int i = 0; i < convs; ++i) {
            size = layer.kind == LayerKind::convtran
                       ? nn::conv_transpose_out_extent(size, layer.kernel, layer.stride, layer.pad)
                       : nn::conv_out_extent(size, layer.kernel, layer.stride, layer.pad);
            sizes.push_back(size);
        }
    }
    return sizes;
}

std::string conv_param_name(Branch branch, int conv_index, const char* field) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s.conv%02d.%s", to_string(branch).c_str(), conv_index, field);
    return buf;
}

std::uint64_t derive_seed(std::uint64_t seed, const std::string& stream) {
    // FNV-1a over the stream name, folded into the seed with a splitmix64 finalizer.
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : stream) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    std::uint64_t z = seed + h + 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

template <class T>
void init_conv(nn::ParameterStore<T>& store, const std::string& weight_name, const std::string& bias_name,
               nn::Shape kernel_shape, int fan_in, int bias_len, nn::Rng& rng) {
    const double bound = std::sqrt(1.0 / static_cast<double>(fan_in));
    nn::Tensor<T> w(std::move(kernel_shape));
    for (T& v : w.data()) v = static_cast<T>(bound * (2.0 * rng.uniform() - 1.0));
    store.add(weight_name, std::move(w));
    store.add(bias_name, nn::Tensor<T>({bias_len}));
}

template <class T>
void init_params(const LayerPlan& plan, std::uint64_t seed, nn::ParameterStore<T>& store) {
    nn::Rng rng(derive_seed(seed, to_string(plan.branch)));
    for (const auto& layer : plan.layers) {
        for (int l = layer.first_conv; l <= layer.last_conv; ++l) {
            const int ci = l == layer.first_conv ? layer.in_ch : layer.out_ch;
            const int k = layer.kernel;
            nn::Shape shape = layer.kind == LayerKind::convtran ? nn::Shape{ci, layer.out_ch, k, k}
                                                                 : nn::Shape{layer.out_ch, ci, k, k};
            init_conv(store, conv_param_name(plan.branch, l, "weight"), conv_param_name(plan.branch, l, "bias"),
                      std::move(shape), ci * k * k, layer.out_ch, rng);
        }
    }
}

template void init_conv(nn::ParameterStore<float>&, const std::string&, const std::string&, nn::Shape, int, int,
                        nn::Rng&);
template void init_conv(nn::ParameterStore<double>&, const std::string&, const std::string&, nn::Shape, int, int,
                        nn::Rng&);
template void init_params(const LayerPlan&, std::uint64_t, nn::ParameterStore<float>&);
template void init_params(const LayerPlan&, std::uint64_t, nn::ParameterStore<double>&);

}  // namespace deshadow::arch
