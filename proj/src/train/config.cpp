// SPDX-License-Identifier: Apache-2.0
#include "deshadow/train/config.hpp"

#include <sstream>

#include "deshadow/error.hpp"

namespace deshadow::train {

std::string to_string(Phase p) { return p == Phase::imb ? "imb" : "idb"; }

Phase parse_phase(const std::string& text) {
    if (text == "imb") return Phase::imb;
    if (text == "idb") return Phase::idb;
    throw ContractViolation("unknown training phase '" + text + "'");
}

void TrainConfig::validate() const {
    auto positive = [](long v, const char* name) {
        if (v < 1) throw ContractViolation(std::string("train config: ") + name + " must be positive");
    };
    positive(iterations, "iterations");
    positive(batch_size, "batch-size");
    positive(eval_interval, "eval-interval");
    positive(k_iterations, "k");
    if (!(learning_rate >= 0.0)) throw ContractViolation("train config: lr must be non-negative");
    if (checkpoint_interval < 0) throw ContractViolation("train config: checkpoint-interval must be non-negative");
    if (!(stop_below >= 0.0)) throw ContractViolation("train config: stop-below must be non-negative");
    arch.validate();
}

std::string serialize(const TrainConfig& cfg) {
    std::ostringstream os;
    os.precision(17);
    os << "phase = " << to_string(cfg.phase) << '\n'
       << "iterations = " << cfg.iterations << '\n'
       << "batch-size = " << cfg.batch_size << '\n'
       << "lr = " << cfg.learning_rate << '\n'
       << "eval-interval = " << cfg.eval_interval << '\n'
       << "k = " << cfg.k_iterations << '\n'
       << "seed = " << cfg.seed << '\n'
       << "base-channels = " << cfg.arch.base_channels << '\n'
       << "resnet-blocks = " << cfg.arch.resnet_blocks << '\n'
       << "input-size = " << cfg.arch.input_size << '\n'
       << "scale-divisor = " << cfg.arch.scale_divisor << '\n'
       << "sab-sites = \"" << arch::format_sites(cfg.arch.sab_sites) << "\"\n"
       << "aggregation = " << model::to_string(cfg.aggregation) << '\n'
       << "data = \"" << cfg.data_root << "\"\n"
       << "layout = " << (cfg.layout == imaging::Layout::istd ? "istd" : "srd") << '\n'
       << "imb-checkpoint = \"" << cfg.imb_checkpoint << "\"\n"
       << "output = \"" << cfg.output << "\"\n"
       << "checkpoint-interval = " << cfg.checkpoint_interval << '\n'
       << "truncate-bptt = " << (cfg.truncate_bptt ? "true" : "false") << '\n'
       << "stop-below = " << cfg.stop_below << '\n';
    return os.str();
}

}  // namespace deshadow::train
