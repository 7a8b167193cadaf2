// SPDX-License-Identifier: Apache-2.0
#include "deshadow/train/trainer.hpp"

#include <cmath>
#include <cstdio>
#include <optional>

#include "deshadow/error.hpp"
#include "deshadow/imaging/ops.hpp"
#include "deshadow/metrics/metrics.hpp"
#include "deshadow/nn/ops.hpp"
#include "deshadow/train/inference.hpp"

namespace deshadow::train {

namespace {

using Net = model::DualBranchNet<float>;

struct Sample {
    std::string id;
    imaging::Image shadow, shadow_free;
    imaging::ShadowMask mask;
    nn::Tensor<float> shadow_t, target_t, mask_t;
    model::ImbTaps<float> taps;
};

std::vector<Sample> prepare(const std::vector<imaging::Triplet>& data, int size) {
    if (data.empty()) throw DataError("training dataset is empty");
    std::vector<Sample> out;
    for (const auto& t : data) {
        Sample s;
        s.id = t.id;
        s.shadow = t.shadow.same_size(size, size) ? t.shadow : imaging::resize(t.shadow, size, size);
        s.shadow_free = t.shadow_free.same_size(size, size) ? t.shadow_free : imaging::resize(t.shadow_free, size, size);
        s.mask = imaging::binarize(t.mask.same_size(size, size) ? t.mask : imaging::resize(t.mask, size, size));
        s.shadow_t = image_tensor(s.shadow);
        s.target_t = image_tensor(s.shadow_free);
        s.mask_t = mask_tensor(s.mask);
        out.push_back(std::move(s));
    }
    return out;
}

struct Scores {
    double objective = 0.0;
    double rmse_shadow = 0.0;
    double rmse_nonshadow = 0.0;
};

// Mean over images; images lacking a region are skipped for that region.
class ScoreAccumulator {
public:
    /// A NaN objective marks an image that does not contribute to it.
    void add(const imaging::Image& pred, const imaging::Image& gt, const imaging::ShadowMask& mask, double objective) {
        if (!std::isnan(objective)) {
            objective_ += objective;
            ++n_;
        }
        const imaging::ShadowMask inv = imaging::invert(mask);
        if (mask.count_on() > 0) {
            shadow_ += metrics::rmse_lab(pred, gt, mask);
            ++n_shadow_;
        }
        if (inv.count_on() > 0) {
            nonshadow_ += metrics::rmse_lab(pred, gt, inv);
            ++n_nonshadow_;
        }
    }
    Scores result() const {
        return {n_ ? objective_ / n_ : 0.0, n_shadow_ ? shadow_ / n_shadow_ : 0.0, n_nonshadow_ ? nonshadow_ / n_nonshadow_ : 0.0};
    }

private:
    double objective_ = 0.0, shadow_ = 0.0, nonshadow_ = 0.0;
    int n_ = 0, n_shadow_ = 0, n_nonshadow_ = 0;
};

void log(const TrainHooks& hooks, const std::string& line) {
    if (hooks.log) hooks.log(line);
}

template <class LossFn, class EvalFn>
TrainResult run_loop(const TrainConfig& cfg, Net& net, const std::vector<Sample>& samples, LossFn sample_loss,
                     EvalFn evaluate, const TrainHooks& hooks) {
    nn::Rng sampler(arch::derive_seed(cfg.seed, "sampling"));
    nn::Adam<float> adam(nn::AdamConfig{cfg.learning_rate});
    TrainResult result;
    std::vector<TraceRecord> trace;
    double loss_sum = 0.0;
    int loss_count = 0;
    const float inv_batch = 1.0f / static_cast<float>(cfg.batch_size);

    auto snapshot = [&](std::int64_t step) {
        Checkpoint ckpt = capture(net, cfg.phase, cfg.seed);
        ckpt.step = step;
        ckpt.adam_step = adam.steps();
        ckpt.moments = adam.moments();
        ckpt.rng_state = sampler.serialize();
        ckpt.trace = trace;
        return ckpt;
    };

    std::int64_t step = 0;
    for (step = 1; step <= cfg.iterations; ++step) {
        std::vector<std::size_t> batch(static_cast<std::size_t>(cfg.batch_size));
        for (auto& i : batch) i = static_cast<std::size_t>(sampler.below(samples.size()));
        try {
            for (std::size_t i : batch) {
                nn::Var<float> loss = sample_loss(samples[i]);
                const float value = loss.item();
                if (!std::isfinite(value)) throw NumericalError("loss is " + std::to_string(value));
                loss_sum += value;
                ++loss_count;
                nn::backward(nn::scale(loss, inv_batch));
            }
        } catch (const NumericalError& e) {
            std::string ids;
            for (std::size_t i : batch) ids += (ids.empty() ? "" : ", ") + samples[i].id;
            throw NumericalError("non-finite value at step " + std::to_string(step) + " (batch: " + ids +
                                 "): " + e.what());
        }
        adam.step(net.params());
        net.params().zero_grad();

        if (step % cfg.eval_interval == 0) {
            Scores s;
            try {
                s = evaluate();
            } catch (const NumericalError& e) {
                throw NumericalError("non-finite value at step " + std::to_string(step) + " (evaluation): " + e.what());
            }
            TraceRecord rec{step, loss_sum / loss_count, s.rmse_shadow, s.rmse_nonshadow};
            trace.push_back(rec);
            loss_sum = 0.0;
            loss_count = 0;
            result.objective = s.objective;
            char line[200];
            std::snprintf(line, sizeof line, "step %lld loss %.6f objective %.6f rmse_shadow %.4f rmse_nonshadow %.4f",
                          static_cast<long long>(step), rec.loss, s.objective, s.rmse_shadow, s.rmse_nonshadow);
            log(hooks, line);
            if (hooks.on_eval) hooks.on_eval(rec, s.objective);
            if (cfg.stop_below > 0.0 && s.objective < cfg.stop_below) {
                log(hooks, "objective below " + std::to_string(cfg.stop_below) + ", stopping");
                result.stopped_early = true;
                break;
            }
        }
        if (cfg.checkpoint_interval > 0 && !cfg.output.empty() && step % cfg.checkpoint_interval == 0)
            save_checkpoint(snapshot(step), cfg.output);
    }
    if (!result.stopped_early) {
        --step;
        if (trace.empty() || trace.back().step != step) result.objective = evaluate().objective;
    }
    result.checkpoint = snapshot(step);
    return result;
}

}  // namespace

bool imb_compatible(const arch::ArchSpec& a, const arch::ArchSpec& b) {
    return a.base_channels == b.base_channels && a.resnet_blocks == b.resnet_blocks && a.input_size == b.input_size &&
           a.scale_divisor == b.scale_divisor;
}

TrainResult train_imb(const TrainConfig& cfg, const std::vector<imaging::Triplet>& data, const TrainHooks& hooks) {
    cfg.validate();
    if (cfg.phase != Phase::imb) throw ContractViolation("train_imb: config phase is not imb");
    const auto samples = prepare(data, cfg.arch.input_size);
    Net net(cfg.arch, cfg.aggregation, cfg.seed);
    for (auto& p : net.params().items()) p->set_frozen(!p->name().starts_with(model::kImbPrefix));

    auto sample_loss = [&](const Sample& s) {
        return nn::l1_loss(net.imb_forward(s.shadow_t).reconstruction, nn::Var<float>(s.shadow_t));
    };
    auto evaluate = [&] {
        nn::NoGradGuard no_grad;
        ScoreAccumulator acc;
        for (const auto& s : samples) {
            const imaging::Image pred = tensor_image(net.imb_forward(s.shadow_t).reconstruction.value());
            const double l1 = metrics::region_l1(pred, s.shadow, metrics::whole_region(pred.height, pred.width));
            acc.add(pred, s.shadow, s.mask, l1);
        }
        return acc.result();
    };
    return run_loop(cfg, net, samples, sample_loss, evaluate, hooks);
}

TrainResult train_idb(const TrainConfig& cfg, const std::vector<imaging::Triplet>& data, const Checkpoint& imb,
                      const TrainHooks& hooks) {
    cfg.validate();
    if (cfg.phase != Phase::idb) throw ContractViolation("train_idb: config phase is not idb");
    if (!imb_compatible(imb.arch, cfg.arch))
        throw DataError("identical-mapping checkpoint architecture does not match the training architecture:\n" +
                        arch::serialize(imb.arch) + "vs\n" + arch::serialize(cfg.arch));
    auto samples = prepare(data, cfg.arch.input_size);
    Net net(cfg.arch, cfg.aggregation, cfg.seed);
    apply_params(imb, net, model::kImbPrefix);
    net.set_imb_frozen(true);
    const std::uint64_t imb_before = params_digest(net.params(), model::kImbPrefix);
    {
        nn::NoGradGuard no_grad;
        for (auto& s : samples) s.taps = net.imb_forward(s.shadow_t).taps;
    }

    auto sample_loss = [&](const Sample& s) {
        const auto trace = net.idb_iterate(s.shadow_t, s.mask_t, s.taps, cfg.k_iterations, cfg.truncate_bptt);
        return nn::l1_loss(trace.final_output(), nn::Var<float>(s.target_t));
    };
    auto evaluate = [&] {
        nn::NoGradGuard no_grad;
        ScoreAccumulator acc;
        for (const auto& s : samples) {
            const auto trace = net.idb_iterate(s.shadow_t, s.mask_t, s.taps, cfg.k_iterations);
            const imaging::Image pred = tensor_image(trace.final_output().value());
            const double l1 = s.mask.count_on() > 0 ? metrics::region_l1(pred, s.shadow_free, s.mask) : std::nan("");
            acc.add(pred, s.shadow_free, s.mask, l1);
        }
        return acc.result();
    };
    TrainResult result = run_loop(cfg, net, samples, sample_loss, evaluate, hooks);
    if (params_digest(net.params(), model::kImbPrefix) != imb_before)
        throw ContractViolation("identical-mapping parameters changed during de-shadow training");
    return result;
}

}  // namespace deshadow::train
