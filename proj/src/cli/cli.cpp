// SPDX-License-Identifier: Apache-2.0
#include "deshadow/cli/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "deshadow/diag/diagnostics.hpp"
#include "deshadow/error.hpp"
#include "deshadow/imaging/dataset.hpp"
#include "deshadow/imaging/ops.hpp"
#include "deshadow/imaging/png_io.hpp"
#include "deshadow/imaging/synth.hpp"
#include "deshadow/metrics/metrics.hpp"
#include "deshadow/train/checkpoint.hpp"
#include "deshadow/train/inference.hpp"
#include "deshadow/train/trainer.hpp"

namespace deshadow::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kDataEnv = "DESHADOW_DATA_ROOT";

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

std::string unquote(std::string v) {
    if (v.size() >= 2 && (v.front() == '"' || v.front() == '\'') && v.back() == v.front()) v = v.substr(1, v.size() - 2);
    return v;
}

std::string read_text(const fs::path& path) {
    std::ifstream is(path);
    if (!is) throw DataError("cannot open '" + path.string() + "'");
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

void write_text(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream os(path);
    if (!os) throw DataError("cannot open '" + path.string() + "' for writing");
    os << text;
}

// Lines of "key = value" become a prefixed block on the log stream.
void log_block(std::ostream& err, const std::string& title, const std::string& text) {
    err << "# " << title << '\n';
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line))
        if (!line.empty()) err << "#   " << line << '\n';
}

std::map<std::string, fs::path> list_stems(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw DataError("'" + dir.string() + "' is not a directory");
    std::map<std::string, fs::path> out;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".png")
            out.emplace(entry.path().stem().string(), entry.path());
    return out;
}

// ---------------------------------------------------------------- options

struct ArchFlags {
    int base_channels, resnet_blocks, input_size, scale_divisor;
    std::string sites;
    std::vector<CLI::Option*> shape_options;

    void add(CLI::App* app) {
        const arch::ArchSpec desk = arch::ArchSpec::desk();
        base_channels = desk.base_channels;
        resnet_blocks = desk.resnet_blocks;
        input_size = desk.input_size;
        scale_divisor = desk.scale_divisor;
        sites = arch::format_sites(desk.sab_sites);
        shape_options = {
            app->add_option("--base-channels", base_channels, "Channels of the first layer before scaling"),
            app->add_option("--resnet-blocks", resnet_blocks, "Residual blocks in each branch"),
            app->add_option("--input-size", input_size, "Square working resolution"),
            app->add_option("--scale-divisor", scale_divisor, "Divides every channel count"),
        };
        app->add_option("--sab-sites", sites, "Aggregation sites, e.g. 1,3,L-1");
    }
    bool shape_given() const {
        return std::any_of(shape_options.begin(), shape_options.end(), [](CLI::Option* o) { return o->count() > 0; });
    }
    arch::ArchSpec spec() const {
        arch::ArchSpec s{base_channels, resnet_blocks, input_size, scale_divisor, arch::parse_sites(sites)};
        s.validate();
        return s;
    }
};

struct TrainFlags {
    train::TrainConfig cfg;
    ArchFlags arch;
    std::string aggregation = "sab";
    std::string layout = "istd";
    std::string trace_path;

    void add(CLI::App* app, train::Phase phase) {
        cfg.phase = phase;
        if (phase == train::Phase::idb) cfg.iterations = 30000;
        app->add_option("--data", cfg.data_root, "Dataset root (istd layout)")->envname(kDataEnv)->required();
        app->add_option("--layout", layout, "Dataset layout: istd or srd");
        app->add_option("--output", cfg.output, "Checkpoint path")->required();
        app->add_option("--iterations", cfg.iterations, "Optimizer steps");
        app->add_option("--batch-size", cfg.batch_size, "Samples per step");
        app->add_option("--lr", cfg.learning_rate, "Adam learning rate");
        app->add_option("--eval-interval", cfg.eval_interval, "Steps between train-set evaluations");
        app->add_option("--seed", cfg.seed, "Initialization and sampling seed");
        app->add_option("--aggregation", aggregation, "sab, add, mul, concat or sab_no_softmask");
        app->add_option("--checkpoint-interval", cfg.checkpoint_interval, "Steps between checkpoint writes (0: end only)");
        app->add_option("--stop-below", cfg.stop_below, "Stop once the train-set objective is below this value");
        app->add_option("--trace", trace_path, "Trace file (default: <output>.trace.tsv)");
        if (phase == train::Phase::idb) {
            app->add_option("--imb-checkpoint", cfg.imb_checkpoint, "Checkpoint from train-imb")->required();
            app->add_option("--k", cfg.k_iterations, "Refinement passes");
            app->add_flag("--truncate-bptt", cfg.truncate_bptt, "Backpropagate through the last pass only");
        }
        arch.add(app);
    }
};

// ---------------------------------------------------------------- commands

int cmd_synth(const fs::path& out_dir, int count, int size, std::uint64_t seed, double darkening, double softness,
              std::ostream& out) {
    if (count < 0 || size < 1) throw UsageError("synth: --count must be >= 0 and --size >= 1");
    if (!(darkening >= 0.0 && darkening < 1.0)) throw UsageError("synth: --darkening must lie in [0, 1)");
    if (!(softness >= 0.0)) throw UsageError("synth: --softness must be non-negative");
    const auto data = imaging::synth_dataset(seed, count, size, darkening, softness);
    imaging::write_istd(out_dir, data);
    out << "wrote " << data.size() << " triplets to " << out_dir.string() << '\n';
    return kOk;
}

int cmd_train(TrainFlags& f, std::ostream& out, std::ostream& err) {
    train::TrainConfig& cfg = f.cfg;
    cfg.aggregation = model::parse_aggregation(f.aggregation);
    cfg.layout = imaging::parse_layout(f.layout);
    std::optional<train::Checkpoint> imb;
    if (cfg.phase == train::Phase::idb) {
        imb = train::load_checkpoint(cfg.imb_checkpoint);
        if (imb->phase != train::Phase::imb)
            throw DataError("'" + cfg.imb_checkpoint + "' is not an identical-mapping checkpoint");
        cfg.arch = f.arch.spec();
        if (!f.arch.shape_given()) {
            const auto sites = cfg.arch.sab_sites;
            cfg.arch = imb->arch;
            cfg.arch.sab_sites = sites;
        }
    } else {
        cfg.arch = f.arch.spec();
    }
    cfg.validate();
    log_block(err, "resolved config", train::serialize(cfg));

    const auto data = imaging::load_dataset(cfg.data_root, cfg.layout);
    err << "# dataset: " << data.size() << " triplets from " << cfg.data_root << '\n';
    train::TrainHooks hooks;
    hooks.log = [&err](const std::string& line) { err << "[train] " << line << std::endl; };
    const train::TrainResult result =
        cfg.phase == train::Phase::imb ? train::train_imb(cfg, data, hooks) : train::train_idb(cfg, data, *imb, hooks);

    train::save_checkpoint(result.checkpoint, cfg.output);
    write_text(cfg.output + ".cfg", train::serialize(cfg));
    const std::string trace_path = f.trace_path.empty() ? cfg.output + ".trace.tsv" : f.trace_path;
    write_text(trace_path, train::format_trace(result.checkpoint.trace));
    out << "phase " << train::to_string(cfg.phase) << ": " << result.checkpoint.step << " steps, objective "
        << result.objective << (result.stopped_early ? " (stopped early)" : "") << ", checkpoint " << cfg.output
        << '\n';
    return kOk;
}

int cmd_infer(const std::string& ckpt_path, const std::string& data_root, const fs::path& out_dir, int k,
              bool emit_soft_masks, bool emit_trace, std::ostream& out, std::ostream& err) {
    if (k < 1) throw UsageError("infer: --k must be at least 1");
    const train::Checkpoint ckpt = train::load_checkpoint(ckpt_path);
    if (ckpt.phase != train::Phase::idb) err << "# note: checkpoint is from phase imb; the de-shadow branch is untrained\n";
    const auto net = train::build_network(ckpt);
    const auto data = imaging::load_dataset(data_root, imaging::Layout::istd, false);
    if (emit_soft_masks && !model::has_gate(net.mode()))
        err << "# note: aggregation mode " << model::to_string(net.mode()) << " has no soft masks\n";
    fs::create_directories(out_dir);
    for (const auto& t : data) {
        const auto r = train::restore(net, t.shadow, t.mask, k);
        imaging::write_png(out_dir / (t.id + ".png"), r.passes.back());
        for (int pass = 0; pass < k; ++pass) {
            const std::string tag = t.id + "_k" + std::to_string(pass + 1);
            if (emit_trace) {
                fs::create_directories(out_dir / "trace");
                imaging::write_png(out_dir / "trace" / (tag + ".png"), r.passes[static_cast<std::size_t>(pass)]);
            }
            if (emit_soft_masks) {
                const auto& masks = r.soft_masks[static_cast<std::size_t>(pass)];
                for (std::size_t s = 0; s < masks.size(); ++s) {
                    fs::create_directories(out_dir / "soft_masks");
                    const std::string name = tag + "_site" + std::to_string(net.sites()[s]) + ".png";
                    imaging::write_png(out_dir / "soft_masks" / name, masks[s]);
                }
            }
        }
    }
    out << "restored " << data.size() << " images into " << out_dir.string() << '\n';
    return kOk;
}

int cmd_eval(const fs::path& pred_dir, const fs::path& gt_dir, const std::string& mask_dir,
             const std::string& shadow_dir, const std::string& convention_name, const std::string& json_path,
             std::ostream& out) {
    if (mask_dir.empty() == shadow_dir.empty())
        throw UsageError("eval: give exactly one of --mask (mask folder) or --shadow (derive masks with Otsu)");
    const auto convention = metrics::parse_convention(convention_name);
    const auto gts = list_stems(gt_dir);
    const auto preds = list_stems(pred_dir);
    const auto masks = list_stems(mask_dir.empty() ? shadow_dir : mask_dir);
    if (gts.empty()) throw DataError("eval: no PNG files in '" + gt_dir.string() + "'");

    std::vector<metrics::NamedReport> rows;
    std::string resolution;
    for (const auto& [stem, gt_path] : gts) {
        const auto pred_it = preds.find(stem);
        if (pred_it == preds.end()) throw DataError("eval: no prediction for '" + gt_path.string() + "'");
        const auto mask_it = masks.find(stem);
        if (mask_it == masks.end())
            throw DataError("eval: no " + std::string(mask_dir.empty() ? "shadow image" : "mask") + " for '" +
                            gt_path.string() + "'");
        const imaging::Image gt = imaging::read_png(gt_path);
        const imaging::Image pred = imaging::read_png(pred_it->second);
        if (!pred.same_size(gt.height, gt.width))
            throw DataError("eval: '" + pred_it->second.string() + "' and '" + gt_path.string() + "' differ in size");
        const imaging::ShadowMask mask = mask_dir.empty()
                                             ? imaging::otsu_mask(imaging::read_png(mask_it->second), gt)
                                             : imaging::read_mask_png(mask_it->second);
        if (!mask.same_size(gt.height, gt.width)) throw DataError("eval: mask for '" + stem + "' differs in size");
        const std::string res = std::to_string(gt.height) + "x" + std::to_string(gt.width);
        if (resolution.empty())
            resolution = res;
        else if (resolution != res)
            resolution = "mixed";
        rows.push_back({stem, metrics::evaluate(pred, gt, mask, convention)});
    }
    out << "# resolution " << resolution << ", convention " << metrics::to_string(convention) << ", masks "
        << (mask_dir.empty() ? "otsu" : "given") << '\n'
        << metrics::format_table(rows, convention);
    if (!json_path.empty()) {
        std::string text;
        for (const auto& row : rows) text += metrics::json_line(row, convention) + '\n';
        std::vector<metrics::RegionReport> all;
        for (const auto& row : rows) all.push_back(row.report);
        text += metrics::json_line({"mean", metrics::mean_report(all)}, convention) + '\n';
        write_text(json_path, text);
    }
    return kOk;
}

int cmd_diagnose(const std::string& ckpt_path, const std::string& trace_path, const std::string& data_root, int k_max,
                 double epsilon, const std::string& out_dir, std::ostream& out, std::ostream& err) {
    if (ckpt_path.empty() && trace_path.empty()) throw UsageError("diagnose: give --checkpoint and/or --trace");
    std::optional<train::Checkpoint> ckpt;
    if (!ckpt_path.empty()) ckpt = train::load_checkpoint(ckpt_path);
    const diag::RmseTrace trace = trace_path.empty() ? ckpt->trace : train::parse_trace(read_text(trace_path));

    std::string interference_text;
    if (trace.size() >= 2 || !trace_path.empty()) {
        const auto mi = diag::mutual_interference(trace, epsilon);
        interference_text = diag::format_interference(mi, trace.size(), epsilon);
        out << "# mutual interference\n" << interference_text;
    } else {
        err << "# note: checkpoint trace has " << trace.size() << " record(s); mutual interference needs two\n";
    }

    std::vector<diag::SweepRow> sweep;
    if (ckpt && !data_root.empty()) {
        if (k_max < 1) throw UsageError("diagnose: --k-max must be at least 1");
        const auto net = train::build_network(*ckpt);
        sweep = diag::iteration_sweep(net, imaging::load_dataset(data_root), k_max);
        out << "# iteration sweep\n" << diag::format_sweep(sweep);
    }
    if (!out_dir.empty()) {
        const fs::path dir(out_dir);
        if (!interference_text.empty()) write_text(dir / "interference.tsv", interference_text);
        if (!trace.empty()) write_text(dir / "trace_plot.dat", diag::trace_plot_data(trace));
        if (!sweep.empty()) {
            write_text(dir / "sweep.tsv", diag::format_sweep(sweep));
            write_text(dir / "sweep_plot.dat", diag::sweep_plot_data(sweep));
        }
    }
    return kOk;
}

}  // namespace

std::vector<std::string> expand_config(const std::vector<std::string>& args) {
    std::vector<std::string> rest;
    std::string config_path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size()) throw UsageError("--config needs a file argument");
            config_path = args[++i];
        } else if (args[i].starts_with("--config=")) {
            config_path = args[i].substr(9);
        } else {
            rest.push_back(args[i]);
        }
    }
    if (config_path.empty()) return rest;

    auto given = [&rest](const std::string& key) {
        return std::any_of(rest.begin(), rest.end(),
                           [&](const std::string& a) { return a == "--" + key || a.starts_with("--" + key + "="); });
    };
    const std::string phase = rest.empty() ? "" : rest.front() == "train-imb" ? "imb" : rest.front() == "train-idb" ? "idb" : "";
    std::istringstream is(read_text(config_path));
    std::string line;
    std::vector<std::string> extra;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty() || line.front() == '#' || line.front() == ';' || line.front() == '[') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw UsageError(config_path + ":" + std::to_string(lineno) + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = unquote(trim(line.substr(eq + 1)));
        if (key == "phase") {
            if (!phase.empty() && value != phase)
                throw UsageError(config_path + ": phase '" + value + "' does not match subcommand " + rest.front());
            continue;
        }
        if (value.empty() || value == "false" || given(key)) continue;
        extra.push_back(value == "true" ? "--" + key : "--" + key + "=" + value);
    }
    rest.insert(rest.end(), extra.begin(), extra.end());
    return rest;
}

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
    CLI::App app("Dual-branch single-image shadow removal: training, inference, evaluation, diagnostics.", "deshadow");
    app.require_subcommand(1);
    app.option_defaults()->always_capture_default();
    // --config is consumed by expand_config; registered here for --help only.
    std::string config_doc;
    app.add_option("--config", config_doc, "Key-value file of flag defaults (\"key = value\" per line)");

    // synth
    auto* synth = app.add_subcommand("synth", "Write a synthetic dataset in the istd layout");
    std::string synth_out;
    int synth_count = 4, synth_size = 64;
    std::uint64_t synth_seed = 0;
    double darkening = 0.5, softness = 1.0;
    synth->add_option("--out", synth_out, "Output dataset root")->required();
    synth->add_option("--count", synth_count, "Number of triplets");
    synth->add_option("--size", synth_size, "Square image size");
    synth->add_option("--seed", synth_seed, "Generator seed");
    synth->add_option("--darkening", darkening, "Shadow attenuation in [0, 1)");
    synth->add_option("--softness", softness, "Gaussian sigma of the shadow edge, pixels");

    // train
    auto* train_imb = app.add_subcommand("train-imb", "Phase 1: train the identical-mapping branch");
    auto* train_idb = app.add_subcommand("train-idb", "Phase 2: train the de-shadow branch with a frozen phase-1 branch");
    TrainFlags imb_flags, idb_flags;
    imb_flags.add(train_imb, train::Phase::imb);
    idb_flags.add(train_idb, train::Phase::idb);

    // infer
    auto* infer = app.add_subcommand("infer", "Remove shadows from an istd-layout folder (shadow images and masks)");
    std::string infer_ckpt, infer_data, infer_out;
    int infer_k = 4;
    bool emit_soft = false, emit_trace = false;
    infer->add_option("--checkpoint", infer_ckpt, "Phase-2 checkpoint")->required();
    infer->add_option("--data", infer_data, "Input root (istd layout; *_C optional)")->envname(kDataEnv)->required();
    infer->add_option("--out", infer_out, "Output folder")->required();
    infer->add_option("--k", infer_k, "Refinement passes");
    infer->add_flag("--emit-soft-masks", emit_soft, "Also write every soft mask as an 8-bit image");
    infer->add_flag("--emit-trace", emit_trace, "Also write the output of every pass");

    // eval
    auto* eval = app.add_subcommand("eval", "Region metrics of predictions against ground truth");
    std::string pred_dir, gt_dir, mask_dir, shadow_dir, convention = "rmse-lab", json_path;
    eval->add_option("--pred", pred_dir, "Folder of predicted PNGs")->required();
    eval->add_option("--gt", gt_dir, "Folder of shadow-free PNGs")->required();
    eval->add_option("--mask", mask_dir, "Folder of binary mask PNGs");
    eval->add_option("--shadow", shadow_dir, "Folder of shadow PNGs; masks are derived with Otsu's method");
    eval->add_option("--metric-convention", convention, "rmse-lab or mae-lab");
    eval->add_option("--json", json_path, "Write one JSON record per image plus a 'mean' record");

    // diagnose
    auto* diagnose = app.add_subcommand("diagnose", "Mutual-interference ratio and iteration sweep");
    std::string diag_ckpt, diag_trace, diag_data, diag_out;
    int k_max = 4;
    double epsilon = 1e-6;
    diagnose->add_option("--checkpoint", diag_ckpt, "Trained checkpoint (trace source and sweep model)");
    diagnose->add_option("--trace", diag_trace, "Trace file; overrides the checkpoint trace");
    diagnose->add_option("--data", diag_data, "Dataset root for the iteration sweep")->envname(kDataEnv);
    diagnose->add_option("--k-max", k_max, "Largest pass count in the sweep");
    diagnose->add_option("--epsilon", epsilon, "Deltas at most this large count as no change");
    diagnose->add_option("--out", diag_out, "Folder for tables and plot data");

    try {
        const std::vector<std::string> args = expand_config(raw_args);
        std::vector<std::string> storage{"deshadow"};
        storage.insert(storage.end(), args.begin(), args.end());
        std::vector<char*> argv;
        for (auto& s : storage) argv.push_back(s.data());
        try {
            app.parse(static_cast<int>(argv.size()), argv.data());
        } catch (const CLI::CallForHelp&) {
            out << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
            return kOk;
        } catch (const CLI::CallForAllHelp&) {
            out << app.help("", CLI::AppFormatMode::All);
            return kOk;
        } catch (const CLI::ParseError& e) {
            throw UsageError(e.what());
        }

        CLI::App* sub = app.get_subcommands().front();
        if (sub != train_imb && sub != train_idb) log_block(err, "resolved options", sub->config_to_str(true, false));

        if (sub == synth) return cmd_synth(synth_out, synth_count, synth_size, synth_seed, darkening, softness, out);
        if (sub == train_imb) return cmd_train(imb_flags, out, err);
        if (sub == train_idb) return cmd_train(idb_flags, out, err);
        if (sub == infer) return cmd_infer(infer_ckpt, infer_data, infer_out, infer_k, emit_soft, emit_trace, out, err);
        if (sub == eval) return cmd_eval(pred_dir, gt_dir, mask_dir, shadow_dir, convention, json_path, out);
        return cmd_diagnose(diag_ckpt, diag_trace, diag_data, k_max, epsilon, diag_out, out, err);
    } catch (const UsageError& e) {
        err << "error[usage]: " << e.what() << '\n';
        return kUsage;
    } catch (const ContractViolation& e) {
        err << "error[usage]: " << e.what() << '\n';
        return kUsage;
    } catch (const NumericalError& e) {
        err << "error[numerical]: " << e.what() << '\n';
        return kNumerical;
    } catch (const DataError& e) {
        err << "error[data]: " << e.what() << '\n';
        return kData;
    } catch (const fs::filesystem_error& e) {
        err << "error[data]: " << e.what() << '\n';
        return kData;
    }
}

}  // namespace deshadow::cli
