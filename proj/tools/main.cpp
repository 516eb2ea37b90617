// toposeg: topology-aware segmentation evaluation toolkit.
//
// Subcommands:
//   eval       batch-evaluate predictions against ground-truth masks
//   topo       Betti numbers and Euler characteristic of a mask
//   probchi    soft Euler characteristic of a probability map
//   gradcheck  finite-difference verification of all analytic gradients
//   select     checkpoint selection from a mean-Dice / mean-PD log
//   synth      synthetic mask with known topology
//
// Exit codes: 0 success, 1 usage error, 2 I/O or format error,
//             3 invariant or gradcheck failure.

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "toposeg/batch_eval.hpp"
#include "toposeg/config.hpp"
#include "toposeg/gradcheck.hpp"
#include "toposeg/grid_topology.hpp"
#include "toposeg/io.hpp"
#include "toposeg/selection.hpp"
#include "toposeg/soft_euler.hpp"
#include "toposeg/synth.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitIo = 2;
constexpr int kExitInvariant = 3;

std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

struct EvalArgs {
    std::string pred_dir;
    std::string gt_dir;
    std::string out_path;
    std::string config_path;
    std::string json_out;
    double threshold = 0.0;
    bool threshold_set = false;
    int workers = 0;
    bool workers_set = false;
};

int run_eval(const EvalArgs& args) {
    toposeg::ToolConfig cfg;
    if (!args.config_path.empty()) {
        cfg = toposeg::parse_config_file(args.config_path);
    }
    if (args.threshold_set) {
        if (args.threshold <= 0.0 || args.threshold >= 1.0) {
            std::cerr << "eval: --threshold must lie strictly in (0,1)\n";
            return kExitUsage;
        }
        cfg.eval.threshold = args.threshold;
    }
    if (args.workers_set) {
        cfg.workers = args.workers;
    }

    toposeg::BatchOptions options;
    options.eval = cfg.eval;
    options.workers = cfg.workers;
    const toposeg::BatchResult result =
        toposeg::evaluate_directories(args.pred_dir, args.gt_dir, options);

    for (const toposeg::SampleFailure& f : result.failures) {
        std::cerr << "eval: sample '" << f.sample_id << "': " << f.message << "\n";
    }

    std::ofstream out(args.out_path);
    if (!out) {
        std::cerr << "eval: cannot open output file " << args.out_path << "\n";
        return kExitIo;
    }
    toposeg::write_metrics_csv(result, out);
    if (!out) {
        std::cerr << "eval: short write to " << args.out_path << "\n";
        return kExitIo;
    }

    if (!args.json_out.empty()) {
        std::ofstream jout(args.json_out);
        if (!jout) {
            std::cerr << "eval: cannot open output file " << args.json_out << "\n";
            return kExitIo;
        }
        toposeg::write_metrics_jsonl(result, jout);
    }
    return result.ok() ? kExitOk : kExitIo;
}

int run_topo(const std::string& mask_path) {
    const toposeg::BinaryMask mask = toposeg::read_mask(mask_path);
    const toposeg::BettiPair betti = toposeg::betti_numbers(mask);
    const int chi = toposeg::euler_characteristic(mask);
    std::cout << "beta0=" << betti.beta0 << " beta1=" << betti.beta1 << " chi=" << chi << "\n";
    return kExitOk;
}

int run_probchi(const std::string& pmap_path) {
    const toposeg::ProbMap p = toposeg::read_probmap(pmap_path);
    std::cout << "chi_soft=" << format_double(toposeg::soft_euler_char(p)) << "\n";
    return kExitOk;
}

int run_gradcheck(std::uint64_t seed, int instances, int grid_side) {
    const toposeg::GradCheckReport report =
        toposeg::run_gradchecks(seed, instances, grid_side, toposeg::kGradCheckTolerance);
    for (const toposeg::GradCheckEntry& e : report.entries) {
        std::cout << e.op << " max_rel_error=" << format_double(e.max_rel_error)
                  << " instances=" << e.instances << "\n";
    }
    if (!report.passed()) {
        std::cerr << "gradcheck: '" << report.first_failure() << "' exceeds tolerance "
                  << format_double(report.tolerance) << "\n";
        return kExitInvariant;
    }
    std::cout << "all gradients within " << format_double(report.tolerance) << "\n";
    return kExitOk;
}

int run_select(const std::string& log_path, int k, const std::string& config_path) {
    int effective_k = k;
    if (effective_k <= 0) {
        toposeg::ToolConfig cfg;
        if (!config_path.empty()) {
            cfg = toposeg::parse_config_file(config_path);
        }
        effective_k = cfg.select_k;
    }
    const std::vector<toposeg::CheckpointEntry> entries = toposeg::read_checkpoint_log(log_path);
    std::cout << toposeg::select_checkpoint(entries, effective_k) << "\n";
    return kExitOk;
}

int run_synth(const toposeg::SynthSpec& spec, const std::string& out_path) {
    const toposeg::BinaryMask mask = toposeg::synth_mask(spec);
    toposeg::write_mask(mask, out_path);
    const toposeg::BettiPair betti = toposeg::betti_numbers(mask);
    std::cout << "wrote " << out_path << " beta0=" << betti.beta0 << " beta1=" << betti.beta1
              << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"toposeg: topology-aware segmentation evaluation toolkit"};
    app.require_subcommand(1);

    EvalArgs eval_args;
    CLI::App* eval = app.add_subcommand("eval", "Evaluate a directory of predictions");
    eval->add_option("--pred", eval_args.pred_dir, "Directory of predictions (*.pmap or *.pgm)")
        ->required();
    eval->add_option("--gt", eval_args.gt_dir, "Directory of ground-truth masks (*.pgm)")
        ->required();
    eval->add_option("--out", eval_args.out_path, "Output CSV path")->required();
    eval->add_option("--config", eval_args.config_path, "key=value config file");
    eval->add_option("--json-out", eval_args.json_out, "Optional JSON-lines output path");
    eval->add_option("--threshold", eval_args.threshold, "Probability threshold override")
        ->each([&eval_args](const std::string&) { eval_args.threshold_set = true; });
    eval->add_option("--workers", eval_args.workers, "Worker thread count override")
        ->check(CLI::PositiveNumber)
        ->each([&eval_args](const std::string&) { eval_args.workers_set = true; });

    std::string topo_path;
    CLI::App* topo = app.add_subcommand("topo", "Print beta0, beta1 and chi of a PGM mask");
    topo->add_option("mask", topo_path, "Mask file (PGM P5)")->required();

    std::string probchi_path;
    CLI::App* probchi =
        app.add_subcommand("probchi", "Print the soft Euler characteristic of a PMAP1 file");
    probchi->add_option("probmap", probchi_path, "Probability map file (PMAP1)")->required();

    std::uint64_t gc_seed = 42;
    int gc_instances = 100;
    int gc_side = 8;
    CLI::App* gradcheck = app.add_subcommand("gradcheck", "Verify analytic gradients");
    gradcheck->add_option("--seed", gc_seed, "Random seed");
    gradcheck->add_option("--instances", gc_instances, "Instances per operation")
        ->check(CLI::PositiveNumber);
    gradcheck->add_option("--size", gc_side, "Grid side length")->check(CLI::PositiveNumber);

    std::string select_log;
    int select_k = 0;
    std::string select_config;
    CLI::App* select = app.add_subcommand("select", "Pick a checkpoint from a CSV log");
    select->add_option("log", select_log, "CSV log (checkpoint_id,mean_dice,mean_pd)")
        ->required();
    select->add_option("--k", select_k, "Top-K size (default from config, else 5)")
        ->check(CLI::PositiveNumber);
    select->add_option("--config", select_config, "key=value config file");

    toposeg::SynthSpec synth_spec;
    synth_spec.height = 64;
    synth_spec.width = 64;
    synth_spec.n_blobs = 3;
    synth_spec.n_holes = 1;
    std::string synth_out;
    CLI::App* synth = app.add_subcommand("synth", "Generate a mask with known topology");
    synth->add_option("--out", synth_out, "Output PGM path")->required();
    synth->add_option("--seed", synth_spec.seed, "Random seed");
    synth->add_option("--height", synth_spec.height, "Grid height")->check(CLI::PositiveNumber);
    synth->add_option("--width", synth_spec.width, "Grid width")->check(CLI::PositiveNumber);
    synth->add_option("--blobs", synth_spec.n_blobs, "Component count")
        ->check(CLI::NonNegativeNumber);
    synth->add_option("--holes", synth_spec.n_holes, "Hole count")
        ->check(CLI::NonNegativeNumber);
    synth->add_option("--min-gap", synth_spec.min_gap, "Minimum background gap between blobs");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (eval->parsed()) {
            return run_eval(eval_args);
        }
        if (topo->parsed()) {
            return run_topo(topo_path);
        }
        if (probchi->parsed()) {
            return run_probchi(probchi_path);
        }
        if (gradcheck->parsed()) {
            return run_gradcheck(gc_seed, gc_instances, gc_side);
        }
        if (select->parsed()) {
            return run_select(select_log, select_k, select_config);
        }
        if (synth->parsed()) {
            return run_synth(synth_spec, synth_out);
        }
    } catch (const toposeg::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const toposeg::SynthCapacityError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::logic_error& e) {
        std::cerr << "invariant violation: " << e.what() << "\n";
        return kExitInvariant;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
    return kExitUsage;
}
