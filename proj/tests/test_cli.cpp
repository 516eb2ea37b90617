// End-to-end tests driving the installed CLI binary as a subprocess.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <random>

#include "test_support.hpp"
#include "toposeg/io.hpp"
#include "toposeg/metrics.hpp"
#include "toposeg/synth.hpp"

using namespace toposeg;
using test_support::read_text_file;
using test_support::ring_mask;
using test_support::run_cli;
using test_support::TempDir;

TEST_CASE("cli topo prints beta0, beta1 and chi") {
    const TempDir dir("cli_topo");
    const auto ring_path = dir.path() / "ring.pgm";
    write_mask(ring_mask(), ring_path);

    const auto ring = run_cli("topo " + ring_path.string());
    CHECK(ring.exit_code == 0);
    CHECK(ring.output == "beta0=1 beta1=1 chi=0\n");

    const auto empty_path = dir.path() / "empty.pgm";
    write_mask(BinaryMask(4, 4), empty_path);
    const auto empty = run_cli("topo " + empty_path.string());
    CHECK(empty.exit_code == 0);
    CHECK(empty.output == "beta0=0 beta1=0 chi=0\n");
}

TEST_CASE("cli probchi pipes the soft Euler characteristic through the codec") {
    const TempDir dir("cli_probchi");
    const auto path = dir.path() / "half.pmap";
    write_probmap(ProbMap(2, 2, {0.5, 0.5, 0.5, 0.5}), path);
    const auto result = run_cli("probchi " + path.string());
    CHECK(result.exit_code == 0);
    CHECK(result.output == "chi_soft=1.0625\n");

    // Feeding a mask where a probability map is expected is a format error.
    const auto mask_path = dir.path() / "mask.pgm";
    write_mask(BinaryMask(2, 2), mask_path);
    CHECK(run_cli("probchi " + mask_path.string()).exit_code == 2);
}

TEST_CASE("cli select reproduces the worked example") {
    const TempDir dir("cli_select");
    const auto log = dir.path() / "log.csv";
    {
        std::ofstream out(log);
        out << "checkpoint_id,mean_dice,mean_pd\nA,0.50,0.30\nB,0.52,0.28\nC,0.51,0.25\n";
    }
    const auto top2 = run_cli("select " + log.string() + " --k 2");
    CHECK(top2.exit_code == 0);
    CHECK(top2.output == "C\n");

    const auto top1 = run_cli("select " + log.string() + " --k 1");
    CHECK(top1.output == "B\n");

    // k beyond the row count degenerates to global min pd.
    const auto top99 = run_cli("select " + log.string() + " --k 99");
    CHECK(top99.output == "C\n");

    const auto dup = dir.path() / "dup.csv";
    {
        std::ofstream out(dup);
        out << "checkpoint_id,mean_dice,mean_pd\nA,0.50,0.30\nA,0.52,0.28\n";
    }
    const auto rejected = run_cli("select " + dup.string() + " --k 2");
    CHECK(rejected.exit_code == 2);
    CHECK(rejected.error.find("duplicate") != std::string::npos);
}

TEST_CASE("cli gradcheck exits zero and reports every operation") {
    const auto result = run_cli("gradcheck --seed 7 --instances 10");
    CHECK(result.exit_code == 0);
    for (const char* op : {"soft_euler_char", "soft_euler_loss", "tv_loss", "dice_loss",
                           "bce_loss", "poincare_distance", "contrastive_loss"}) {
        CHECK(result.output.find(op) != std::string::npos);
    }
}

TEST_CASE("cli synth then topo round-trips the requested topology") {
    const TempDir dir("cli_synth");
    const auto path = dir.path() / "synth.pgm";
    const auto synth =
        run_cli("synth --out " + path.string() + " --seed 9 --blobs 4 --holes 2");
    CHECK(synth.exit_code == 0);
    const auto topo = run_cli("topo " + path.string());
    CHECK(topo.output == "beta0=4 beta1=2 chi=2\n");
}

TEST_CASE("cli eval: self-evaluation gives perfect rows; errors exit nonzero") {
    const TempDir dir("cli_eval");
    const auto pred_dir = dir.path() / "pred";
    const auto gt_dir = dir.path() / "gt";
    std::filesystem::create_directories(pred_dir);
    std::filesystem::create_directories(gt_dir);
    for (int i = 0; i < 4; ++i) {
        const BinaryMask m = synth_mask({.seed = static_cast<std::uint64_t>(40 + i),
                                         .height = 24, .width = 24,
                                         .n_blobs = 1 + i % 2, .n_holes = i % 2,
                                         .min_gap = 2});
        const std::string name = "s" + std::to_string(i) + ".pgm";
        write_mask(m, pred_dir / name);
        write_mask(m, gt_dir / name);
    }

    const auto out_csv = dir.path() / "out.csv";
    const auto ok = run_cli("eval --pred " + pred_dir.string() + " --gt " + gt_dir.string() +
                            " --out " + out_csv.string());
    CHECK(ok.exit_code == 0);
    const std::string csv = read_text_file(out_csv);
    CHECK(csv.rfind("sample_id,dice,iou,bf1,d_beta0,d_beta1,pd_dist\n", 0) == 0);
    for (int i = 0; i < 4; ++i) {
        CHECK(csv.find("s" + std::to_string(i) + ",1,1,1,0,0,0\n") != std::string::npos);
    }
    CHECK(csv.find("mean,1,1,1,0,0,0\n") != std::string::npos);
    CHECK(csv.find("median,1,1,1,0,0,0\n") != std::string::npos);

    // JSON-lines sidecar.
    const auto out_jsonl = dir.path() / "out.jsonl";
    const auto with_json =
        run_cli("eval --pred " + pred_dir.string() + " --gt " + gt_dir.string() + " --out " +
                out_csv.string() + " --json-out " + out_jsonl.string());
    CHECK(with_json.exit_code == 0);
    const std::string jsonl = read_text_file(out_jsonl);
    CHECK(jsonl.find("\"sample_id\":\"s0\"") != std::string::npos);
    CHECK(jsonl.find("\"sample_id\":\"mean\"") != std::string::npos);

    // Missing ground truth: reported on stderr, nonzero exit, others evaluated.
    write_mask(BinaryMask(4, 4), pred_dir / "extra.pgm");
    const auto missing = run_cli("eval --pred " + pred_dir.string() + " --gt " +
                                 gt_dir.string() + " --out " + out_csv.string());
    CHECK(missing.exit_code == 2);
    CHECK(missing.error.find("extra") != std::string::npos);
    CHECK(read_text_file(out_csv).find("s0,1,1,1,0,0,0\n") != std::string::npos);

    // Empty intersection.
    const auto empty_dir = dir.path() / "none";
    std::filesystem::create_directories(empty_dir);
    const auto empty = run_cli("eval --pred " + empty_dir.string() + " --gt " +
                               gt_dir.string() + " --out " + out_csv.string());
    CHECK(empty.exit_code == 2);
}

TEST_CASE("cli eval is byte-deterministic across worker counts") {
    const TempDir dir("cli_workers");
    const auto pred_dir = dir.path() / "pred";
    const auto gt_dir = dir.path() / "gt";
    std::filesystem::create_directories(pred_dir);
    std::filesystem::create_directories(gt_dir);

    std::mt19937_64 rng(505);
    for (int i = 0; i < 10; ++i) {
        const std::string id = "t" + std::to_string(i);
        const BinaryMask gt = synth_mask({.seed = static_cast<std::uint64_t>(i), .height = 28,
                                          .width = 28, .n_blobs = 1 + i % 3, .n_holes = i % 2,
                                          .min_gap = 2});
        write_mask(gt, gt_dir / (id + ".pgm"));
        ProbMap pred(28, 28);
        for (int r = 0; r < 28; ++r) {
            for (int c = 0; c < 28; ++c) {
                const double base = gt.at(r, c) ? 0.8 : 0.15;
                pred.set(r, c,
                         static_cast<double>(static_cast<float>(
                             base + 0.1 * (test_support::uniform01(rng) - 0.5))));
            }
        }
        write_probmap(pred, pred_dir / (id + ".pmap"));
    }

    const auto csv1 = dir.path() / "w1.csv";
    const auto csv8 = dir.path() / "w8.csv";
    CHECK(run_cli("eval --pred " + pred_dir.string() + " --gt " + gt_dir.string() + " --out " +
                  csv1.string() + " --workers 1")
              .exit_code == 0);
    CHECK(run_cli("eval --pred " + pred_dir.string() + " --gt " + gt_dir.string() + " --out " +
                  csv8.string() + " --workers 8")
              .exit_code == 0);
    const std::string a = read_text_file(csv1);
    CHECK(!a.empty());
    CHECK(a == read_text_file(csv8));
}

TEST_CASE("cli exit codes: usage and format errors") {
    CHECK(run_cli("").exit_code == 1);
    CHECK(run_cli("unknown-subcommand").exit_code == 1);
    CHECK(run_cli("topo").exit_code == 1);
    CHECK(run_cli("topo /nonexistent/path.pgm").exit_code == 2);
    CHECK(run_cli("--help").exit_code == 0);

    const TempDir dir("cli_codes");
    const auto junk = dir.path() / "junk.pgm";
    {
        std::ofstream out(junk);
        out << "not a pgm";
    }
    CHECK(run_cli("topo " + junk.string()).exit_code == 2);

    // Explicit but invalid overrides are usage errors, never silently ignored.
    const auto d = dir.path() / "d";
    std::filesystem::create_directories(d);
    CHECK(run_cli("eval --pred " + d.string() + " --gt " + d.string() + " --out " +
                  (dir.path() / "o.csv").string() + " --threshold 1.5")
              .exit_code == 1);
    CHECK(run_cli("eval --pred " + d.string() + " --gt " + d.string() + " --out " +
                  (dir.path() / "o.csv").string() + " --workers 0")
              .exit_code == 1);
}
