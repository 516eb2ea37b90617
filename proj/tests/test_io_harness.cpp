#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>

#include "test_support.hpp"
#include "toposeg/batch_eval.hpp"
#include "toposeg/config.hpp"
#include "toposeg/grid_topology.hpp"
#include "toposeg/io.hpp"
#include "toposeg/selection.hpp"
#include "toposeg/synth.hpp"

using namespace toposeg;
using test_support::random_mask;
using test_support::random_probmap;
using test_support::TempDir;

namespace {

void write_bytes(const std::filesystem::path& p, const std::string& bytes) {
    std::ofstream out(p, std::ios::binary);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace

TEST_CASE("pgm: round trip and header parsing") {
    const TempDir dir("pgm");
    std::mt19937_64 rng(401);
    const BinaryMask m = random_mask(rng, 13, 7, 0.5);
    const auto path = dir.path() / "m.pgm";
    write_mask(m, path);
    CHECK(read_mask(path) == m);

    // Header written as "P5 3 3 255" with 9 foreground bytes.
    const auto manual = dir.path() / "manual.pgm";
    write_bytes(manual, std::string("P5 3 3 255 ") + std::string(9, static_cast<char>(255)));
    const BinaryMask ones = read_mask(manual);
    CHECK(ones.height() == 3);
    CHECK(ones.width() == 3);
    CHECK(ones.foreground_count() == 9);

    // Comments are part of the PGM header grammar.
    const auto commented = dir.path() / "comment.pgm";
    write_bytes(commented,
                std::string("P5\n# a comment\n2 1\n255\n") + std::string(2, '\0'));
    CHECK(read_mask(commented).foreground_count() == 0);
}

TEST_CASE("pgm: each malformation gets its own error") {
    const TempDir dir("pgm_err");

    const auto missing = dir.path() / "missing.pgm";
    try {
        read_mask(missing);
        FAIL("expected IoError");
    } catch (const IoError& e) {
        CHECK(e.kind() == IoErrorKind::open_failed);
    }

    const auto bad_magic = dir.path() / "bad_magic.pgm";
    write_bytes(bad_magic, "P2 3 3 255 garbage");
    try {
        read_mask(bad_magic);
        FAIL("expected IoError");
    } catch (const IoError& e) {
        CHECK(e.kind() == IoErrorKind::bad_magic);
    }

    const auto bad_maxval = dir.path() / "maxval.pgm";
    write_bytes(bad_maxval, std::string("P5 2 2 254 ") + std::string(4, '\0'));
    try {
        read_mask(bad_maxval);
        FAIL("expected IoError");
    } catch (const IoError& e) {
        CHECK(e.kind() == IoErrorKind::bad_header);
    }

    const auto overflow = dir.path() / "overflow.pgm";
    write_bytes(overflow, "P5 2000000 2000000 255 ");
    try {
        read_mask(overflow);
        FAIL("expected IoError");
    } catch (const IoError& e) {
        CHECK(e.kind() == IoErrorKind::dimension_overflow);
    }

    const auto truncated = dir.path() / "short.pgm";
    write_bytes(truncated, std::string("P5 4 4 255 ") + std::string(7, '\0'));
    try {
        read_mask(truncated);
        FAIL("expected IoError");
    } catch (const IoError& e) {
        CHECK(e.kind() == IoErrorKind::truncated);
    }
}

TEST_CASE("pmap: round trip is bit-identical for float-valued maps") {
    const TempDir dir("pmap");
    std::mt19937_64 rng(402);
    // Values quantized to float so the float32 payload is lossless.
    ProbMap p(9, 5);
    for (int r = 0; r < 9; ++r) {
        for (int c = 0; c < 5; ++c) {
            p.set(r, c, static_cast<double>(static_cast<float>(test_support::uniform01(rng))));
        }
    }
    const auto path = dir.path() / "p.pmap";
    write_probmap(p, path);
    CHECK(read_probmap(path) == p);
}

TEST_CASE("pmap: malformed files are rejected") {
    const TempDir dir("pmap_err");

    const auto bad_magic = dir.path() / "magic.pmap";
    write_bytes(bad_magic, "PMAP2\n2 2\n0000000000000000");
    try {
        read_probmap(bad_magic);
        FAIL("expected IoError");
    } catch (const IoError& e) {
        CHECK(e.kind() == IoErrorKind::bad_magic);
    }

    const auto out_of_range = dir.path() / "range.pmap";
    {
        std::string payload = "PMAP1\n1 2\n";
        const float values[2] = {0.25f, 1.5f};
        payload.append(reinterpret_cast<const char*>(values), sizeof(values));
        write_bytes(out_of_range, payload);
    }
    try {
        read_probmap(out_of_range);
        FAIL("expected IoError");
    } catch (const IoError& e) {
        CHECK(e.kind() == IoErrorKind::value_out_of_range);
    }

    const auto truncated = dir.path() / "short.pmap";
    write_bytes(truncated, std::string("PMAP1\n2 2\n") + std::string(3, '\0'));
    try {
        read_probmap(truncated);
        FAIL("expected IoError");
    } catch (const IoError& e) {
        CHECK(e.kind() == IoErrorKind::truncated);
    }
}

TEST_CASE("read_prediction sniffs the format") {
    const TempDir dir("pred");
    std::mt19937_64 rng(403);
    const BinaryMask m = random_mask(rng, 6, 6, 0.5);
    const auto pgm = dir.path() / "a.pgm";
    write_mask(m, pgm);
    CHECK(read_prediction(pgm) == ProbMap::from_mask(m));

    const ProbMap p = random_probmap(rng, 6, 6);
    const auto pmap = dir.path() / "b.pmap";
    write_probmap(p, pmap);
    const ProbMap rt = read_prediction(pmap);
    CHECK(rt.height() == 6);

    const auto junk = dir.path() / "c.pmap";
    write_bytes(junk, "not an image");
    CHECK_THROWS_AS(read_prediction(junk), IoError);
}

TEST_CASE("synth: construction guarantees the requested topology") {
    const BinaryMask single = synth_mask({.seed = 1, .height = 24, .width = 24,
                                          .n_blobs = 1, .n_holes = 0, .min_gap = 2});
    CHECK(betti_numbers(single) == BettiPair{1, 0});

    const BinaryMask fancy = synth_mask({.seed = 2, .height = 48, .width = 48,
                                         .n_blobs = 3, .n_holes = 1, .min_gap = 2});
    CHECK(betti_numbers(fancy) == BettiPair{3, 1});
    CHECK(background_hole_count(fancy) == 1);

    // Same seed, same mask.
    const SynthSpec spec{.seed = 77, .height = 40, .width = 40,
                         .n_blobs = 4, .n_holes = 2, .min_gap = 3};
    CHECK(synth_mask(spec) == synth_mask(spec));

    CHECK(synth_mask({.seed = 3, .height = 10, .width = 10,
                      .n_blobs = 0, .n_holes = 0, .min_gap = 2})
              .foreground_count() == 0);
}

TEST_CASE("synth: property over random specs") {
    std::mt19937_64 rng(404);
    for (int trial = 0; trial < 200; ++trial) {
        SynthSpec spec;
        spec.seed = rng();
        spec.height = 40 + static_cast<int>(rng() % 40);
        spec.width = 40 + static_cast<int>(rng() % 40);
        spec.n_blobs = static_cast<int>(rng() % 5);
        spec.n_holes = spec.n_blobs == 0
                           ? 0
                           : static_cast<int>(rng() % (2 * spec.n_blobs + 1));
        spec.min_gap = 2 + static_cast<int>(rng() % 3);
        const BinaryMask m = synth_mask(spec);
        CHECK(betti_numbers(m) == BettiPair{spec.n_blobs, spec.n_holes});
        CHECK(background_hole_count(m) == spec.n_holes);
    }
}

TEST_CASE("synth: capacity and validation errors") {
    CHECK_THROWS_AS(synth_mask({.seed = 1, .height = 8, .width = 8,
                                .n_blobs = 30, .n_holes = 0, .min_gap = 2}),
                    SynthCapacityError);
    CHECK_THROWS_AS(synth_mask({.seed = 1, .height = 8, .width = 8,
                                .n_blobs = 1, .n_holes = 0, .min_gap = 1}),
                    std::invalid_argument);
    CHECK_THROWS_AS(synth_mask({.seed = 1, .height = 8, .width = 8,
                                .n_blobs = 0, .n_holes = 1, .min_gap = 2}),
                    std::invalid_argument);
}

TEST_CASE("select_checkpoint: worked examples and tie rules") {
    const std::vector<CheckpointEntry> entries{
        {"A", 0.50, 0.30}, {"B", 0.52, 0.28}, {"C", 0.51, 0.25}};
    CHECK(select_checkpoint(entries, 2) == "C");
    CHECK(select_checkpoint({{"only", 0.4, 0.2}}, 10) == "only");
    CHECK(select_checkpoint({{"B", 0.52, 0.25}, {"C", 0.51, 0.25}}, 2) == "B");

    // k = 1 reduces to argmax dice.
    CHECK(select_checkpoint(entries, 1) == "B");
    // k >= n reduces to global min pd.
    CHECK(select_checkpoint(entries, 3) == "C");
    CHECK(select_checkpoint(entries, 99) == "C");

    CHECK_THROWS_AS(select_checkpoint({}, 1), std::invalid_argument);
    CHECK_THROWS_AS(select_checkpoint(entries, 0), std::invalid_argument);
    CHECK_THROWS_AS(select_checkpoint({{"A", 0.5, 0.1}, {"A", 0.6, 0.1}}, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(select_checkpoint({{"A", 1.5, 0.1}}, 1), std::invalid_argument);
    CHECK_THROWS_AS(select_checkpoint({{"A", 0.5, -0.1}}, 1), std::invalid_argument);
}

TEST_CASE("select_checkpoint: k = n reduces to global min pd") {
    std::mt19937_64 rng(407);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<CheckpointEntry> entries;
        for (int i = 0; i < 12; ++i) {
            entries.push_back({"c" + std::to_string(i), test_support::uniform01(rng),
                               0.4 * test_support::uniform01(rng)});
        }
        const CheckpointEntry* best = &entries.front();
        for (const CheckpointEntry& e : entries) {
            const bool better =
                e.mean_pd < best->mean_pd ||
                (e.mean_pd == best->mean_pd &&
                 (e.mean_dice > best->mean_dice ||
                  (e.mean_dice == best->mean_dice && e.checkpoint_id < best->checkpoint_id)));
            if (better) {
                best = &e;
            }
        }
        CHECK(select_checkpoint(entries, static_cast<int>(entries.size())) ==
              best->checkpoint_id);
    }
}

TEST_CASE("select_checkpoint: order-independent over shuffles") {
    std::mt19937_64 rng(405);
    std::vector<CheckpointEntry> entries;
    for (int i = 0; i < 20; ++i) {
        entries.push_back({"ck" + std::to_string(i),
                           0.4 + 0.4 * test_support::uniform01(rng),
                           0.1 + 0.3 * test_support::uniform01(rng)});
    }
    const std::string expected = select_checkpoint(entries, 5);
    for (int shuffle = 0; shuffle < 100; ++shuffle) {
        std::shuffle(entries.begin(), entries.end(), rng);
        CHECK(select_checkpoint(entries, 5) == expected);
    }
}

TEST_CASE("checkpoint log parsing") {
    const TempDir dir("log");
    const auto path = dir.path() / "log.csv";
    write_bytes(path, "checkpoint_id,mean_dice,mean_pd\nA,0.50,0.30\nB,0.52,0.28\nC,0.51,0.25\n");
    const auto entries = read_checkpoint_log(path);
    REQUIRE(entries.size() == 3);
    CHECK(entries[1].checkpoint_id == "B");
    CHECK(entries[1].mean_dice == 0.52);
    CHECK(select_checkpoint(entries, 2) == "C");

    const auto bad_header = dir.path() / "bad.csv";
    write_bytes(bad_header, "id,dice,pd\nA,0.5,0.3\n");
    CHECK_THROWS_AS(read_checkpoint_log(bad_header), IoError);

    const auto bad_value = dir.path() / "value.csv";
    write_bytes(bad_value, "checkpoint_id,mean_dice,mean_pd\nA,zero.five,0.3\n");
    CHECK_THROWS_AS(read_checkpoint_log(bad_value), IoError);

    const auto empty = dir.path() / "empty.csv";
    write_bytes(empty, "");
    CHECK_THROWS_AS(read_checkpoint_log(empty), IoError);
}

TEST_CASE("config parsing") {
    const ToolConfig defaults = parse_config_text("");
    CHECK(defaults.eval.threshold == 0.5);
    CHECK(defaults.eval.bf1_tolerance == 2);
    CHECK(defaults.eval.pd.kind == DiagramDistanceKind::wasserstein);
    CHECK(defaults.eval.pd.q == 1.0);
    CHECK(defaults.select_k == 5);
    CHECK(defaults.workers == 1);

    const ToolConfig cfg = parse_config_text(
        "# comment\n"
        "threshold = 0.35\n"
        "bf1_tolerance=3\n"
        "pd.kind = bottleneck\n"
        "pd.q = 2\n"
        "select.k = 7\n"
        "workers = 4\n");
    CHECK(cfg.eval.threshold == 0.35);
    CHECK(cfg.eval.bf1_tolerance == 3);
    CHECK(cfg.eval.pd.kind == DiagramDistanceKind::bottleneck);
    CHECK(cfg.eval.pd.q == 2.0);
    CHECK(cfg.select_k == 7);
    CHECK(cfg.workers == 4);

    CHECK_THROWS_AS(parse_config_text("unknown = 1\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config_text("threshold = 1.5\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config_text("threshold zero\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config_text("pd.kind = euclidean\n"), std::invalid_argument);
}

TEST_CASE("batch evaluation: self-comparison, failures, worker independence") {
    const TempDir dir("batch");
    const auto pred_dir = dir.path() / "pred";
    const auto gt_dir = dir.path() / "gt";
    std::filesystem::create_directories(pred_dir);
    std::filesystem::create_directories(gt_dir);

    std::mt19937_64 rng(406);
    std::vector<MetricsRecord> direct;
    for (int i = 0; i < 8; ++i) {
        const std::string id = "sample" + std::to_string(i);
        const BinaryMask gt = synth_mask({.seed = static_cast<std::uint64_t>(i), .height = 32,
                                          .width = 32, .n_blobs = 1 + i % 3,
                                          .n_holes = i % 2, .min_gap = 2});
        write_mask(gt, gt_dir / (id + ".pgm"));

        ProbMap pred(32, 32);
        for (int r = 0; r < 32; ++r) {
            for (int c = 0; c < 32; ++c) {
                const double base = gt.at(r, c) ? 0.875 : 0.125;
                pred.set(r, c,
                         static_cast<double>(static_cast<float>(
                             base + 0.1 * (test_support::uniform01(rng) - 0.5))));
            }
        }
        write_probmap(pred, pred_dir / (id + ".pmap"));
        direct.push_back(evaluate_sample(id, read_prediction(pred_dir / (id + ".pmap")),
                                         read_mask(gt_dir / (id + ".pgm")), EvalConfig{}));
    }

    BatchOptions options;
    options.workers = 1;
    const BatchResult serial = evaluate_directories(pred_dir, gt_dir, options);
    REQUIRE(serial.records.size() == 8);
    CHECK(serial.failures.empty());

    for (std::size_t i = 0; i < direct.size(); ++i) {
        CHECK(serial.records[i].sample_id == direct[i].sample_id);
        CHECK(serial.records[i].dice == direct[i].dice);
        CHECK(serial.records[i].iou == direct[i].iou);
        CHECK(serial.records[i].bf1 == direct[i].bf1);
        CHECK(serial.records[i].d_beta0 == direct[i].d_beta0);
        CHECK(serial.records[i].d_beta1 == direct[i].d_beta1);
        CHECK(serial.records[i].pd_dist == direct[i].pd_dist);
    }

    options.workers = 8;
    const BatchResult parallel = evaluate_directories(pred_dir, gt_dir, options);
    std::ostringstream csv_serial;
    std::ostringstream csv_parallel;
    write_metrics_csv(serial, csv_serial);
    write_metrics_csv(parallel, csv_parallel);
    CHECK(csv_serial.str() == csv_parallel.str());

    const std::string csv = csv_serial.str();
    CHECK(csv.rfind(kMetricsCsvHeader, 0) == 0);
    CHECK(csv.find("\nmean,") != std::string::npos);
    CHECK(csv.find("\nmedian,") != std::string::npos);

    // A prediction with no ground truth partner is an individual failure.
    write_probmap(ProbMap(4, 4), pred_dir / "orphan.pmap");
    const BatchResult with_orphan = evaluate_directories(pred_dir, gt_dir, options);
    REQUIRE(with_orphan.failures.size() == 1);
    CHECK(with_orphan.failures[0].sample_id == "orphan");
    CHECK(with_orphan.records.size() == 8);
    CHECK_FALSE(with_orphan.ok());

    // Shape mismatch is a per-sample error, not a global abort.
    write_mask(BinaryMask(4, 4), gt_dir / "orphan.pgm");
    write_mask(BinaryMask(5, 5), gt_dir / "badshape.pgm");
    write_probmap(ProbMap(6, 6), pred_dir / "badshape.pmap");
    const BatchResult with_mismatch = evaluate_directories(pred_dir, gt_dir, options);
    CHECK(with_mismatch.records.size() == 9);
    REQUIRE(with_mismatch.failures.size() == 1);
    CHECK(with_mismatch.failures[0].sample_id == "badshape");
}

TEST_CASE("batch evaluation: pmap beats pgm when a stem has both predictions") {
    const TempDir dir("batch_pref");
    const auto pred_dir = dir.path() / "pred";
    const auto gt_dir = dir.path() / "gt";
    std::filesystem::create_directories(pred_dir);
    std::filesystem::create_directories(gt_dir);

    BinaryMask gt(4, 4);
    gt.set(1, 1, true);
    write_mask(gt, gt_dir / "s.pgm");
    write_mask(gt, pred_dir / "s.pgm");           // perfect as a mask
    write_probmap(ProbMap(4, 4), pred_dir / "s.pmap");  // all-zero map

    const BatchResult result = evaluate_directories(pred_dir, gt_dir, BatchOptions{});
    REQUIRE(result.records.size() == 1);
    CHECK(result.records[0].dice == 0.0);  // the probability map was used
}

TEST_CASE("batch evaluation: empty intersection reports an error") {
    const TempDir dir("batch_empty");
    const auto pred_dir = dir.path() / "pred";
    const auto gt_dir = dir.path() / "gt";
    std::filesystem::create_directories(pred_dir);
    std::filesystem::create_directories(gt_dir);
    const BatchResult result = evaluate_directories(pred_dir, gt_dir, BatchOptions{});
    CHECK(result.records.empty());
    CHECK_FALSE(result.ok());
    CHECK_FALSE(result.failures.empty());
}
