#include "toposeg/batch_eval.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <map>
#include <optional>
#include <stdexcept>
#include <thread>

#include "toposeg/io.hpp"

namespace toposeg {

namespace {

struct SamplePaths {
    std::filesystem::path pred;
    std::filesystem::path gt;
    bool has_pred = false;
    bool has_gt = false;
};

bool is_pred_file(const std::filesystem::path& p) {
    const std::string ext = p.extension().string();
    return ext == ".pmap" || ext == ".pgm";
}

void append_double(std::string& out, double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    out.append(buf, res.ptr);
}

double median_of(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    if (n % 2 == 1) {
        return values[n / 2];
    }
    return (values[n / 2 - 1] + values[n / 2]) / 2.0;
}

struct Summary {
    double dice, iou, bf1, d_beta0, d_beta1, pd_dist;
};

Summary mean_summary(const std::vector<MetricsRecord>& recs) {
    Summary s{0, 0, 0, 0, 0, 0};
    for (const MetricsRecord& r : recs) {
        s.dice += r.dice;
        s.iou += r.iou;
        s.bf1 += r.bf1;
        s.d_beta0 += r.d_beta0;
        s.d_beta1 += r.d_beta1;
        s.pd_dist += r.pd_dist;
    }
    const double n = static_cast<double>(recs.size());
    return Summary{s.dice / n, s.iou / n, s.bf1 / n, s.d_beta0 / n, s.d_beta1 / n, s.pd_dist / n};
}

Summary median_summary(const std::vector<MetricsRecord>& recs) {
    auto column = [&recs](auto getter) {
        std::vector<double> v;
        v.reserve(recs.size());
        for (const MetricsRecord& r : recs) {
            v.push_back(getter(r));
        }
        return median_of(std::move(v));
    };
    return Summary{
        column([](const MetricsRecord& r) { return r.dice; }),
        column([](const MetricsRecord& r) { return r.iou; }),
        column([](const MetricsRecord& r) { return r.bf1; }),
        column([](const MetricsRecord& r) { return static_cast<double>(r.d_beta0); }),
        column([](const MetricsRecord& r) { return static_cast<double>(r.d_beta1); }),
        column([](const MetricsRecord& r) { return r.pd_dist; }),
    };
}

std::string summary_csv_row(const char* id, const Summary& s) {
    std::string out = id;
    for (const double v : {s.dice, s.iou, s.bf1, s.d_beta0, s.d_beta1, s.pd_dist}) {
        out.push_back(',');
        append_double(out, v);
    }
    return out;
}

std::string summary_json_line(const char* id, const Summary& s) {
    std::string out = "{\"sample_id\":\"";
    out += id;
    out += "\",\"dice\":";
    append_double(out, s.dice);
    out += ",\"iou\":";
    append_double(out, s.iou);
    out += ",\"bf1\":";
    append_double(out, s.bf1);
    out += ",\"d_beta0\":";
    append_double(out, s.d_beta0);
    out += ",\"d_beta1\":";
    append_double(out, s.d_beta1);
    out += ",\"pd_dist\":";
    append_double(out, s.pd_dist);
    out += "}";
    return out;
}

}  // namespace

BatchResult evaluate_directories(const std::filesystem::path& pred_dir,
                                 const std::filesystem::path& gt_dir,
                                 const BatchOptions& options) {
    if (options.workers < 1) {
        throw std::invalid_argument("evaluate_directories: workers must be at least 1");
    }
    if (!std::filesystem::is_directory(pred_dir)) {
        throw IoError(IoErrorKind::open_failed, pred_dir, "not a directory");
    }
    if (!std::filesystem::is_directory(gt_dir)) {
        throw IoError(IoErrorKind::open_failed, gt_dir, "not a directory");
    }

    // std::map keeps samples sorted by id from the start.
    std::map<std::string, SamplePaths> samples;
    for (const auto& entry : std::filesystem::directory_iterator(pred_dir)) {
        if (!entry.is_regular_file() || !is_pred_file(entry.path())) {
            continue;
        }
        SamplePaths& s = samples[entry.path().stem().string()];
        // When both s.pmap and s.pgm exist, the probability map wins;
        // directory iteration order must never decide.
        if (!s.has_pred || (entry.path().extension() == ".pmap" &&
                            s.pred.extension() == ".pgm")) {
            s.pred = entry.path();
        }
        s.has_pred = true;
    }
    for (const auto& entry : std::filesystem::directory_iterator(gt_dir)) {
        if (!entry.is_regular_file() || entry.path().extension() != ".pgm") {
            continue;
        }
        SamplePaths& s = samples[entry.path().stem().string()];
        s.gt = entry.path();
        s.has_gt = true;
    }

    BatchResult result;
    std::vector<std::pair<std::string, SamplePaths>> paired;
    for (auto& [id, paths] : samples) {
        if (!paths.has_pred) {
            result.failures.push_back({id, "missing prediction file"});
        } else if (!paths.has_gt) {
            result.failures.push_back({id, "missing ground-truth file"});
        } else {
            paired.emplace_back(id, paths);
        }
    }
    if (paired.empty()) {
        result.failures.push_back({"", "no matching prediction/ground-truth pairs"});
        return result;
    }

    // One slot per sample; workers never touch shared state, so the merge is
    // deterministic regardless of scheduling.
    std::vector<std::optional<MetricsRecord>> slots(paired.size());
    std::vector<std::optional<SampleFailure>> slot_failures(paired.size());
    std::atomic<std::size_t> next{0};

    auto worker = [&]() {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= paired.size()) {
                return;
            }
            const auto& [id, paths] = paired[i];
            try {
                const ProbMap pred = read_prediction(paths.pred);
                const BinaryMask gt = read_mask(paths.gt);
                slots[i] = evaluate_sample(id, pred, gt, options.eval);
            } catch (const std::exception& e) {
                slot_failures[i] = SampleFailure{id, e.what()};
            }
        }
    };

    const int thread_count = std::min<int>(options.workers, static_cast<int>(paired.size()));
    if (thread_count <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(thread_count);
        for (int t = 0; t < thread_count; ++t) {
            pool.emplace_back(worker);
        }
        for (std::thread& t : pool) {
            t.join();
        }
    }

    for (std::size_t i = 0; i < paired.size(); ++i) {
        if (slots[i]) {
            result.records.push_back(std::move(*slots[i]));
        } else if (slot_failures[i]) {
            result.failures.push_back(std::move(*slot_failures[i]));
        }
    }
    std::sort(result.failures.begin(), result.failures.end(),
              [](const SampleFailure& a, const SampleFailure& b) {
                  return a.sample_id < b.sample_id;
              });
    return result;
}

void write_metrics_csv(const BatchResult& result, std::ostream& out) {
    out << kMetricsCsvHeader << '\n';
    for (const MetricsRecord& r : result.records) {
        out << to_csv_row(r) << '\n';
    }
    if (!result.records.empty()) {
        out << summary_csv_row("mean", mean_summary(result.records)) << '\n';
        out << summary_csv_row("median", median_summary(result.records)) << '\n';
    }
}

void write_metrics_jsonl(const BatchResult& result, std::ostream& out) {
    for (const MetricsRecord& r : result.records) {
        out << to_json_line(r) << '\n';
    }
    if (!result.records.empty()) {
        out << summary_json_line("mean", mean_summary(result.records)) << '\n';
        out << summary_json_line("median", median_summary(result.records)) << '\n';
    }
}

}  // namespace toposeg
