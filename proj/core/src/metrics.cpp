#include "toposeg/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "toposeg/grid_topology.hpp"

namespace toposeg {

namespace {

void check_shapes(const BinaryMask& a, const BinaryMask& b, const char* op) {
    if (!same_shape(a, b)) {
        throw std::invalid_argument(std::string(op) + ": mask shapes differ");
    }
}

void check_shapes(const ProbMap& p, const BinaryMask& y, const char* op) {
    if (!same_shape(p, y)) {
        throw std::invalid_argument(std::string(op) + ": prediction and mask shapes differ");
    }
}

std::vector<std::pair<int, int>> boundary_pixels(const BinaryMask& m) {
    std::vector<std::pair<int, int>> out;
    const int h = m.height();
    const int w = m.width();
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            if (!m.at(r, c)) {
                continue;
            }
            const bool exposed = r == 0 || !m.at(r - 1, c) || r == h - 1 || !m.at(r + 1, c) ||
                                 c == 0 || !m.at(r, c - 1) || c == w - 1 || !m.at(r, c + 1);
            if (exposed) {
                out.emplace_back(r, c);
            }
        }
    }
    return out;
}

// Fraction of `from` boundary pixels within Euclidean distance tol of some
// `to` boundary pixel, computed by stamping a tol-radius disk around every
// `to` pixel.
double matched_fraction(const std::vector<std::pair<int, int>>& from,
                        const std::vector<std::pair<int, int>>& to, int h, int w, int tol) {
    if (from.empty()) {
        return 0.0;
    }
    std::vector<std::uint8_t> near(static_cast<std::size_t>(h) * w, 0);
    std::vector<std::pair<int, int>> disk;
    for (int dr = -tol; dr <= tol; ++dr) {
        for (int dc = -tol; dc <= tol; ++dc) {
            if (dr * dr + dc * dc <= tol * tol) {
                disk.emplace_back(dr, dc);
            }
        }
    }
    for (const auto& [r, c] : to) {
        for (const auto& [dr, dc] : disk) {
            const int nr = r + dr;
            const int nc = c + dc;
            if (nr >= 0 && nr < h && nc >= 0 && nc < w) {
                near[static_cast<std::size_t>(nr) * w + nc] = 1;
            }
        }
    }
    std::int64_t hits = 0;
    for (const auto& [r, c] : from) {
        hits += near[static_cast<std::size_t>(r) * w + c];
    }
    return static_cast<double>(hits) / static_cast<double>(from.size());
}

void append_double(std::string& out, double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    out.append(buf, res.ptr);
}

}  // namespace

DiceIou dice_iou(const BinaryMask& pred, const BinaryMask& gt) {
    check_shapes(pred, gt, "dice_iou");
    std::int64_t inter = 0;
    std::int64_t pred_count = 0;
    std::int64_t gt_count = 0;
    const auto pp = pred.pixels();
    const auto gp = gt.pixels();
    for (std::size_t i = 0; i < pp.size(); ++i) {
        inter += pp[i] & gp[i];
        pred_count += pp[i];
        gt_count += gp[i];
    }
    if (pred_count + gt_count == 0) {
        return DiceIou{1.0, 1.0};  // both empty: perfect agreement
    }
    const double dice = 2.0 * inter / static_cast<double>(pred_count + gt_count);
    const double uni = static_cast<double>(pred_count + gt_count - inter);
    const double iou = inter / uni;
    return DiceIou{dice, iou};
}

double boundary_f1(const BinaryMask& pred, const BinaryMask& gt, int tol) {
    check_shapes(pred, gt, "boundary_f1");
    if (tol < 0) {
        throw std::invalid_argument("boundary_f1: tolerance must be non-negative");
    }
    const auto pb = boundary_pixels(pred);
    const auto gb = boundary_pixels(gt);
    if (pb.empty() && gb.empty()) {
        return 1.0;
    }
    const double precision = matched_fraction(pb, gb, pred.height(), pred.width(), tol);
    const double recall = matched_fraction(gb, pb, pred.height(), pred.width(), tol);
    if (precision + recall == 0.0) {
        return 0.0;
    }
    return 2.0 * precision * recall / (precision + recall);
}

BettiErrors betti_errors(const BinaryMask& pred, const BinaryMask& gt) {
    check_shapes(pred, gt, "betti_errors");
    const BettiPair p = betti_numbers(pred);
    const BettiPair g = betti_numbers(gt);
    return BettiErrors{std::abs(p.beta0 - g.beta0), std::abs(p.beta1 - g.beta1)};
}

LossResult dice_loss(const ProbMap& p, const BinaryMask& y, double smooth) {
    check_shapes(p, y, "dice_loss");
    if (smooth < 0.0) {
        throw std::invalid_argument("dice_loss: smooth must be non-negative");
    }
    const int h = p.height();
    const int w = p.width();

    double sum_p = 0.0;
    double sum_y = 0.0;
    double sum_py = 0.0;
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            const double pv = p.at(r, c);
            const double yv = y.at(r, c) ? 1.0 : 0.0;
            sum_p += pv;
            sum_y += yv;
            sum_py += pv * yv;
        }
    }

    LossResult out;
    out.grad = GradMap(h, w);
    const double denom = sum_p + sum_y + smooth;
    if (denom == 0.0) {
        return out;  // empty mask, zero prediction, smooth 0: define loss 0
    }
    const double numer = 2.0 * sum_py + smooth;
    out.value = 1.0 - numer / denom;
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            const double yv = y.at(r, c) ? 1.0 : 0.0;
            out.grad.at(r, c) = -(2.0 * yv * denom - numer) / (denom * denom);
        }
    }
    return out;
}

LossResult bce_loss(const ProbMap& p, const BinaryMask& y, double clamp_eps) {
    check_shapes(p, y, "bce_loss");
    if (!(clamp_eps > 0.0) || clamp_eps >= 0.5) {
        throw std::invalid_argument("bce_loss: clamp_eps must lie in (0, 0.5)");
    }
    const int h = p.height();
    const int w = p.width();
    const double n = static_cast<double>(p.pixel_count());

    LossResult out;
    out.grad = GradMap(h, w);
    double total = 0.0;
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            const double raw = p.at(r, c);
            const double pv = std::clamp(raw, clamp_eps, 1.0 - clamp_eps);
            const double yv = y.at(r, c) ? 1.0 : 0.0;
            total += -(yv * std::log(pv) + (1.0 - yv) * std::log1p(-pv));
            if (raw > clamp_eps && raw < 1.0 - clamp_eps) {
                out.grad.at(r, c) = (pv - yv) / (pv * (1.0 - pv)) / n;
            }
        }
    }
    out.value = total / n;
    return out;
}

BinaryMask threshold_map(const ProbMap& p, double threshold) {
    BinaryMask m(p.height(), p.width());
    for (int r = 0; r < p.height(); ++r) {
        for (int c = 0; c < p.width(); ++c) {
            m.set(r, c, p.at(r, c) > threshold);
        }
    }
    return m;
}

MetricsRecord evaluate_sample(std::string sample_id, const ProbMap& pred, const BinaryMask& gt,
                              const EvalConfig& cfg) {
    check_shapes(pred, gt, "evaluate_sample");
    if (!(cfg.threshold > 0.0) || !(cfg.threshold < 1.0)) {
        throw std::invalid_argument("evaluate_sample: threshold must lie strictly in (0,1)");
    }

    const BinaryMask pred_mask = threshold_map(pred, cfg.threshold);

    MetricsRecord rec;
    rec.sample_id = std::move(sample_id);
    const DiceIou overlap = dice_iou(pred_mask, gt);
    rec.dice = overlap.dice;
    rec.iou = overlap.iou;
    rec.bf1 = boundary_f1(pred_mask, gt, cfg.bf1_tolerance);
    const BettiErrors be = betti_errors(pred_mask, gt);
    rec.d_beta0 = be.d_beta0;
    rec.d_beta1 = be.d_beta1;
    rec.pd_dist = pd_distance(pred, gt, cfg.pd);
    return rec;
}

std::string to_csv_row(const MetricsRecord& r) {
    std::string out = r.sample_id;
    out.push_back(',');
    append_double(out, r.dice);
    out.push_back(',');
    append_double(out, r.iou);
    out.push_back(',');
    append_double(out, r.bf1);
    out.push_back(',');
    out += std::to_string(r.d_beta0);
    out.push_back(',');
    out += std::to_string(r.d_beta1);
    out.push_back(',');
    append_double(out, r.pd_dist);
    return out;
}

std::string to_json_line(const MetricsRecord& r) {
    nlohmann::json obj{
        {"sample_id", r.sample_id}, {"dice", r.dice},           {"iou", r.iou},
        {"bf1", r.bf1},             {"d_beta0", r.d_beta0},     {"d_beta1", r.d_beta1},
        {"pd_dist", r.pd_dist},
    };
    return obj.dump();
}

}  // namespace toposeg
