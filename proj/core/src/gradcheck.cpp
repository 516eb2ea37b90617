#include "toposeg/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "toposeg/manifold.hpp"
#include "toposeg/metrics.hpp"
#include "toposeg/soft_euler.hpp"

namespace toposeg {

namespace {

double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

ProbMap random_probmap(std::mt19937_64& rng, int h, int w, double lo, double hi) {
    std::vector<double> values(static_cast<std::size_t>(h) * w);
    for (double& v : values) {
        v = lo + (hi - lo) * uniform01(rng);
    }
    return ProbMap(h, w, std::move(values));
}

BinaryMask random_mask(std::mt19937_64& rng, int h, int w, double density) {
    std::vector<std::uint8_t> px(static_cast<std::size_t>(h) * w);
    for (std::uint8_t& v : px) {
        v = uniform01(rng) < density ? 1 : 0;
    }
    return BinaryMask(h, w, std::move(px));
}

BallPoint random_ball_point(std::mt19937_64& rng, int dim, double max_norm) {
    std::vector<double> coords(dim);
    double norm2 = 0.0;
    for (double& c : coords) {
        c = 2.0 * uniform01(rng) - 1.0;
        norm2 += c * c;
    }
    const double target = max_norm * uniform01(rng);
    const double norm = std::sqrt(norm2);
    if (norm > 0.0) {
        for (double& c : coords) {
            c *= target / norm;
        }
    }
    return BallPoint{std::move(coords), 1.0};
}

}  // namespace

double probmap_grad_rel_error(const std::function<double(const ProbMap&)>& f, const ProbMap& at,
                              const GradMap& analytic, double step) {
    ProbMap work = at;
    double worst = 0.0;
    for (int r = 0; r < at.height(); ++r) {
        for (int c = 0; c < at.width(); ++c) {
            const double original = at.at(r, c);
            work.set(r, c, original + step);
            const double up = f(work);
            work.set(r, c, original - step);
            const double down = f(work);
            work.set(r, c, original);
            const double numeric = (up - down) / (2.0 * step);
            worst = std::max(worst, gradcheck_rel_error(analytic.at(r, c), numeric));
        }
    }
    return worst;
}

double vector_grad_rel_error(const std::function<double(const std::vector<double>&)>& f,
                             const std::vector<double>& at, const std::vector<double>& analytic,
                             double step) {
    std::vector<double> work = at;
    double worst = 0.0;
    for (std::size_t i = 0; i < at.size(); ++i) {
        work[i] = at[i] + step;
        const double up = f(work);
        work[i] = at[i] - step;
        const double down = f(work);
        work[i] = at[i];
        const double numeric = (up - down) / (2.0 * step);
        worst = std::max(worst, gradcheck_rel_error(analytic[i], numeric));
    }
    return worst;
}

bool GradCheckReport::passed() const {
    return std::all_of(entries.begin(), entries.end(), [this](const GradCheckEntry& e) {
        return e.max_rel_error < tolerance;
    });
}

std::string GradCheckReport::first_failure() const {
    for (const GradCheckEntry& e : entries) {
        if (e.max_rel_error >= tolerance) {
            return e.op;
        }
    }
    return {};
}

GradCheckReport run_gradchecks(std::uint64_t seed, int instances, int grid_side,
                               double tolerance) {
    GradCheckReport report;
    report.tolerance = tolerance;
    std::mt19937_64 rng(seed);
    const int side = std::max(2, grid_side);

    // Probabilities kept off the BCE clamp and the [0,1] wall so the central
    // difference stays two-sided.
    constexpr double kLo = 0.05;
    constexpr double kHi = 0.95;

    auto run_probmap_op = [&](const std::string& name, auto value_fn, auto grad_fn) {
        GradCheckEntry entry{name, 0.0, instances};
        for (int i = 0; i < instances; ++i) {
            const ProbMap p = random_probmap(rng, side, side, kLo, kHi);
            const GradMap g = grad_fn(p);
            entry.max_rel_error = std::max(
                entry.max_rel_error, probmap_grad_rel_error(value_fn, p, g, kGradCheckStep));
        }
        report.entries.push_back(std::move(entry));
    };

    run_probmap_op(
        "soft_euler_char", [](const ProbMap& p) { return soft_euler_char(p); },
        [](const ProbMap& p) { return soft_euler_grad(p); });

    {
        GradCheckEntry entry{"soft_euler_loss", 0.0, instances};
        for (int i = 0; i < instances; ++i) {
            const ProbMap p = random_probmap(rng, side, side, kLo, kHi);
            const BinaryMask y = random_mask(rng, side, side, 0.4);
            const LossResult loss = soft_euler_loss(p, y);
            entry.max_rel_error = std::max(
                entry.max_rel_error,
                probmap_grad_rel_error(
                    [&y](const ProbMap& q) { return soft_euler_loss(q, y).value; }, p, loss.grad,
                    kGradCheckStep));
        }
        report.entries.push_back(std::move(entry));
    }

    {
        // 1e-2 keeps the sqrt's third derivative (~1/eps^2) from polluting
        // the central difference at step 1e-5.
        constexpr double kTvEps = 1e-2;
        GradCheckEntry entry{"tv_loss", 0.0, instances};
        for (int i = 0; i < instances; ++i) {
            const ProbMap p = random_probmap(rng, side, side, kLo, kHi);
            const LossResult loss = tv_loss(p, kTvEps);
            entry.max_rel_error =
                std::max(entry.max_rel_error,
                         probmap_grad_rel_error(
                             [](const ProbMap& q) { return tv_loss(q, kTvEps).value; }, p,
                             loss.grad, kGradCheckStep));
        }
        report.entries.push_back(std::move(entry));
    }

    {
        GradCheckEntry entry{"dice_loss", 0.0, instances};
        for (int i = 0; i < instances; ++i) {
            const ProbMap p = random_probmap(rng, side, side, kLo, kHi);
            const BinaryMask y = random_mask(rng, side, side, 0.5);
            const LossResult loss = dice_loss(p, y, 1.0);
            entry.max_rel_error = std::max(
                entry.max_rel_error,
                probmap_grad_rel_error(
                    [&y](const ProbMap& q) { return dice_loss(q, y, 1.0).value; }, p, loss.grad,
                    kGradCheckStep));
        }
        report.entries.push_back(std::move(entry));
    }

    {
        constexpr double kBceEps = 1e-7;
        GradCheckEntry entry{"bce_loss", 0.0, instances};
        for (int i = 0; i < instances; ++i) {
            const ProbMap p = random_probmap(rng, side, side, kLo, kHi);
            const BinaryMask y = random_mask(rng, side, side, 0.5);
            const LossResult loss = bce_loss(p, y, kBceEps);
            entry.max_rel_error = std::max(
                entry.max_rel_error,
                probmap_grad_rel_error(
                    [&y](const ProbMap& q) { return bce_loss(q, y, kBceEps).value; }, p,
                    loss.grad, kGradCheckStep));
        }
        report.entries.push_back(std::move(entry));
    }

    {
        GradCheckEntry entry{"poincare_distance", 0.0, instances};
        for (int i = 0; i < instances; ++i) {
            const BallPoint u = random_ball_point(rng, 8, 0.9);
            BallPoint v = random_ball_point(rng, 8, 0.9);
            if (u.coords == v.coords) {
                v.coords[0] += 0.05;  // keep away from the kink
            }
            const DistanceGrad g = poincare_distance_grad(u, v);
            const double err_u = vector_grad_rel_error(
                [&](const std::vector<double>& coords) {
                    return poincare_distance(BallPoint{coords, 1.0}, v);
                },
                u.coords, g.du, kGradCheckStep);
            const double err_v = vector_grad_rel_error(
                [&](const std::vector<double>& coords) {
                    return poincare_distance(u, BallPoint{coords, 1.0});
                },
                v.coords, g.dv, kGradCheckStep);
            entry.max_rel_error = std::max({entry.max_rel_error, err_u, err_v});
        }
        report.entries.push_back(std::move(entry));
    }

    {
        GradCheckEntry entry{"contrastive_loss", 0.0, instances};
        constexpr int kBatchSize = 8;
        for (int i = 0; i < instances; ++i) {
            ContrastiveBatch batch;
            for (int j = 0; j < kBatchSize; ++j) {
                batch.embeddings.push_back(random_ball_point(rng, 8, 0.8));
                batch.instance_labels.push_back(j % 3);  // two instances + background
            }
            const std::vector<std::vector<double>> grads = contrastive_loss_grad(batch, 0.2);
            for (int j = 0; j < kBatchSize; ++j) {
                const double err = vector_grad_rel_error(
                    [&batch, j](const std::vector<double>& coords) {
                        ContrastiveBatch perturbed = batch;
                        perturbed.embeddings[j].coords = coords;
                        return contrastive_loss(perturbed, 0.2);
                    },
                    batch.embeddings[j].coords, grads[j], kGradCheckStep);
                entry.max_rel_error = std::max(entry.max_rel_error, err);
            }
        }
        report.entries.push_back(std::move(entry));
    }

    return report;
}

}  // namespace toposeg
