#include "toposeg/soft_euler.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "toposeg/grid_topology.hpp"

namespace toposeg {

double soft_euler_char(const ProbMap& p) {
    const int h = p.height();
    const int w = p.width();
    double pixels = 0.0;
    double pairs_h = 0.0;
    double pairs_v = 0.0;
    double blocks = 0.0;

    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            const double v = p.at(r, c);
            pixels += v;
            if (c + 1 < w) {
                pairs_h += v * p.at(r, c + 1);
            }
            if (r + 1 < h) {
                pairs_v += v * p.at(r + 1, c);
            }
            if (c + 1 < w && r + 1 < h) {
                blocks += v * p.at(r, c + 1) * p.at(r + 1, c) * p.at(r + 1, c + 1);
            }
        }
    }
    return pixels - pairs_h - pairs_v + blocks;
}

GradMap soft_euler_grad(const ProbMap& p) {
    const int h = p.height();
    const int w = p.width();
    GradMap g(h, w);

    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            const double v = p.at(r, c);
            g.at(r, c) += 1.0;
            if (c + 1 < w) {
                const double right = p.at(r, c + 1);
                g.at(r, c) -= right;
                g.at(r, c + 1) -= v;
            }
            if (r + 1 < h) {
                const double down = p.at(r + 1, c);
                g.at(r, c) -= down;
                g.at(r + 1, c) -= v;
            }
            if (c + 1 < w && r + 1 < h) {
                const double b = p.at(r, c + 1);
                const double d = p.at(r + 1, c);
                const double e = p.at(r + 1, c + 1);
                g.at(r, c) += b * d * e;
                g.at(r, c + 1) += v * d * e;
                g.at(r + 1, c) += v * b * e;
                g.at(r + 1, c + 1) += v * b * d;
            }
        }
    }
    return g;
}

LossResult soft_euler_loss(const ProbMap& p, const BinaryMask& ground_truth) {
    if (!same_shape(p, ground_truth)) {
        throw std::invalid_argument("soft_euler_loss: prediction and mask shapes differ");
    }
    const double chi_soft = soft_euler_char(p);
    const double chi_gt = static_cast<double>(euler_characteristic(ground_truth));
    const double diff = chi_soft - chi_gt;

    LossResult out;
    out.value = diff * diff;
    out.grad = soft_euler_grad(p);
    out.grad.scale(2.0 * diff);
    return out;
}

LossResult tv_loss(const ProbMap& p, double smooth_eps) {
    if (!(smooth_eps > 0.0)) {
        throw std::invalid_argument("tv_loss: smooth_eps must be positive");
    }
    const int h = p.height();
    const int w = p.width();
    const double eps2 = smooth_eps * smooth_eps;

    LossResult out;
    out.grad = GradMap(h, w);

    double total = 0.0;
    std::int64_t pair_count = 0;
    auto accumulate_pair = [&](int r0, int c0, int r1, int c1) {
        const double d = p.at(r1, c1) - p.at(r0, c0);
        const double root = std::sqrt(d * d + eps2);
        total += root;
        ++pair_count;
        const double slope = d / root;
        out.grad.at(r1, c1) += slope;
        out.grad.at(r0, c0) -= slope;
    };

    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            if (c + 1 < w) {
                accumulate_pair(r, c, r, c + 1);
            }
            if (r + 1 < h) {
                accumulate_pair(r, c, r + 1, c);
            }
        }
    }
    out.value = total - static_cast<double>(pair_count) * smooth_eps;
    return out;
}

LossWeights loss_weight_schedule(int epoch, int warmup_epochs, int ramp_epochs,
                                 const LossWeights& base) {
    if (epoch < 0) {
        throw std::invalid_argument("loss_weight_schedule: epoch must be non-negative");
    }
    if (warmup_epochs < 0 || ramp_epochs < 0) {
        throw std::invalid_argument("loss_weight_schedule: warmup/ramp must be non-negative");
    }

    LossWeights out = base;
    out.epoch = epoch;
    if (epoch < warmup_epochs) {
        out.w_topo = 0.0;
    } else if (ramp_epochs == 0) {
        out.w_topo = base.w_topo;
    } else {
        const double progress =
            std::min(1.0, static_cast<double>(epoch - warmup_epochs) / ramp_epochs);
        out.w_topo = base.w_topo * progress;
    }
    return out;
}

}  // namespace toposeg
