#include "toposeg/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

namespace toposeg {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += a[i] * b[i];
    }
    return s;
}

double squared_norm(std::span<const double> a) { return dot(a, a); }

void check_finite(std::span<const double> v, const char* what) {
    for (double x : v) {
        if (!std::isfinite(x)) {
            throw std::invalid_argument(std::string(what) + ": non-finite value");
        }
    }
}

// y = W x + b with W row-major [rows x cols].
std::vector<double> affine(std::span<const double> w, std::span<const double> b,
                           std::span<const double> x) {
    const std::size_t rows = b.size();
    const std::size_t cols = x.size();
    std::vector<double> y(rows);
    for (std::size_t r = 0; r < rows; ++r) {
        double s = b[r];
        const double* row = w.data() + r * cols;
        for (std::size_t c = 0; c < cols; ++c) {
            s += row[c] * x[c];
        }
        y[r] = s;
    }
    return y;
}

void check_pair(const BallPoint& u, const BallPoint& v) {
    if (u.coords.size() != v.coords.size()) {
        throw std::invalid_argument("poincare points have different dimensions");
    }
    if (u.curvature != v.curvature) {
        throw std::invalid_argument("poincare points have different curvatures");
    }
    if (!(u.curvature > 0.0)) {
        throw std::invalid_argument("poincare curvature must be positive");
    }
}

// Coordinates rescaled inside the ball when needed; shared by the distance
// and its gradient so both see identical denominators.
std::vector<double> clamped_coords(const BallPoint& p) {
    const double limit = (1.0 - kDefaultBallEps) / std::sqrt(p.curvature);
    const double n = std::sqrt(squared_norm(p.coords));
    if (n <= limit) {
        return p.coords;
    }
    std::vector<double> out = p.coords;
    const double scale = limit / n;
    for (double& x : out) {
        x *= scale;
    }
    return out;
}

}  // namespace

BallPoint clamp_to_ball(std::vector<double> coords, double curvature, double ball_eps) {
    if (!(curvature > 0.0)) {
        throw std::invalid_argument("clamp_to_ball: curvature must be positive");
    }
    if (!(ball_eps > 0.0) || ball_eps >= 0.1) {
        throw std::invalid_argument("clamp_to_ball: ball_eps must lie in (0, 0.1)");
    }
    check_finite(coords, "clamp_to_ball");

    const double limit = (1.0 - ball_eps) / std::sqrt(curvature);
    const double n = std::sqrt(squared_norm(coords));
    if (n > limit) {
        const double scale = limit / n;
        for (double& x : coords) {
            x *= scale;
        }
    }
    return BallPoint{std::move(coords), curvature};
}

double poincare_distance(const BallPoint& u, const BallPoint& v) {
    check_pair(u, v);
    const double c = u.curvature;
    const std::vector<double> ucl = clamped_coords(u);
    const std::vector<double> vcl = clamped_coords(v);

    double diff2 = 0.0;
    for (std::size_t i = 0; i < ucl.size(); ++i) {
        const double d = ucl[i] - vcl[i];
        diff2 += d * d;
    }
    const double denom_u = 1.0 - c * squared_norm(ucl);
    const double denom_v = 1.0 - c * squared_norm(vcl);
    const double t = std::max(0.0, 2.0 * c * diff2 / (denom_u * denom_v));
    // arcosh(1 + t) written via log1p for accuracy near t = 0.
    return std::log1p(t + std::sqrt(t * (t + 2.0))) / std::sqrt(c);
}

DistanceGrad poincare_distance_grad(const BallPoint& u, const BallPoint& v) {
    check_pair(u, v);
    const std::size_t n = u.coords.size();
    DistanceGrad g;
    g.du.assign(n, 0.0);
    g.dv.assign(n, 0.0);

    if (u.coords == v.coords) {
        return g;  // subgradient at the arcosh kink
    }

    const double c = u.curvature;
    const std::vector<double> ucl = clamped_coords(u);
    const std::vector<double> vcl = clamped_coords(v);

    double diff2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = ucl[i] - vcl[i];
        diff2 += d * d;
    }
    if (diff2 == 0.0) {
        return g;  // clamping collapsed the two points
    }

    const double a = 1.0 - c * squared_norm(ucl);
    const double b = 1.0 - c * squared_norm(vcl);
    const double t = 2.0 * c * diff2 / (a * b);
    // d = (1/sqrt(c)) arcosh(1+t); darcosh/dt = 1/sqrt(t(t+2)).
    const double outer = 1.0 / (std::sqrt(c) * std::sqrt(t * (t + 2.0)));

    const double pair_scale = 4.0 * c / (a * b);
    const double u_scale = 4.0 * c * c * diff2 / (a * a * b);
    const double v_scale = 4.0 * c * c * diff2 / (a * b * b);
    for (std::size_t i = 0; i < n; ++i) {
        g.du[i] = outer * (pair_scale * (ucl[i] - vcl[i]) + u_scale * ucl[i]);
        g.dv[i] = outer * (pair_scale * (vcl[i] - ucl[i]) + v_scale * vcl[i]);
    }
    return g;
}

ProductHeadParams ProductHeadParams::seeded(int input_dim, std::uint64_t seed, int hyper_dim,
                                            int euclid_dim, int sphere_dim) {
    if (input_dim < 1 || hyper_dim < 1 || euclid_dim < 1 || sphere_dim < 1) {
        throw std::invalid_argument("ProductHeadParams::seeded: dimensions must be positive");
    }
    ProductHeadParams p;
    p.input_dim = input_dim;

    std::mt19937_64 rng(seed);
    const double bound = 1.0 / std::sqrt(static_cast<double>(input_dim));
    // Hand-rolled uniform draw so the byte stream is identical across
    // standard libraries.
    auto uniform = [&rng, bound]() {
        const double unit = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        return (2.0 * unit - 1.0) * bound;
    };
    auto fill = [&uniform](std::vector<double>& v, std::size_t count) {
        v.resize(count);
        for (double& x : v) {
            x = uniform();
        }
    };

    fill(p.w_hyper, static_cast<std::size_t>(hyper_dim) * input_dim);
    fill(p.b_hyper, hyper_dim);
    fill(p.w_euclid, static_cast<std::size_t>(euclid_dim) * input_dim);
    fill(p.b_euclid, euclid_dim);
    fill(p.w_sphere, static_cast<std::size_t>(sphere_dim) * input_dim);
    fill(p.b_sphere, sphere_dim);
    return p;
}

std::vector<double> ProductPoint::concat() const {
    std::vector<double> out;
    out.reserve(hyper.coords.size() + euclid.size() + sphere.size());
    out.insert(out.end(), hyper.coords.begin(), hyper.coords.end());
    out.insert(out.end(), euclid.begin(), euclid.end());
    out.insert(out.end(), sphere.begin(), sphere.end());
    return out;
}

ProductPoint product_head_forward(std::span<const double> x, const ProductHeadParams& params) {
    if (static_cast<int>(x.size()) != params.input_dim) {
        throw std::invalid_argument("product_head_forward: input dimension mismatch");
    }
    check_finite(x, "product_head_forward");
    if (!(params.sphere_eps > 0.0)) {
        throw std::invalid_argument("product_head_forward: sphere_eps must be positive");
    }

    ProductPoint out;

    // Hyperbolic factor: exponential map at the origin. tanh(sqrt(c)|a|) < 1
    // bounds the norm below the ball radius 1/sqrt(c) for every input.
    std::vector<double> a = affine(params.w_hyper, params.b_hyper, x);
    const double sqrt_c = std::sqrt(params.curvature);
    const double na = std::sqrt(squared_norm(a));
    if (na > 0.0) {
        const double scale = std::tanh(sqrt_c * na) / (sqrt_c * na);
        for (double& v : a) {
            v *= scale;
        }
    }
    out.hyper = clamp_to_ball(std::move(a), params.curvature, params.ball_eps);

    out.euclid = affine(params.w_euclid, params.b_euclid, x);
    for (double& v : out.euclid) {
        v = std::max(0.0, v);
    }

    out.sphere = affine(params.w_sphere, params.b_sphere, x);
    const double ns = std::sqrt(squared_norm(out.sphere));
    if (ns > 0.0) {
        double scale = 1.0 / (ns + params.sphere_eps);
        // For activations so small that the eps guard would visibly shrink
        // the output, fall back to exact unit normalization; the sphere
        // factor admits only zero or unit-norm points.
        if (ns * scale < 1.0 - 1e-6) {
            scale = 1.0 / ns;
        }
        for (double& v : out.sphere) {
            v *= scale;
        }
    }
    return out;
}

namespace {

struct AnchorSets {
    std::vector<int> positives;
    std::vector<int> negatives;
};

AnchorSets anchor_sets(const ContrastiveBatch& batch, int i) {
    AnchorSets s;
    const int n = static_cast<int>(batch.embeddings.size());
    for (int j = 0; j < n; ++j) {
        if (j == i) {
            continue;
        }
        if (batch.instance_labels[j] == batch.instance_labels[i]) {
            s.positives.push_back(j);
        } else {
            s.negatives.push_back(j);
        }
    }
    return s;
}

void check_batch(const ContrastiveBatch& batch, double tau) {
    if (batch.embeddings.empty()) {
        throw std::invalid_argument("contrastive batch is empty");
    }
    if (batch.embeddings.size() != batch.instance_labels.size()) {
        throw std::invalid_argument("contrastive batch: embeddings/labels length mismatch");
    }
    if (!(tau > 0.0)) {
        throw std::invalid_argument("contrastive temperature must be positive");
    }
}

double log_sum_exp(std::span<const double> values) {
    double m = -std::numeric_limits<double>::infinity();
    for (double v : values) {
        m = std::max(m, v);
    }
    double s = 0.0;
    for (double v : values) {
        s += std::exp(v - m);
    }
    return m + std::log(s);
}

}  // namespace

double contrastive_loss(const ContrastiveBatch& batch, double tau) {
    check_batch(batch, tau);
    const int n = static_cast<int>(batch.embeddings.size());

    // Pairwise distances once; the matrix is symmetric.
    std::vector<double> dist(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double d = poincare_distance(batch.embeddings[i], batch.embeddings[j]);
            dist[static_cast<std::size_t>(i) * n + j] = d;
            dist[static_cast<std::size_t>(j) * n + i] = d;
        }
    }

    double total = 0.0;
    bool any_valid = false;
    std::vector<double> logits_pos;
    std::vector<double> logits_all;
    for (int i = 0; i < n; ++i) {
        const AnchorSets sets = anchor_sets(batch, i);
        if (sets.positives.empty() || sets.negatives.empty()) {
            continue;
        }
        any_valid = true;
        logits_pos.clear();
        logits_all.clear();
        for (int j : sets.positives) {
            const double a = -dist[static_cast<std::size_t>(i) * n + j] / tau;
            logits_pos.push_back(a);
            logits_all.push_back(a);
        }
        for (int j : sets.negatives) {
            logits_all.push_back(-dist[static_cast<std::size_t>(i) * n + j] / tau);
        }
        total += log_sum_exp(logits_all) - log_sum_exp(logits_pos);
    }
    if (!any_valid) {
        throw std::invalid_argument(
            "contrastive batch is degenerate: no anchor has both a positive and a negative");
    }
    return total;
}

std::vector<std::vector<double>> contrastive_loss_grad(const ContrastiveBatch& batch, double tau) {
    check_batch(batch, tau);
    const int n = static_cast<int>(batch.embeddings.size());
    const std::size_t dim = batch.embeddings.front().coords.size();

    std::vector<std::vector<double>> grads(n, std::vector<double>(dim, 0.0));

    std::vector<double> logits_pos;
    std::vector<double> logits_all;
    bool any_valid = false;
    for (int i = 0; i < n; ++i) {
        const AnchorSets sets = anchor_sets(batch, i);
        if (sets.positives.empty() || sets.negatives.empty()) {
            continue;
        }
        any_valid = true;

        logits_pos.clear();
        logits_all.clear();
        for (int j : sets.positives) {
            const double a = -poincare_distance(batch.embeddings[i], batch.embeddings[j]) / tau;
            logits_pos.push_back(a);
            logits_all.push_back(a);
        }
        for (int j : sets.negatives) {
            logits_all.push_back(-poincare_distance(batch.embeddings[i], batch.embeddings[j]) / tau);
        }
        const double lse_pos = log_sum_exp(logits_pos);
        const double lse_all = log_sum_exp(logits_all);

        // dL_i/dd(i,j) = (w_j/tau)(1/S_pos - 1/S_all) for positives and
        //               -(w_j/tau)(1/S_all)           for negatives,
        // with w_j/S evaluated in the log domain.
        auto scatter = [&](int j, double coeff) {
            const DistanceGrad dg =
                poincare_distance_grad(batch.embeddings[i], batch.embeddings[j]);
            for (std::size_t k = 0; k < dim; ++k) {
                grads[i][k] += coeff * dg.du[k];
                grads[j][k] += coeff * dg.dv[k];
            }
        };
        for (std::size_t idx = 0; idx < sets.positives.size(); ++idx) {
            const double a = logits_pos[idx];
            const double coeff = (std::exp(a - lse_pos) - std::exp(a - lse_all)) / tau;
            scatter(sets.positives[idx], coeff);
        }
        for (std::size_t idx = 0; idx < sets.negatives.size(); ++idx) {
            const double a = logits_all[sets.positives.size() + idx];
            const double coeff = -std::exp(a - lse_all) / tau;
            scatter(sets.negatives[idx], coeff);
        }
    }
    if (!any_valid) {
        throw std::invalid_argument(
            "contrastive batch is degenerate: no anchor has both a positive and a negative");
    }
    return grads;
}

}  // namespace toposeg
