#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace toposeg {

/// Keeps points at least this far from the ball boundary; guards the
/// 1 - c*|x|^2 denominators of the Poincare distance.
inline constexpr double kDefaultBallEps = 1e-5;

/// Contrastive temperature default. Values at or below 0.1 blow up the
/// gradient scale near the ball boundary; see contrastive_loss_grad tests.
inline constexpr double kDefaultTemperature = 0.2;

/// Point strictly inside the Poincare ball of the given curvature:
/// sqrt(curvature) * |coords| <= 1 - ball_eps after clamping.
struct BallPoint {
    std::vector<double> coords;
    double curvature = 1.0;

    int dim() const { return static_cast<int>(coords.size()); }
};

/// Rescale a vector into the ball when it is on or outside the boundary;
/// identity otherwise. ball_eps must lie in (0, 0.1).
BallPoint clamp_to_ball(std::vector<double> coords, double curvature,
                        double ball_eps = kDefaultBallEps);

/// Geodesic distance on the Poincare ball of curvature c:
///   d(u,v) = (1/sqrt(c)) * arcosh(1 + 2c|u-v|^2 / ((1-c|u|^2)(1-c|v|^2)))
/// Points on or outside the boundary are clamped inward first, never NaN.
double poincare_distance(const BallPoint& u, const BallPoint& v);

struct DistanceGrad {
    std::vector<double> du;
    std::vector<double> dv;
};

/// Analytic partials of poincare_distance with respect to both points.
/// At u == v the distance has a kink; the zero subgradient is returned.
DistanceGrad poincare_distance_grad(const BallPoint& u, const BallPoint& v);

/// Linear projections of one feature token into the three product factors.
/// Matrices are row-major [output_dim x input_dim].
struct ProductHeadParams {
    int input_dim = 0;

    std::vector<double> w_hyper;   // hyper_dim x input_dim
    std::vector<double> b_hyper;   // hyper_dim
    std::vector<double> w_euclid;  // euclid_dim x input_dim
    std::vector<double> b_euclid;  // euclid_dim
    std::vector<double> w_sphere;  // sphere_dim x input_dim
    std::vector<double> b_sphere;  // sphere_dim

    double sphere_eps = 1e-8;
    double curvature = 1.0;
    double ball_eps = kDefaultBallEps;

    int hyper_dim() const { return static_cast<int>(b_hyper.size()); }
    int euclid_dim() const { return static_cast<int>(b_euclid.size()); }
    int sphere_dim() const { return static_cast<int>(b_sphere.size()); }

    /// Deterministic uniform init in [-1/sqrt(input_dim), 1/sqrt(input_dim)].
    static ProductHeadParams seeded(int input_dim, std::uint64_t seed, int hyper_dim = 8,
                                    int euclid_dim = 32, int sphere_dim = 8);
};

/// One latent token on the product manifold ball x R^n x sphere.
struct ProductPoint {
    BallPoint hyper;
    std::vector<double> euclid;
    std::vector<double> sphere;

    std::vector<double> concat() const;
};

/// Project a feature vector onto the product manifold:
///  - hyperbolic factor via the norm-directional tanh map
///    a * tanh(sqrt(c)|a|) / (sqrt(c)|a|), which lands strictly inside the
///    ball (unlike elementwise tanh), then clamp_to_ball;
///  - Euclidean factor via ReLU;
///  - spherical factor via eps-guarded unit normalization.
ProductPoint product_head_forward(std::span<const double> x, const ProductHeadParams& params);

/// Embeddings plus instance labels (0 = background, k >= 1 = instance id).
struct ContrastiveBatch {
    std::vector<BallPoint> embeddings;
    std::vector<int> instance_labels;
};

/// Supervised contrastive loss over hyperbolic distances:
/// for each anchor i with at least one positive (same label) and one negative
/// (different label),
///   L_i = -log( sum_p exp(-d(z_i,z_p)/tau)
///              / (sum_p exp(-d(z_i,z_p)/tau) + sum_n exp(-d(z_i,z_n)/tau)) )
/// summed over valid anchors; anchors with an empty set are skipped.
/// Evaluated in the log domain. Throws std::invalid_argument when no anchor
/// has both a positive and a negative.
double contrastive_loss(const ContrastiveBatch& batch, double tau = kDefaultTemperature);

/// Analytic gradient of contrastive_loss with respect to every embedding.
std::vector<std::vector<double>> contrastive_loss_grad(const ContrastiveBatch& batch,
                                                       double tau = kDefaultTemperature);

}  // namespace toposeg
