#pragma once

#include <cstddef>
#include <ostream>
#include <span>
#include <vector>

namespace cramer::bias_lab {

// All quantities below concern P = Bernoulli(theta_star), Q_theta =
// Bernoulli(theta) and the w_p^p loss, for which w_p^p = |theta - theta_star|
// for every p, g = sgn(theta - theta_star) and g_hat = sgn(theta - theta_hat)
// with theta_hat the mean of m draws.

/// 2 e^-2, the lower bound on the minimax bias.
inline const double kMinimaxBound = 2.0 * 0.1353352832366127;

/// E g_hat = P{theta_hat < theta} - P{theta_hat > theta}
/// (= 2 P{theta_hat < theta} - 1 off the grid {k/m}).
double expected_sample_grad(std::size_t m, double theta_star, double theta);

/// sgn(theta - theta_star).
double true_grad(double theta_star, double theta);

struct BiasRow {
  std::size_t m = 0;
  double theta_star = 0.0;
  double theta = 0.0;
  double true_grad = 0.0;
  double exp_sample_grad = 0.0;
  double bias = 0.0;  // true_grad - exp_sample_grad
};

/// Rows of (m, theta*, theta, g, E g_hat, g - E g_hat).
using BiasCurve = std::vector<BiasRow>;

BiasRow bias_row(std::size_t m, double theta_star, double theta);

struct MinimaxBias {
  BiasRow row;
  double closed_form = 0.0;  // 2 (1 - 1/m)^m
  bool meets_bound = false;  // row.bias >= kMinimaxBound
};

/// theta* = (m - 1)/m and theta halfway between theta* and 1.
MinimaxBias minimax_bias(std::size_t m);

struct HalfPointBias {
  BiasRow row;
  double tail = 0.0;  // P{theta_hat >= theta}
  bool meets_bound = false;  // row.bias >= 1/6
};

/// theta* = 1/2, theta = 1/2 + 1 / (2 sqrt(8m)).
HalfPointBias half_point_bias(std::size_t m);

struct MedianInterval {
  double lower = 0.0;
  double upper = 0.0;
  bool contains(double x, double tol = 0.0) const { return x >= lower - tol && x <= upper + tol; }
};

/// Set of minimizers of theta -> E|theta_hat - theta|, i.e. the medians of
/// theta_hat = K/m with K ~ Binomial(m, theta_star).
MedianInterval sample_median(std::size_t m, double theta_star);

/// Expected sample loss E|theta_hat - theta| (exact binomial sum).
double expected_sample_loss(std::size_t m, double theta_star, double theta);

struct LossPoint {
  double theta = 0.0;
  double true_loss = 0.0;
  double expected_sample_loss = 0.0;
};

struct LossCurve {
  std::size_t m = 0;
  double theta_star = 0.0;
  std::vector<LossPoint> points;  // sorted by theta
  double argmin_true = 0.0;
  double argmin_sample = 0.0;     // first grid minimizer
  MedianInterval sample_minimizers;
};

/// Evaluates both losses on a [0, 1] grid of the given step with the kinks
/// {k/m} and theta* inserted exactly. Throws std::domain_error unless
/// 0 < grid_step <= 1e-3.
LossCurve loss_curve(std::size_t m, double theta_star, double grid_step = 1e-4);

struct DeterministicRegime {
  std::size_t m = 0;
  double threshold = 0.0;  // (1/2)^(1/m)
  double theta_star = 0.0;
  double max_expected_grad = 0.0;  // over the probe grid
  double argmin_sample = 0.0;
  BiasCurve rows;                  // one per probe theta
  bool holds = false;  // every E g_hat < 0 and the sample argmin is 1
};

/// (1/2)^(1/m).
double deterministic_threshold(std::size_t m);

/// Evaluates E g_hat on `grid_points` equally spaced interior points of
/// (0, 1) and checks the zero-entropy solution for theta* above the threshold.
DeterministicRegime deterministic_regime(std::size_t m, double theta_star,
                                         std::size_t grid_points = 1000);

/// |bias| per m at fixed (theta*, theta). A theta on the grid {k/m} is moved
/// up by 1e-9 before evaluation. Throws std::domain_error if theta equals
/// theta* or either lies outside (0, 1).
BiasCurve consistency_sweep(double theta_star, double theta, std::span<const std::size_t> ms);

void write_bias_csv(std::ostream& os, const BiasCurve& rows);
void write_loss_csv(std::ostream& os, const LossCurve& curve);

}  // namespace cramer::bias_lab
