#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <json.hpp>

#include "cramer/rng.hpp"

namespace cramer {

/// Tolerance on |sum(probs) - 1| accepted by DiscreteDist and PointCloud.
inline constexpr double kProbSumTolerance = 1e-12;

/// Finite distribution on strictly increasing real support points.
///
/// Zero-mass atoms are allowed. The cumulative table is precomputed and its
/// last entry is pinned to exactly 1.
class DiscreteDist {
 public:
  /// Throws std::invalid_argument unless support is strictly increasing,
  /// probs are non-negative and finite, sizes match and are >= 1, and the
  /// probabilities sum to 1 within kProbSumTolerance.
  DiscreteDist(std::vector<double> support, std::vector<double> probs);

  /// Builds from unsorted atoms; exact-duplicate values are merged.
  static DiscreteDist from_atoms(std::span<const double> values, std::span<const double> weights);
  static DiscreteDist dirac(double x);
  /// Support {0, 1} with P(1) = theta.
  static DiscreteDist bernoulli(double theta);
  /// Uniform weights over the given values (duplicates merged).
  static DiscreteDist uniform(std::span<const double> values);

  const std::vector<double>& support() const { return support_; }
  const std::vector<double>& probs() const { return probs_; }
  /// cumulative()[i] = F(support()[i]).
  const std::vector<double>& cumulative() const { return cumulative_; }
  std::size_t size() const { return support_.size(); }

  double mean() const;

  friend bool operator==(const DiscreteDist&, const DiscreteDist&) = default;

 private:
  std::vector<double> support_;
  std::vector<double> probs_;
  std::vector<double> cumulative_;
};

/// Right-continuous CDF F(x) = P{X <= x}.
double cdf(const DiscreteDist& d, double x);

/// Generalized inverse inf{x : F(x) >= u}. Throws std::domain_error unless
/// u is in (0, 1].
double quantile(const DiscreteDist& d, double u);

/// m i.i.d. draws by inverse-CDF sampling.
std::vector<double> sample(const DiscreteDist& d, Rng& rng, std::size_t m);

/// Empirical distribution (1/m) sum delta_{x_i}. Throws std::domain_error on
/// empty input.
DiscreteDist empirical(std::span<const double> samples);

/// Law of c * X.
DiscreteDist scale(const DiscreteDist& d, double c);

/// Law of A + X for independent A and X (exact discrete convolution; equal
/// sums are merged).
DiscreteDist convolve(const DiscreteDist& a, const DiscreteDist& x);

/// Weighted point set in R^d.
class PointCloud {
 public:
  /// Uniform weights.
  explicit PointCloud(std::vector<std::vector<double>> points);
  /// Throws std::invalid_argument on empty input, ragged or zero dimension,
  /// negative weights or weights not summing to 1 within kProbSumTolerance.
  PointCloud(std::vector<std::vector<double>> points, std::vector<double> weights);

  /// Univariate cloud carrying the same atoms as d.
  static PointCloud from_discrete(const DiscreteDist& d);

  const std::vector<std::vector<double>>& points() const { return points_; }
  const std::vector<double>& weights() const { return weights_; }
  std::size_t size() const { return points_.size(); }
  std::size_t dim() const { return points_.front().size(); }

  std::vector<double> mean() const;

 private:
  std::vector<std::vector<double>> points_;
  std::vector<double> weights_;
};

enum class FamilyKind { Bernoulli, SoftmaxCategorical, ThreePointToy };

/// Bounds applied to the Bernoulli parameter.
inline constexpr double kBernoulliMin = 1e-6;
inline constexpr double kBernoulliMax = 1.0 - 1e-6;

/// Shape of a parametric family Q_theta over a fixed outcome set. The
/// parameter vector itself is passed alongside.
///
///  - Bernoulli: support {0, 1}, theta = (P(1)), clamped to
///    [kBernoulliMin, kBernoulliMax].
///  - SoftmaxCategorical: user support, probs = softmax(theta).
///  - ThreePointToy: support {0, 1, 10}, Q(0) = 1 / (1 + 2 e^theta),
///    Q(1) = Q(10) = e^theta / (1 + 2 e^theta).
class ParametricFamily {
 public:
  static ParametricFamily bernoulli();
  static ParametricFamily three_point_toy();
  /// Throws std::invalid_argument unless support is strictly increasing and
  /// non-empty.
  static ParametricFamily softmax(std::vector<double> support);

  FamilyKind kind() const { return kind_; }
  const std::vector<double>& support() const { return support_; }
  std::size_t num_params() const;

  /// Throws std::invalid_argument if theta has the wrong size or is not finite.
  void check_params(std::span<const double> theta) const;
  /// Re-applies the family constraints (Bernoulli clamp; identity otherwise).
  std::vector<double> project(std::span<const double> theta) const;
  /// True when theta is inside the region where the family is differentiable
  /// without clamping.
  bool in_interior(std::span<const double> theta) const;

 private:
  ParametricFamily(FamilyKind kind, std::vector<double> support)
      : kind_(kind), support_(std::move(support)) {}

  FamilyKind kind_;
  std::vector<double> support_;
};

/// Q_theta as a DiscreteDist on f.support().
DiscreteDist family_dist(const ParametricFamily& f, std::span<const double> theta);

/// Jacobian of the atom masses: result[i][j] = dQ_theta(support[i]) / dtheta_j.
std::vector<std::vector<double>> family_grad_probs(const ParametricFamily& f,
                                                   std::span<const double> theta);

/// Gradient of F_{Q_theta}(x) with respect to theta.
std::vector<double> family_grad_cdf(const ParametricFamily& f, std::span<const double> theta,
                                    double x);

/// Gradient of log Q_theta(support[i]) with respect to theta.
std::vector<double> family_grad_log_prob(const ParametricFamily& f,
                                         std::span<const double> theta, std::size_t i);

/// {"support": [...], "probs": [...]}
void to_json(nlohmann::json& j, const DiscreteDist& d);
/// Throws std::invalid_argument on a missing or non-numeric field, or when the
/// arrays violate the DiscreteDist invariants.
DiscreteDist dist_from_json(const nlohmann::json& j);

}  // namespace cramer
