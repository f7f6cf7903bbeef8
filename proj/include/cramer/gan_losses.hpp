#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <memory>

#include "cramer/distributions.hpp"

namespace cramer::gan {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Norm used inside vjp cotangents: sqrt(v.v + eps^2).
inline constexpr double kNormEps = 1e-12;

/// h : R^d -> R^k with a hand-written vector-Jacobian product.
class Transform {
 public:
  virtual ~Transform() = default;
  virtual std::size_t in_dim() const = 0;
  virtual std::size_t out_dim() const = 0;
  virtual Vec forward(const Vec& x) const = 0;
  /// J(x)^T u for a cotangent u in R^k.
  virtual Vec vjp(const Vec& x, const Vec& u) const = 0;
};

class Identity final : public Transform {
 public:
  explicit Identity(std::size_t d) : d_(d) {}
  std::size_t in_dim() const override { return d_; }
  std::size_t out_dim() const override { return d_; }
  Vec forward(const Vec& x) const override { return x; }
  Vec vjp(const Vec&, const Vec& u) const override { return u; }

 private:
  std::size_t d_;
};

/// h(x) = A x + c. A = 0 gives h == c; A = 2I gives h(x) = 2x.
class Affine final : public Transform {
 public:
  Affine(Mat a, Vec c);
  std::size_t in_dim() const override { return static_cast<std::size_t>(a_.cols()); }
  std::size_t out_dim() const override { return static_cast<std::size_t>(a_.rows()); }
  Vec forward(const Vec& x) const override { return a_ * x + c_; }
  Vec vjp(const Vec&, const Vec& u) const override { return a_.transpose() * u; }

 private:
  Mat a_;
  Vec c_;
};

/// h(x) = W2 tanh(W1 x + b1) + b2.
class TanhMlp final : public Transform {
 public:
  TanhMlp(Mat w1, Vec b1, Mat w2, Vec b2);
  /// Weights ~ N(0, 1/fan_in), biases ~ N(0, 0.1^2).
  static TanhMlp random(std::size_t d, std::size_t hidden, std::size_t k, Rng& rng);
  std::size_t in_dim() const override { return static_cast<std::size_t>(w1_.cols()); }
  std::size_t out_dim() const override { return static_cast<std::size_t>(w2_.rows()); }
  Vec forward(const Vec& x) const override;
  Vec vjp(const Vec& x, const Vec& u) const override;

 private:
  Mat w1_;
  Vec b1_;
  Mat w2_;
  Vec b2_;
};

struct GanBatch {
  Vec x_r;
  Vec x_g;
  Vec x_g_prime;
  double epsilon = 0.5;
  double lambda = 10.0;

  /// Throws std::invalid_argument on mismatched dimensions, epsilon outside
  /// [0, 1] or negative lambda.
  void validate(const Transform& h) const;
  /// epsilon x_r + (1 - epsilon) x_g
  Vec interpolate() const { return epsilon * x_r + (1.0 - epsilon) * x_g; }
};

/// f(x) = |h(x) - h(x_g')| - |h(x)|
double critic_f(const Vec& x, const Vec& x_g_prime, const Transform& h);

/// Gradient of critic_f in x, from two vjp calls with eps-guarded cotangents.
Vec critic_grad_x(const Vec& x, const Vec& x_g_prime, const Transform& h);

/// |h(x_r) - h(x_g)| + |h(x_r) - h(x_g')| - |h(x_g) - h(x_g')|
double generator_loss(const GanBatch& batch, const Transform& h);

/// f(x_r) - f(x_g), both against x_g'.
double surrogate_loss(const GanBatch& batch, const Transform& h);

/// lambda (|grad f(x_hat)| - 1)^2 at x_hat = batch.interpolate().
double gradient_penalty(const GanBatch& batch, const Transform& h);

/// -surrogate_loss + gradient_penalty
double critic_loss(const GanBatch& batch, const Transform& h);

struct GanLosses {
  double generator = 0.0;
  double surrogate = 0.0;
  double penalty = 0.0;
  double critic = 0.0;
};

GanLosses evaluate(const GanBatch& batch, const Transform& h);

/// Enumeration budget for reparam_generator_grad, in pairs.
inline constexpr double kDefaultPairBudget = 1e7;

/// Exact gradient in (theta0, theta1) of the energy distance between target
/// and the pushforward of noise through z -> theta0 + theta1 z:
///   2 E sgn(G(Z) - X) (1, Z) - E sgn(G(Z) - G(Z')) (0, Z - Z'),
/// with sgn(0) = 0. Throws EnumerationBudgetExceeded when
/// |target| |noise| + |noise|^2 exceeds budget.
std::array<double, 2> reparam_generator_grad(const DiscreteDist& noise, double theta0, double theta1,
                                             const DiscreteDist& target, double budget = kDefaultPairBudget);

/// One-sample estimate from a single (x, z, z') triple; its expectation is
/// reparam_generator_grad.
std::array<double, 2> reparam_sample_grad(double x, double z, double z_prime, double theta0, double theta1);

/// Law of theta0 + theta1 Z.
DiscreteDist pushforward(const DiscreteDist& noise, double theta0, double theta1);

}  // namespace cramer::gan
