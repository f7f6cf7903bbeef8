#include "cramer/gan_losses.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "cramer/numeric.hpp"
#include "cramer/rng.hpp"

namespace cramer::gan {

namespace {

double eps_norm(const Vec& v) { return std::sqrt(v.squaredNorm() + kNormEps * kNormEps); }

void check_dim(const Vec& v, std::size_t d, const char* what) {
  if (static_cast<std::size_t>(v.size()) != d) {
    throw std::invalid_argument(std::string(what) + ": expected dimension " + std::to_string(d) + ", got " +
                                std::to_string(v.size()));
  }
}

}  // namespace

Affine::Affine(Mat a, Vec c) : a_(std::move(a)), c_(std::move(c)) {
  if (c_.size() != a_.rows()) throw std::invalid_argument("Affine: offset length must equal A's row count");
}

TanhMlp::TanhMlp(Mat w1, Vec b1, Mat w2, Vec b2)
    : w1_(std::move(w1)), b1_(std::move(b1)), w2_(std::move(w2)), b2_(std::move(b2)) {
  if (b1_.size() != w1_.rows() || w2_.cols() != w1_.rows() || b2_.size() != w2_.rows()) {
    throw std::invalid_argument("TanhMlp: inconsistent layer shapes");
  }
}

TanhMlp TanhMlp::random(std::size_t d, std::size_t hidden, std::size_t k, Rng& rng) {
  auto fill = [&](Eigen::Index r, Eigen::Index c, double sd) {
    Mat m(r, c);
    for (Eigen::Index j = 0; j < c; ++j) {
      for (Eigen::Index i = 0; i < r; ++i) m(i, j) = sd * rng.normal();
    }
    return m;
  };
  const auto dd = static_cast<Eigen::Index>(d);
  const auto hh = static_cast<Eigen::Index>(hidden);
  const auto kk = static_cast<Eigen::Index>(k);
  Mat w1 = fill(hh, dd, 1.0 / std::sqrt(static_cast<double>(d)));
  Vec b1 = fill(hh, 1, 0.1);
  Mat w2 = fill(kk, hh, 1.0 / std::sqrt(static_cast<double>(hidden)));
  Vec b2 = fill(kk, 1, 0.1);
  return TanhMlp(std::move(w1), std::move(b1), std::move(w2), std::move(b2));
}

Vec TanhMlp::forward(const Vec& x) const { return w2_ * (w1_ * x + b1_).array().tanh().matrix() + b2_; }

Vec TanhMlp::vjp(const Vec& x, const Vec& u) const {
  const Vec a = (w1_ * x + b1_).array().tanh().matrix();
  const Vec back = (w2_.transpose() * u).array() * (1.0 - a.array().square());
  return w1_.transpose() * back;
}

void GanBatch::validate(const Transform& h) const {
  check_dim(x_r, h.in_dim(), "x_r");
  check_dim(x_g, h.in_dim(), "x_g");
  check_dim(x_g_prime, h.in_dim(), "x_g_prime");
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw std::invalid_argument("epsilon must lie in [0, 1]");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("lambda must be finite and >= 0");
}

double critic_f(const Vec& x, const Vec& x_g_prime, const Transform& h) {
  const Vec hx = h.forward(x);
  return (hx - h.forward(x_g_prime)).norm() - hx.norm();
}

Vec critic_grad_x(const Vec& x, const Vec& x_g_prime, const Transform& h) {
  const Vec hx = h.forward(x);
  const Vec diff = hx - h.forward(x_g_prime);
  const Vec u1 = diff / eps_norm(diff);
  const Vec u2 = hx / eps_norm(hx);
  return h.vjp(x, u1) - h.vjp(x, u2);
}

double generator_loss(const GanBatch& batch, const Transform& h) {
  batch.validate(h);
  const Vec hr = h.forward(batch.x_r);
  const Vec hg = h.forward(batch.x_g);
  const Vec hgp = h.forward(batch.x_g_prime);
  return (hr - hg).norm() + (hr - hgp).norm() - (hg - hgp).norm();
}

double surrogate_loss(const GanBatch& batch, const Transform& h) {
  batch.validate(h);
  return critic_f(batch.x_r, batch.x_g_prime, h) - critic_f(batch.x_g, batch.x_g_prime, h);
}

double gradient_penalty(const GanBatch& batch, const Transform& h) {
  batch.validate(h);
  const double g = critic_grad_x(batch.interpolate(), batch.x_g_prime, h).norm();
  return batch.lambda * (g - 1.0) * (g - 1.0);
}

double critic_loss(const GanBatch& batch, const Transform& h) {
  return -surrogate_loss(batch, h) + gradient_penalty(batch, h);
}

GanLosses evaluate(const GanBatch& batch, const Transform& h) {
  GanLosses out;
  out.generator = generator_loss(batch, h);
  out.surrogate = surrogate_loss(batch, h);
  out.penalty = gradient_penalty(batch, h);
  out.critic = -out.surrogate + out.penalty;
  return out;
}

std::array<double, 2> reparam_sample_grad(double x, double z, double z_prime, double theta0, double theta1) {
  const double g = theta0 + theta1 * z;
  const double gp = theta0 + theta1 * z_prime;
  const double s1 = sgn(g - x);
  const double s2 = sgn(g - gp);
  return {2.0 * s1, 2.0 * s1 * z - s2 * (z - z_prime)};
}

std::array<double, 2> reparam_generator_grad(const DiscreteDist& noise, double theta0, double theta1,
                                             const DiscreteDist& target, double budget) {
  const double nz = static_cast<double>(noise.size());
  const double pairs = static_cast<double>(target.size()) * nz + nz * nz;
  if (pairs > budget) {
    throw EnumerationBudgetExceeded("reparam_generator_grad: " + std::to_string(pairs) + " pairs exceed budget " +
                                    std::to_string(budget));
  }
  std::vector<double> d0;
  std::vector<double> d1;
  for (std::size_t a = 0; a < noise.size(); ++a) {
    const double z = noise.support()[a];
    const double wz = noise.probs()[a];
    const double g = theta0 + theta1 * z;
    for (std::size_t b = 0; b < target.size(); ++b) {
      const double s = sgn(g - target.support()[b]) * wz * target.probs()[b];
      d0.push_back(2.0 * s);
      d1.push_back(2.0 * s * z);
    }
    for (std::size_t b = 0; b < noise.size(); ++b) {
      const double zp = noise.support()[b];
      const double s = sgn(g - (theta0 + theta1 * zp)) * wz * noise.probs()[b];
      d1.push_back(-s * (z - zp));
    }
  }
  return {pairwise_sum(d0), pairwise_sum(d1)};
}

DiscreteDist pushforward(const DiscreteDist& noise, double theta0, double theta1) {
  std::vector<double> values;
  for (double z : noise.support()) values.push_back(theta0 + theta1 * z);
  return DiscreteDist::from_atoms(values, noise.probs());
}

}  // namespace cramer::gan
