#include "cramer/bias_lab.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <stdexcept>

#include "cramer/binomial.hpp"
#include "cramer/numeric.hpp"

namespace cramer::bias_lab {

double expected_sample_grad(std::size_t m, double theta_star, double theta) {
  if (m == 0) throw std::domain_error("expected_sample_grad: m must be >= 1");
  const auto split = binomial_split(m, theta_star, theta);
  return split.below - split.above;
}

double true_grad(double theta_star, double theta) { return sgn(theta - theta_star); }

BiasRow bias_row(std::size_t m, double theta_star, double theta) {
  if (m == 0) throw std::domain_error("bias_row: m must be >= 1");
  const auto s = binomial_split(m, theta_star, theta);
  const double total = s.below + s.tie + s.above;
  BiasRow row{m, theta_star, theta, true_grad(theta_star, theta), s.below - s.above, 0.0};
  // Written with the small tails so that large m does not cancel 1 - (1 - tiny).
  if (row.true_grad > 0.0) {
    row.bias = (s.tie + 2.0 * s.above) / total;
  } else if (row.true_grad < 0.0) {
    row.bias = -(s.tie + 2.0 * s.below) / total;
  } else {
    row.bias = s.above - s.below;
  }
  row.exp_sample_grad = row.true_grad - row.bias;
  return row;
}

MinimaxBias minimax_bias(std::size_t m) {
  if (m == 0) throw std::domain_error("minimax_bias: m must be >= 1");
  const double md = static_cast<double>(m);
  const double theta_star = (md - 1.0) / md;
  const double theta = 0.5 * (theta_star + 1.0);
  MinimaxBias out;
  out.row = bias_row(m, theta_star, theta);
  out.closed_form = 2.0 * std::pow(1.0 - 1.0 / md, md);
  out.meets_bound = out.row.bias >= kMinimaxBound;
  return out;
}

HalfPointBias half_point_bias(std::size_t m) {
  if (m == 0) throw std::domain_error("half_point_bias: m must be >= 1");
  const double theta = 0.5 + 1.0 / (2.0 * std::sqrt(8.0 * static_cast<double>(m)));
  HalfPointBias out;
  out.row = bias_row(m, 0.5, theta);
  const auto split = binomial_split(m, 0.5, theta);
  out.tail = split.tie + split.above;
  out.meets_bound = out.row.bias >= 1.0 / 6.0;
  return out;
}

MedianInterval sample_median(std::size_t m, double theta_star) {
  const auto pmf = binomial_pmf(m, theta_star);
  const double md = static_cast<double>(m);
  // theta -> E|theta_hat - theta| has right slope P{K <= k} - P{K > k} at
  // theta = k/m; it is minimized where that slope first becomes >= 0.
  double below = 0.0;
  std::size_t lower = m;
  std::size_t upper = m;
  for (std::size_t k = 0; k <= m; ++k) {
    below += pmf[k];
    const double right_slope = below - (1.0 - below);
    if (right_slope >= 0.0) {
      lower = k;
      // A flat piece (slope exactly zero) extends the minimizer set to (k+1)/m.
      upper = (std::abs(right_slope) < 1e-14 && k < m) ? k + 1 : k;
      break;
    }
  }
  return {static_cast<double>(lower) / md, static_cast<double>(upper) / md};
}

double expected_sample_loss(std::size_t m, double theta_star, double theta) {
  const auto pmf = binomial_pmf(m, theta_star);
  std::vector<double> terms(m + 1);
  for (std::size_t k = 0; k <= m; ++k) {
    terms[k] = pmf[k] * std::abs(static_cast<double>(k) / static_cast<double>(m) - theta);
  }
  return pairwise_sum(terms);
}

LossCurve loss_curve(std::size_t m, double theta_star, double grid_step) {
  if (m == 0) throw std::domain_error("loss_curve: m must be >= 1");
  if (!(grid_step > 0.0 && grid_step <= 1e-3)) {
    throw std::domain_error("loss_curve: grid_step must lie in (0, 1e-3]");
  }
  if (!(theta_star >= 0.0 && theta_star <= 1.0)) {
    throw std::domain_error("loss_curve: theta_star must lie in [0, 1]");
  }
  std::vector<double> grid;
  const auto steps = static_cast<std::size_t>(std::ceil(1.0 / grid_step));
  for (std::size_t i = 0; i <= steps; ++i) grid.push_back(std::min(1.0, static_cast<double>(i) * grid_step));
  for (std::size_t k = 0; k <= m; ++k) grid.push_back(static_cast<double>(k) / static_cast<double>(m));
  grid.push_back(theta_star);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  const auto pmf = binomial_pmf(m, theta_star);
  LossCurve curve;
  curve.m = m;
  curve.theta_star = theta_star;
  curve.points.reserve(grid.size());
  double best_true = kInf;
  double best_sample = kInf;
  std::vector<double> terms(m + 1);
  for (double theta : grid) {
    for (std::size_t k = 0; k <= m; ++k) {
      terms[k] = pmf[k] * std::abs(static_cast<double>(k) / static_cast<double>(m) - theta);
    }
    const LossPoint pt{theta, std::abs(theta_star - theta), pairwise_sum(terms)};
    if (pt.true_loss < best_true) {
      best_true = pt.true_loss;
      curve.argmin_true = theta;
    }
    if (pt.expected_sample_loss < best_sample) {
      best_sample = pt.expected_sample_loss;
      curve.argmin_sample = theta;
    }
    curve.points.push_back(pt);
  }
  curve.sample_minimizers = sample_median(m, theta_star);
  return curve;
}

double deterministic_threshold(std::size_t m) {
  if (m == 0) throw std::domain_error("deterministic_threshold: m must be >= 1");
  return std::pow(0.5, 1.0 / static_cast<double>(m));
}

DeterministicRegime deterministic_regime(std::size_t m, double theta_star, std::size_t grid_points) {
  if (grid_points == 0) throw std::domain_error("deterministic_regime: empty grid");
  DeterministicRegime out;
  out.m = m;
  out.threshold = deterministic_threshold(m);
  out.theta_star = theta_star;
  out.max_expected_grad = -kInf;
  for (std::size_t i = 0; i < grid_points; ++i) {
    const double theta = (static_cast<double>(i) + 0.5) / static_cast<double>(grid_points);
    out.rows.push_back(bias_row(m, theta_star, theta));
    out.max_expected_grad = std::max(out.max_expected_grad, out.rows.back().exp_sample_grad);
  }
  out.argmin_sample = sample_median(m, theta_star).upper;
  out.holds = out.max_expected_grad < 0.0 && out.argmin_sample == 1.0;
  return out;
}

BiasCurve consistency_sweep(double theta_star, double theta, std::span<const std::size_t> ms) {
  if (!(theta_star > 0.0 && theta_star < 1.0 && theta > 0.0 && theta < 1.0)) {
    throw std::domain_error("consistency_sweep: theta and theta_star must lie in (0, 1)");
  }
  if (theta == theta_star) throw std::domain_error("consistency_sweep: theta must differ from theta_star");
  BiasCurve rows;
  for (std::size_t m : ms) {
    const double md = static_cast<double>(m);
    double t = theta;
    if (std::abs(std::round(t * md) / md - t) < 1e-12) t += 1e-9;
    auto row = bias_row(m, theta_star, t);
    rows.push_back(row);
  }
  return rows;
}

void write_bias_csv(std::ostream& os, const BiasCurve& rows) {
  os << "m,theta_star,theta,true_grad,exp_sample_grad,bias\n";
  os << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (const auto& r : rows) {
    os << r.m << ',' << r.theta_star << ',' << r.theta << ',' << r.true_grad << ','
       << r.exp_sample_grad << ',' << r.bias << '\n';
  }
}

void write_loss_csv(std::ostream& os, const LossCurve& curve) {
  os << "theta,true_loss,expected_sample_loss\n";
  os << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (const auto& p : curve.points) {
    os << p.theta << ',' << p.true_loss << ',' << p.expected_sample_loss << '\n';
  }
}

}  // namespace cramer::bias_lab
