#include "cramer/gradients.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "cramer/binomial.hpp"
#include "cramer/numeric.hpp"

namespace cramer {

namespace {

void axpy(double a, const std::vector<double>& x, std::vector<double>& y) {
  for (std::size_t k = 0; k < y.size(); ++k) y[k] += a * x[k];
}

std::vector<double> grad_kl(const ParametricFamily& f, const DiscreteDist& target,
                            std::span<const double> theta) {
  const auto q = family_dist(f, theta);
  const auto& qs = q.support();
  std::vector<double> g(f.num_params(), 0.0);
  for (std::size_t i = 0; i < target.size(); ++i) {
    const double mass = target.probs()[i];
    if (mass == 0.0) continue;
    const auto it = std::lower_bound(qs.begin(), qs.end(), target.support()[i]);
    if (it == qs.end() || *it != target.support()[i]) {
      throw InfiniteLoss("kl gradient: target atom " + std::to_string(target.support()[i]) +
                         " is outside the family support");
    }
    const auto idx = static_cast<std::size_t>(it - qs.begin());
    if (q.probs()[idx] == 0.0) {
      throw InfiniteLoss("kl gradient: model assigns zero mass to atom " +
                         std::to_string(target.support()[i]));
    }
    axpy(-mass, family_grad_log_prob(f, theta, idx), g);
  }
  return g;
}

std::vector<double> grad_lp(const ParametricFamily& f, const DiscreteDist& target,
                            std::span<const double> theta, double order) {
  const auto q = family_dist(f, theta);
  const auto jac = family_grad_probs(f, theta);
  const auto& sp = target.support();
  const auto& sq = q.support();
  std::vector<double> g(f.num_params(), 0.0);
  std::vector<double> grad_fq(f.num_params(), 0.0);
  std::size_t i = 0;
  std::size_t j = 0;
  double fp = 0.0;
  double fq = 0.0;
  double x = std::min(sp.front(), sq.front());
  while (i < sp.size() || j < sq.size()) {
    while (i < sp.size() && sp[i] == x) fp = target.cumulative()[i++];
    while (j < sq.size() && sq[j] == x) {
      fq = q.cumulative()[j];
      axpy(1.0, jac[j], grad_fq);
      ++j;
    }
    if (i == sp.size() && j == sq.size()) break;
    const double next = std::min(i < sp.size() ? sp[i] : kInf, j < sq.size() ? sq[j] : kInf);
    // Above the top Q atom F_Q is identically 1 and its gradient vanishes.
    if (j < sq.size()) {
      const double gap = fq - fp;
      const double coef = order == 1.0 ? sgn(gap) : order * abs_pow(gap, order - 1.0) * sgn(gap);
      if (coef != 0.0) axpy(coef * (next - x), grad_fq, g);
    }
    x = next;
  }
  return g;
}

// One-sided sensitivities of w_p^p to the Q breakpoint u = F_Q(q_lo), where
// the atoms q_lo < q_hi meet.
double breakpoint_coefficient(const DiscreteDist& target, double u, double q_lo, double q_hi,
                              double order) {
  auto cost_shift = [&](double a) { return abs_pow(a - q_lo, order) - abs_pow(a - q_hi, order); };
  const auto& c = target.cumulative();
  const bool has_left = u > 0.0;
  const bool has_right = u < 1.0;
  double left = 0.0;
  double right = 0.0;
  if (has_left) left = cost_shift(target.support()[static_cast<std::size_t>(std::lower_bound(c.begin(), c.end(), u) - c.begin())]);
  if (has_right) right = cost_shift(target.support()[static_cast<std::size_t>(std::upper_bound(c.begin(), c.end(), u) - c.begin())]);
  if (has_left && has_right) return left == right ? left : 0.5 * (left + right);
  return has_left ? left : right;
}

std::vector<double> grad_wasserstein(const ParametricFamily& f, const DiscreteDist& target,
                                     std::span<const double> theta, double order) {
  const auto q = family_dist(f, theta);
  const auto jac = family_grad_probs(f, theta);
  std::vector<double> g(f.num_params(), 0.0);
  std::vector<double> grad_fq(f.num_params(), 0.0);
  for (std::size_t j = 0; j + 1 < q.size(); ++j) {
    axpy(1.0, jac[j], grad_fq);
    const double coef = breakpoint_coefficient(target, q.cumulative()[j], q.support()[j],
                                               q.support()[j + 1], order);
    if (coef != 0.0) axpy(coef, grad_fq, g);
  }
  return g;
}

std::vector<double> grad_against(const Divergence& d, const ParametricFamily& f,
                                 const DiscreteDist& target, std::span<const double> theta) {
  f.check_params(theta);
  switch (d.kind) {
    case Divergence::Kind::KL: return grad_kl(f, target, theta);
    case Divergence::Kind::WassersteinPP:
      if (!(d.order >= 1.0)) throw std::domain_error("grad: order p must be >= 1");
      return grad_wasserstein(f, target, theta, d.order);
    case Divergence::Kind::LpPP:
      if (!(d.order >= 1.0)) throw std::domain_error("grad: order p must be >= 1");
      return grad_lp(f, target, theta, d.order);
    case Divergence::Kind::Cramer: return grad_lp(f, target, theta, 2.0);
    case Divergence::Kind::Energy: {
      auto g = grad_lp(f, target, theta, 2.0);
      for (auto& v : g) v *= 2.0;
      return g;
    }
  }
  throw std::logic_error("grad: unknown divergence");
}

bool bernoulli_target(const DiscreteDist& target) {
  for (double x : target.support()) {
    if (x != 0.0 && x != 1.0) return false;
  }
  return true;
}

}  // namespace

double loss_value(const LossSpec& spec, std::span<const double> theta) {
  return divergence(spec.divergence, spec.target, family_dist(spec.family, theta));
}

std::vector<double> grad_true(const LossSpec& spec, std::span<const double> theta) {
  return grad_against(spec.divergence, spec.family, spec.target, theta);
}

std::vector<double> grad_sample(const LossSpec& spec, std::span<const double> theta,
                                std::span<const double> samples) {
  return grad_against(spec.divergence, spec.family, empirical(samples), theta);
}

double multiset_count(std::size_t k, std::size_t m) {
  if (k == 0) return m == 0 ? 1.0 : 0.0;
  return std::round(std::exp(log_binomial_coefficient(m + k - 1, k - 1)));
}

void for_each_empirical(const DiscreteDist& target, std::size_t m, double budget,
                        const std::function<void(const DiscreteDist&, double)>& visit) {
  if (m == 0) throw std::domain_error("for_each_empirical: m must be >= 1");
  const std::size_t k = target.size();
  const double count = multiset_count(k, m);
  if (count > budget) {
    throw EnumerationBudgetExceeded("enumeration of " + std::to_string(count) +
                                    " multisets exceeds budget " + std::to_string(budget));
  }
  std::vector<std::size_t> counts(k, 0);
  const auto md = static_cast<double>(m);

  // Atom `atom` receives between 0 and `left` draws; the last atom takes the rest.
  std::function<void(std::size_t, std::size_t, double)> recurse =
      [&](std::size_t atom, std::size_t left, double weight) {
        const double p = target.probs()[atom];
        if (atom + 1 == k) {
          counts[atom] = left;
          const double w = weight * std::pow(p, static_cast<double>(left));
          if (w == 0.0) return;
          std::vector<double> support;
          std::vector<double> probs;
          for (std::size_t a = 0; a < k; ++a) {
            if (counts[a] == 0) continue;
            support.push_back(target.support()[a]);
            probs.push_back(static_cast<double>(counts[a]) / md);
          }
          visit(DiscreteDist(std::move(support), std::move(probs)), w);
          return;
        }
        double choose = 1.0;  // C(left, c), built incrementally
        double power = 1.0;   // p^c
        for (std::size_t c = 0; c <= left; ++c) {
          if (c > 0) {
            choose = choose * static_cast<double>(left - c + 1) / static_cast<double>(c);
            power *= p;
          }
          counts[atom] = c;
          const double w = weight * choose * power;
          if (w == 0.0 && c > 0) break;
          recurse(atom + 1, left - c, w);
        }
      };
  recurse(0, m, 1.0);
}

GradReport expected_sample_grad(const LossSpec& spec, std::span<const double> theta,
                                std::size_t m, double budget) {
  GradReport report;
  report.m = m;
  report.true_grad = grad_true(spec, theta);
  const std::size_t n = spec.family.num_params();
  std::vector<std::vector<double>> terms(n);
  for_each_empirical(spec.target, m, budget, [&](const DiscreteDist& emp, double w) {
    const auto g = grad_against(spec.divergence, spec.family, emp, theta);
    for (std::size_t k = 0; k < n; ++k) terms[k].push_back(w * g[k]);
    ++report.outcomes;
  });
  report.expected_sample_grad.resize(n);
  report.bias.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    report.expected_sample_grad[k] = pairwise_sum(terms[k]);
    report.bias[k] = report.expected_sample_grad[k] - report.true_grad[k];
  }

  if (spec.family.kind() == FamilyKind::Bernoulli &&
      spec.divergence.kind == Divergence::Kind::WassersteinPP && bernoulli_target(spec.target)) {
    const double theta_star = 1.0 - cdf(spec.target, 0.0);
    const double t = std::clamp(theta[0], kBernoulliMin, kBernoulliMax);
    const auto split = binomial_split(m, theta_star, t);
    report.bernoulli_closed_form = split.below - split.above;
    const double grid = std::round(t * static_cast<double>(m)) / static_cast<double>(m);
    const bool off_grid = std::abs(t - grid) > 1e-12;
    if (off_grid && std::abs(*report.bernoulli_closed_form - report.expected_sample_grad[0]) > 1e-12) {
      throw std::logic_error("expected_sample_grad: enumeration disagrees with the binomial closed form");
    }
  }
  return report;
}

MonteCarloGrad monte_carlo_sample_grad(const LossSpec& spec, std::span<const double> theta,
                                       std::size_t m, std::size_t draws, Rng& rng) {
  if (draws < 2) throw std::domain_error("monte_carlo_sample_grad: need at least 2 draws");
  const std::size_t n = spec.family.num_params();
  std::vector<double> mean(n, 0.0);
  std::vector<double> m2(n, 0.0);
  for (std::size_t t = 0; t < draws; ++t) {
    const auto g = grad_sample(spec, theta, sample(spec.target, rng, m));
    // Welford update
    for (std::size_t k = 0; k < n; ++k) {
      const double delta = g[k] - mean[k];
      mean[k] += delta / static_cast<double>(t + 1);
      m2[k] += delta * (g[k] - mean[k]);
    }
  }
  MonteCarloGrad out{mean, std::vector<double>(n), draws};
  const auto dn = static_cast<double>(draws);
  for (std::size_t k = 0; k < n; ++k) out.std_error[k] = std::sqrt(m2[k] / (dn - 1.0) / dn);
  return out;
}

std::vector<double> finite_diff(const LossSpec& spec, std::span<const double> theta, double h) {
  if (!(h > 0.0)) throw std::domain_error("finite_diff: step must be > 0");
  spec.family.check_params(theta);
  std::vector<double> probe(theta.begin(), theta.end());
  std::vector<double> g(theta.size());
  for (std::size_t k = 0; k < theta.size(); ++k) {
    const double saved = probe[k];
    probe[k] = saved + h;
    if (!spec.family.in_interior(probe)) throw std::domain_error("finite_diff: probe leaves the family interior");
    const double up = loss_value(spec, probe);
    probe[k] = saved - h;
    if (!spec.family.in_interior(probe)) throw std::domain_error("finite_diff: probe leaves the family interior");
    const double down = loss_value(spec, probe);
    probe[k] = saved;
    g[k] = (up - down) / (2.0 * h);
  }
  return g;
}

}  // namespace cramer
