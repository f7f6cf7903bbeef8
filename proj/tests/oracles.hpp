#pragma once

// Reference computations for tests. Nothing here calls into the divergence,
// gradient or bias code under test: CDFs and quantiles are linear scans,
// integrals are midpoint evaluations between breakpoints, expectations are
// plain loops over ordered sample tuples.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

#include "cramer/distributions.hpp"
#include "cramer/rng.hpp"

namespace oracle {

struct Atoms {
  std::vector<double> x;
  std::vector<double> p;
};

inline Atoms atoms(const cramer::DiscreteDist& d) { return {d.support(), d.probs()}; }

inline double cdf(const Atoms& a, double x) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.x.size(); ++i) {
    if (a.x[i] <= x) acc += a.p[i];
  }
  return acc;
}

// Smallest support point whose running mass reaches u. Evaluated only at
// interval midpoints, so exact ties never matter.
inline double quantile(const Atoms& a, double u) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.x.size(); ++i) {
    acc += a.p[i];
    if (acc >= u) return a.x[i];
  }
  return a.x.back();
}

inline std::vector<double> running(const Atoms& a) {
  std::vector<double> out;
  double acc = 0.0;
  for (double p : a.p) out.push_back(acc += p);
  return out;
}

inline double wpp(const cramer::DiscreteDist& P, const cramer::DiscreteDist& Q, double order) {
  const auto a = atoms(P);
  const auto b = atoms(Q);
  std::vector<double> us{0.0, 1.0};
  for (double u : running(a)) us.push_back(std::min(u, 1.0));
  for (double u : running(b)) us.push_back(std::min(u, 1.0));
  std::sort(us.begin(), us.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < us.size(); ++i) {
    const double w = us[i + 1] - us[i];
    if (w <= 0.0) continue;
    const double mid = 0.5 * (us[i] + us[i + 1]);
    total += w * std::pow(std::abs(quantile(a, mid) - quantile(b, mid)), order);
  }
  return total;
}

inline double lpp(const cramer::DiscreteDist& P, const cramer::DiscreteDist& Q, double order) {
  const auto a = atoms(P);
  const auto b = atoms(Q);
  std::vector<double> xs = a.x;
  xs.insert(xs.end(), b.x.begin(), b.x.end());
  std::sort(xs.begin(), xs.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    const double w = xs[i + 1] - xs[i];
    if (w <= 0.0) continue;
    const double mid = 0.5 * (xs[i] + xs[i + 1]);
    total += w * std::pow(std::abs(cdf(a, mid) - cdf(b, mid)), order);
  }
  return total;
}

inline double kl(const cramer::DiscreteDist& P, const cramer::DiscreteDist& Q) {
  double total = 0.0;
  for (std::size_t i = 0; i < P.size(); ++i) {
    const double p = P.probs()[i];
    if (p == 0.0) continue;
    double q = 0.0;
    for (std::size_t j = 0; j < Q.size(); ++j) {
      if (Q.support()[j] == P.support()[i]) q = Q.probs()[j];
    }
    if (q == 0.0) return std::numeric_limits<double>::infinity();
    total += p * std::log(p / q);
  }
  return total;
}

using Points = std::vector<std::vector<double>>;

inline double dist(const std::vector<double>& u, const std::vector<double>& v, double alpha = 1.0) {
  double s = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) s += (u[k] - v[k]) * (u[k] - v[k]);
  return std::pow(std::sqrt(s), alpha);
}

inline double mean_dist(const Points& a, const std::vector<double>& wa, const Points& b,
                        const std::vector<double>& wb, double alpha = 1.0) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) s += wa[i] * wb[j] * dist(a[i], b[j], alpha);
  }
  return s;
}

inline double energy(const Points& a, const std::vector<double>& wa, const Points& b,
                     const std::vector<double>& wb, double alpha = 1.0) {
  return 2.0 * mean_dist(a, wa, b, wb, alpha) - mean_dist(a, wa, a, wa, alpha) - mean_dist(b, wb, b, wb, alpha);
}

// E f(x_1, ..., x_m) over i.i.d. draws from target, by enumerating all K^m
// ordered tuples.
inline std::vector<double> expect_over_tuples(
    const cramer::DiscreteDist& target, std::size_t m,
    const std::function<std::vector<double>(const std::vector<double>&)>& f) {
  const std::size_t K = target.size();
  std::vector<std::size_t> idx(m, 0);
  std::vector<double> acc;
  std::vector<double> draw(m);
  while (true) {
    double w = 1.0;
    for (std::size_t i = 0; i < m; ++i) {
      w *= target.probs()[idx[i]];
      draw[i] = target.support()[idx[i]];
    }
    if (w > 0.0) {
      const auto v = f(draw);
      if (acc.empty()) acc.assign(v.size(), 0.0);
      for (std::size_t k = 0; k < v.size(); ++k) acc[k] += w * v[k];
    }
    std::size_t pos = 0;
    while (pos < m && ++idx[pos] == K) idx[pos++] = 0;
    if (pos == m) break;
  }
  return acc;
}

// E sgn(theta - K/m) for K ~ Binomial(m, theta_star), with the binomial
// coefficients built by long double products.
inline double bernoulli_expected_grad(std::size_t m, double theta_star, double theta) {
  long double total = 0.0L;
  long double coeff = 1.0L;
  for (std::size_t k = 0; k <= m; ++k) {
    if (k > 0) coeff = coeff * static_cast<long double>(m - k + 1) / static_cast<long double>(k);
    const long double w = coeff * std::pow(static_cast<long double>(theta_star), static_cast<long double>(k)) *
                          std::pow(1.0L - theta_star, static_cast<long double>(m - k));
    const double diff = theta - static_cast<double>(k) / static_cast<double>(m);
    total += w * static_cast<long double>((diff > 0) - (diff < 0));
  }
  return static_cast<double>(total);
}

inline std::vector<double> central_diff(const std::function<double(const std::vector<double>&)>& f,
                                        std::vector<double> x, double h) {
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double x0 = x[i];
    x[i] = x0 + h;
    const double up = f(x);
    x[i] = x0 - h;
    const double down = f(x);
    x[i] = x0;
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

// Five-point stencil, truncation O(h^4).
inline std::vector<double> central_diff4(const std::function<double(const std::vector<double>&)>& f,
                                         std::vector<double> x, double h) {
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double x0 = x[i];
    double v[4];
    const double offs[4] = {2 * h, h, -h, -2 * h};
    for (int k = 0; k < 4; ++k) {
      x[i] = x0 + offs[k];
      v[k] = f(x);
    }
    x[i] = x0;
    g[i] = (-v[0] + 8.0 * v[1] - 8.0 * v[2] + v[3]) / (12.0 * h);
  }
  return g;
}

// |a - b|_inf <= rel * max(|a|_inf, |b|_inf) + floor
inline bool rel_close(const std::vector<double>& a, const std::vector<double>& b, double rel,
                      double floor = 1e-10) {
  if (a.size() != b.size()) return false;
  double diff = 0.0;
  double scale = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff = std::max(diff, std::abs(a[i] - b[i]));
    scale = std::max({scale, std::abs(a[i]), std::abs(b[i])});
  }
  return diff <= rel * scale + floor;
}

// Random distribution on `k` distinct points drawn from {lo, ..., hi} (integer
// grid), or from a continuous range when `grid` is false.
inline cramer::DiscreteDist random_dist(cramer::Rng& rng, std::size_t k, double lo, double hi, bool grid = true) {
  std::vector<double> xs;
  while (xs.size() < k) {
    double x = grid ? std::floor(rng.uniform(lo, hi + 1.0)) : rng.uniform(lo, hi);
    x = std::min(x, hi);
    if (std::find(xs.begin(), xs.end(), x) == xs.end()) xs.push_back(x);
  }
  std::sort(xs.begin(), xs.end());
  std::vector<double> ps(k);
  double s = 0.0;
  for (auto& p : ps) s += (p = 0.05 + rng.uniform());
  for (auto& p : ps) p /= s;
  // Absorb rounding so the sum is 1 to within an ulp or two.
  double rest = 1.0;
  for (std::size_t i = 0; i + 1 < k; ++i) rest -= ps[i];
  ps.back() = rest;
  return cramer::DiscreteDist(xs, ps);
}

inline cramer::DiscreteDist with_support(cramer::Rng& rng, std::vector<double> xs) {
  std::vector<double> ps(xs.size());
  double s = 0.0;
  for (auto& p : ps) s += (p = 0.05 + rng.uniform());
  for (auto& p : ps) p /= s;
  double rest = 1.0;
  for (std::size_t i = 0; i + 1 < ps.size(); ++i) rest -= ps[i];
  ps.back() = rest;
  return cramer::DiscreteDist(std::move(xs), std::move(ps));
}

}  // namespace oracle
