#include "cramer/divergences.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "cramer/numeric.hpp"

namespace cramer {

namespace {

void check_order(double order, const char* what) {
  if (!(order >= 1.0) || !std::isfinite(order)) {
    throw std::domain_error(std::string(what) + ": order p must be finite and >= 1");
  }
}

void check_dims(const PointCloud& p, const PointCloud& q, const char* what) {
  if (p.dim() != q.dim()) {
    throw std::domain_error(std::string(what) + ": dimension mismatch (" +
                            std::to_string(p.dim()) + " vs " + std::to_string(q.dim()) + ")");
  }
}

double distance(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    s += d * d;
  }
  return std::sqrt(s);
}

// Sorting before summing makes the result independent of the order in which
// pairs were visited, so swapping the arguments gives the bit-identical value.
double order_free_sum(std::vector<double>& terms) {
  std::sort(terms.begin(), terms.end());
  return pairwise_sum(terms);
}

template <typename Kernel>
double expected_kernel(const PointCloud& a, const PointCloud& b, Kernel kernel) {
  std::vector<double> terms;
  terms.reserve(a.size() * b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      terms.push_back(a.weights()[i] * b.weights()[j] * kernel(distance(a.points()[i], b.points()[j])));
    }
  }
  return order_free_sum(terms);
}

template <typename Kernel>
double energy_with_kernel(const PointCloud& p, const PointCloud& q, Kernel kernel) {
  const double cross = expected_kernel(p, q, kernel);
  const double self_p = expected_kernel(p, p, kernel);
  const double self_q = expected_kernel(q, q, kernel);
  return 2.0 * cross - (self_p + self_q);
}

}  // namespace

double kl(const DiscreteDist& p, const DiscreteDist& q) {
  std::vector<double> terms;
  terms.reserve(p.size());
  const auto& qs = q.support();
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double pi = p.probs()[i];
    if (pi == 0.0) continue;
    const auto it = std::lower_bound(qs.begin(), qs.end(), p.support()[i]);
    if (it == qs.end() || *it != p.support()[i]) return kInf;
    const double qi = q.probs()[static_cast<std::size_t>(it - qs.begin())];
    if (qi == 0.0) return kInf;
    terms.push_back(pi * std::log(pi / qi));
  }
  // Clamp round-off; KL is non-negative.
  return std::max(0.0, pairwise_sum(terms));
}

double wasserstein_pp(const DiscreteDist& p, const DiscreteDist& q, double order) {
  check_order(order, "wasserstein_pp");
  const auto& cp = p.cumulative();
  const auto& cq = q.cumulative();
  std::vector<double> terms;
  terms.reserve(p.size() + q.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double u = 0.0;
  // Both cumulative tables end in exactly 1, so whenever one index sits on
  // its last atom with next == 1 the other one does too (or advances).
  while (true) {
    const double next = std::min(cp[i], cq[j]);
    if (next > u) terms.push_back((next - u) * abs_pow(p.support()[i] - q.support()[j], order));
    u = next;
    if (i + 1 == p.size() && j + 1 == q.size()) break;
    if (cp[i] == next && i + 1 < p.size()) ++i;
    if (cq[j] == next && j + 1 < q.size()) ++j;
  }
  return pairwise_sum(terms);
}

double lp_pp(const DiscreteDist& p, const DiscreteDist& q, double order) {
  check_order(order, "lp_pp");
  const auto& sp = p.support();
  const auto& sq = q.support();
  std::vector<double> terms;
  terms.reserve(sp.size() + sq.size());
  std::size_t i = 0;  // atoms of P at or below the current point
  std::size_t j = 0;
  double fp = 0.0;
  double fq = 0.0;
  double x = std::min(sp.front(), sq.front());
  while (i < sp.size() || j < sq.size()) {
    // Absorb every atom located at x.
    while (i < sp.size() && sp[i] == x) fp = p.cumulative()[i++];
    while (j < sq.size() && sq[j] == x) fq = q.cumulative()[j++];
    if (i == sp.size() && j == sq.size()) break;
    const double next = std::min(i < sp.size() ? sp[i] : kInf, j < sq.size() ? sq[j] : kInf);
    const double gap = fp - fq;
    if (gap != 0.0) terms.push_back(abs_pow(gap, order) * (next - x));
    x = next;
  }
  return pairwise_sum(terms);
}

double cramer(const DiscreteDist& p, const DiscreteDist& q) { return lp_pp(p, q, 2.0); }

double energy(const PointCloud& p, const PointCloud& q) {
  check_dims(p, q, "energy");
  return energy_with_kernel(p, q, [](double r) { return r; });
}

double energy(const DiscreteDist& p, const DiscreteDist& q) {
  return energy(PointCloud::from_discrete(p), PointCloud::from_discrete(q));
}

double energy_witness(const PointCloud& p, const PointCloud& q, const std::vector<double>& x) {
  if (x.size() != p.dim()) throw std::domain_error("energy_witness: dimension mismatch");
  std::vector<double> terms;
  terms.reserve(p.size() + q.size());
  for (std::size_t j = 0; j < q.size(); ++j) terms.push_back(q.weights()[j] * distance(x, q.points()[j]));
  for (std::size_t i = 0; i < p.size(); ++i) terms.push_back(-p.weights()[i] * distance(x, p.points()[i]));
  return pairwise_sum(terms);
}

double energy_via_dual(const PointCloud& p, const PointCloud& q) {
  check_dims(p, q, "energy_via_dual");
  std::vector<double> terms;
  terms.reserve(p.size() + q.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    terms.push_back(p.weights()[i] * energy_witness(p, q, p.points()[i]));
  }
  for (std::size_t j = 0; j < q.size(); ++j) {
    terms.push_back(-q.weights()[j] * energy_witness(p, q, q.points()[j]));
  }
  return pairwise_sum(terms);
}

double energy_alpha(const PointCloud& p, const PointCloud& q, double alpha) {
  if (!(alpha > 0.0 && alpha <= 2.0)) {
    throw std::domain_error("energy_alpha: alpha must lie in (0, 2]");
  }
  check_dims(p, q, "energy_alpha");
  if (alpha == 1.0) return energy(p, q);
  if (alpha == 2.0) return energy_with_kernel(p, q, [](double r) { return r * r; });
  return energy_with_kernel(p, q, [alpha](double r) { return std::pow(r, alpha); });
}

std::string Divergence::name() const {
  auto with_order = [this](const char* prefix) {
    std::ostringstream os;
    os << prefix << order;
    return os.str();
  };
  switch (kind) {
    case Kind::KL: return "kl";
    case Kind::WassersteinPP: return with_order("w");
    case Kind::LpPP: return with_order("l");
    case Kind::Cramer: return "cramer";
    case Kind::Energy: return "energy";
  }
  return "unknown";
}

double divergence(const Divergence& d, const DiscreteDist& p, const DiscreteDist& q) {
  switch (d.kind) {
    case Divergence::Kind::KL: return kl(p, q);
    case Divergence::Kind::WassersteinPP: return wasserstein_pp(p, q, d.order);
    case Divergence::Kind::LpPP: return lp_pp(p, q, d.order);
    case Divergence::Kind::Cramer: return cramer(p, q);
    case Divergence::Kind::Energy: return energy(p, q);
  }
  throw std::logic_error("divergence: unknown kind");
}

}  // namespace cramer
