#pragma once

#include <string>
#include <vector>

#include "cramer/distributions.hpp"

namespace cramer {

/// KL(P || Q) in nats. Returns +inf when some P-atom with positive mass has
/// zero Q-mass or is not a Q support point.
double kl(const DiscreteDist& p, const DiscreteDist& q);

/// w_p^p(P, Q) = int_0^1 |F_P^-1(u) - F_Q^-1(u)|^p du, computed exactly by
/// walking the merged cumulative breakpoints. Throws std::domain_error for
/// p < 1.
double wasserstein_pp(const DiscreteDist& p, const DiscreteDist& q, double order);

/// l_p^p(P, Q) = int |F_P(x) - F_Q(x)|^p dx over the merged support
/// segments. Throws std::domain_error for p < 1.
double lp_pp(const DiscreteDist& p, const DiscreteDist& q, double order);

/// Cramer distance l_2^2.
double cramer(const DiscreteDist& p, const DiscreteDist& q);

/// Energy distance 2 E|X - Y| - E|X - X'| - E|Y - Y'| by exact weighted
/// double sums. Throws std::domain_error on dimension mismatch.
double energy(const PointCloud& p, const PointCloud& q);

/// Univariate convenience overload.
double energy(const DiscreteDist& p, const DiscreteDist& q);

/// The witness f*(x) = E|x - Y'| - E|x - X'| for the pair (P, Q).
double energy_witness(const PointCloud& p, const PointCloud& q, const std::vector<double>& x);

/// E f*(X) - E f*(Y); equals energy(P, Q).
double energy_via_dual(const PointCloud& p, const PointCloud& q);

/// Energy distance with |.|_2 replaced by |.|_2^alpha, alpha in (0, 2].
/// Throws std::domain_error outside that range or on dimension mismatch.
double energy_alpha(const PointCloud& p, const PointCloud& q, double alpha);

/// Tagged divergence used by losses, optimizers and the CLI.
struct Divergence {
  enum class Kind { KL, WassersteinPP, LpPP, Cramer, Energy };

  Kind kind = Kind::WassersteinPP;
  double order = 1.0;  // used by WassersteinPP and LpPP

  static Divergence kl() { return {Kind::KL, 1.0}; }
  static Divergence wasserstein(double p) { return {Kind::WassersteinPP, p}; }
  static Divergence lp(double p) { return {Kind::LpPP, p}; }
  static Divergence cramer() { return {Kind::Cramer, 2.0}; }
  static Divergence energy() { return {Kind::Energy, 1.0}; }

  /// Short stable name, e.g. "kl", "w1", "w1.5", "l3", "cramer", "energy".
  std::string name() const;

  friend bool operator==(const Divergence&, const Divergence&) = default;
};

double divergence(const Divergence& d, const DiscreteDist& p, const DiscreteDist& q);

}  // namespace cramer
