#pragma once

#include <cstddef>
#include <vector>

namespace cramer {

/// Largest m for which binomial coefficients are taken from an exact integer
/// table; log-gamma is used beyond it.
inline constexpr std::size_t kExactBinomialMax = 64;

/// log C(m, k).
double log_binomial_coefficient(std::size_t m, std::size_t k);

/// pmf of Binomial(m, p) over k = 0..m, evaluated in log space. p in [0, 1].
std::vector<double> binomial_pmf(std::size_t m, double p);

/// Probabilities of {k/m < t}, {k/m == t} and {k/m > t} for k ~ Binomial(m, p),
/// normalized to sum to 1.
struct BinomialSplit {
  double below = 0.0;
  double tie = 0.0;
  double above = 0.0;
};
BinomialSplit binomial_split(std::size_t m, double p, double t);

}  // namespace cramer
