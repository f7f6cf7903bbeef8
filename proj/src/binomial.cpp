#include "cramer/binomial.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "cramer/numeric.hpp"

namespace cramer {

namespace {

using PascalTable = std::array<std::array<std::uint64_t, kExactBinomialMax + 1>, kExactBinomialMax + 1>;

const PascalTable& pascal() {
  static const PascalTable table = [] {
    PascalTable t{};
    for (std::size_t n = 0; n <= kExactBinomialMax; ++n) {
      t[n][0] = 1;
      for (std::size_t k = 1; k <= n; ++k) t[n][k] = t[n - 1][k - 1] + (k < n ? t[n - 1][k] : 0);
    }
    return t;
  }();
  return table;
}

}  // namespace

double log_binomial_coefficient(std::size_t m, std::size_t k) {
  if (k > m) throw std::out_of_range("log_binomial_coefficient: k > m");
  if (m <= kExactBinomialMax) return std::log(static_cast<double>(pascal()[m][k]));
  const auto md = static_cast<double>(m);
  const auto kd = static_cast<double>(k);
  return std::lgamma(md + 1.0) - std::lgamma(kd + 1.0) - std::lgamma(md - kd + 1.0);
}

std::vector<double> binomial_pmf(std::size_t m, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("binomial_pmf: p must lie in [0, 1]");
  std::vector<double> pmf(m + 1, 0.0);
  if (p == 0.0) {
    pmf.front() = 1.0;
    return pmf;
  }
  if (p == 1.0) {
    pmf.back() = 1.0;
    return pmf;
  }
  const double log_p = std::log(p);
  const double log_q = std::log1p(-p);
  for (std::size_t k = 0; k <= m; ++k) {
    pmf[k] = std::exp(log_binomial_coefficient(m, k) + static_cast<double>(k) * log_p +
                      static_cast<double>(m - k) * log_q);
  }
  return pmf;
}

BinomialSplit binomial_split(std::size_t m, double p, double t) {
  const auto pmf = binomial_pmf(m, p);
  std::vector<double> below;
  std::vector<double> above;
  BinomialSplit split;
  for (std::size_t k = 0; k <= m; ++k) {
    const double mean = static_cast<double>(k) / static_cast<double>(m);
    if (mean < t) {
      below.push_back(pmf[k]);
    } else if (mean > t) {
      above.push_back(pmf[k]);
    } else {
      split.tie += pmf[k];
    }
  }
  split.below = pairwise_sum(below);
  split.above = pairwise_sum(above);
  // The log-gamma pmf can miss 1 by a few ulps per term at large m.
  const double total = split.below + split.tie + split.above;
  split.below /= total;
  split.tie /= total;
  split.above /= total;
  return split;
}

}  // namespace cramer
