#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>

namespace cramer {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Raised when an exact enumeration would visit more outcomes than allowed.
class EnumerationBudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a loss (and hence its gradient) is +inf, e.g. KL with
/// P not absolutely continuous w.r.t. Q.
class InfiniteLoss : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// sgn with sgn(0) = 0.
inline double sgn(double x) { return static_cast<double>((x > 0.0) - (x < 0.0)); }

/// Pairwise (cascade) summation; error grows as O(log n) rather than O(n).
inline double pairwise_sum(std::span<const double> xs) {
  constexpr std::size_t kBlock = 16;
  if (xs.size() <= kBlock) {
    double acc = 0.0;
    for (double x : xs) acc += x;
    return acc;
  }
  const std::size_t half = xs.size() / 2;
  return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

/// |x|^p with the p == 1 and p == 2 cases kept exact.
inline double abs_pow(double x, double p) {
  const double a = std::abs(x);
  if (p == 1.0) return a;
  if (p == 2.0) return a * a;
  return std::pow(a, p);
}

}  // namespace cramer
