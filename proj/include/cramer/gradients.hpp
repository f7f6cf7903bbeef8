#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "cramer/distributions.hpp"
#include "cramer/divergences.hpp"
#include "cramer/rng.hpp"

namespace cramer {

/// The loss theta -> d(target, Q_theta).
struct LossSpec {
  Divergence divergence;
  ParametricFamily family;
  DiscreteDist target;
};

/// Output of the sample-gradient bias oracle.
struct GradReport {
  std::vector<double> true_grad;
  std::vector<double> expected_sample_grad;
  std::vector<double> bias;  // expected_sample_grad - true_grad
  std::size_t m = 0;
  std::size_t outcomes = 0;  // multisets visited
  /// E g_hat = P{theta_hat < theta} - P{theta_hat > theta}, filled for the
  /// Bernoulli family under w_p^p.
  std::optional<double> bernoulli_closed_form;
};

inline constexpr double kDefaultEnumerationBudget = 1e7;

double loss_value(const LossSpec& spec, std::span<const double> theta);

/// Exact gradient of theta -> d(target, Q_theta).
///
/// KL: -sum_x P(x) grad log Q_theta(x); throws InfiniteLoss when a P-atom has
/// no Q-mass. l_p^p: sum over merged support segments of
/// p |F_Q - F_P|^(p-1) sgn(F_Q - F_P) grad F_Q * length. w_p^p: each interior
/// Q breakpoint u_j = F_Q(q_j) contributes
/// (|a - q_j|^p - |a - q_{j+1}|^p) grad F_Q(q_j) with a = F_P^-1(u_j); when u_j
/// coincides with a P breakpoint the two one-sided values are averaged, which
/// yields sgn(0) = 0 for the Bernoulli case. Energy: 2 * Cramer (univariate).
std::vector<double> grad_true(const LossSpec& spec, std::span<const double> theta);

/// grad_true with the target replaced by empirical(samples).
std::vector<double> grad_sample(const LossSpec& spec, std::span<const double> theta,
                                std::span<const double> samples);

/// Number of size-m multisets over k outcome types, C(m + k - 1, k - 1), as a
/// double.
double multiset_count(std::size_t k, std::size_t m);

/// Visits every empirical distribution of m i.i.d. draws from target, with
/// its multinomial probability. Outcomes of probability zero are skipped.
/// Throws EnumerationBudgetExceeded when the multiset count exceeds budget.
void for_each_empirical(const DiscreteDist& target, std::size_t m, double budget,
                        const std::function<void(const DiscreteDist&, double)>& visit);

/// Exact E_{X_m ~ P} grad d(P_hat_m, Q_theta) by multiset enumeration. For
/// the Bernoulli family under w_p^p the binomial closed form is computed too
/// and checked to 1e-12 (std::logic_error on disagreement) whenever theta is
/// off the grid {k/m}.
GradReport expected_sample_grad(const LossSpec& spec, std::span<const double> theta,
                                std::size_t m, double budget = kDefaultEnumerationBudget);

/// Monte Carlo estimate of the expected sample gradient.
struct MonteCarloGrad {
  std::vector<double> mean;
  std::vector<double> std_error;
  std::size_t draws = 0;
};
MonteCarloGrad monte_carlo_sample_grad(const LossSpec& spec, std::span<const double> theta,
                                       std::size_t m, std::size_t draws, Rng& rng);

/// Central differences of loss_value. Throws std::domain_error if h <= 0 or a
/// probe leaves the family's interior.
std::vector<double> finite_diff(const LossSpec& spec, std::span<const double> theta, double h);

}  // namespace cramer
