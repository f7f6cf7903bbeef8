#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cramer/distributions.hpp"
#include "cramer/divergences.hpp"
#include "cramer/gradients.hpp"

namespace cramer::sgd {

enum class GradMode { True, Sample };

struct SgdConfig {
  LossSpec loss;
  GradMode mode = GradMode::True;
  std::size_t m = 1;  // samples per step in Sample mode
  double alpha = 1e-3;
  std::size_t steps = 100000;
  /// Drawn per seed when absent: U[-1, 1] per coordinate, or U(0, 1) for the
  /// Bernoulli family.
  std::optional<std::vector<double>> theta0;
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  /// Evaluated against loss.target.
  Divergence eval_metric = Divergence::wasserstein(1.0);
  std::size_t eval_every = 100;
};

struct TrajectoryPoint {
  std::size_t step = 0;
  std::vector<double> theta;
  double eval = 0.0;
};

struct SeedRun {
  std::uint64_t seed = 0;
  std::vector<TrajectoryPoint> points;  // step 0, every eval_every, and the last step
};

struct SummaryPoint {
  std::size_t step = 0;
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation across seeds
};

struct Trajectory {
  std::string loss;  // divergence name
  std::string mode;  // "true" or "sample"
  std::size_t m = 0; // 0 in true-gradient mode
  std::vector<SeedRun> runs;
  std::vector<SummaryPoint> summary;

  const SummaryPoint& final() const { return summary.back(); }
};

/// Raised when a step produces a non-finite gradient or parameter.
class SgdDiverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Throws std::invalid_argument for alpha < 0, steps == 0, empty seeds or
/// eval_every == 0.
void validate(const SgdConfig& cfg);

/// Fixed-step descent theta <- project(theta - alpha g); g is the true
/// gradient or a fresh sample gradient each step. Seeds run in parallel; the
/// result depends only on cfg.
Trajectory run_sgd(const SgdConfig& cfg);

/// Default target for the three-point experiment on {0, 1, 10}.
DiscreteDist default_toy_target();

struct ToyMinimizer {
  std::string objective;  // "kl", "w1", "cramer", "w1_sample_m1"
  double theta = 0.0;
  DiscreteDist q;
  double loss = 0.0;
};

/// Search bracket for the toy parameter.
inline constexpr double kToyThetaMin = -12.0;
inline constexpr double kToyThetaMax = 12.0;

/// Minimizers of KL, w1 and Cramer against target under the three-point
/// family, plus the minimizer of the expected m = 1 sample w1 loss. Grid
/// search followed by golden-section refinement. Throws
/// std::invalid_argument unless target is supported on {0, 1, 10}.
std::vector<ToyMinimizer> toy_minimizer_table(const DiscreteDist& target);

struct ToyCurvesConfig {
  DiscreteDist target = default_toy_target();
  std::vector<std::size_t> m_list{1};
  double alpha = 1e-3;
  std::size_t steps = 100000;
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  std::size_t eval_every = 100;
};

/// Runs Cramer (true and sample(m)), w1 (true and sample(m)) and KL (true)
/// on the three-point family, all evaluated by true w1 against the target.
std::vector<Trajectory> toy_learning_curves(const ToyCurvesConfig& cfg);

/// Header: loss,mode,m,seed,step,theta,eval_w1. Vector parameters are
/// written ';'-separated in the theta column.
void write_trajectory_csv(std::ostream& os, std::span<const Trajectory> trajectories);

/// Header: objective,theta,q0,q1,q10,loss.
void write_minimizer_csv(std::ostream& os, std::span<const ToyMinimizer> rows);

}  // namespace cramer::sgd
