#include "cramer/sgd_lab.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <iomanip>
#include <limits>
#include <numeric>
#include <sstream>

#include "cramer/numeric.hpp"
#include "cramer/parallel.hpp"
#include "cramer/rng.hpp"

namespace cramer::sgd {

namespace {

std::vector<double> draw_theta0(const ParametricFamily& f, Rng& rng) {
  std::vector<double> theta(f.num_params());
  for (auto& t : theta) {
    t = f.kind() == FamilyKind::Bernoulli ? rng.uniform_open_closed() : rng.uniform(-1.0, 1.0);
  }
  return f.project(theta);
}

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

SeedRun run_seed(const SgdConfig& cfg, std::uint64_t seed) {
  const auto& family = cfg.loss.family;
  Rng rng(seed);
  std::vector<double> theta = cfg.theta0 ? family.project(*cfg.theta0) : draw_theta0(family, rng);
  family.check_params(theta);

  SeedRun run{seed, {}};
  auto record = [&](std::size_t step) {
    run.points.push_back({step, theta, divergence(cfg.eval_metric, cfg.loss.target, family_dist(family, theta))});
  };
  record(0);
  for (std::size_t step = 1; step <= cfg.steps; ++step) {
    std::vector<double> g;
    try {
      g = cfg.mode == GradMode::True ? grad_true(cfg.loss, theta)
                                     : grad_sample(cfg.loss, theta, sample(cfg.loss.target, rng, cfg.m));
    } catch (const InfiniteLoss& e) {
      throw SgdDiverged("seed " + std::to_string(seed) + ", step " + std::to_string(step) + ": " + e.what());
    }
    if (!all_finite(g)) {
      throw SgdDiverged("seed " + std::to_string(seed) + ", step " + std::to_string(step) +
                        ": non-finite gradient");
    }
    for (std::size_t k = 0; k < theta.size(); ++k) theta[k] -= cfg.alpha * g[k];
    theta = family.project(theta);
    if (!all_finite(theta)) {
      throw SgdDiverged("seed " + std::to_string(seed) + ", step " + std::to_string(step) +
                        ": non-finite parameter");
    }
    if (step % cfg.eval_every == 0 || step == cfg.steps) record(step);
  }
  return run;
}

std::vector<SummaryPoint> summarize(const std::vector<SeedRun>& runs) {
  std::vector<SummaryPoint> out;
  const std::size_t n = runs.size();
  for (std::size_t k = 0; k < runs.front().points.size(); ++k) {
    double mean = 0.0;
    for (const auto& r : runs) mean += r.points[k].eval;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (const auto& r : runs) var += (r.points[k].eval - mean) * (r.points[k].eval - mean);
    var = n > 1 ? var / static_cast<double>(n - 1) : 0.0;
    out.push_back({runs.front().points[k].step, mean, std::sqrt(var)});
  }
  return out;
}

// Golden-section refinement of a unimodal objective on [lo, hi].
double golden_section(const std::function<double(double)>& f, double lo, double hi) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int it = 0; it < 200 && (b - a) > 1e-12; ++it) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

double minimize_toy(const std::function<double(double)>& objective) {
  constexpr int kGrid = 2400;
  const double step = (kToyThetaMax - kToyThetaMin) / kGrid;
  double best_theta = kToyThetaMin;
  double best = kInf;
  for (int i = 0; i <= kGrid; ++i) {
    const double t = kToyThetaMin + step * i;
    const double v = objective(t);
    if (v < best) {
      best = v;
      best_theta = t;
    }
  }
  const double lo = std::max(kToyThetaMin, best_theta - step);
  const double hi = std::min(kToyThetaMax, best_theta + step);
  const double refined = golden_section(objective, lo, hi);
  return objective(refined) <= best ? refined : best_theta;
}

std::string theta_text(const std::vector<double>& theta) {
  std::ostringstream os;
  os << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (std::size_t k = 0; k < theta.size(); ++k) os << (k ? ";" : "") << theta[k];
  return os.str();
}

}  // namespace

void validate(const SgdConfig& cfg) {
  if (!(cfg.alpha >= 0.0) || !std::isfinite(cfg.alpha)) throw std::invalid_argument("sgd: alpha must be finite and >= 0");
  if (cfg.steps == 0) throw std::invalid_argument("sgd: steps must be >= 1");
  if (cfg.seeds.empty()) throw std::invalid_argument("sgd: at least one seed is required");
  if (cfg.eval_every == 0) throw std::invalid_argument("sgd: eval_every must be >= 1");
  if (cfg.mode == GradMode::Sample && cfg.m == 0) throw std::invalid_argument("sgd: m must be >= 1");
  if (cfg.theta0) cfg.loss.family.check_params(*cfg.theta0);
}

Trajectory run_sgd(const SgdConfig& cfg) {
  validate(cfg);
  Trajectory traj;
  traj.loss = cfg.loss.divergence.name();
  traj.mode = cfg.mode == GradMode::True ? "true" : "sample";
  traj.m = cfg.mode == GradMode::True ? 0 : cfg.m;
  traj.runs.resize(cfg.seeds.size());
  parallel_for(cfg.seeds.size(), [&](std::size_t i) { traj.runs[i] = run_seed(cfg, cfg.seeds[i]); });
  traj.summary = summarize(traj.runs);
  return traj;
}

DiscreteDist default_toy_target() { return DiscreteDist({0.0, 1.0, 10.0}, {0.5, 0.35, 0.15}); }

std::vector<ToyMinimizer> toy_minimizer_table(const DiscreteDist& target) {
  for (double x : target.support()) {
    if (x != 0.0 && x != 1.0 && x != 10.0) {
      throw std::invalid_argument("toy_minimizer_table: target must be supported on {0, 1, 10}");
    }
  }
  const auto family = ParametricFamily::three_point_toy();
  auto q_of = [&](double t) { return family_dist(family, std::vector<double>{t}); };

  const std::vector<std::pair<std::string, std::function<double(double)>>> objectives = {
      {"kl", [&](double t) { return kl(target, q_of(t)); }},
      {"w1", [&](double t) { return wasserstein_pp(target, q_of(t), 1.0); }},
      {"cramer", [&](double t) { return cramer(target, q_of(t)); }},
      {"w1_sample_m1", [&](double t) {
         const auto q = q_of(t);
         double acc = 0.0;
         for_each_empirical(target, 1, kDefaultEnumerationBudget,
                            [&](const DiscreteDist& emp, double w) { acc += w * wasserstein_pp(emp, q, 1.0); });
         return acc;
       }},
  };

  std::vector<ToyMinimizer> rows;
  for (const auto& [name, objective] : objectives) {
    const double theta = minimize_toy(objective);
    rows.push_back({name, theta, q_of(theta), objective(theta)});
  }
  return rows;
}

std::vector<Trajectory> toy_learning_curves(const ToyCurvesConfig& cfg) {
  const auto family = ParametricFamily::three_point_toy();
  std::vector<SgdConfig> runs;
  auto add = [&](Divergence d, GradMode mode, std::size_t m) {
    SgdConfig c{.loss = LossSpec{d, family, cfg.target}, .theta0 = std::nullopt};
    c.mode = mode;
    c.m = m;
    c.alpha = cfg.alpha;
    c.steps = cfg.steps;
    c.seeds = cfg.seeds;
    c.eval_every = cfg.eval_every;
    runs.push_back(std::move(c));
  };
  add(Divergence::cramer(), GradMode::True, 0);
  for (std::size_t m : cfg.m_list) add(Divergence::cramer(), GradMode::Sample, m);
  add(Divergence::wasserstein(1.0), GradMode::True, 0);
  for (std::size_t m : cfg.m_list) add(Divergence::wasserstein(1.0), GradMode::Sample, m);
  add(Divergence::kl(), GradMode::True, 0);

  std::vector<Trajectory> out;
  out.reserve(runs.size());
  for (const auto& c : runs) out.push_back(run_sgd(c));
  return out;
}

void write_trajectory_csv(std::ostream& os, std::span<const Trajectory> trajectories) {
  os << "loss,mode,m,seed,step,theta,eval_w1\n";
  os << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (const auto& t : trajectories) {
    for (const auto& run : t.runs) {
      for (const auto& p : run.points) {
        os << t.loss << ',' << t.mode << ',' << t.m << ',' << run.seed << ',' << p.step << ','
           << theta_text(p.theta) << ',' << p.eval << '\n';
      }
    }
  }
}

void write_minimizer_csv(std::ostream& os, std::span<const ToyMinimizer> rows) {
  os << "objective,theta,q0,q1,q10,loss\n";
  os << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (const auto& r : rows) {
    os << r.objective << ',' << r.theta << ',' << r.q.probs()[0] << ',' << r.q.probs()[1] << ','
       << r.q.probs()[2] << ',' << r.loss << '\n';
  }
}

}  // namespace cramer::sgd
