#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cramer/bias_lab.hpp"
#include "cramer/config.hpp"
#include "cramer/divergences.hpp"
#include "cramer/gan_losses.hpp"
#include "cramer/numeric.hpp"
#include "cramer/ordinal.hpp"
#include "cramer/parallel.hpp"
#include "cramer/rng.hpp"
#include "cramer/sgd_lab.hpp"

using nlohmann::json;
using namespace cramer;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitAssertion = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

json number_or_inf(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

std::vector<std::size_t> parse_m_list(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t pos = 0;
    long long v = 0;
    try {
      v = std::stoll(item, &pos);
    } catch (const std::exception&) {
      throw UsageError("--m: '" + item + "' is not an integer");
    }
    if (pos != item.size() || v < 1) throw UsageError("--m: '" + item + "' is not a positive integer");
    out.push_back(static_cast<std::size_t>(v));
  }
  if (out.empty()) throw UsageError("--m: empty list");
  return out;
}

// Writes to the named file, or stdout when the name is empty.
template <typename F>
void with_output(const std::string& path, F&& write) {
  if (path.empty()) {
    write(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream out(path);
  if (!out) throw UsageError("cannot open " + path + " for writing");
  write(out);
  if (!out) throw std::runtime_error("failed writing " + path);
}

std::vector<std::size_t> range_list(std::size_t lo, std::size_t hi) {
  std::vector<std::size_t> out;
  for (std::size_t m = lo; m <= hi; ++m) out.push_back(m);
  return out;
}

// ---- divergence -----------------------------------------------------------

struct DivergenceArgs {
  std::string kind;
  double p = 1.0;
  std::string dist_a;
  std::string dist_b;
};

int run_divergence(const DivergenceArgs& a) {
  const auto p = config::parse_dist(config::read_json_file(a.dist_a), "");
  const auto q = config::parse_dist(config::read_json_file(a.dist_b), "");
  Divergence d = Divergence::kl();
  if (a.kind == "kl") d = Divergence::kl();
  else if (a.kind == "w1") d = Divergence::wasserstein(1.0);
  else if (a.kind == "l1") d = Divergence::lp(1.0);
  else if (a.kind == "wpp") d = Divergence::wasserstein(a.p);
  else if (a.kind == "lpp") d = Divergence::lp(a.p);
  else if (a.kind == "cramer") d = Divergence::cramer();
  else if (a.kind == "energy") d = Divergence::energy();
  if ((a.kind == "wpp" || a.kind == "lpp") && !(a.p >= 1.0)) throw UsageError("--p must be >= 1");
  const json out{{"kind", a.kind}, {"value", number_or_inf(divergence(d, p, q))}};
  std::cout << out.dump() << '\n';
  return kExitOk;
}

// ---- bias -----------------------------------------------------------------

struct BiasArgs {
  std::string experiment;
  std::string m;
  std::optional<double> theta_star;
  std::optional<double> theta;
  double grid_step = 1e-4;
  std::string out;
};

int run_bias(const BiasArgs& a) {
  bool ok = true;
  const auto& e = a.experiment;
  if (e == "minimax" || e == "halfpoint") {
    const auto ms = a.m.empty() ? range_list(1, 32) : parse_m_list(a.m);
    bias_lab::BiasCurve rows;
    for (std::size_t m : ms) {
      if (e == "minimax") {
        const auto r = bias_lab::minimax_bias(m);
        rows.push_back(r.row);
        if (!r.meets_bound) {
          std::cerr << "minimax: m=" << m << " bias " << r.row.bias << " below 2e^-2\n";
          ok = false;
        }
      } else {
        const auto r = bias_lab::half_point_bias(m);
        rows.push_back(r.row);
        if (!r.meets_bound) {
          std::cerr << "halfpoint: m=" << m << " bias " << r.row.bias << " below 1/6\n";
          ok = false;
        }
      }
    }
    with_output(a.out, [&](std::ostream& os) { bias_lab::write_bias_csv(os, rows); });
  } else if (e == "curve") {
    const auto ms = a.m.empty() ? std::vector<std::size_t>{6} : parse_m_list(a.m);
    if (ms.size() != 1) throw UsageError("--m: curve takes a single m");
    const double ts = a.theta_star.value_or(0.6);
    const auto curve = bias_lab::loss_curve(ms[0], ts, a.grid_step);
    with_output(a.out, [&](std::ostream& os) { bias_lab::write_loss_csv(os, curve); });
    const auto& mins = curve.sample_minimizers;
    if (curve.argmin_true != ts) {
      std::cerr << "curve: true-loss argmin " << curve.argmin_true << " differs from theta* " << ts << '\n';
      ok = false;
    }
    if (curve.argmin_sample < mins.lower - a.grid_step || curve.argmin_sample > mins.upper + a.grid_step) {
      std::cerr << "curve: sample-loss argmin " << curve.argmin_sample << " outside the sample median interval ["
                << mins.lower << ", " << mins.upper << "]\n";
      ok = false;
    }
  } else if (e == "deterministic") {
    const auto ms = a.m.empty() ? std::vector<std::size_t>{5} : parse_m_list(a.m);
    if (ms.size() != 1) throw UsageError("--m: deterministic takes a single m");
    const auto r = bias_lab::deterministic_regime(ms[0], a.theta_star.value_or(0.9));
    with_output(a.out, [&](std::ostream& os) { bias_lab::write_bias_csv(os, r.rows); });
    if (!r.holds) {
      std::cerr << "deterministic: max expected gradient " << r.max_expected_grad << ", sample argmin "
                << r.argmin_sample << " (threshold " << r.threshold << ")\n";
      ok = false;
    }
  } else if (e == "consistency") {
    std::vector<std::size_t> ms;
    if (a.m.empty()) {
      for (std::size_t k = 1; k <= 10; ++k) ms.push_back(std::size_t{1} << k);
    } else {
      ms = parse_m_list(a.m);
    }
    const auto rows = bias_lab::consistency_sweep(a.theta_star.value_or(0.3), a.theta.value_or(0.6), ms);
    with_output(a.out, [&](std::ostream& os) { bias_lab::write_bias_csv(os, rows); });
    for (std::size_t i = 1; i < rows.size(); ++i) {
      if (rows[i].m > rows[i - 1].m && std::abs(rows[i].bias) > std::abs(rows[i - 1].bias)) {
        std::cerr << "consistency: |bias| increases from m=" << rows[i - 1].m << " to m=" << rows[i].m << '\n';
        ok = false;
      }
    }
  } else {
    throw UsageError("unknown experiment " + e);
  }
  return ok ? kExitOk : kExitAssertion;
}

// ---- toy ------------------------------------------------------------------

struct ToyArgs {
  std::string config;
  std::string out;
  std::string table;
  std::optional<std::uint64_t> seed;
};

int run_toy(const ToyArgs& a) {
  sgd::ToyCurvesConfig cfg;
  if (!a.config.empty()) cfg = config::parse_toy_config(config::read_json_file(a.config));
  if (a.seed) {
    for (std::size_t i = 0; i < cfg.seeds.size(); ++i) cfg.seeds[i] = *a.seed + i;
  }
  const auto table = sgd::toy_minimizer_table(cfg.target);
  if (!a.table.empty()) with_output(a.table, [&](std::ostream& os) { sgd::write_minimizer_csv(os, table); });
  const auto curves = sgd::toy_learning_curves(cfg);
  with_output(a.out, [&](std::ostream& os) { sgd::write_trajectory_csv(os, curves); });
  for (const auto& t : curves) {
    std::cerr << t.loss << '/' << t.mode;
    if (t.m) std::cerr << "(m=" << t.m << ')';
    std::cerr << ": final w1 " << t.final().mean << " +- " << t.final().std << '\n';
  }
  return kExitOk;
}

// ---- ordinal --------------------------------------------------------------

struct OrdinalArgs {
  std::string config;
  std::string data = "synth";
  std::string out;
  std::uint64_t seed = 0;
};

int run_ordinal(const OrdinalArgs& a) {
  config::OrdinalRunConfig cfg;
  if (!a.config.empty()) cfg = config::parse_ordinal_config(config::read_json_file(a.config));
  ordinal::OrdinalDataset data;
  if (a.data == "synth") {
    data = ordinal::synth_data(a.seed, cfg.synth);
  } else if (a.data.rfind("csv:", 0) == 0) {
    std::vector<double> bins = cfg.bin_values.value_or(std::vector<double>{});
    if (bins.empty()) {
      for (std::size_t k = 0; k < cfg.synth.K; ++k) bins.push_back(cfg.synth.first_bin + static_cast<double>(k));
    }
    try {
      data = ordinal::load_csv(a.data.substr(4), bins);
    } catch (const std::exception& e) {
      throw config::ConfigError("", e.what());
    }
  } else {
    throw UsageError("--data must be 'synth' or 'csv:PATH'");
  }
  const auto [train_set, test_set] = ordinal::split(data, cfg.test_fraction, a.seed);

  std::vector<ordinal::CurveRun> runs;
  for (auto loss : cfg.losses) {
    for (std::size_t b : cfg.batch_sizes) runs.push_back({loss, b, a.seed, {}});
  }
  parallel_for(runs.size(), [&](std::size_t i) {
    auto& r = runs[i];
    r.curve = ordinal::train(train_set, test_set, {r.loss, r.batch_size, cfg.alpha, cfg.epochs, r.seed}).curve;
  });
  with_output(a.out, [&](std::ostream& os) { ordinal::write_curve_csv(os, runs); });
  for (const auto& r : runs) {
    const auto& m = r.curve.back().test;
    std::cerr << ordinal::to_string(r.loss) << " batch " << r.batch_size << ": rmse " << m.rmse << ", w1 " << m.w1
              << ", nll " << m.nll << '\n';
  }
  return kExitOk;
}

// ---- gan-losses -----------------------------------------------------------

struct GanArgs {
  std::string batch;
  std::uint64_t seed = 0;
};

int run_gan(const GanArgs& a) {
  auto in = config::parse_gan_batch(config::read_json_file(a.batch));
  if (!in.epsilon_given) {
    Rng rng(a.seed);
    in.batch.epsilon = rng.uniform();
  }
  const auto l = gan::evaluate(in.batch, *in.transform);
  const json out{{"generator_loss", l.generator}, {"surrogate_loss", l.surrogate},
                 {"gradient_penalty", l.penalty}, {"critic_loss", l.critic},
                 {"epsilon", in.batch.epsilon},   {"lambda", in.batch.lambda}};
  std::cout << out.dump(2) << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact divergences, sample-gradient bias experiments and Cramer GAN losses."};
  app.require_subcommand(1);
  app.set_version_flag("--version", "cramer_metrics 1.0.0");

  DivergenceArgs div;
  auto* div_cmd = app.add_subcommand("divergence", "Print a divergence between two distributions as JSON");
  div_cmd->add_option("--kind", div.kind, "Divergence")
      ->required()
      ->check(CLI::IsMember({"kl", "w1", "l1", "wpp", "lpp", "cramer", "energy"}));
  div_cmd->add_option("--p", div.p, "Order for wpp and lpp (>= 1)")->capture_default_str();
  div_cmd->add_option("--dist-a", div.dist_a, "First distribution, JSON {support, probs}")->required();
  div_cmd->add_option("--dist-b", div.dist_b, "Second distribution, JSON {support, probs}")->required();

  BiasArgs bias;
  auto* bias_cmd = app.add_subcommand("bias", "Bernoulli sample-Wasserstein bias experiments (CSV)");
  bias_cmd->add_option("--experiment", bias.experiment, "Experiment")
      ->required()
      ->check(CLI::IsMember({"minimax", "curve", "deterministic", "consistency", "halfpoint"}));
  bias_cmd->add_option("--m", bias.m, "Sample size(s), comma-separated");
  bias_cmd->add_option("--theta-star", bias.theta_star, "Target parameter");
  bias_cmd->add_option("--theta", bias.theta, "Model parameter (consistency)");
  bias_cmd->add_option("--grid-step", bias.grid_step, "Grid step for curve, in (0, 1e-3]")->capture_default_str();
  bias_cmd->add_option("--out", bias.out, "Output CSV (default stdout)");

  ToyArgs toy;
  auto* toy_cmd = app.add_subcommand("toy", "Three-point toy experiment: learning curves and minimizers (CSV)");
  toy_cmd->add_option("--config", toy.config, "JSON config (version 1)")->check(CLI::ExistingFile);
  toy_cmd->add_option("--out", toy.out, "Learning-curve CSV (default stdout)");
  toy_cmd->add_option("--table", toy.table, "Minimizer table CSV");
  toy_cmd->add_option("--seed", toy.seed, "First seed; seeds become seed, seed+1, ...");

  OrdinalArgs ord;
  auto* ord_cmd = app.add_subcommand("ordinal", "Ordinal regression learning curves (CSV)");
  ord_cmd->add_option("--config", ord.config, "JSON config (version 1)")->check(CLI::ExistingFile);
  ord_cmd->add_option("--data", ord.data, "synth or csv:PATH")->capture_default_str();
  ord_cmd->add_option("--out", ord.out, "Learning-curve CSV (default stdout)");
  ord_cmd->add_option("--seed", ord.seed, "Seed for data, split and shuffling")->capture_default_str();

  GanArgs gan_args;
  auto* gan_cmd = app.add_subcommand("gan-losses", "Evaluate Cramer GAN losses on a JSON batch");
  gan_cmd->add_option("--batch", gan_args.batch, "Batch JSON")->required();
  gan_cmd->add_option("--seed", gan_args.seed, "Seed for epsilon when the batch omits it")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*div_cmd) return run_divergence(div);
    if (*bias_cmd) return run_bias(bias);
    if (*toy_cmd) return run_toy(toy);
    if (*ord_cmd) return run_ordinal(ord);
    if (*gan_cmd) return run_gan(gan_args);
  } catch (const config::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::domain_error& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitAssertion;
  }
  return kExitUsage;
}
