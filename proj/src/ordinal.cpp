#include "cramer/ordinal.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include "cramer/numeric.hpp"
#include "cramer/rng.hpp"

namespace cramer::ordinal {

namespace {

Eigen::VectorXd logits(const OrdinalModel& model, const Eigen::Ref<const Eigen::VectorXd>& x) {
  Eigen::VectorXd z = model.W * x + model.b;
  if (!z.allFinite()) throw std::domain_error("ordinal: non-finite logits");
  return z;
}

Eigen::VectorXd softmax(const Eigen::VectorXd& z) {
  Eigen::VectorXd e = (z.array() - z.maxCoeff()).exp();
  return e / e.sum();
}

double neg_log_prob(const Eigen::VectorXd& z, int y) {
  const double top = z.maxCoeff();
  return top + std::log((z.array() - top).exp().sum()) - z[y];
}

double spacing(std::span<const double> bins, std::size_t k) { return bins[k + 1] - bins[k]; }

// Loss value and its gradient with respect to the logits.
double logit_grad(const Eigen::VectorXd& z, int y, std::span<const double> bins, LossKind kind,
                  Eigen::VectorXd& dz) {
  const Eigen::VectorXd p = softmax(z);
  const auto K = static_cast<std::size_t>(p.size());
  if (kind == LossKind::KL) {
    dz = p;
    dz[y] -= 1.0;
    return neg_log_prob(z, y);
  }
  // c_j = dL/dp_j = sum over k >= j of phi'(F_k - I_k) D_k.
  std::vector<double> dphi(K, 0.0);
  double value = 0.0;
  double F = 0.0;
  for (std::size_t k = 0; k + 1 < K; ++k) {
    F += p[static_cast<Eigen::Index>(k)];
    const double r = F - (static_cast<int>(k) >= y ? 1.0 : 0.0);
    const double dk = spacing(bins, k);
    if (kind == LossKind::Cramer) {
      value += r * r * dk;
      dphi[k] = 2.0 * r * dk;
    } else {
      value += std::abs(r) * dk;
      dphi[k] = sgn(r) * dk;
    }
  }
  Eigen::VectorXd c(static_cast<Eigen::Index>(K));
  double acc = 0.0;
  for (std::size_t j = K; j-- > 0;) {
    acc += dphi[j];
    c[static_cast<Eigen::Index>(j)] = acc;
  }
  dz = p.array() * (c.array() - p.dot(c));
  return value;
}

}  // namespace

std::string to_string(LossKind kind) {
  switch (kind) {
    case LossKind::KL: return "kl";
    case LossKind::Cramer: return "cramer";
    case LossKind::Wasserstein: return "w1";
  }
  return "?";
}

LossKind loss_kind_from_string(const std::string& name) {
  if (name == "kl") return LossKind::KL;
  if (name == "cramer") return LossKind::Cramer;
  if (name == "w1") return LossKind::Wasserstein;
  throw std::invalid_argument("unknown ordinal loss '" + name + "' (expected kl, cramer or w1)");
}

void OrdinalDataset::validate() const {
  if (targets.empty()) throw std::invalid_argument("ordinal dataset: n must be >= 1");
  if (static_cast<std::size_t>(features.rows()) != targets.size()) {
    throw std::invalid_argument("ordinal dataset: feature rows and targets differ in length");
  }
  if (bin_values.empty()) throw std::invalid_argument("ordinal dataset: K must be >= 1");
  for (std::size_t k = 0; k < bin_values.size(); ++k) {
    if (!std::isfinite(bin_values[k]) || (k > 0 && !(bin_values[k] > bin_values[k - 1]))) {
      throw std::invalid_argument("ordinal dataset: bin_values must be finite and strictly increasing");
    }
  }
  for (int y : targets) {
    if (y < 0 || static_cast<std::size_t>(y) >= bin_values.size()) {
      throw std::invalid_argument("ordinal dataset: target " + std::to_string(y) + " out of range");
    }
  }
  if (!features.allFinite()) throw std::invalid_argument("ordinal dataset: non-finite feature");
}

OrdinalModel OrdinalModel::zeros(std::size_t K, std::size_t d) {
  return {Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(K), static_cast<Eigen::Index>(d)),
          Eigen::VectorXd::Zero(static_cast<Eigen::Index>(K))};
}

Eigen::VectorXd OrdinalModel::probs(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  return softmax(logits(*this, x));
}

ExampleLoss per_example_loss(const OrdinalModel& model, const Eigen::Ref<const Eigen::VectorXd>& x, int y,
                             std::span<const double> bin_values, LossKind kind) {
  if (static_cast<std::size_t>(model.b.size()) != bin_values.size() || y < 0 || y >= model.b.size()) {
    throw std::invalid_argument("per_example_loss: model, target and bins disagree");
  }
  const Eigen::VectorXd z = logits(model, x);
  Eigen::VectorXd dz;
  ExampleLoss out;
  out.value = logit_grad(z, y, bin_values, kind, dz);
  out.dW = dz * x.transpose();
  out.db = dz;
  return out;
}

double loss_from_probs(const Eigen::VectorXd& q, int y, std::span<const double> bin_values, LossKind kind) {
  if (kind == LossKind::KL) return -std::log(q[y]);
  double value = 0.0;
  double F = 0.0;
  for (std::size_t k = 0; k + 1 < bin_values.size(); ++k) {
    F += q[static_cast<Eigen::Index>(k)];
    const double r = F - (static_cast<int>(k) >= y ? 1.0 : 0.0);
    value += (kind == LossKind::Cramer ? r * r : std::abs(r)) * spacing(bin_values, k);
  }
  return value;
}

Metrics evaluate(const OrdinalModel& model, const OrdinalDataset& data) {
  const Eigen::Map<const Eigen::VectorXd> bins(data.bin_values.data(),
                                               static_cast<Eigen::Index>(data.bin_values.size()));
  double sq = 0.0;
  double w1 = 0.0;
  double nll = 0.0;
  for (std::size_t i = 0; i < data.n(); ++i) {
    const Eigen::VectorXd z = logits(model, data.features.row(static_cast<Eigen::Index>(i)).transpose());
    const Eigen::VectorXd q = softmax(z);
    const int y = data.targets[i];
    const double err = q.dot(bins) - data.bin_values[static_cast<std::size_t>(y)];
    sq += err * err;
    w1 += loss_from_probs(q, y, data.bin_values, LossKind::Wasserstein);
    nll += neg_log_prob(z, y);
  }
  const auto n = static_cast<double>(data.n());
  return {std::sqrt(sq / n), w1 / n, nll / n};
}

TrainResult train(const OrdinalDataset& train_set, const OrdinalDataset& test_set, const TrainConfig& cfg) {
  train_set.validate();
  test_set.validate();
  if (cfg.batch_size == 0) throw std::invalid_argument("train: batch_size must be >= 1");
  if (!(cfg.alpha >= 0.0) || !std::isfinite(cfg.alpha)) throw std::invalid_argument("train: alpha must be finite and >= 0");
  if (train_set.d() != test_set.d() || train_set.bin_values != test_set.bin_values) {
    throw std::invalid_argument("train: train and test sets disagree in shape or bins");
  }

  TrainResult out{OrdinalModel::zeros(train_set.K(), train_set.d()), {}};
  auto& model = out.model;
  out.curve.push_back({0, evaluate(model, train_set), evaluate(model, test_set)});

  Rng rng(cfg.seed);
  std::vector<std::size_t> order(train_set.n());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Eigen::VectorXd dz;
  Eigen::MatrixXd gW(model.W.rows(), model.W.cols());
  Eigen::VectorXd gb(model.b.size());

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t stop = std::min(order.size(), start + cfg.batch_size);
      gW.setZero();
      gb.setZero();
      double batch_loss = 0.0;
      for (std::size_t t = start; t < stop; ++t) {
        const auto row = static_cast<Eigen::Index>(order[t]);
        const auto x = train_set.features.row(row).transpose();
        Eigen::VectorXd z = model.W * x + model.b;
        if (!z.allFinite()) {
          throw TrainingDiverged("ordinal training diverged in epoch " + std::to_string(epoch) +
                                 ": non-finite logits");
        }
        batch_loss += logit_grad(z, train_set.targets[order[t]], train_set.bin_values, cfg.loss, dz);
        gW.noalias() += dz * x.transpose();
        gb += dz;
      }
      if (!std::isfinite(batch_loss)) {
        throw TrainingDiverged("ordinal training diverged in epoch " + std::to_string(epoch) +
                               ": non-finite loss");
      }
      const double step = cfg.alpha / static_cast<double>(stop - start);
      model.W -= step * gW;
      model.b -= step * gb;
    }
    if (!model.W.allFinite() || !model.b.allFinite()) {
      throw TrainingDiverged("ordinal training diverged in epoch " + std::to_string(epoch) +
                             ": non-finite parameters");
    }
    out.curve.push_back({epoch, evaluate(model, train_set), evaluate(model, test_set)});
  }
  return out;
}

OrdinalDataset synth_data(std::uint64_t seed, const SynthConfig& cfg) {
  if (cfg.n == 0 || cfg.d == 0 || cfg.K == 0) throw std::invalid_argument("synth_data: n, d and K must be >= 1");
  if (!(cfg.noise >= 0.0)) throw std::invalid_argument("synth_data: noise must be >= 0");
  Rng rng(seed);
  const auto d = static_cast<Eigen::Index>(cfg.d);
  Eigen::VectorXd w(d);
  for (Eigen::Index j = 0; j < d; ++j) w[j] = rng.normal() / std::sqrt(static_cast<double>(cfg.d));
  const double sd = std::sqrt(w.squaredNorm() + cfg.noise * cfg.noise);

  OrdinalDataset data;
  data.features.resize(static_cast<Eigen::Index>(cfg.n), d);
  data.targets.resize(cfg.n);
  for (std::size_t i = 0; i < cfg.n; ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    for (Eigen::Index j = 0; j < d; ++j) data.features(row, j) = rng.normal();
    const double t = data.features.row(row).dot(w) + cfg.noise * rng.normal();
    const double phi = 0.5 * std::erfc(-t / sd / std::numbers::sqrt2);
    const auto bin = static_cast<std::size_t>(std::floor(static_cast<double>(cfg.K) * phi));
    data.targets[i] = static_cast<int>(std::min(cfg.K - 1, bin));
  }
  for (std::size_t k = 0; k < cfg.K; ++k) data.bin_values.push_back(cfg.first_bin + static_cast<double>(k));
  return data;
}

std::pair<OrdinalDataset, OrdinalDataset> split(const OrdinalDataset& data, double test_fraction,
                                                std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw std::invalid_argument("split: test_fraction must lie in (0, 1)");
  if (data.n() < 2) throw std::invalid_argument("split: need at least two examples");
  std::vector<std::size_t> order(data.n());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(order));
  auto n_test = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(data.n())));
  n_test = std::clamp<std::size_t>(n_test, 1, data.n() - 1);
  const std::size_t n_train = data.n() - n_test;

  auto take = [&](std::size_t from, std::size_t count) {
    OrdinalDataset part;
    part.bin_values = data.bin_values;
    part.features.resize(static_cast<Eigen::Index>(count), data.features.cols());
    for (std::size_t i = 0; i < count; ++i) {
      part.features.row(static_cast<Eigen::Index>(i)) = data.features.row(static_cast<Eigen::Index>(order[from + i]));
      part.targets.push_back(data.targets[order[from + i]]);
    }
    return part;
  };
  return {take(0, n_train), take(n_train, n_test)};
}

namespace {

bool parse_double(std::string_view cell, double& out) {
  while (!cell.empty() && (cell.front() == ' ' || cell.front() == '\t')) cell.remove_prefix(1);
  while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\t' || cell.back() == '\r')) cell.remove_suffix(1);
  if (cell.empty()) return false;
  const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), out);
  return res.ec == std::errc() && res.ptr == cell.data() + cell.size() && std::isfinite(out);
}

std::vector<std::string_view> split_cells(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    cells.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

}  // namespace

OrdinalDataset load_csv(const std::string& path, std::vector<double> bin_values) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_csv: cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::vector<int> targets;
  std::string line;
  std::size_t row_no = 0;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++row_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = split_cells(line);
    std::vector<double> values(cells.size());
    bool numeric = true;
    for (std::size_t c = 0; c < cells.size() && numeric; ++c) numeric = parse_double(cells[c], values[c]);
    if (!numeric) {
      if (rows.empty() && targets.empty() && row_no == 1) continue;  // header
      throw std::runtime_error("load_csv: row " + std::to_string(row_no) + ": non-numeric cell");
    }
    if (cells.size() < 2) throw std::runtime_error("load_csv: row " + std::to_string(row_no) + ": no features");
    if (width == 0) width = cells.size();
    if (cells.size() != width) {
      throw std::runtime_error("load_csv: row " + std::to_string(row_no) + ": expected " + std::to_string(width) +
                               " cells, got " + std::to_string(cells.size()));
    }
    const auto it = std::find_if(bin_values.begin(), bin_values.end(),
                                 [&](double b) { return std::abs(b - values[0]) <= 1e-9; });
    if (it == bin_values.end()) {
      throw std::runtime_error("load_csv: row " + std::to_string(row_no) + ": target " + std::string(cells[0]) +
                               " is not a bin value");
    }
    targets.push_back(static_cast<int>(it - bin_values.begin()));
    rows.emplace_back(values.begin() + 1, values.end());
  }
  if (rows.empty()) throw std::runtime_error("load_csv: " + path + " has no data rows");
  OrdinalDataset data;
  data.bin_values = std::move(bin_values);
  data.targets = std::move(targets);
  data.features.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width - 1));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j + 1 < width; ++j) {
      data.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  data.validate();
  return data;
}

void write_curve_csv(std::ostream& os, std::span<const CurveRun> runs) {
  os << "loss,batch,epoch,rmse,w1,nll\n";
  os << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (const auto& r : runs) {
    for (const auto& e : r.curve) {
      os << to_string(r.loss) << ',' << r.batch_size << ',' << e.epoch << ',' << e.test.rmse << ','
         << e.test.w1 << ',' << e.test.nll << '\n';
    }
  }
}

}  // namespace cramer::ordinal
