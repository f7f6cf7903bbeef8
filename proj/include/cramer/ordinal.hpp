#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cramer::ordinal {

enum class LossKind { KL, Cramer, Wasserstein };

std::string to_string(LossKind kind);  // "kl", "cramer", "w1"
/// Throws std::invalid_argument on an unknown name.
LossKind loss_kind_from_string(const std::string& name);

struct OrdinalDataset {
  Eigen::MatrixXd features;     // n x d, one example per row
  std::vector<int> targets;     // bin indices in [0, K)
  std::vector<double> bin_values;

  std::size_t n() const { return targets.size(); }
  std::size_t d() const { return static_cast<std::size_t>(features.cols()); }
  std::size_t K() const { return bin_values.size(); }

  /// Throws std::invalid_argument when a dataset invariant fails.
  void validate() const;
};

struct OrdinalModel {
  Eigen::MatrixXd W;  // K x d
  Eigen::VectorXd b;  // K

  static OrdinalModel zeros(std::size_t K, std::size_t d);

  /// softmax(W x + b). Throws std::domain_error on non-finite logits.
  Eigen::VectorXd probs(const Eigen::Ref<const Eigen::VectorXd>& x) const;
};

struct ExampleLoss {
  double value = 0.0;
  Eigen::MatrixXd dW;
  Eigen::VectorXd db;
};

/// KL = -log Q(y|x). Cramer = sum_k (F_Q(k) - 1{b_k >= b_y})^2 * D_k and
/// w1 = the same with |.|, where D_k = b_{k+1} - b_k. Gradients with respect
/// to W and b.
ExampleLoss per_example_loss(const OrdinalModel& model, const Eigen::Ref<const Eigen::VectorXd>& x, int y,
                             std::span<const double> bin_values, LossKind kind);

/// Loss value only, from a probability vector.
double loss_from_probs(const Eigen::VectorXd& q, int y, std::span<const double> bin_values, LossKind kind);

struct Metrics {
  double rmse = 0.0;  // mean of Q against the target value
  double w1 = 0.0;    // mean w1(Q, delta_y)
  double nll = 0.0;   // mean -log Q(y)
};

Metrics evaluate(const OrdinalModel& model, const OrdinalDataset& data);

struct TrainConfig {
  LossKind loss = LossKind::Cramer;
  std::size_t batch_size = 16;
  double alpha = 0.01;
  std::size_t epochs = 40;
  std::uint64_t seed = 0;  // drives the per-epoch shuffle
};

struct EpochMetrics {
  std::size_t epoch = 0;  // 0 is the initial model
  Metrics train;
  Metrics test;
};

struct TrainResult {
  OrdinalModel model;
  std::vector<EpochMetrics> curve;
};

class TrainingDiverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Minibatch SGD on the mean per-example loss from a zero model. Throws
/// TrainingDiverged with the epoch number when a loss becomes non-finite.
TrainResult train(const OrdinalDataset& train_set, const OrdinalDataset& test_set, const TrainConfig& cfg);

struct SynthConfig {
  std::size_t n = 5000;
  std::size_t d = 20;
  std::size_t K = 30;
  double noise = 0.5;
  double first_bin = 1922.0;
};

/// x ~ N(0, I_d); w ~ N(0, I_d / d); t = w.x + noise * e with e ~ N(0, 1);
/// y = min(K - 1, floor(K * Phi(t / sd))) with sd = sqrt(|w|^2 + noise^2),
/// so the bins are roughly equally populated. bin_values = first_bin + k.
OrdinalDataset synth_data(std::uint64_t seed, const SynthConfig& cfg);

/// Deterministic shuffle then split; the first part is the training set.
std::pair<OrdinalDataset, OrdinalDataset> split(const OrdinalDataset& data, double test_fraction,
                                                std::uint64_t seed);

/// Rows `target,feat_1,...,feat_d`, optional header. Each target must equal
/// one of bin_values (within 1e-9). Throws std::runtime_error naming the row.
OrdinalDataset load_csv(const std::string& path, std::vector<double> bin_values);

struct CurveRun {
  LossKind loss;
  std::size_t batch_size;
  std::uint64_t seed;
  std::vector<EpochMetrics> curve;
};

/// Header: loss,batch,epoch,rmse,w1,nll (test metrics).
void write_curve_csv(std::ostream& os, std::span<const CurveRun> runs);

}  // namespace cramer::ordinal
