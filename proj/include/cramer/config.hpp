#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "cramer/gan_losses.hpp"
#include "cramer/ordinal.hpp"
#include "cramer/sgd_lab.hpp"

namespace cramer::config {

using nlohmann::json;

/// Schema violation at a JSON pointer, e.g. "/synth/n: expected a positive integer".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string pointer, const std::string& message)
      : std::runtime_error((pointer.empty() ? "/" : pointer) + ": " + message), pointer_(std::move(pointer)) {}
  const std::string& pointer() const { return pointer_; }

 private:
  std::string pointer_;
};

inline constexpr int kSchemaVersion = 1;

/// Reads and parses a JSON file; parse errors become ConfigError at "/".
json read_json_file(const std::string& path);

/// Requires "version": 1 at the top level of a config document.
void check_version(const json& doc);

/// {"support": [...], "probs": [...]}
DiscreteDist parse_dist(const json& j, const std::string& pointer);

/*
 * Toy experiment config:
 * {
 *   "version": 1,
 *   "target": {"support": [0, 1, 10], "probs": [0.5, 0.35, 0.15]},
 *   "m": [1], "alpha": 0.001, "steps": 100000,
 *   "seeds": [0, ..., 9], "eval_every": 100
 * }
 * Every field except "version" is optional.
 */
sgd::ToyCurvesConfig parse_toy_config(const json& doc);

struct OrdinalRunConfig {
  std::vector<ordinal::LossKind> losses{ordinal::LossKind::KL, ordinal::LossKind::Cramer,
                                        ordinal::LossKind::Wasserstein};
  std::vector<std::size_t> batch_sizes{1, 16, 128};
  double alpha = 0.01;
  std::size_t epochs = 40;
  double test_fraction = 0.2;
  ordinal::SynthConfig synth;
  /// Bin values for CSV data; defaults to synth.first_bin + k, k < synth.K.
  std::optional<std::vector<double>> bin_values;
};

/*
 * Ordinal config:
 * {
 *   "version": 1,
 *   "losses": ["kl", "cramer", "w1"], "batch_sizes": [1, 16, 128],
 *   "alpha": 0.01, "epochs": 40, "test_fraction": 0.2,
 *   "synth": {"n": 5000, "d": 20, "K": 30, "noise": 0.5, "first_bin": 1922},
 *   "bin_values": [...]
 * }
 */
OrdinalRunConfig parse_ordinal_config(const json& doc);

struct GanInput {
  gan::GanBatch batch;
  bool epsilon_given = false;
  std::unique_ptr<gan::Transform> transform;
};

/*
 * GAN batch:
 * {
 *   "x_r": [...], "x_g": [...], "x_g_prime": [...],
 *   "epsilon": 0.5, "lambda": 10,
 *   "transform": {"kind": "identity"}
 *              | {"kind": "affine", "A": [[...], ...], "c": [...]}
 *              | {"kind": "tanh_mlp", "W1": ..., "b1": ..., "W2": ..., "b2": ...}
 * }
 * "version" is optional here; "epsilon" may be omitted (the caller draws it),
 * "lambda" defaults to 10 and "transform" to identity.
 */
GanInput parse_gan_batch(const json& doc);

}  // namespace cramer::config
