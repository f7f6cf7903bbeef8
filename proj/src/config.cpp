#include "cramer/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>

namespace cramer::config {

namespace {

std::string child(const std::string& pointer, const std::string& key) {
  std::string escaped;
  for (char c : key) {
    if (c == '~') escaped += "~0";
    else if (c == '/') escaped += "~1";
    else escaped += c;
  }
  return pointer + "/" + escaped;
}

std::string child(const std::string& pointer, std::size_t index) { return pointer + "/" + std::to_string(index); }

void require_object(const json& j, const std::string& pointer) {
  if (!j.is_object()) throw ConfigError(pointer, "expected an object");
}

void reject_unknown(const json& j, const std::string& pointer, const std::set<std::string>& known) {
  for (const auto& [key, _] : j.items()) {
    if (!known.contains(key)) throw ConfigError(child(pointer, key), "unknown field");
  }
}

double number(const json& j, const std::string& pointer) {
  if (!j.is_number()) throw ConfigError(pointer, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(pointer, "expected a finite number");
  return v;
}

std::uint64_t integer(const json& j, const std::string& pointer, std::uint64_t min) {
  if (!j.is_number_integer() || (j.is_number_integer() && !j.is_number_unsigned() && j.get<std::int64_t>() < 0)) {
    throw ConfigError(pointer, "expected a non-negative integer");
  }
  const auto v = j.get<std::uint64_t>();
  if (v < min) throw ConfigError(pointer, "expected an integer >= " + std::to_string(min));
  return v;
}

std::vector<double> number_array(const json& j, const std::string& pointer) {
  if (!j.is_array()) throw ConfigError(pointer, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], child(pointer, i)));
  return out;
}

gan::Vec vector(const json& j, const std::string& pointer) {
  const auto v = number_array(j, pointer);
  if (v.empty()) throw ConfigError(pointer, "expected a non-empty array");
  return Eigen::Map<const gan::Vec>(v.data(), static_cast<Eigen::Index>(v.size()));
}

gan::Mat matrix(const json& j, const std::string& pointer) {
  if (!j.is_array() || j.empty()) throw ConfigError(pointer, "expected a non-empty array of rows");
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < j.size(); ++i) {
    rows.push_back(number_array(j[i], child(pointer, i)));
    if (rows.back().empty() || rows.back().size() != rows.front().size()) {
      throw ConfigError(child(pointer, i), "rows must be non-empty and of equal length");
    }
  }
  gan::Mat m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t c = 0; c < rows[i].size(); ++c) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = rows[i][c];
    }
  }
  return m;
}

template <typename F>
auto wrap(const std::string& pointer, F&& f) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(pointer, e.what());
  }
}

std::unique_ptr<gan::Transform> parse_transform(const json& j, const std::string& pointer, std::size_t d) {
  require_object(j, pointer);
  if (!j.contains("kind") || !j["kind"].is_string()) throw ConfigError(child(pointer, "kind"), "expected a string");
  const auto kind = j["kind"].get<std::string>();
  if (kind == "identity") {
    reject_unknown(j, pointer, {"kind"});
    return std::make_unique<gan::Identity>(d);
  }
  if (kind == "affine") {
    reject_unknown(j, pointer, {"kind", "A", "c"});
    if (!j.contains("A")) throw ConfigError(child(pointer, "A"), "missing field");
    auto a = matrix(j["A"], child(pointer, "A"));
    gan::Vec c = j.contains("c") ? vector(j["c"], child(pointer, "c")) : gan::Vec::Zero(a.rows());
    return wrap(pointer, [&] { return std::make_unique<gan::Affine>(std::move(a), std::move(c)); });
  }
  if (kind == "tanh_mlp") {
    reject_unknown(j, pointer, {"kind", "W1", "b1", "W2", "b2"});
    for (const char* key : {"W1", "b1", "W2", "b2"}) {
      if (!j.contains(key)) throw ConfigError(child(pointer, key), "missing field");
    }
    auto w1 = matrix(j["W1"], child(pointer, "W1"));
    auto b1 = vector(j["b1"], child(pointer, "b1"));
    auto w2 = matrix(j["W2"], child(pointer, "W2"));
    auto b2 = vector(j["b2"], child(pointer, "b2"));
    return wrap(pointer, [&] {
      return std::make_unique<gan::TanhMlp>(std::move(w1), std::move(b1), std::move(w2), std::move(b2));
    });
  }
  throw ConfigError(child(pointer, "kind"), "unknown transform '" + kind + "' (expected identity, affine or tanh_mlp)");
}

}  // namespace

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("", path + ": " + e.what());
  }
}

void check_version(const json& doc) {
  require_object(doc, "");
  if (!doc.contains("version")) throw ConfigError("/version", "missing field (expected 1)");
  if (!doc["version"].is_number_integer() || doc["version"].get<std::int64_t>() != kSchemaVersion) {
    throw ConfigError("/version", "unsupported schema version (expected 1)");
  }
}

DiscreteDist parse_dist(const json& j, const std::string& pointer) {
  require_object(j, pointer);
  reject_unknown(j, pointer, {"support", "probs", "version"});
  for (const char* key : {"support", "probs"}) {
    if (!j.contains(key)) throw ConfigError(child(pointer, key), "missing field");
  }
  auto support = number_array(j["support"], child(pointer, "support"));
  auto probs = number_array(j["probs"], child(pointer, "probs"));
  return wrap(pointer, [&] { return DiscreteDist(std::move(support), std::move(probs)); });
}

sgd::ToyCurvesConfig parse_toy_config(const json& doc) {
  check_version(doc);
  reject_unknown(doc, "", {"version", "target", "m", "alpha", "steps", "seeds", "eval_every"});
  sgd::ToyCurvesConfig cfg;
  if (doc.contains("target")) cfg.target = parse_dist(doc["target"], "/target");
  if (doc.contains("m")) {
    const auto& m = doc["m"];
    if (!m.is_array() || m.empty()) throw ConfigError("/m", "expected a non-empty array of integers");
    cfg.m_list.clear();
    for (std::size_t i = 0; i < m.size(); ++i) cfg.m_list.push_back(integer(m[i], child("/m", i), 1));
  }
  if (doc.contains("alpha")) {
    cfg.alpha = number(doc["alpha"], "/alpha");
    if (cfg.alpha < 0.0) throw ConfigError("/alpha", "expected a number >= 0");
  }
  if (doc.contains("steps")) cfg.steps = integer(doc["steps"], "/steps", 1);
  if (doc.contains("eval_every")) cfg.eval_every = integer(doc["eval_every"], "/eval_every", 1);
  if (doc.contains("seeds")) {
    const auto& s = doc["seeds"];
    if (!s.is_array() || s.empty()) throw ConfigError("/seeds", "expected a non-empty array of integers");
    cfg.seeds.clear();
    for (std::size_t i = 0; i < s.size(); ++i) cfg.seeds.push_back(integer(s[i], child("/seeds", i), 0));
  }
  for (double x : cfg.target.support()) {
    if (x != 0.0 && x != 1.0 && x != 10.0) throw ConfigError("/target/support", "must be a subset of {0, 1, 10}");
  }
  return cfg;
}

OrdinalRunConfig parse_ordinal_config(const json& doc) {
  check_version(doc);
  reject_unknown(doc, "",
                 {"version", "losses", "batch_sizes", "alpha", "epochs", "test_fraction", "synth", "bin_values"});
  OrdinalRunConfig cfg;
  if (doc.contains("losses")) {
    const auto& l = doc["losses"];
    if (!l.is_array() || l.empty()) throw ConfigError("/losses", "expected a non-empty array of loss names");
    cfg.losses.clear();
    for (std::size_t i = 0; i < l.size(); ++i) {
      if (!l[i].is_string()) throw ConfigError(child("/losses", i), "expected a string");
      cfg.losses.push_back(wrap(child("/losses", i), [&] { return ordinal::loss_kind_from_string(l[i].get<std::string>()); }));
    }
  }
  if (doc.contains("batch_sizes")) {
    const auto& b = doc["batch_sizes"];
    if (!b.is_array() || b.empty()) throw ConfigError("/batch_sizes", "expected a non-empty array of integers");
    cfg.batch_sizes.clear();
    for (std::size_t i = 0; i < b.size(); ++i) cfg.batch_sizes.push_back(integer(b[i], child("/batch_sizes", i), 1));
  }
  if (doc.contains("alpha")) {
    cfg.alpha = number(doc["alpha"], "/alpha");
    if (cfg.alpha < 0.0) throw ConfigError("/alpha", "expected a number >= 0");
  }
  if (doc.contains("epochs")) cfg.epochs = integer(doc["epochs"], "/epochs", 0);
  if (doc.contains("test_fraction")) {
    cfg.test_fraction = number(doc["test_fraction"], "/test_fraction");
    if (!(cfg.test_fraction > 0.0 && cfg.test_fraction < 1.0)) throw ConfigError("/test_fraction", "expected a number in (0, 1)");
  }
  if (doc.contains("synth")) {
    const auto& s = doc["synth"];
    require_object(s, "/synth");
    reject_unknown(s, "/synth", {"n", "d", "K", "noise", "first_bin"});
    if (s.contains("n")) cfg.synth.n = integer(s["n"], "/synth/n", 2);
    if (s.contains("d")) cfg.synth.d = integer(s["d"], "/synth/d", 1);
    if (s.contains("K")) cfg.synth.K = integer(s["K"], "/synth/K", 1);
    if (s.contains("noise")) {
      cfg.synth.noise = number(s["noise"], "/synth/noise");
      if (cfg.synth.noise < 0.0) throw ConfigError("/synth/noise", "expected a number >= 0");
    }
    if (s.contains("first_bin")) cfg.synth.first_bin = number(s["first_bin"], "/synth/first_bin");
  }
  if (doc.contains("bin_values")) {
    auto bins = number_array(doc["bin_values"], "/bin_values");
    if (bins.empty()) throw ConfigError("/bin_values", "expected a non-empty array");
    for (std::size_t k = 1; k < bins.size(); ++k) {
      if (!(bins[k] > bins[k - 1])) throw ConfigError(child("/bin_values", k), "bin values must be strictly increasing");
    }
    cfg.bin_values = std::move(bins);
  }
  return cfg;
}

GanInput parse_gan_batch(const json& doc) {
  require_object(doc, "");
  reject_unknown(doc, "", {"version", "x_r", "x_g", "x_g_prime", "epsilon", "lambda", "transform"});
  if (doc.contains("version")) check_version(doc);
  for (const char* key : {"x_r", "x_g", "x_g_prime"}) {
    if (!doc.contains(key)) throw ConfigError(child("", key), "missing field");
  }
  GanInput in;
  in.batch.x_r = vector(doc["x_r"], "/x_r");
  in.batch.x_g = vector(doc["x_g"], "/x_g");
  in.batch.x_g_prime = vector(doc["x_g_prime"], "/x_g_prime");
  if (doc.contains("epsilon")) {
    in.batch.epsilon = number(doc["epsilon"], "/epsilon");
    if (!(in.batch.epsilon >= 0.0 && in.batch.epsilon <= 1.0)) throw ConfigError("/epsilon", "expected a number in [0, 1]");
    in.epsilon_given = true;
  }
  if (doc.contains("lambda")) {
    in.batch.lambda = number(doc["lambda"], "/lambda");
    if (in.batch.lambda < 0.0) throw ConfigError("/lambda", "expected a number >= 0");
  }
  const auto d = static_cast<std::size_t>(in.batch.x_r.size());
  in.transform = doc.contains("transform") ? parse_transform(doc["transform"], "/transform", d)
                                           : std::make_unique<gan::Identity>(d);
  for (const char* key : {"x_r", "x_g", "x_g_prime"}) {
    if (static_cast<std::size_t>(doc[key].size()) != in.transform->in_dim()) {
      throw ConfigError(child("", key), "dimension does not match the transform input (" +
                                            std::to_string(in.transform->in_dim()) + ")");
    }
  }
  return in;
}

}  // namespace cramer::config
