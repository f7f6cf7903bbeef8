#include "cramer/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>

#include "cramer/numeric.hpp"

namespace cramer {

namespace {

void check_weights(std::span<const double> w, const char* what) {
  for (double p : w) {
    if (!std::isfinite(p) || p < 0.0) {
      throw std::invalid_argument(std::string(what) + ": weights must be finite and >= 0");
    }
  }
  const double total = pairwise_sum(w);
  if (std::abs(total - 1.0) > kProbSumTolerance) {
    throw std::invalid_argument(std::string(what) + ": weights sum to " +
                                std::to_string(total) + ", expected 1");
  }
}

}  // namespace

DiscreteDist::DiscreteDist(std::vector<double> support, std::vector<double> probs)
    : support_(std::move(support)), probs_(std::move(probs)) {
  if (support_.empty() || support_.size() != probs_.size()) {
    throw std::invalid_argument("DiscreteDist: support and probs must be non-empty and equal length");
  }
  for (std::size_t i = 0; i < support_.size(); ++i) {
    if (!std::isfinite(support_[i])) {
      throw std::invalid_argument("DiscreteDist: support must be finite");
    }
    if (i > 0 && !(support_[i - 1] < support_[i])) {
      throw std::invalid_argument("DiscreteDist: support must be strictly increasing");
    }
  }
  check_weights(probs_, "DiscreteDist");

  cumulative_.resize(probs_.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < probs_.size(); ++i) {
    acc += probs_[i];
    cumulative_[i] = std::min(acc, 1.0);
  }
  cumulative_.back() = 1.0;
}

DiscreteDist DiscreteDist::from_atoms(std::span<const double> values,
                                      std::span<const double> weights) {
  if (values.empty() || values.size() != weights.size()) {
    throw std::invalid_argument("from_atoms: values and weights must be non-empty and equal length");
  }
  std::map<double, double> merged;
  for (std::size_t i = 0; i < values.size(); ++i) merged[values[i]] += weights[i];
  std::vector<double> support;
  std::vector<double> probs;
  support.reserve(merged.size());
  probs.reserve(merged.size());
  for (const auto& [x, w] : merged) {
    support.push_back(x);
    probs.push_back(w);
  }
  return DiscreteDist(std::move(support), std::move(probs));
}

DiscreteDist DiscreteDist::dirac(double x) { return DiscreteDist({x}, {1.0}); }

DiscreteDist DiscreteDist::bernoulli(double theta) {
  if (!(theta >= 0.0 && theta <= 1.0)) {
    throw std::invalid_argument("bernoulli: theta must lie in [0, 1]");
  }
  return DiscreteDist({0.0, 1.0}, {1.0 - theta, theta});
}

DiscreteDist DiscreteDist::uniform(std::span<const double> values) {
  return empirical(values);
}

double DiscreteDist::mean() const {
  std::vector<double> terms(size());
  for (std::size_t i = 0; i < size(); ++i) terms[i] = support_[i] * probs_[i];
  return pairwise_sum(terms);
}

double cdf(const DiscreteDist& d, double x) {
  const auto& s = d.support();
  const auto it = std::upper_bound(s.begin(), s.end(), x);
  if (it == s.begin()) return 0.0;
  return d.cumulative()[static_cast<std::size_t>(it - s.begin()) - 1];
}

double quantile(const DiscreteDist& d, double u) {
  if (!(u > 0.0 && u <= 1.0)) {
    throw std::domain_error("quantile: u must lie in (0, 1]");
  }
  const auto& c = d.cumulative();
  const auto it = std::lower_bound(c.begin(), c.end(), u);
  // c.back() == 1 >= u, so the search always succeeds.
  return d.support()[static_cast<std::size_t>(it - c.begin())];
}

std::vector<double> sample(const DiscreteDist& d, Rng& rng, std::size_t m) {
  std::vector<double> out(m);
  for (auto& x : out) x = quantile(d, rng.uniform_open_closed());
  return out;
}

DiscreteDist empirical(std::span<const double> samples) {
  if (samples.empty()) throw std::domain_error("empirical: no samples");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double m = static_cast<double>(sorted.size());
  std::vector<double> support;
  std::vector<double> probs;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    support.push_back(sorted[i]);
    probs.push_back(static_cast<double>(j - i) / m);
    i = j;
  }
  return DiscreteDist(std::move(support), std::move(probs));
}

DiscreteDist scale(const DiscreteDist& d, double c) {
  if (!std::isfinite(c)) throw std::invalid_argument("scale: factor must be finite");
  std::vector<double> values(d.support());
  for (auto& x : values) x *= c;
  return DiscreteDist::from_atoms(values, d.probs());
}

DiscreteDist convolve(const DiscreteDist& a, const DiscreteDist& x) {
  std::vector<double> values;
  std::vector<double> weights;
  values.reserve(a.size() * x.size());
  weights.reserve(a.size() * x.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < x.size(); ++j) {
      values.push_back(a.support()[i] + x.support()[j]);
      weights.push_back(a.probs()[i] * x.probs()[j]);
    }
  }
  return DiscreteDist::from_atoms(values, weights);
}

PointCloud::PointCloud(std::vector<std::vector<double>> points)
    : PointCloud(points, std::vector<double>(points.size(), points.empty() ? 0.0 : 1.0 / static_cast<double>(points.size()))) {}

PointCloud::PointCloud(std::vector<std::vector<double>> points, std::vector<double> weights)
    : points_(std::move(points)), weights_(std::move(weights)) {
  if (points_.empty() || points_.size() != weights_.size()) {
    throw std::invalid_argument("PointCloud: points and weights must be non-empty and equal length");
  }
  const std::size_t d = points_.front().size();
  if (d == 0) throw std::invalid_argument("PointCloud: dimension must be >= 1");
  for (const auto& p : points_) {
    if (p.size() != d) throw std::invalid_argument("PointCloud: ragged point dimensions");
    for (double v : p) {
      if (!std::isfinite(v)) throw std::invalid_argument("PointCloud: coordinates must be finite");
    }
  }
  check_weights(weights_, "PointCloud");
}

PointCloud PointCloud::from_discrete(const DiscreteDist& d) {
  std::vector<std::vector<double>> pts;
  pts.reserve(d.size());
  for (double x : d.support()) pts.push_back({x});
  return PointCloud(std::move(pts), d.probs());
}

std::vector<double> PointCloud::mean() const {
  std::vector<double> mu(dim(), 0.0);
  for (std::size_t i = 0; i < size(); ++i) {
    for (std::size_t k = 0; k < dim(); ++k) mu[k] += weights_[i] * points_[i][k];
  }
  return mu;
}

// ---------------------------------------------------------------------------
// Parametric families

ParametricFamily ParametricFamily::bernoulli() {
  return ParametricFamily(FamilyKind::Bernoulli, {0.0, 1.0});
}

ParametricFamily ParametricFamily::three_point_toy() {
  return ParametricFamily(FamilyKind::ThreePointToy, {0.0, 1.0, 10.0});
}

ParametricFamily ParametricFamily::softmax(std::vector<double> support) {
  if (support.empty()) throw std::invalid_argument("softmax family: empty support");
  for (std::size_t i = 1; i < support.size(); ++i) {
    if (!(support[i - 1] < support[i])) {
      throw std::invalid_argument("softmax family: support must be strictly increasing");
    }
  }
  return ParametricFamily(FamilyKind::SoftmaxCategorical, std::move(support));
}

std::size_t ParametricFamily::num_params() const {
  return kind_ == FamilyKind::SoftmaxCategorical ? support_.size() : 1;
}

void ParametricFamily::check_params(std::span<const double> theta) const {
  if (theta.size() != num_params()) {
    throw std::invalid_argument("family: expected " + std::to_string(num_params()) +
                                " parameters, got " + std::to_string(theta.size()));
  }
  for (double t : theta) {
    if (!std::isfinite(t)) throw std::invalid_argument("family: parameters must be finite");
  }
}

std::vector<double> ParametricFamily::project(std::span<const double> theta) const {
  std::vector<double> out(theta.begin(), theta.end());
  if (kind_ == FamilyKind::Bernoulli) out[0] = std::clamp(out[0], kBernoulliMin, kBernoulliMax);
  return out;
}

bool ParametricFamily::in_interior(std::span<const double> theta) const {
  if (kind_ != FamilyKind::Bernoulli) return true;
  return theta[0] >= kBernoulliMin && theta[0] <= kBernoulliMax;
}

namespace {

std::vector<double> softmax_probs(std::span<const double> logits) {
  const double top = *std::max_element(logits.begin(), logits.end());
  std::vector<double> p(logits.size());
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    p[i] = std::exp(logits[i] - top);
    total += p[i];
  }
  for (auto& v : p) v /= total;
  return p;
}

struct ToyMasses {
  double zero;  // Q(0)
  double side;  // Q(1) = Q(10)
};

ToyMasses toy_masses(double theta) {
  return {1.0 / (1.0 + 2.0 * std::exp(theta)), 1.0 / (std::exp(-theta) + 2.0)};
}

}  // namespace

DiscreteDist family_dist(const ParametricFamily& f, std::span<const double> theta) {
  f.check_params(theta);
  switch (f.kind()) {
    case FamilyKind::Bernoulli:
      return DiscreteDist::bernoulli(std::clamp(theta[0], kBernoulliMin, kBernoulliMax));
    case FamilyKind::SoftmaxCategorical:
      return DiscreteDist(f.support(), softmax_probs(theta));
    case FamilyKind::ThreePointToy: {
      const auto q = toy_masses(theta[0]);
      return DiscreteDist(f.support(), {q.zero, q.side, q.side});
    }
  }
  throw std::logic_error("family_dist: unknown family");
}

std::vector<std::vector<double>> family_grad_probs(const ParametricFamily& f,
                                                   std::span<const double> theta) {
  f.check_params(theta);
  switch (f.kind()) {
    case FamilyKind::Bernoulli:
      return {{-1.0}, {1.0}};
    case FamilyKind::SoftmaxCategorical: {
      const auto p = softmax_probs(theta);
      std::vector<std::vector<double>> jac(p.size(), std::vector<double>(p.size()));
      for (std::size_t i = 0; i < p.size(); ++i) {
        for (std::size_t j = 0; j < p.size(); ++j) {
          jac[i][j] = p[i] * ((i == j ? 1.0 : 0.0) - p[j]);
        }
      }
      return jac;
    }
    case FamilyKind::ThreePointToy: {
      const auto q = toy_masses(theta[0]);
      const double dside = q.side * q.zero;
      return {{-2.0 * dside}, {dside}, {dside}};
    }
  }
  throw std::logic_error("family_grad_probs: unknown family");
}

std::vector<double> family_grad_cdf(const ParametricFamily& f, std::span<const double> theta,
                                    double x) {
  const auto jac = family_grad_probs(f, theta);
  std::vector<double> g(f.num_params(), 0.0);
  const auto& s = f.support();
  // The CDF at or above the top atom is identically 1.
  if (x >= s.back()) return g;
  for (std::size_t i = 0; i < s.size() && s[i] <= x; ++i) {
    for (std::size_t j = 0; j < g.size(); ++j) g[j] += jac[i][j];
  }
  return g;
}

std::vector<double> family_grad_log_prob(const ParametricFamily& f,
                                         std::span<const double> theta, std::size_t i) {
  f.check_params(theta);
  if (i >= f.support().size()) throw std::out_of_range("family_grad_log_prob: atom index");
  switch (f.kind()) {
    case FamilyKind::Bernoulli: {
      const double t = std::clamp(theta[0], kBernoulliMin, kBernoulliMax);
      return {i == 0 ? -1.0 / (1.0 - t) : 1.0 / t};
    }
    case FamilyKind::SoftmaxCategorical: {
      const auto p = softmax_probs(theta);
      std::vector<double> g(p.size());
      for (std::size_t j = 0; j < p.size(); ++j) g[j] = (i == j ? 1.0 : 0.0) - p[j];
      return g;
    }
    case FamilyKind::ThreePointToy: {
      const auto q = toy_masses(theta[0]);
      return {i == 0 ? -2.0 * q.side : q.zero};
    }
  }
  throw std::logic_error("family_grad_log_prob: unknown family");
}

void to_json(nlohmann::json& j, const DiscreteDist& d) {
  j = nlohmann::json{{"support", d.support()}, {"probs", d.probs()}};
}

DiscreteDist dist_from_json(const nlohmann::json& j) {
  auto read = [&](const char* key) {
    if (!j.is_object() || !j.contains(key) || !j.at(key).is_array()) {
      throw std::invalid_argument(std::string("distribution: missing array '") + key + "'");
    }
    std::vector<double> out;
    for (const auto& v : j.at(key)) {
      if (!v.is_number()) {
        throw std::invalid_argument(std::string("distribution: non-numeric entry in '") + key + "'");
      }
      out.push_back(v.get<double>());
    }
    return out;
  };
  return DiscreteDist(read("support"), read("probs"));
}

}  // namespace cramer
