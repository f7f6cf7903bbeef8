#include <gtest/gtest.h>

#include <cmath>

#include "cramer/divergences.hpp"
#include "cramer/numeric.hpp"
#include "oracles.hpp"

using namespace cramer;

namespace {

DiscreteDist unif(std::vector<double> xs) { return DiscreteDist::uniform(xs); }

PointCloud cloud(const DiscreteDist& d) { return PointCloud::from_discrete(d); }

}  // namespace

TEST(Kl, Examples) {
  const DiscreteDist p({0, 2, 5}, {0.2, 0.3, 0.5});
  EXPECT_EQ(kl(p, p), 0.0);
  const double expected = 0.5 * std::log(0.5 / 0.75) + 0.5 * std::log(0.5 / 0.25);
  EXPECT_NEAR(kl(DiscreteDist::bernoulli(0.5), DiscreteDist::bernoulli(0.75)), expected, 1e-15);
  EXPECT_NEAR(expected, 0.14384, 1e-5);
  EXPECT_EQ(kl(DiscreteDist::dirac(0), DiscreteDist::dirac(1)), kInf);
}

TEST(Kl, Asymmetric) {
  EXPECT_TRUE(std::isfinite(kl(DiscreteDist::dirac(0), DiscreteDist::bernoulli(0.5))));
  EXPECT_EQ(kl(DiscreteDist::bernoulli(0.5), DiscreteDist::dirac(0)), kInf);
}

TEST(Kl, ZeroMassAtomsAreIgnoredOnP) {
  const DiscreteDist p({0, 1}, {1.0, 0.0});
  EXPECT_EQ(kl(p, DiscreteDist::dirac(0)), 0.0);
  const DiscreteDist q({0, 1}, {0.0, 1.0});
  EXPECT_EQ(kl(DiscreteDist::bernoulli(0.5), q), kInf);
}

TEST(Kl, MatchesOracle) {
  Rng rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    const auto p = oracle::random_dist(rng, 1 + rng.uniform_index(4), 0, 5);
    const auto q = oracle::random_dist(rng, 1 + rng.uniform_index(6), 0, 5);
    const double a = kl(p, q);
    const double b = oracle::kl(p, q);
    if (std::isinf(b)) {
      EXPECT_EQ(a, kInf);
    } else {
      EXPECT_NEAR(a, b, 1e-12);
    }
  }
}

TEST(Kl, ScaleInvariant) {
  Rng rng(32);
  for (int trial = 0; trial < 50; ++trial) {
    const auto p = oracle::random_dist(rng, 3, 0, 4);
    const auto q = oracle::with_support(rng, {0, 1, 2, 3, 4});
    EXPECT_NEAR(kl(scale(p, 3.5), scale(q, 3.5)), kl(p, q), 1e-12);
  }
}

TEST(Wasserstein, Examples) {
  for (double p : {1.0, 1.5, 2.0, 3.0}) {
    EXPECT_DOUBLE_EQ(wasserstein_pp(DiscreteDist::dirac(0), DiscreteDist::dirac(1), p), 1.0);
    EXPECT_NEAR(wasserstein_pp(DiscreteDist::bernoulli(0.3), DiscreteDist::bernoulli(0.75), p), 0.45, 1e-15);
  }
  EXPECT_DOUBLE_EQ(wasserstein_pp(unif({0, 1}), unif({0, 2}), 2.0), 0.5);
  EXPECT_THROW(wasserstein_pp(unif({0, 1}), unif({0, 2}), 0.5), std::domain_error);
}

TEST(Wasserstein, MatchesQuantileOracle) {
  Rng rng(33);
  for (int trial = 0; trial < 300; ++trial) {
    const bool grid = trial % 2 == 0;
    const auto p = oracle::random_dist(rng, 1 + rng.uniform_index(6), -4, 4, grid);
    const auto q = oracle::random_dist(rng, 1 + rng.uniform_index(6), -4, 4, grid);
    for (double order : {1.0, 1.5, 2.0, 3.0}) {
      EXPECT_NEAR(wasserstein_pp(p, q, order), oracle::wpp(p, q, order), 1e-12);
    }
  }
}

TEST(Lp, Examples) {
  EXPECT_DOUBLE_EQ(lp_pp(DiscreteDist::dirac(0), DiscreteDist::dirac(1), 2.0), 1.0);
  EXPECT_DOUBLE_EQ(lp_pp(DiscreteDist::dirac(0), DiscreteDist::dirac(3.5), 2.0), 3.5);
  EXPECT_THROW(lp_pp(unif({0, 1}), unif({0, 2}), 0.99), std::domain_error);
}

TEST(Lp, MatchesCdfOracle) {
  Rng rng(34);
  for (int trial = 0; trial < 300; ++trial) {
    const bool grid = trial % 2 == 0;
    const auto p = oracle::random_dist(rng, 1 + rng.uniform_index(6), -4, 4, grid);
    const auto q = oracle::random_dist(rng, 1 + rng.uniform_index(6), -4, 4, grid);
    for (double order : {1.0, 1.5, 2.0, 3.0}) EXPECT_NEAR(lp_pp(p, q, order), oracle::lpp(p, q, order), 1e-12);
  }
}

TEST(Lp, W1EqualsL1) {
  Rng rng(35);
  for (int trial = 0; trial < 300; ++trial) {
    const auto p = oracle::random_dist(rng, 1 + rng.uniform_index(6), -4, 4, trial % 2);
    const auto q = oracle::random_dist(rng, 1 + rng.uniform_index(6), -4, 4, trial % 2);
    EXPECT_NEAR(wasserstein_pp(p, q, 1.0), lp_pp(p, q, 1.0), 1e-12);
  }
}

TEST(Cramer, Examples) {
  EXPECT_DOUBLE_EQ(cramer::cramer(DiscreteDist::dirac(0), DiscreteDist::dirac(1)), 1.0);
  const DiscreteDist p({0, 1, 10}, {0.5, 0.25, 0.25});
  EXPECT_EQ(cramer::cramer(p, p), 0.0);
}

TEST(Energy, Examples) {
  const PointCloud x({{1.0, 2.0}});
  const PointCloud y({{4.0, 6.0}});
  EXPECT_DOUBLE_EQ(energy(x, y), 10.0);
  EXPECT_DOUBLE_EQ(energy_via_dual(x, y), 10.0);
  EXPECT_EQ(energy(x, x), 0.0);
  EXPECT_EQ(energy_via_dual(x, x), 0.0);
  EXPECT_THROW(energy(x, PointCloud(oracle::Points{{1.0}})), std::domain_error);
  EXPECT_THROW(energy_via_dual(x, PointCloud(oracle::Points{{1.0}})), std::domain_error);
}

TEST(Energy, HalfIsCramer) {
  Rng rng(36);
  for (int trial = 0; trial < 200; ++trial) {
    const auto p = oracle::random_dist(rng, 1 + rng.uniform_index(6), -4, 4, trial % 2);
    const auto q = oracle::random_dist(rng, 1 + rng.uniform_index(6), -4, 4, trial % 2);
    EXPECT_NEAR(cramer::cramer(p, q), 0.5 * energy(cloud(p), cloud(q)), 1e-10);
    EXPECT_NEAR(energy(p, q), energy(cloud(p), cloud(q)), 1e-12);
  }
}

TEST(Energy, MatchesDoubleSumAndDual) {
  Rng rng(37);
  for (int trial = 0; trial < 100; ++trial) {
    oracle::Points a;
    oracle::Points b;
    for (int i = 0; i < 5; ++i) {
      a.push_back({rng.normal(), rng.normal(), rng.normal()});
      b.push_back({rng.normal() + 1.0, rng.normal(), 2.0 * rng.normal()});
    }
    std::vector<double> wa(5, 0.2);
    std::vector<double> wb{0.1, 0.3, 0.2, 0.25, 0.15};
    const PointCloud pa(a, wa);
    const PointCloud pb(b, wb);
    const double e = energy(pa, pb);
    EXPECT_NEAR(e, oracle::energy(a, wa, b, wb), 1e-12);
    EXPECT_NEAR(energy_via_dual(pa, pb), e, 1e-10);
    EXPECT_NEAR(energy_alpha(pa, pb, 1.0), e, 1e-12);
    EXPECT_NEAR(energy_alpha(pa, pb, 0.5), oracle::energy(a, wa, b, wb, 0.5), 1e-12);
    EXPECT_EQ(energy(pa, pb), energy(pb, pa));
  }
}

TEST(Energy, WitnessOnAtoms) {
  const PointCloud x(oracle::Points{{0.0}});
  const PointCloud y(oracle::Points{{3.0}});
  EXPECT_DOUBLE_EQ(energy_witness(x, y, {0.0}) - energy_witness(x, y, {3.0}), 6.0);
}

TEST(EnergyAlpha, DegenerateAtTwo) {
  Rng rng(38);
  for (int trial = 0; trial < 100; ++trial) {
    oracle::Points a;
    oracle::Points b;
    for (int i = 0; i < 4; ++i) {
      a.push_back({rng.normal(), rng.normal()});
      b.push_back({rng.normal() + 0.5, rng.normal() - 1.0});
    }
    const PointCloud pa(a);
    const PointCloud pb(b);
    const auto ma = pa.mean();
    const auto mb = pb.mean();
    const double gap = (ma[0] - mb[0]) * (ma[0] - mb[0]) + (ma[1] - mb[1]) * (ma[1] - mb[1]);
    EXPECT_NEAR(energy_alpha(pa, pb, 2.0), 2.0 * gap, 1e-10);
  }
  EXPECT_NEAR(energy_alpha(PointCloud(oracle::Points{{-1.0}, {1.0}}), PointCloud(oracle::Points{{0.0}}), 2.0), 0.0, 1e-15);
  EXPECT_THROW(energy_alpha(PointCloud(oracle::Points{{0.0}}), PointCloud(oracle::Points{{1.0}}), 0.0), std::domain_error);
  EXPECT_THROW(energy_alpha(PointCloud(oracle::Points{{0.0}}), PointCloud(oracle::Points{{1.0}}), 2.5), std::domain_error);
}

TEST(Metrics, SymmetryAndIdentity) {
  Rng rng(39);
  for (int trial = 0; trial < 200; ++trial) {
    const auto p = oracle::random_dist(rng, 1 + rng.uniform_index(5), -3, 3);
    const auto q = oracle::random_dist(rng, 1 + rng.uniform_index(5), -3, 3);
    for (double order : {1.0, 1.5, 2.0, 3.0}) {
      EXPECT_EQ(wasserstein_pp(p, q, order), wasserstein_pp(q, p, order));
      EXPECT_EQ(lp_pp(p, q, order), lp_pp(q, p, order));
      EXPECT_EQ(wasserstein_pp(p, p, order), 0.0);
      EXPECT_EQ(lp_pp(p, p, order), 0.0);
      if (!(p == q)) {
        EXPECT_GT(wasserstein_pp(p, q, order), 0.0);
        EXPECT_GT(lp_pp(p, q, order), 0.0);
      }
    }
    EXPECT_EQ(energy(p, q), energy(q, p));
    EXPECT_EQ(energy(p, p), 0.0);
    EXPECT_EQ(kl(p, p), 0.0);
  }
}

TEST(Metrics, TriangleInequality) {
  Rng rng(40);
  for (int trial = 0; trial < 300; ++trial) {
    const auto a = oracle::random_dist(rng, 1 + rng.uniform_index(5), -3, 3, trial % 2);
    const auto b = oracle::random_dist(rng, 1 + rng.uniform_index(5), -3, 3, trial % 2);
    const auto c = oracle::random_dist(rng, 1 + rng.uniform_index(5), -3, 3, trial % 2);
    for (double order : {1.0, 1.5, 2.0, 3.0}) {
      auto w = [&](const DiscreteDist& x, const DiscreteDist& y) { return std::pow(wasserstein_pp(x, y, order), 1.0 / order); };
      auto l = [&](const DiscreteDist& x, const DiscreteDist& y) { return std::pow(lp_pp(x, y, order), 1.0 / order); };
      EXPECT_LE(w(a, c), w(a, b) + w(b, c) + 1e-9);
      EXPECT_LE(l(a, c), l(a, b) + l(b, c) + 1e-9);
    }
  }
}

TEST(Metrics, ScaleEqualities) {
  Rng rng(41);
  for (int trial = 0; trial < 100; ++trial) {
    const auto p = oracle::random_dist(rng, 1 + rng.uniform_index(5), -3, 3);
    const auto q = oracle::random_dist(rng, 1 + rng.uniform_index(5), -3, 3);
    const double c = rng.uniform(0.1, 5.0);
    for (double order : {1.0, 1.5, 2.0, 3.0}) {
      const double w = wasserstein_pp(p, q, order);
      const double l = lp_pp(p, q, order);
      EXPECT_NEAR(wasserstein_pp(scale(p, c), scale(q, c), order), std::pow(c, order) * w, 1e-10 * (1.0 + w));
      EXPECT_NEAR(lp_pp(scale(p, c), scale(q, c), order), c * l, 1e-10 * (1.0 + l));
    }
    EXPECT_NEAR(energy(scale(p, c), scale(q, c)), c * energy(p, q), 1e-10);
  }
}

TEST(Metrics, SumInvariance) {
  Rng rng(42);
  for (int trial = 0; trial < 100; ++trial) {
    const auto x = oracle::random_dist(rng, 1 + rng.uniform_index(4), -3, 3);
    const auto y = oracle::random_dist(rng, 1 + rng.uniform_index(4), -3, 3);
    const auto a = oracle::random_dist(rng, 1 + rng.uniform_index(3), -2, 2);
    const auto dirac = DiscreteDist::dirac(rng.uniform(-2, 2));
    for (double order : {1.0, 1.5, 2.0, 3.0}) {
      EXPECT_LE(wasserstein_pp(convolve(a, x), convolve(a, y), order), wasserstein_pp(x, y, order) + 1e-12);
      EXPECT_LE(lp_pp(convolve(a, x), convolve(a, y), order), lp_pp(x, y, order) + 1e-12);
      EXPECT_NEAR(wasserstein_pp(convolve(dirac, x), convolve(dirac, y), order), wasserstein_pp(x, y, order), 1e-10);
      EXPECT_NEAR(lp_pp(convolve(dirac, x), convolve(dirac, y), order), lp_pp(x, y, order), 1e-10);
    }
    EXPECT_LE(energy(convolve(a, x), convolve(a, y)), energy(x, y) + 1e-12);
  }
}

TEST(DivergenceTag, NamesAndDispatch) {
  EXPECT_EQ(Divergence::kl().name(), "kl");
  EXPECT_EQ(Divergence::wasserstein(1.0).name(), "w1");
  EXPECT_EQ(Divergence::cramer().name(), "cramer");
  EXPECT_EQ(Divergence::energy().name(), "energy");
  const auto p = DiscreteDist::bernoulli(0.2);
  const auto q = DiscreteDist::bernoulli(0.7);
  EXPECT_EQ(divergence(Divergence::lp(3.0), p, q), lp_pp(p, q, 3.0));
  EXPECT_EQ(divergence(Divergence::cramer(), p, q), cramer::cramer(p, q));
}
