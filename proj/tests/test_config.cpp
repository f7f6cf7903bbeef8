#include <gtest/gtest.h>

#include "cramer/config.hpp"

using namespace cramer;
using namespace cramer::config;

namespace {

std::string data(const std::string& name) { return std::string(TEST_DATA_DIR) + "/" + name; }

std::string error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Config, DistRoundTrip) {
  const auto d = parse_dist(read_json_file(data("spread_a.json")), "");
  EXPECT_EQ(d.support(), (std::vector<double>{0, 2, 5}));
  EXPECT_EQ(d.probs(), (std::vector<double>{0.2, 0.3, 0.5}));
  EXPECT_EQ(error_of([] { parse_dist(json{{"support", {0, 1}}, {"probs", {0.5, 0.6}}}, "/target"); }).rfind("/target: ", 0), 0u);
  EXPECT_EQ(error_of([] { parse_dist(json{{"support", {0}}, {"probs", {1}}, {"extra", 1}}, "/a"); }).rfind("/a/extra: ", 0), 0u);
}

TEST(Config, ReadErrors) {
  EXPECT_EQ(error_of([] { read_json_file(data("bad_syntax.json")); }).rfind("/: ", 0), 0u);
  EXPECT_THROW(read_json_file(data("missing.json")), ConfigError);
}

TEST(Config, Version) {
  EXPECT_NO_THROW(check_version(json{{"version", 1}}));
  EXPECT_EQ(error_of([] { check_version(read_json_file(data("bad_version.json"))); }).rfind("/version: ", 0), 0u);
  EXPECT_EQ(error_of([] { check_version(json::object()); }).rfind("/version: ", 0), 0u);
}

TEST(Config, Toy) {
  const auto cfg = parse_toy_config(read_json_file(data("toy_small.json")));
  EXPECT_EQ(cfg.steps, 2000u);
  EXPECT_EQ(cfg.seeds, (std::vector<std::uint64_t>{0, 1, 2}));
  EXPECT_EQ(cfg.eval_every, 500u);
  EXPECT_DOUBLE_EQ(cfg.target.probs()[1], 0.35);

  const auto defaults = parse_toy_config(json{{"version", 1}});
  EXPECT_EQ(defaults.steps, 100000u);
  EXPECT_EQ(defaults.seeds.size(), 10u);
  EXPECT_EQ(defaults.m_list, (std::vector<std::size_t>{1}));

  EXPECT_EQ(error_of([] { parse_toy_config(read_json_file(data("bad_unknown.json"))); }).rfind("/stepz: ", 0), 0u);
  EXPECT_EQ(error_of([] { parse_toy_config(json{{"version", 1}, {"m", {1, 0}}}); }).rfind("/m/1: ", 0), 0u);
  EXPECT_EQ(error_of([] {
              parse_toy_config(json{{"version", 1}, {"target", {{"support", {0, 2}}, {"probs", {0.5, 0.5}}}}});
            }).rfind("/target", 0),
            0u);
}

TEST(Config, Ordinal) {
  const auto cfg = parse_ordinal_config(read_json_file(data("ordinal_small.json")));
  EXPECT_EQ(cfg.losses.size(), 2u);
  EXPECT_EQ(cfg.losses[1], ordinal::LossKind::Cramer);
  EXPECT_EQ(cfg.batch_sizes, (std::vector<std::size_t>{16}));
  EXPECT_EQ(cfg.epochs, 2u);
  EXPECT_EQ(cfg.synth.n, 200u);
  EXPECT_EQ(cfg.synth.first_bin, 2000.0);

  EXPECT_EQ(error_of([] { parse_ordinal_config(read_json_file(data("bad_field.json"))); }).rfind("/synth/n: ", 0), 0u);
  EXPECT_EQ(error_of([] { parse_ordinal_config(json{{"version", 1}, {"losses", {"kl", "mse"}}}); }).rfind("/losses/1: ", 0),
            0u);
  EXPECT_EQ(error_of([] { parse_ordinal_config(json{{"version", 1}, {"test_fraction", 1.0}}); }).rfind("/test_fraction: ", 0),
            0u);
}

TEST(Config, GanBatch) {
  auto in = parse_gan_batch(read_json_file(data("gan_identity.json")));
  EXPECT_TRUE(in.epsilon_given);
  EXPECT_EQ(in.batch.lambda, 10.0);
  const auto l = gan::evaluate(in.batch, *in.transform);
  EXPECT_EQ(l.critic, 10.0);

  auto aff = parse_gan_batch(read_json_file(data("gan_affine.json")));
  EXPECT_FALSE(aff.epsilon_given);
  aff.batch.epsilon = 0.5;
  EXPECT_NEAR(gan::gradient_penalty(aff.batch, *aff.transform), 90.0, 1e-9);

  EXPECT_EQ(error_of([] { parse_gan_batch(json{{"x_r", {0}}, {"x_g", {1}}}); }).rfind("/x_g_prime: ", 0), 0u);
  EXPECT_EQ(error_of([] {
              parse_gan_batch(json{{"x_r", {0}}, {"x_g", {1}}, {"x_g_prime", {2}}, {"transform", {{"kind", "conv"}}}});
            }).rfind("/transform/kind: ", 0),
            0u);
  EXPECT_EQ(error_of([] {
              parse_gan_batch(json{{"x_r", {0, 1}}, {"x_g", {1}}, {"x_g_prime", {2}}});
            }).empty(),
            false);
}
