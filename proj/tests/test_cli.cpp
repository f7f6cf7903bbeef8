#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace {

struct Result {
  int code = -1;
  std::string out;
};

Result run(const std::string& args) {
  const std::string cmd = std::string(CLI_PATH) + " " + args + " 2>/dev/null";
  Result r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) return r;
  char buf[4096];
  std::size_t n = 0;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string data(const std::string& name) { return std::string(TEST_DATA_DIR) + "/" + name; }

std::string tmp(const std::string& name) { return (std::filesystem::temp_directory_path() / ("cramer_cli_" + name)).string(); }

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

}  // namespace

TEST(Cli, DivergenceCramer) {
  const auto r = run("divergence --kind cramer --dist-a " + data("dirac0.json") + " --dist-b " + data("dirac1.json"));
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["kind"], "cramer");
  EXPECT_EQ(j["value"].get<double>(), 1.0);
}

TEST(Cli, DivergenceKlInfinite) {
  const auto r = run("divergence --kind kl --dist-a " + data("dirac0.json") + " --dist-b " + data("dirac1.json"));
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(nlohmann::json::parse(r.out)["value"], "inf");
}

TEST(Cli, W1EqualsL1) {
  const std::string files = " --dist-a " + data("spread_a.json") + " --dist-b " + data("spread_b.json");
  const auto w = run("divergence --kind w1" + files);
  const auto l = run("divergence --kind l1" + files);
  ASSERT_EQ(w.code, 0);
  ASSERT_EQ(l.code, 0);
  EXPECT_NEAR(nlohmann::json::parse(w.out)["value"].get<double>(), nlohmann::json::parse(l.out)["value"].get<double>(),
              1e-12);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run("divergence --kind cramer --bogus 1").code, 2);
  EXPECT_EQ(run("divergence --kind nope --dist-a " + data("dirac0.json") + " --dist-b " + data("dirac1.json")).code, 2);
  EXPECT_EQ(run("ordinal --config " + data("bad_field.json")).code, 2);
  EXPECT_EQ(run("toy --config " + data("bad_version.json")).code, 2);
  EXPECT_EQ(run("bias --experiment minimax --m 0").code, 2);
  EXPECT_EQ(run("").code, 2);
}

TEST(Cli, HelpListsFlags) {
  const auto r = run("bias --help");
  EXPECT_EQ(r.code, 0);
  for (const char* flag : {"--experiment", "--m", "--theta-star", "--theta", "--grid-step", "--out"}) {
    EXPECT_NE(r.out.find(flag), std::string::npos) << flag;
  }
}

TEST(Cli, BiasMinimaxFromTwo) {
  const auto out = tmp("minimax.csv");
  const auto r = run("bias --experiment minimax --m 2,3,8 --out " + out);
  EXPECT_EQ(r.code, 0);
  const auto csv = slurp(out);
  EXPECT_EQ(first_line(csv), "m,theta_star,theta,true_grad,exp_sample_grad,bias");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
}

TEST(Cli, BiasMinimaxSingleDrawFailsItsAssertion) {
  // theta* = 0 makes the bias 0 < 2 e^-2.
  EXPECT_EQ(run("bias --experiment minimax --m 1 --out " + tmp("minimax1.csv")).code, 1);
}

TEST(Cli, BiasOtherExperiments) {
  EXPECT_EQ(run("bias --experiment curve --out " + tmp("curve.csv")).code, 0);
  EXPECT_EQ(run("bias --experiment deterministic --out " + tmp("det.csv")).code, 0);
  EXPECT_EQ(run("bias --experiment consistency --out " + tmp("cons.csv")).code, 0);
  EXPECT_EQ(run("bias --experiment halfpoint --out " + tmp("half.csv")).code, 0);
  EXPECT_EQ(run("bias --experiment deterministic --m 5 --theta-star 0.8 --out " + tmp("det2.csv")).code, 1);
}

TEST(Cli, ToyIsDeterministic) {
  const auto a = tmp("toy_a.csv");
  const auto b = tmp("toy_b.csv");
  const auto table = tmp("toy_table.csv");
  ASSERT_EQ(run("toy --config " + data("toy_small.json") + " --out " + a + " --table " + table).code, 0);
  ASSERT_EQ(run("toy --config " + data("toy_small.json") + " --out " + b).code, 0);
  const auto csv = slurp(a);
  EXPECT_EQ(csv, slurp(b));
  EXPECT_EQ(first_line(csv), "loss,mode,m,seed,step,theta,eval_w1");
  EXPECT_EQ(first_line(slurp(table)), "objective,theta,q0,q1,q10,loss");
  // 5 trajectories x 3 seeds x 5 points + header.
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 76);
}

TEST(Cli, OrdinalSynthAndCsv) {
  const auto a = tmp("ord_a.csv");
  const auto b = tmp("ord_b.csv");
  ASSERT_EQ(run("ordinal --config " + data("ordinal_small.json") + " --seed 3 --out " + a).code, 0);
  ASSERT_EQ(run("ordinal --config " + data("ordinal_small.json") + " --seed 3 --out " + b).code, 0);
  const auto csv = slurp(a);
  EXPECT_EQ(csv, slurp(b));
  EXPECT_EQ(first_line(csv), "loss,batch,epoch,rmse,w1,nll");
  // 2 losses x 1 batch size x 3 epochs (0..2) + header.
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 7);

  const auto c = tmp("ord_c.csv");
  EXPECT_EQ(run("ordinal --config " + data("ordinal_small.json") + " --data csv:" + data("ordinal_rows.csv") + " --out " + c)
                .code,
            0);
  EXPECT_EQ(run("ordinal --config " + data("ordinal_small.json") + " --data csv:/nonexistent.csv").code, 2);
}

TEST(Cli, GanLosses) {
  const auto r = run("gan-losses --batch " + data("gan_identity.json"));
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["generator_loss"].get<double>(), 0.0);
  EXPECT_EQ(j["surrogate_loss"].get<double>(), 0.0);
  EXPECT_EQ(j["gradient_penalty"].get<double>(), 10.0);
  EXPECT_EQ(j["critic_loss"].get<double>(), 10.0);

  const auto x = run("gan-losses --batch " + data("gan_affine.json") + " --seed 4");
  const auto y = run("gan-losses --batch " + data("gan_affine.json") + " --seed 4");
  ASSERT_EQ(x.code, 0);
  EXPECT_EQ(x.out, y.out);
}
