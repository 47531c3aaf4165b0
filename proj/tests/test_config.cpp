#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "vegahedge/config.hpp"

using namespace vegahedge;

namespace {

RunConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

}  // namespace

TEST(Config, Defaults) {
  const RunConfig c;
  EXPECT_EQ(c.env.sabr.beta, 0.5);
  EXPECT_EQ(c.env.sabr.rho, 0.2);
  EXPECT_EQ(c.env.sabr.r, 0.0);
  EXPECT_EQ(c.env.sabr.q, 0.0);
  EXPECT_EQ(c.train.episodes, 2000);
  EXPECT_EQ(c.train.buffer_capacity, 100000u);
  EXPECT_EQ(c.train.batch_size, 64u);
  EXPECT_EQ(c.train.eta_critic, 1e-3);
  EXPECT_EQ(c.train.eta_actor, 1e-4);
  EXPECT_EQ(c.eval.mean_std_c, 1.645);
  EXPECT_NO_THROW(c.validate());
}

TEST(Config, ParsesKeysCommentsAndWhitespace) {
  const RunConfig c = parse(
      "# comment line\n"
      "  env.cost_ratio = 0.002   # trailing comment\n"
      "\n"
      "sabr.upsilon=0.8\n"
      "train.seeds = 4, 5\n"
      "train.stop_target_gradient = true\n"
      "eval.granularity = step\n");
  EXPECT_EQ(c.env.cost_ratio, 0.002);
  EXPECT_EQ(c.env.sabr.upsilon, 0.8);
  EXPECT_EQ(c.train.seeds, (std::vector<std::uint64_t>{4, 5}));
  EXPECT_TRUE(c.train.stop_target_gradient);
  EXPECT_EQ(c.eval.granularity, metrics::PnlGranularity::kStep);
}

TEST(Config, ErrorsNameTheLine) {
  auto message = [](const std::string& text) {
    try {
      parse(text);
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  EXPECT_NE(message("env.cost_ratio = 0.1\nbogus.key = 3\n").find("line 2"), std::string::npos);
  EXPECT_NE(message("env.episode_days = ten\n").find("env.episode_days"), std::string::npos);
  EXPECT_NE(message("just some words\n").find("line 1"), std::string::npos);
  EXPECT_NE(message("train.use_baseline = maybe\n").find("true/false"), std::string::npos);
  EXPECT_THROW(parse("train.gamma = 1.0\n"), ConfigError);
  EXPECT_THROW(parse("sweep.nope.key = 1,2\n"), ConfigError);
  EXPECT_THROW(parse("sweep.env.episode_days = 10,x\n"), ConfigError);
  EXPECT_THROW(load_config("/nonexistent/config.txt"), ConfigError);
}

TEST(Config, CanonicalRoundTrip) {
  RunConfig c;
  c.env.sabr.sigma0 = 0.1 + 0.2;  // not exactly representable in short decimal
  c.train.trajectory_length = 4;
  c.train.seeds = {7};
  set_config_value(c, "sweep.env.hedge_maturity_days", "30,120");
  const std::string text = canonical_config(c);
  const RunConfig back = parse(text);
  EXPECT_EQ(canonical_config(back), text);
  EXPECT_EQ(back.env.sabr.sigma0, 0.1 + 0.2);
  ASSERT_EQ(back.sweep.axes.size(), 1u);
  EXPECT_EQ(back.sweep.axes[0].values, (std::vector<std::string>{"30", "120"}));
}

TEST(Config, FormatDoubleIsShortest) {
  EXPECT_EQ(format_double(0.5), "0.5");
  EXPECT_EQ(format_double(1e-8), "1e-08");
  EXPECT_EQ(std::stod(format_double(0.1 + 0.2)), 0.1 + 0.2);
}

TEST(Config, HashIsStableAndSensitive) {
  const RunConfig a;
  RunConfig b;
  EXPECT_EQ(config_hash(a), config_hash(b));
  EXPECT_EQ(config_hash(a).size(), 40u);
  EXPECT_EQ(config_id(a), config_hash(a).substr(0, 12));
  b.env.cost_ratio = 0.002;
  EXPECT_NE(config_hash(a), config_hash(b));
  // Seeds identify runs, not configurations.
  RunConfig c;
  c.train.seeds = {42};
  EXPECT_EQ(config_hash(a), config_hash(c));
}

TEST(Config, HashMatchesGitBlobHash) {
  if (std::system("git --version > /dev/null 2>&1") != 0) GTEST_SKIP() << "git not available";
  RunConfig c;
  std::string body;
  for (const auto& [k, v] : config_entries(c)) {
    if (k != "train.seeds") body += k + " = " + v + "\n";
  }
  const auto path = std::filesystem::temp_directory_path() / "vegahedge_hash_probe.txt";
  std::ofstream(path, std::ios::binary) << body;
  const std::string cmd = "git hash-object " + path.string();
  FILE* pipe = popen(cmd.c_str(), "r");
  ASSERT_NE(pipe, nullptr);
  char buf[64] = {};
  ASSERT_NE(std::fgets(buf, sizeof buf, pipe), nullptr);
  pclose(pipe);
  std::filesystem::remove(path);
  EXPECT_EQ(config_hash(c), std::string(buf, 40));
}

TEST(Config, ReferenceListsEveryKey) {
  const std::string ref = config_reference();
  const RunConfig defaults;
  for (const auto& [key, value] : config_entries(defaults)) {
    EXPECT_NE(ref.find(key + " = " + value), std::string::npos) << key;
  }
  EXPECT_EQ(canonical_config(parse(ref)), canonical_config(defaults));
}

TEST(Config, SweepAxesReplaceAndAccumulate) {
  RunConfig c;
  set_config_value(c, "sweep.env.cost_ratio", "0.002,0.005");
  set_config_value(c, "sweep.sabr.sigma0", "0.2,0.3,0.4");
  set_config_value(c, "sweep.env.cost_ratio", "0.01");
  ASSERT_EQ(c.sweep.axes.size(), 2u);
  EXPECT_EQ(c.sweep.axes[0].key, "env.cost_ratio");
  EXPECT_EQ(c.sweep.axes[0].values, (std::vector<std::string>{"0.01"}));
  EXPECT_EQ(c.sweep.axes[1].values.size(), 3u);
  set_config_value(c, "sweep.strategies", "delta,agent");
  EXPECT_EQ(c.sweep.strategies, (std::vector<std::string>{"delta", "agent"}));
}

TEST(TrainConfig, ExploreScheduleAndValidation) {
  TrainConfig t;
  EXPECT_DOUBLE_EQ(t.explore_std(0), 0.1);
  EXPECT_NEAR(t.explore_std(1000), 0.055, 1e-12);
  EXPECT_DOUBLE_EQ(t.explore_std(2000), 0.01);
  EXPECT_DOUBLE_EQ(t.explore_std(5000), 0.01);
  t.explore_std_end = 0.0;
  EXPECT_THROW(t.validate(), ConfigError);
  t = TrainConfig{};
  t.buffer_capacity = 10;
  EXPECT_THROW(t.validate(), ConfigError);
  t = TrainConfig{};
  t.seeds.clear();
  EXPECT_THROW(t.validate(), ConfigError);
}
