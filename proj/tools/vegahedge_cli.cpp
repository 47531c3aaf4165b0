// vegahedge command line: simulate, train, evaluate, sweep, validate-optimizer.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vegahedge/config.hpp"
#include "vegahedge/market_sim.hpp"
#include "vegahedge/runner.hpp"

namespace fs = std::filesystem;
using namespace vegahedge;

namespace {

struct Common {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir = "out";
  std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config_path, "flat key = value config file");
  cmd->add_option("--seed", c.seed, "run a single seed instead of train.seeds");
  cmd->add_option("--out", c.out_dir, "output directory")->capture_default_str();
  cmd->add_option("--set", c.overrides, "override a config key, KEY=VALUE (repeatable)");
}

RunConfig resolve_config(const Common& c) {
  RunConfig config = c.config_path.empty() ? RunConfig{} : load_config(c.config_path);
  for (const auto& kv : c.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects KEY=VALUE, got " + kv);
    set_config_value(config, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (c.seed) config.train.seeds = {*c.seed};
  config.validate();
  return config;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

class Run {
 public:
  Run(std::string command, const RunConfig& config, const fs::path& dir) : dir_(dir) {
    fs::create_directories(dir_);
    manifest_.command = std::move(command);
    manifest_.config = config;
    manifest_.config_hash = config_hash(config);
    manifest_.seeds = config.train.seeds;
    manifest_.started_at = utc_timestamp();
  }

  fs::path output(const std::string& name) {
    manifest_.outputs.push_back(name);
    return dir_ / name;
  }

  void finish() {
    manifest_.finished_at = utc_timestamp();
    auto out = open_out(dir_ / "manifest.json");
    out << manifest_json(manifest_);
  }

 private:
  fs::path dir_;
  RunManifest manifest_;
};

int cmd_simulate(const Common& c) {
  const RunConfig config = resolve_config(c);
  Run run("simulate", config, c.out_dir);
  const auto shocks = draw_shocks(config.sim_paths, config.env.episode_days,
                                  train_env_seed(config.train.seeds.front()));
  const auto paths = simulate(config.env.sabr, shocks);
  auto out = open_out(run.output("paths.csv"));
  write_paths_csv(paths, out);
  run.finish();
  std::cout << "wrote " << config.sim_paths << " paths to " << c.out_dir << "/paths.csv\n";
  return 0;
}

int cmd_train(const Common& c) {
  const RunConfig config = resolve_config(c);
  const std::string hash = config_hash(config);
  const std::string id = config_id(config);
  Run run("train", config, c.out_dir);
  for (const std::uint64_t seed : config.train.seeds) {
    std::cout << "training seed " << seed << " (" << config.train.episodes << " episodes)\n";
    TrainResult result;
    try {
      result = train(config.env, config.train, seed, hash);
    } catch (const DivergenceError& e) {
      auto dump = open_out(run.output("divergence_seed" + std::to_string(seed) + ".txt"));
      dump << e.what() << '\n' << e.dump() << '\n';
      run.finish();
      std::cerr << "seed " << seed << ": " << e.what() << " at iteration " << e.iteration()
                << "\n  " << e.dump() << '\n';
      return 1;
    }
    save_checkpoint(result.checkpoint,
                    run.output("checkpoint_seed" + std::to_string(seed) + ".txt").string());
    auto log = open_out(run.output("train_log_seed" + std::to_string(seed) + ".csv"));
    write_train_log(result.log, id, seed, log);
    if (!result.log.empty()) {
      const auto& last = result.log.back();
      std::cout << "  iterations " << last.iteration << ", final critic loss " << last.critic_loss
                << ", mean action " << last.mean_action << '\n';
    }
  }
  run.finish();
  return 0;
}

void print_summary(const metrics::SummaryRow& row) {
  std::cout << row.strategy << " seed " << row.seed << ": mean_std " << row.metrics.mean_std
            << "  var95 " << row.metrics.var95 << "  cvar95 " << row.metrics.cvar95
            << "  mean_cost " << row.metrics.mean_cost << "  premium_income "
            << row.metrics.premium_income << '\n';
}

int cmd_evaluate(const Common& c, const std::string& strategy, const std::string& checkpoint) {
  RunConfig config = resolve_config(c);
  if (!strategy.empty()) config.eval.strategy = strategy;
  if (!checkpoint.empty()) config.eval.checkpoint = checkpoint;
  const std::string id = config_id(config);
  Run run("evaluate", config, c.out_dir);
  const Policy policy = resolve_policy(config.eval.strategy, config.eval);

  auto summary = open_out(run.output("summary.csv"));
  auto episodes = open_out(run.output("episodes.csv"));
  metrics::write_summary_header(summary);
  write_episodes_header(episodes);
  for (const std::uint64_t seed : config.train.seeds) {
    const std::uint64_t seeds[] = {seed};
    const auto result = evaluate(policy, config.eval.strategy, config.env, config.eval,
                                 config.train.eval_episodes, seeds);
    const metrics::SummaryRow row{config.eval.strategy, id, result.summary,
                                  result.episodes.size(), seed};
    metrics::write_summary_row(row, summary);
    write_episode_rows(result.episodes, id, episodes);
    print_summary(row);
  }
  run.finish();
  return 0;
}

int cmd_sweep(const Common& c) {
  const RunConfig config = resolve_config(c);
  Run run("sweep", config, c.out_dir);
  const auto cells = sweep(config);

  auto summary = open_out(run.output("summary.csv"));
  auto episodes = open_out(run.output("episodes.csv"));
  auto grid = open_out(run.output("grid.csv"));
  metrics::write_summary_header(summary);
  write_episodes_header(episodes);
  grid << "config_id,key,value\n";
  std::vector<std::string> seen;
  std::size_t failures = 0;
  std::ofstream failed;
  for (const auto& cell : cells) {
    if (std::find(seen.begin(), seen.end(), cell.config_id) == seen.end()) {
      seen.push_back(cell.config_id);
      for (const auto& [k, v] : cell.assignments) grid << cell.config_id << ',' << k << ',' << v << '\n';
    }
    if (cell.ok) {
      metrics::write_summary_row(cell.row, summary);
      write_episode_rows(cell.episodes, cell.config_id, episodes);
      print_summary(cell.row);
      continue;
    }
    if (failures++ == 0) {
      failed = open_out(run.output("failures.csv"));
      failed << kFailuresHeader << '\n';
    }
    std::string msg = cell.error;
    std::replace(msg.begin(), msg.end(), ',', ';');
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    failed << cell.strategy << ',' << cell.config_id << ',' << cell.seed << ',' << msg << '\n';
    std::cerr << "cell " << cell.strategy << " " << cell.config_id << " seed " << cell.seed
              << " failed: " << cell.error << '\n';
  }
  run.finish();
  std::cout << cells.size() - failures << " of " << cells.size() << " cells succeeded\n";
  return failures == 0 ? 0 : 1;
}

int cmd_validate_optimizer(const Common& c) {
  const RunConfig config = resolve_config(c);
  bool all = true;
  for (const auto& check : validate_optimizer(config.train.seeds.front())) {
    std::cout << (check.passed ? "PASS " : "FAIL ") << check.name;
    if (!check.detail.empty()) std::cout << " (" << check.detail << ")";
    std::cout << '\n';
    all = all && check.passed;
  }
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Vega hedging with distributional actor-critic agents"};
  app.require_subcommand(1);

  Common simulate_opts, train_opts, eval_opts, sweep_opts, validate_opts;
  auto* simulate_cmd = app.add_subcommand("simulate", "write SABR paths to paths.csv");
  add_common(simulate_cmd, simulate_opts);
  auto* train_cmd = app.add_subcommand("train", "train one agent per seed");
  add_common(train_cmd, train_opts);
  auto* eval_cmd = app.add_subcommand("evaluate", "evaluate a baseline or checkpoint");
  add_common(eval_cmd, eval_opts);
  std::string strategy, checkpoint;
  eval_cmd->add_option("--strategy", strategy, "delta, delta_vega or agent");
  eval_cmd->add_option("--checkpoint", checkpoint, "checkpoint file for --strategy agent");
  auto* sweep_cmd = app.add_subcommand("sweep", "evaluate strategies over the sweep grid");
  add_common(sweep_cmd, sweep_opts);
  auto* validate_cmd = app.add_subcommand("validate-optimizer", "run the optimizer bound suites");
  add_common(validate_cmd, validate_opts);
  auto* reference_cmd = app.add_subcommand("config-reference", "print every config key and default");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*simulate_cmd) return cmd_simulate(simulate_opts);
    if (*train_cmd) return cmd_train(train_opts);
    if (*eval_cmd) return cmd_evaluate(eval_opts, strategy, checkpoint);
    if (*sweep_cmd) return cmd_sweep(sweep_opts);
    if (*validate_cmd) return cmd_validate_optimizer(validate_opts);
    if (*reference_cmd) {
      std::cout << config_reference();
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
