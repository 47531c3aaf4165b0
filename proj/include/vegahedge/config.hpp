#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "vegahedge/env.hpp"
#include "vegahedge/metrics.hpp"

namespace vegahedge {

struct TrainConfig {
  double gamma = 0.9;
  int trajectory_length = 2;  // steps per rollout and per n-step return
  std::size_t batch_size = 64;
  std::size_t buffer_capacity = 100000;
  std::size_t quantiles = 8;
  double huber_kappa = 1.0;
  std::size_t hidden_units = 64;
  double explore_std_start = 0.1;
  double explore_std_end = 0.01;
  int explore_decay_episodes = 2000;
  double eta_critic = 1.0e-3;
  double eta_actor = 1.0e-4;
  double beta1 = 0.0;
  double beta2 = 0.999;
  double eps = 1.0e-8;
  int episodes = 2000;
  int eval_episodes = 500;
  std::vector<std::uint64_t> seeds{0, 1, 2};
  double reward_scale = 0.01;  // rewards are multiplied by this before learning
  bool stop_target_gradient = false;
  double target_tau = 0.0;     // > 0 enables a soft-updated target critic
  bool use_baseline = true;
  double critic_output_scale = 0.1;
  double actor_output_scale = 0.1;

  /// Linear decay from start to end over explore_decay_episodes, then flat.
  double explore_std(int episode) const;
  void validate() const;
};

struct EvalConfig {
  double mean_std_c = 1.645;
  metrics::PnlGranularity granularity = metrics::PnlGranularity::kEpisode;
  double premium_option_value = 60.0;
  std::string strategy = "delta_vega";  // baseline name or "agent"
  std::string checkpoint;               // required when strategy is "agent"

  void validate() const;
};

struct SweepAxis {
  std::string key;
  std::vector<std::string> values;
};

struct SweepConfig {
  std::vector<std::string> strategies{"delta", "delta_vega"};
  std::vector<SweepAxis> axes;
};

struct RunConfig {
  EnvConfig env;
  TrainConfig train;
  EvalConfig eval;
  SweepConfig sweep;
  int sim_paths = 100;

  void validate() const;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Sets one dotted key ("env.cost_ratio", "sweep.env.hedge_maturity_days", ...).
void set_config_value(RunConfig& config, const std::string& key, const std::string& value);

/// Reads "key = value" lines over the defaults. '#' starts a comment.
RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::string& path);

/// Every key with its current value, one per line in a fixed order. Two
/// configs are equal iff their canonical texts are.
std::string canonical_config(const RunConfig& config);

/// Canonical text of the defaults with a comment line per key.
std::string config_reference();

/// Key/value pairs in canonical order.
std::vector<std::pair<std::string, std::string>> config_entries(const RunConfig& config);

/// SHA-1 over "blob <len>\0" + canonical text without the seed list, as git
/// hashes a file. Hex encoded.
std::string config_hash(const RunConfig& config);

/// First 12 hex digits of the hash.
std::string config_id(const RunConfig& config);

/// Shortest text that round-trips the double.
std::string format_double(double x);

}  // namespace vegahedge
