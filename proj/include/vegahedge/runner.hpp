#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "vegahedge/baselines.hpp"
#include "vegahedge/checkpoint.hpp"
#include "vegahedge/config.hpp"
#include "vegahedge/metrics.hpp"

namespace vegahedge {

// ---- training -------------------------------------------------------------

struct TrainLogRow {
  std::int64_t iteration = 0;
  int episode = 0;
  double critic_loss = 0.0;
  double actor_grad_norm = 0.0;
  double mean_reward = 0.0;   // batch mean of the scaled first-step reward
  double mean_action = 0.0;   // batch mean of executed actions
  double explore_std = 0.0;
};

struct TrainResult {
  Checkpoint checkpoint;
  std::vector<TrainLogRow> log;
};

/// Non-finite loss, gradient or parameters. `dump` holds a diagnostic snapshot.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(std::int64_t iteration, const std::string& what, std::string dump)
      : std::runtime_error(what), iteration_(iteration), dump_(std::move(dump)) {}
  std::int64_t iteration() const { return iteration_; }
  const std::string& dump() const { return dump_; }

 private:
  std::int64_t iteration_;
  std::string dump_;
};

/// Seeds used for training and evaluation market paths. They never coincide.
std::uint64_t train_env_seed(std::uint64_t seed);
std::uint64_t eval_env_seed(std::uint64_t seed);

/// Actor and critic shapes implied by the configs.
distrl::MlpShape actor_shape(const TrainConfig& train);
distrl::MlpShape critic_shape(const TrainConfig& train);

/// Fresh networks and optimizer states for the given seed.
Checkpoint initial_checkpoint(const TrainConfig& train, std::uint64_t seed);

/// Alternating actor-critic training. Each iteration rolls out
/// `trajectory_length` environment steps with exploration, stores one n-step
/// experience per completed start step, then (once the buffer holds a batch)
/// takes one critic and one actor optimizer step. Deterministic in `seed`.
TrainResult train(const EnvConfig& env, const TrainConfig& train, std::uint64_t seed,
                  const std::string& config_hash = {});

void write_train_log(const std::vector<TrainLogRow>& log, const std::string& config_id,
                     std::uint64_t seed, std::ostream& out);

// ---- evaluation -----------------------------------------------------------

/// Deterministic actor mean.
Policy checkpoint_policy(const Checkpoint& checkpoint);

struct EpisodeRecord {
  std::string strategy;
  std::uint64_t seed = 0;
  int episode = 0;
  metrics::EpisodeOutcome outcome;
  double reward = 0.0;       // sum of environment rewards
  double mean_action = 0.0;  // mean executed action
};

struct EvalResult {
  std::vector<EpisodeRecord> episodes;
  metrics::MetricsSummary summary;
};

metrics::SummaryOptions summary_options(const EnvConfig& env, const EvalConfig& eval);

/// Runs `n_episodes` deterministic episodes for each seed. Episode k of seed s
/// sees the same market path and order flow for every strategy.
EvalResult evaluate(const Policy& policy, const std::string& strategy, const EnvConfig& env,
                    const EvalConfig& eval, int n_episodes, std::span<const std::uint64_t> seeds);

/// Resolves a baseline name, or "agent" through `eval.checkpoint`.
Policy resolve_policy(const std::string& strategy, const EvalConfig& eval);

inline constexpr const char* kEpisodesHeader =
    "strategy,config_id,seed,episode,pnl,cost,premium,reward,mean_action";

void write_episodes_header(std::ostream& out);
void write_episode_rows(const std::vector<EpisodeRecord>& records, const std::string& config_id,
                        std::ostream& out);

// ---- sweeps ---------------------------------------------------------------

struct SweepPoint {
  std::vector<std::pair<std::string, std::string>> assignments;
  RunConfig config;
};

/// Cartesian product of the sweep axes applied to the base config. A config
/// without axes yields the single base point.
std::vector<SweepPoint> expand_grid(const RunConfig& base);

struct SweepCell {
  std::string strategy;
  std::string config_id;
  std::vector<std::pair<std::string, std::string>> assignments;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  metrics::SummaryRow row;
  std::vector<EpisodeRecord> episodes;
};

/// One cell per (grid point, strategy, seed). Strategy "agent" trains a fresh
/// agent for the cell. A failing cell is recorded and the sweep continues.
std::vector<SweepCell> sweep(const RunConfig& base);

inline constexpr const char* kFailuresHeader = "strategy,config_id,seed,error";

// ---- run manifest ---------------------------------------------------------

struct RunManifest {
  std::string command;
  RunConfig config;
  std::string config_hash;
  std::vector<std::uint64_t> seeds;
  std::string started_at;
  std::string finished_at;
  std::vector<std::string> outputs;
};

std::string utc_timestamp();
std::string manifest_json(const RunManifest& manifest);

// ---- optimizer validation -------------------------------------------------

struct ValidationCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Momentum schedule, Nesterov bound and majorizer suites.
std::vector<ValidationCheck> validate_optimizer(std::uint64_t seed);

}  // namespace vegahedge
