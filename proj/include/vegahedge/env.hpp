#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "vegahedge/market_sim.hpp"
#include "vegahedge/portfolio.hpp"

namespace vegahedge {

struct EnvConfig {
  SabrParams sabr;
  int hedge_maturity_days = 30;
  int episode_days = 30;
  double cost_ratio = 0.005;       // option trade cost as a fraction of option price
  double risk_tolerance = 1.0e5;   // currency per unit of vol
  double arrival_intensity = 1.0;  // client orders per day
  int realized_vol_window = 10;
  int client_maturity_days = 60;
  double premium_ratio = 0.005;    // premium charged on client orders, times price
  std::uint64_t seed = 0;

  void validate() const;
};

/// Feature layout of an observation vector.
enum ObsIndex : std::size_t {
  kObsSpot = 0,        // spot / p0
  kObsInstVol,         // instantaneous vol
  kObsHedgeImpVol,     // implied vol of the ATM hedge option
  kObsRealizedVol,     // annualized realized vol over the window
  kObsVega,            // portfolio vega / vega scale
  kObsDelta,           // portfolio delta / 100
  kObsTimeLeft,        // fraction of the episode remaining
  kObsPrevAction,
  kObsSize
};

using Observation = std::vector<double>;

struct StepInfo {
  double pnl = 0.0;   // value change excluding cost and premium cash flows
  double cost = 0.0;
  double premium = 0.0;
  double action_requested = 0.0;
  double action_executed = 0.0;
  double a_max = 1.0;
  bool clipped = false;
  double hedge_qty = 0.0;    // units of the hedge option bought (negative = sold)
  double hedge_price = 0.0;  // per unit
  double underlying_trade = 0.0;
  double pre_trade_vega = 0.0;
  double post_trade_vega = 0.0;
  double post_trade_delta = 0.0;  // options plus underlying, after neutralization
  double value = 0.0;             // mark-to-market after the market move
  int arrivals = 0;
};

struct StepResult {
  Observation next_obs;
  double reward = 0.0;  // -|pnl| - cost
  bool done = false;
  StepInfo info;
};

/// a_max = min(1, risk_tolerance / |vega_total|), and 1 when vega_total == 0.
double action_bound(double vega_total, double risk_tolerance);

/// Portfolio delta including the underlying position.
double portfolio_delta(const PortfolioSnapshot& snapshot, const MarketState& market);

/// Underlying trade that zeroes the portfolio delta.
double delta_neutralize(const PortfolioSnapshot& snapshot, const MarketState& market);

/// Sample standard deviation of log returns over the last `window` returns,
/// annualized by 1/dt. Zero with fewer than two returns available.
double realized_vol(std::span<const double> prices, int window, double dt);

struct ObservationHistory {
  std::span<const double> prices;  // spot history up to and including the current step
  double prev_action = 0.0;
};

Observation build_observation(const PortfolioSnapshot& snapshot, const MarketState& market,
                              const ObservationHistory& history, const EnvConfig& config,
                              double vega_scale);

/// Single-episode hedging environment. One instance is single-threaded.
class HedgingEnv {
 public:
  explicit HedgingEnv(EnvConfig config);

  /// Starts a new episode whose market path and order flow are determined by
  /// (config.seed, episode).
  Observation reset(std::uint64_t episode);

  StepResult step(double action);

  bool done() const { return step_ >= config_.episode_days; }
  int current_step() const { return step_; }
  const EnvConfig& config() const { return config_; }
  const PortfolioSnapshot& snapshot() const { return snapshot_; }
  MarketState market() const;
  double vega_scale() const { return vega_scale_; }
  const Observation& observation() const { return obs_; }
  const std::vector<LedgerRow>& ledger() const { return ledger_; }

 private:
  MarketState market_at(int step) const;
  OptionContract atm_hedge_option(const MarketState& market) const;

  EnvConfig config_;
  PathSet path_;
  std::mt19937_64 order_rng_;
  PortfolioSnapshot snapshot_;
  std::vector<double> price_history_;
  std::vector<LedgerRow> ledger_;
  Observation obs_;
  double prev_action_ = 0.0;
  double vega_scale_ = 1.0;
  int step_ = 0;
  bool started_ = false;
};

/// Seed mixing shared by the environment and the runner.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

}  // namespace vegahedge
