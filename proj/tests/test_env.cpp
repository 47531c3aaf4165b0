#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "vegahedge/env.hpp"

using namespace vegahedge;

namespace {

EnvConfig frozen_config() {
  EnvConfig c;
  c.sabr.sigma0 = 0.0;
  c.sabr.upsilon = 0.0;
  return c;
}

}  // namespace

TEST(ActionBound, Examples) {
  EXPECT_DOUBLE_EQ(action_bound(0.0, 1e5), 1.0);
  EXPECT_DOUBLE_EQ(action_bound(5e4, 1e5), 1.0);
  EXPECT_DOUBLE_EQ(action_bound(-4e5, 1e5), 0.25);
  EXPECT_DOUBLE_EQ(action_bound(2e5, 1e5), 0.5);
  EXPECT_THROW(action_bound(1.0, 0.0), std::invalid_argument);
}

TEST(DeltaNeutralize, OffsetsOptionDelta) {
  MarketState m;
  PortfolioSnapshot s;
  s.liabilities.push_back(make_contract(100.0, 60, true, 100.0, -1, m));
  const double option_delta = aggregate_greeks(s, m).delta;
  const double trade = delta_neutralize(s, m);
  EXPECT_DOUBLE_EQ(trade, -option_delta);
  s.underlying_qty += trade;
  EXPECT_NEAR(portfolio_delta(s, m), 0.0, 1e-12);
  EXPECT_NEAR(delta_neutralize(s, m), 0.0, 1e-12);
}

TEST(DeltaNeutralize, UnderlyingOnly) {
  PortfolioSnapshot s;
  s.underlying_qty = 37.5;
  EXPECT_DOUBLE_EQ(delta_neutralize(s, MarketState{}), -37.5);
}

TEST(RealizedVol, HandComputed) {
  const std::vector<double> prices{100, 101, 99.5, 102, 101, 100.5, 103, 104, 102.5, 103.5, 105};
  const double dt = 1.0 / 365.0;
  std::vector<double> r;
  for (std::size_t i = 1; i < prices.size(); ++i) r.push_back(std::log(prices[i] / prices[i - 1]));
  double mean = 0.0;
  for (double x : r) mean += x;
  mean /= 10.0;
  double ss = 0.0;
  for (double x : r) ss += (x - mean) * (x - mean);
  EXPECT_NEAR(realized_vol(prices, 10, dt), std::sqrt(ss / 9.0 / dt), 1e-12);

  // A shorter window uses only the latest returns.
  const std::vector<double> tail(prices.end() - 4, prices.end());
  EXPECT_DOUBLE_EQ(realized_vol(prices, 3, dt), realized_vol(tail, 3, dt));
}

TEST(RealizedVol, DegenerateInputs) {
  const double dt = 1.0 / 365.0;
  EXPECT_EQ(realized_vol(std::vector<double>{100.0}, 10, dt), 0.0);
  EXPECT_EQ(realized_vol(std::vector<double>{100.0, 101.0}, 10, dt), 0.0);
  EXPECT_EQ(realized_vol(std::vector<double>(12, 100.0), 10, dt), 0.0);
  // Constant growth has zero sample deviation.
  std::vector<double> growth{100.0};
  for (int i = 0; i < 11; ++i) growth.push_back(growth.back() * 1.01);
  EXPECT_NEAR(realized_vol(growth, 10, dt), 0.0, 1e-6);
}

TEST(HedgingEnv, InitialObservation) {
  HedgingEnv env(EnvConfig{});
  const Observation obs = env.reset(0);
  ASSERT_EQ(obs.size(), static_cast<std::size_t>(kObsSize));
  EXPECT_DOUBLE_EQ(obs[kObsSpot], 1.0);
  EXPECT_DOUBLE_EQ(obs[kObsInstVol], 0.3);
  EXPECT_GT(obs[kObsHedgeImpVol], 0.0);
  EXPECT_EQ(obs[kObsRealizedVol], 0.0);
  EXPECT_EQ(obs[kObsVega], 0.0);
  EXPECT_EQ(obs[kObsDelta], 0.0);
  EXPECT_DOUBLE_EQ(obs[kObsTimeLeft], 1.0);
  EXPECT_EQ(obs[kObsPrevAction], 0.0);
}

TEST(HedgingEnv, FrozenMarketHasNoPnl) {
  HedgingEnv env(frozen_config());
  env.reset(3);
  double total_premium = 0.0;
  while (!env.done()) {
    const auto res = env.step(0.0);
    EXPECT_NEAR(res.info.pnl, 0.0, 1e-9);
    EXPECT_EQ(res.info.cost, 0.0);
    EXPECT_EQ(res.next_obs[kObsRealizedVol], 0.0);
    total_premium += res.info.premium;
  }
  // At-the-money with zero vol every order is worth nothing.
  EXPECT_EQ(total_premium, 0.0);
}

TEST(HedgingEnv, StepInvariants) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    EnvConfig cfg;
    cfg.seed = seed;
    HedgingEnv env(cfg);
    for (std::uint64_t ep = 0; ep < 5; ++ep) {
      env.reset(ep);
      double value = 0.0;
      double action = 0.1 * static_cast<double>(ep) + 0.3;
      while (!env.done()) {
        const auto res = env.step(action);
        const auto& info = res.info;
        EXPECT_DOUBLE_EQ(res.reward, -std::abs(info.pnl) - info.cost);
        EXPECT_NEAR(info.cost, cfg.cost_ratio * info.hedge_price * std::abs(info.hedge_qty), 1e-12);
        EXPECT_LE(info.action_executed, info.a_max);
        EXPECT_NEAR(info.post_trade_vega, (1.0 - info.action_executed) * info.pre_trade_vega,
                    1e-8 * std::max(1.0, std::abs(info.pre_trade_vega)));
        EXPECT_NEAR(info.post_trade_delta, 0.0, 1e-8);
        // Value moves by pnl plus premium less cost.
        EXPECT_NEAR(info.value, value + info.pnl + info.premium - info.cost,
                    1e-8 * std::max(1.0, std::abs(info.value)));
        value = info.value;
        EXPECT_DOUBLE_EQ(res.next_obs[kObsPrevAction], info.action_executed);
      }
      EXPECT_EQ(env.ledger().size(), static_cast<std::size_t>(cfg.episode_days));
    }
  }
}

TEST(HedgingEnv, ClipsActions) {
  HedgingEnv env(EnvConfig{});
  env.reset(0);
  auto res = env.step(1.7);
  EXPECT_TRUE(res.info.clipped);
  EXPECT_LE(res.info.action_executed, 1.0);
  res = env.step(-0.5);
  EXPECT_TRUE(res.info.clipped);
  EXPECT_EQ(res.info.action_executed, 0.0);
  res = env.step(std::nan(""));
  EXPECT_EQ(res.info.action_executed, 0.0);
}

TEST(HedgingEnv, Reproducible) {
  EnvConfig cfg;
  cfg.seed = 9;
  HedgingEnv a(cfg), b(cfg);
  EXPECT_EQ(a.reset(4), b.reset(4));
  while (!a.done()) {
    const auto ra = a.step(0.5);
    const auto rb = b.step(0.5);
    EXPECT_EQ(ra.reward, rb.reward);
    EXPECT_EQ(ra.next_obs, rb.next_obs);
  }
  // Resetting replays the same episode.
  a.reset(4);
  HedgingEnv c(cfg);
  c.reset(4);
  EXPECT_EQ(a.step(0.2).reward, c.step(0.2).reward);
}

TEST(HedgingEnv, LifecycleErrors) {
  HedgingEnv env(EnvConfig{});
  EXPECT_THROW(env.step(0.0), std::logic_error);
  env.reset(0);
  while (!env.done()) env.step(0.0);
  EXPECT_THROW(env.step(0.0), std::logic_error);
  EnvConfig bad;
  bad.episode_days = 0;
  EXPECT_THROW(HedgingEnv{bad}, std::invalid_argument);
}
