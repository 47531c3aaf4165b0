#include <gtest/gtest.h>

#include <cmath>

#include "vegahedge/baselines.hpp"

using namespace vegahedge;

TEST(Baselines, ConstantActions) {
  const Observation obs(kObsSize, 0.37);
  EXPECT_EQ(delta_strategy(obs), 0.0);
  EXPECT_EQ(delta_vega_strategy(obs), 1.0);
  EXPECT_EQ(baseline_by_name("delta")(obs), 0.0);
  EXPECT_EQ(baseline_by_name("delta_vega")(obs), 1.0);
  EXPECT_THROW(baseline_by_name("gvdh"), std::invalid_argument);
}

TEST(Baselines, DeltaTradesNoOptions) {
  for (std::uint64_t seed : {0u, 5u}) {
    EnvConfig cfg;
    cfg.seed = seed;
    HedgingEnv env(cfg);
    auto obs = env.reset(1);
    while (!env.done()) {
      const auto res = env.step(delta_strategy(obs));
      EXPECT_EQ(res.info.cost, 0.0);
      EXPECT_EQ(res.info.hedge_qty, 0.0);
      EXPECT_NEAR(res.info.post_trade_delta, 0.0, 1e-10);
      obs = res.next_obs;
    }
    EXPECT_TRUE(env.snapshot().hedge_options.empty());
  }
}

TEST(Baselines, DeltaVegaNeutralizesVega) {
  EnvConfig cfg;
  cfg.seed = 2;
  HedgingEnv env(cfg);
  for (std::uint64_t ep = 0; ep < 3; ++ep) {
    auto obs = env.reset(ep);
    while (!env.done()) {
      const auto res = env.step(delta_vega_strategy(obs));
      const auto& info = res.info;
      if (info.a_max == 1.0) {
        EXPECT_LE(std::abs(info.post_trade_vega), 1e-8 * std::abs(info.pre_trade_vega) + 1e-12);
      }
      EXPECT_NEAR(info.cost, cfg.cost_ratio * info.hedge_price * std::abs(info.hedge_qty),
                  1e-12 * std::max(1.0, info.cost));
      obs = res.next_obs;
    }
  }
}
