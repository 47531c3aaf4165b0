#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "vegahedge/market_sim.hpp"

using namespace vegahedge;

TEST(DrawShocks, DeterministicForFixedSeed) {
  const auto a = draw_shocks(1, 1, 42);
  const auto b = draw_shocks(1, 1, 42);
  EXPECT_EQ(a.q_s, b.q_s);
  EXPECT_EQ(a.q_i, b.q_i);
  const auto c = draw_shocks(1, 1, 43);
  EXPECT_NE(a.q_s, c.q_s);
}

TEST(DrawShocks, ShapeAndPrefixStability) {
  const auto small = draw_shocks(3, 5, 7);
  const auto large = draw_shocks(10, 5, 7);
  ASSERT_EQ(small.q_s.rows(), 3);
  ASSERT_EQ(small.q_s.cols(), 6);
  EXPECT_EQ(small.n_steps(), 5);
  // Adding paths does not reshuffle earlier ones.
  EXPECT_EQ(small.q_s, large.q_s.topRows(3));
  EXPECT_EQ(small.q_i, large.q_i.topRows(3));
}

TEST(DrawShocks, MomentsMatchStandardNormal) {
  const Eigen::Index n = 100000;
  const auto s = draw_shocks(n, 1, 2024);
  const double se = 1.0 / std::sqrt(static_cast<double>(n));
  for (const PathMatrix* m : {&s.q_s, &s.q_i}) {
    for (Eigen::Index col = 0; col < 2; ++col) {
      EXPECT_LT(std::abs(m->col(col).mean()), 3.0 * se);
    }
  }
  const double mean = s.q_s.mean();
  const double var = (s.q_s.array() - mean).square().sum() / (s.q_s.size() - 1);
  EXPECT_GE(var, 0.98);
  EXPECT_LE(var, 1.02);
  // q_s and q_i independent: sample correlation near zero.
  const double corr = (s.q_s.array() * s.q_i.array()).mean();
  EXPECT_LT(std::abs(corr), 4.0 / std::sqrt(static_cast<double>(s.q_s.size())));
}

TEST(Correlate, LimitsAndArithmetic) {
  ShockSet s;
  s.q_s = PathMatrix::Constant(1, 2, 1.0);
  s.q_i = PathMatrix::Constant(1, 2, 0.5);
  EXPECT_EQ(correlate(s, 0.0), s.q_i);
  EXPECT_EQ(correlate(s, 1.0), s.q_s);
  EXPECT_NEAR(correlate(s, 0.2)(0, 0), 0.2 + std::sqrt(0.96) * 0.5, 1e-15);
  EXPECT_NEAR(correlate(s, 0.2)(0, 0), 0.689898, 1e-6);
  EXPECT_THROW(correlate(s, 1.5), std::domain_error);
  EXPECT_THROW(correlate(s, -1.0001), std::domain_error);
}

TEST(Simulate, ZeroVolOfVolKeepsVolsConstant) {
  SabrParams p;
  p.upsilon = 0.0;
  const auto paths = simulate(p, draw_shocks(50, 30, 3));
  EXPECT_TRUE((paths.vols.array() == p.sigma0).all());
}

TEST(Simulate, ZeroVolZeroDriftIsFrozen) {
  SabrParams p;
  p.sigma0 = 0.0;
  p.mu = 0.0;
  const auto paths = simulate(p, draw_shocks(20, 30, 3));
  EXPECT_TRUE((paths.prices.array() == p.p0).all());
}

TEST(Simulate, FirstColumnIsInitialState) {
  SabrParams p;
  const auto paths = simulate(p, draw_shocks(5, 4, 9));
  EXPECT_TRUE((paths.prices.col(0).array() == p.p0).all());
  EXPECT_TRUE((paths.vols.col(0).array() == p.sigma0).all());
}

TEST(Simulate, MatchesHandRecursion) {
  SabrParams p;
  const auto shocks = draw_shocks(2, 3, 11);
  const auto paths = simulate(p, shocks);
  for (Eigen::Index i = 0; i < 2; ++i) {
    double price = p.p0, vol = p.sigma0;
    for (Eigen::Index t = 0; t < 3; ++t) {
      const double qs = shocks.q_s(i, t);
      const double qv = p.rho * qs + std::sqrt(1 - p.rho * p.rho) * shocks.q_i(i, t);
      const double local = vol * std::pow(price, p.beta - 1.0);
      const double next_vol = vol * std::exp(-0.5 * p.upsilon * p.upsilon * p.dt +
                                             p.upsilon * qv * std::sqrt(p.dt));
      price *= std::exp((p.mu - 0.5 * local * local) * p.dt + local * std::sqrt(p.dt) * qs);
      vol = next_vol;
      EXPECT_DOUBLE_EQ(paths.prices(i, t + 1), price);
      EXPECT_DOUBLE_EQ(paths.vols(i, t + 1), vol);
    }
  }
}

TEST(Simulate, DeterministicAndPositive) {
  SabrParams p;
  p.upsilon = 0.8;
  const auto shocks = draw_shocks(200, 60, 5);
  const auto a = simulate(p, shocks);
  const auto b = simulate(p, shocks);
  EXPECT_EQ(a.prices, b.prices);
  EXPECT_EQ(a.vols, b.vols);
  EXPECT_TRUE((a.prices.array() > 0).all());
  EXPECT_TRUE((a.vols.array() > 0).all());
}

TEST(Simulate, MartingaleUnderLognormalDynamics) {
  SabrParams p;
  p.beta = 1.0;
  p.mu = 0.0;
  const Eigen::Index n = 100000;
  const auto paths = simulate(p, draw_shocks(n, 30, 77));
  const auto terminal = (paths.prices.col(30).array() / p.p0).eval();
  const double mean = terminal.mean();
  const double sd = std::sqrt((terminal - mean).square().sum() / (n - 1));
  EXPECT_LT(std::abs(mean - 1.0), 3.0 * sd / std::sqrt(static_cast<double>(n)));
}

TEST(Simulate, NonFiniteStateReportsPathAndStep) {
  SabrParams p;
  auto shocks = draw_shocks(3, 4, 1);
  shocks.q_s(1, 2) = std::numeric_limits<double>::infinity();
  try {
    simulate(p, shocks);
    FAIL() << "expected SimulationError";
  } catch (const SimulationError& e) {
    EXPECT_EQ(e.path(), 1);
    EXPECT_EQ(e.step(), 3);  // the state that failed to form
  }
}

TEST(SabrParams, ValidationRejectsBadValues) {
  SabrParams p;
  EXPECT_NO_THROW(p.validate());
  p.beta = 1.5;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = {};
  p.p0 = 0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = {};
  p.dt = 0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = {};
  p.rho = -1.2;
  EXPECT_THROW(p.validate(), std::invalid_argument);
}

TEST(WritePaths, CsvLayout) {
  SabrParams p;
  const auto paths = simulate(p, draw_shocks(2, 3, 1));
  std::ostringstream out;
  write_paths_csv(paths, out);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "path,step,price,vol");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 2 * 4);
}
