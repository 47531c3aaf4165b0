#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "vegahedge/pricing.hpp"

using namespace vegahedge;

namespace {

double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

OptionSpec call(double k, double t) { return {k, t, true, 100.0}; }
OptionSpec put(double k, double t) { return {k, t, false, 100.0}; }

}  // namespace

TEST(NormCdf, ReferenceValues) {
  EXPECT_DOUBLE_EQ(norm_cdf(0.0), 0.5);
  EXPECT_NEAR(norm_cdf(0.05), 0.519939, 1e-6);
  EXPECT_NEAR(norm_cdf(1.959963984540054), 0.975, 1e-14);
  EXPECT_NEAR(norm_cdf(-8.0), 6.220960574271785e-16, 1e-28);
  EXPECT_NEAR(norm_cdf(3.0) + norm_cdf(-3.0), 1.0, 1e-15);
}

TEST(ForwardPrice, Carry) {
  EXPECT_DOUBLE_EQ(forward_price(100, 0, 0, 1), 100);
  EXPECT_NEAR(forward_price(100, 0.03, 0.03, 2), 100, 1e-12);
  EXPECT_NEAR(forward_price(100, 0.05, 0, 1), 105.1271, 1e-4);
}

TEST(SabrImpliedVol, LognormalAtmIsSigma) {
  EXPECT_NEAR(sabr_implied_vol(100, 100, 0.25, 0.5, 1.0, 0.3, 0.0), 0.25, 1e-15);
}

TEST(SabrImpliedVol, AtmTermByTerm) {
  const double f = 100, sigma = 0.3, t = 30.0 / 365, beta = 0.5, rho = 0.2, ups = 0.3;
  // x = F^(1-beta) at the money.
  const double x = std::sqrt(100.0);
  const double term1 = 0.25 * sigma * sigma / (24.0 * x * x);
  const double term2 = rho * beta * sigma * ups / (4.0 * x);
  const double term3 = ups * ups * (2.0 - 3.0 * rho * rho) / 24.0;
  const double psi = 1.0 + t * (term1 + term2 + term3);
  const double expected = sigma * psi / std::sqrt(f);
  EXPECT_NEAR(sabr_implied_vol(f, f, sigma, t, beta, rho, ups), expected, 1e-15);
  EXPECT_NEAR(expected, 0.0300179615, 1e-10);
}

TEST(SabrImpliedVol, ContinuousAcrossAtmBranch) {
  const double atm = sabr_implied_vol(100, 100, 0.3, 30.0 / 365, 0.5, 0.2, 0.3);
  for (double bump : {1e-8, -1e-8, 1e-6, -1e-6}) {
    const double near = sabr_implied_vol(100, 100 * (1 + bump), 0.3, 30.0 / 365, 0.5, 0.2, 0.3);
    EXPECT_LT(rel_err(near, atm), 1e-6) << bump;
  }
}

TEST(SabrImpliedVol, OffAtmMatchesIndependentFormula) {
  const double f = 100, k = 110, sigma = 0.3, t = 0.5, beta = 0.5, rho = -0.3, ups = 0.6;
  const double x = std::pow(f * k, (1 - beta) / 2);
  const double y = (1 - beta) * std::log(f / k);
  const double lambda = sigma / (x * (1 + y * y / 24 + std::pow(y, 4) / 1920));
  const double psi = 1 + t * ((1 - beta) * (1 - beta) * sigma * sigma / (24 * x * x) +
                              rho * beta * sigma * ups / (4 * x) + ups * ups * (2 - 3 * rho * rho) / 24);
  const double phi = ups * x / sigma * std::log(f / k);
  const double chi = std::log((std::sqrt(1 - 2 * rho * phi + phi * phi) + phi - rho) / (1 - rho));
  EXPECT_LT(rel_err(sabr_implied_vol(f, k, sigma, t, beta, rho, ups), lambda * psi * phi / chi), 1e-12);
  const auto terms = sabr_terms(f, k, sigma, t, beta, rho, ups);
  EXPECT_NEAR(terms.chi, chi, 1e-13);
}

TEST(SabrImpliedVol, DegenerateInputs) {
  // Zero vol-of-vol away from the money: phi = chi = 0.
  EXPECT_THROW(sabr_implied_vol(100, 110, 0.3, 0.5, 0.5, 0.2, 0.0), NumericalDegeneracy);
  EXPECT_THROW(sabr_implied_vol(-1, 100, 0.3, 0.5, 0.5, 0.2, 0.3), std::invalid_argument);
  EXPECT_THROW(sabr_implied_vol(100, 100, 0.3, 0.0, 0.5, 0.2, 0.3), std::invalid_argument);
}

TEST(BsD1D2, Values) {
  const auto atm = bs_d1_d2(100, 100, 0, 0, 0.2, 0.25);
  EXPECT_NEAR(atm.d1, 0.05, 1e-15);
  EXPECT_NEAR(atm.d2, -0.05, 1e-15);
  const auto d = bs_d1_d2(95, 100, 0.03, 0.01, 0.35, 0.7);
  EXPECT_NEAR(d.d1 - d.d2, 0.35 * std::sqrt(0.7), 1e-15);
}

TEST(BsPrice, ReferenceCall) {
  EXPECT_NEAR(bs_price(call(100, 0.25), 100, 0, 0, 0.2), 3.9878, 1e-4);
}

TEST(BsPrice, IntrinsicBranches) {
  EXPECT_DOUBLE_EQ(bs_price(call(100, 0.25), 120, 0, 0, 0.0), 20.0);
  EXPECT_DOUBLE_EQ(bs_price(call(100, 0.0), 120, 0, 0, 0.2), 20.0);
  EXPECT_DOUBLE_EQ(bs_price(put(100, 0.0), 120, 0, 0, 0.2), 0.0);
  EXPECT_DOUBLE_EQ(bs_price(put(100, 0.0), 80, 0, 0, 0.2), 20.0);
  // Zero vol with carry: discounted forward intrinsic.
  EXPECT_NEAR(bs_price(call(100, 1.0), 100, 0.05, 0, 0.0), 100 - 100 * std::exp(-0.05), 1e-12);
}

TEST(BsPrice, PutCallParityRandomized) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> spot(20, 300), strike(20, 300), rate(-0.02, 0.1),
      vol(0.01, 1.5), tenor(0.001, 5.0);
  for (int i = 0; i < 10000; ++i) {
    const double s = spot(rng), k = strike(rng), r = rate(rng), q = rate(rng), v = vol(rng),
                 t = tenor(rng);
    const double lhs = bs_price(call(k, t), s, r, q, v) - bs_price(put(k, t), s, r, q, v);
    const double rhs = s * std::exp(-q * t) - k * std::exp(-r * t);
    ASSERT_LE(std::abs(lhs - rhs), 1e-10) << s << " " << k << " " << t;
  }
}

TEST(BsPrice, Monotonicity) {
  double prev = 0.0;
  for (double s = 60; s <= 140; s += 1) {
    const double p = bs_price(call(100, 0.5), s, 0.01, 0, 0.25);
    EXPECT_GE(p, prev);
    prev = p;
  }
  double prev_c = 0.0, prev_p = 0.0;
  for (double v = 0.01; v <= 1.0; v += 0.01) {
    const double c = bs_price(call(100, 0.5), 95, 0.01, 0, v);
    const double p = bs_price(put(100, 0.5), 95, 0.01, 0, v);
    EXPECT_GE(c, prev_c);
    EXPECT_GE(p, prev_p);
    prev_c = c;
    prev_p = p;
  }
}

TEST(BsGreeks, ReferenceVegaAndDeltaGap) {
  const auto c = bs_greeks(call(100, 0.25), 100, 0, 0, 0.2);
  EXPECT_NEAR(c.vega, 19.922, 1e-3);
  const auto g1 = bs_greeks(call(100, 0.8), 97, 0.02, 0.03, 0.3);
  const auto g2 = bs_greeks(put(100, 0.8), 97, 0.02, 0.03, 0.3);
  EXPECT_NEAR(g1.delta - g2.delta, std::exp(-0.03 * 0.8), 1e-15);
  EXPECT_DOUBLE_EQ(g1.vega, g2.vega);
  EXPECT_GE(g1.delta, 0.0);
  EXPECT_LE(g1.delta, 1.0);
  EXPECT_LE(g2.delta, 0.0);
  EXPECT_GE(g2.delta, -1.0);
}

TEST(BsGreeks, FiniteDifferenceOracle) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> spot(50, 150), vol(0.05, 0.8), tenor(0.05, 3.0),
      rate(0.0, 0.05);
  for (int i = 0; i < 2000; ++i) {
    const double s = spot(rng), v = vol(rng), t = tenor(rng), r = rate(rng), q = rate(rng);
    for (const bool is_call : {true, false}) {
      const OptionSpec spec{100.0, t, is_call, 100.0};
      const auto g = bs_greeks(spec, s, r, q, v);
      // Five-point stencils keep truncation error far below the tolerance.
      auto stencil = [](auto f, double x, double h) {
        return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12 * h);
      };
      const double fd_delta =
          stencil([&](double x) { return bs_price(spec, x, r, q, v); }, s,
                  1e-3 * s * v * std::sqrt(t));
      const double fd_vega =
          stencil([&](double x) { return bs_price(spec, s, r, q, x); }, v, 1e-3 * v);
      if (std::abs(g.delta) > 1e-3) EXPECT_LT(rel_err(fd_delta, g.delta), 1e-6) << s << " " << t;
      if (g.vega > 1e-3) EXPECT_LT(rel_err(fd_vega, g.vega), 1e-6) << s << " " << t;
    }
  }
}

TEST(BsGreeks, ExpiryBranch) {
  const auto itm = bs_greeks(call(100, 0.0), 110, 0, 0, 0.2);
  EXPECT_DOUBLE_EQ(itm.price, 10.0);
  EXPECT_DOUBLE_EQ(itm.delta, 1.0);
  EXPECT_DOUBLE_EQ(itm.vega, 0.0);
  const auto otm = bs_greeks(put(100, 0.0), 110, 0, 0, 0.2);
  EXPECT_DOUBLE_EQ(otm.delta, 0.0);
}
