#include "vegahedge/pricing.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace vegahedge {

double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double norm_pdf(double x) {
  return std::exp(-0.5 * x * x) * (std::numbers::inv_sqrtpi / std::numbers::sqrt2);
}

double forward_price(double spot, double r, double q, double t_opt) {
  return spot * std::exp((r - q) * t_opt);
}

SabrTerms sabr_terms(double forward, double strike, double sigma, double t_opt, double beta,
                     double rho, double upsilon) {
  if (!(forward > 0.0) || !(strike > 0.0) || !(t_opt > 0.0) || !(sigma > 0.0)) {
    throw std::invalid_argument("sabr: F, K, t_opt and sigma must be positive");
  }
  if (!(rho >= -1.0 && rho < 1.0)) {
    throw std::domain_error("sabr: rho must lie in [-1, 1)");
  }
  SabrTerms terms{};
  const double one_minus_beta = 1.0 - beta;
  const double log_fk = std::log(forward / strike);
  terms.x = std::pow(forward * strike, 0.5 * one_minus_beta);
  terms.y = one_minus_beta * log_fk;
  const double y2 = terms.y * terms.y;
  terms.lambda = sigma / (terms.x * (1.0 + y2 / 24.0 + y2 * y2 / 1920.0));
  terms.psi = 1.0 + t_opt * (one_minus_beta * one_minus_beta * sigma * sigma /
                                 (24.0 * terms.x * terms.x) +
                             rho * beta * sigma * upsilon / (4.0 * terms.x) +
                             upsilon * upsilon * (2.0 - 3.0 * rho * rho) / 24.0);
  terms.phi = upsilon * terms.x / sigma * log_fk;
  // ln((sqrt(1 - 2 rho phi + phi^2) + phi - rho) / (1 - rho)) rearranged through
  // log1p so small |phi| keeps full relative precision.
  const double u = terms.phi * terms.phi - 2.0 * rho * terms.phi;
  const double sqrt_minus_one = u / (std::sqrt(1.0 + u) + 1.0);
  terms.chi = std::log1p((sqrt_minus_one + terms.phi) / (1.0 - rho));
  return terms;
}

double sabr_implied_vol(double forward, double strike, double sigma, double t_opt, double beta,
                        double rho, double upsilon) {
  const SabrTerms terms = sabr_terms(forward, strike, sigma, t_opt, beta, rho, upsilon);
  double vol;
  if (forward == strike) {
    vol = sigma * terms.psi / std::pow(forward, 1.0 - beta);
  } else {
    if (terms.chi == 0.0) {
      throw NumericalDegeneracy("sabr_implied_vol: chi vanished with F != K");
    }
    vol = terms.lambda * terms.psi * terms.phi / terms.chi;
  }
  if (!(vol >= 0.0)) {
    throw std::domain_error("sabr_implied_vol: negative or undefined implied volatility");
  }
  return vol;
}

D1D2 bs_d1_d2(double spot, double strike, double r, double q, double sigma_imp, double t_opt) {
  const double vol_sqrt_t = sigma_imp * std::sqrt(t_opt);
  const double d1 =
      (std::log(spot / strike) + (r - q + 0.5 * sigma_imp * sigma_imp) * t_opt) / vol_sqrt_t;
  return {d1, d1 - vol_sqrt_t};
}

double bs_price(const OptionSpec& spec, double spot, double r, double q, double sigma_imp) {
  const double t = spec.t_opt;
  const double fwd_spot = spot * std::exp(-q * t);
  const double disc_strike = spec.strike * std::exp(-r * t);
  if (t <= 0.0 || sigma_imp <= 0.0) {
    return spec.is_call ? std::max(fwd_spot - disc_strike, 0.0)
                        : std::max(disc_strike - fwd_spot, 0.0);
  }
  const auto [d1, d2] = bs_d1_d2(spot, spec.strike, r, q, sigma_imp, t);
  if (spec.is_call) return fwd_spot * norm_cdf(d1) - disc_strike * norm_cdf(d2);
  return disc_strike * norm_cdf(-d2) - fwd_spot * norm_cdf(-d1);
}

GreeksReport bs_greeks(const OptionSpec& spec, double spot, double r, double q,
                       double sigma_imp) {
  GreeksReport report;
  report.implied_vol = sigma_imp;
  report.price = bs_price(spec, spot, r, q, sigma_imp);
  const double t = spec.t_opt;
  const double carry = std::exp(-q * t);
  if (t <= 0.0 || sigma_imp <= 0.0) {
    // Degenerate limit: delta is the exercise indicator, vega vanishes.
    const bool itm = spot * carry > spec.strike * std::exp(-r * t);
    const bool otm = spot * carry < spec.strike * std::exp(-r * t);
    if (spec.is_call) report.delta = itm ? carry : (otm ? 0.0 : 0.5 * carry);
    else report.delta = otm ? -carry : (itm ? 0.0 : -0.5 * carry);
    return report;
  }
  const double d1 = bs_d1_d2(spot, spec.strike, r, q, sigma_imp, t).d1;
  report.delta = spec.is_call ? carry * norm_cdf(d1) : -carry * norm_cdf(-d1);
  report.vega = carry * spot * std::sqrt(t) * norm_pdf(d1);
  return report;
}

}  // namespace vegahedge
