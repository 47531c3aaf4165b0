#pragma once

#include <stdexcept>

namespace vegahedge {

struct OptionSpec {
  double strike = 100.0;
  double t_opt = 0.0;  // years to maturity
  bool is_call = true;
  double units = 100.0;
};

struct GreeksReport {
  double price = 0.0;  // per unit
  double delta = 0.0;
  double vega = 0.0;   // per unit of implied vol
  double implied_vol = 0.0;
};

struct D1D2 {
  double d1;
  double d2;
};

/// Raised when the SABR expansion cannot be evaluated (chi == 0 off the money).
class NumericalDegeneracy : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Standard normal CDF via erfc.
double norm_cdf(double x);
double norm_pdf(double x);

double forward_price(double spot, double r, double q, double t_opt);

/// Intermediate quantities of Hagan's implied-volatility expansion.
struct SabrTerms {
  double x;       // (F K)^((1-beta)/2)
  double y;       // (1-beta) ln(F/K)
  double lambda;
  double psi;
  double phi;
  double chi;
};

SabrTerms sabr_terms(double forward, double strike, double sigma, double t_opt, double beta,
                     double rho, double upsilon);

/// Hagan's SABR implied volatility. At F == K the result is sigma Psi / F^(1-beta);
/// otherwise Lambda Psi Phi / chi.
double sabr_implied_vol(double forward, double strike, double sigma, double t_opt, double beta,
                        double rho, double upsilon);

D1D2 bs_d1_d2(double spot, double strike, double r, double q, double sigma_imp, double t_opt);

/// Black-Scholes value per unit. Falls back to discounted intrinsic value when
/// t_opt == 0 or sigma_imp == 0.
double bs_price(const OptionSpec& spec, double spot, double r, double q, double sigma_imp);

/// Price, delta and vega per unit. Vega is identical for calls and puts.
GreeksReport bs_greeks(const OptionSpec& spec, double spot, double r, double q,
                       double sigma_imp);

}  // namespace vegahedge
