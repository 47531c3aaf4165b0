#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <stdexcept>
#include <vector>

#include "vegahedge/market_sim.hpp"
#include "vegahedge/pricing.hpp"

namespace vegahedge {

/// Market observed at one simulation step.
struct MarketState {
  double spot = 100.0;
  double inst_vol = 0.3;
  int step = 0;
  SabrParams params;
};

struct OptionContract {
  OptionSpec spec;         // t_opt is the maturity at booking
  int side = 1;            // +1 bank long, -1 bank short
  int birth_step = 0;
  double entry_price = 0;  // per unit
  int maturity_steps = 0;  // spec.t_opt expressed in whole steps

  int remaining_steps(int step) const { return maturity_steps - (step - birth_step); }
};

/// Builds an ATM-or-not contract whose maturity is a whole number of steps.
OptionContract make_contract(double strike, int maturity_steps, bool is_call, double units,
                             int side, const MarketState& market);

struct PortfolioSnapshot {
  std::vector<OptionContract> liabilities;
  std::vector<OptionContract> hedge_options;
  double underlying_qty = 0.0;
  double cash = 0.0;
  int step = 0;
  double value = 0.0;  // cash + qty*spot + sum side*units*price
};

struct GreekTotals {
  double delta = 0.0;
  double vega = 0.0;
};

class UnpriceableContract : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

double remaining_years(const OptionContract& contract, const MarketState& market);

/// SABR implied vol for the contract's strike and remaining maturity. Returns 0
/// at expiry or when the instantaneous vol is 0 (pricing then takes the
/// intrinsic branch). With zero vol-of-vol away from the money the Phi/chi ratio
/// is replaced by its limit 1.
double contract_implied_vol(const OptionContract& contract, const MarketState& market);

/// Per-unit price and Greeks of a contract at the given market state.
GreeksReport contract_greeks(const OptionContract& contract, const MarketState& market);

/// Poisson(intensity) client orders: ATM calls on 100 units, long or short with
/// probability 1/2, priced at the current implied vol.
std::vector<OptionContract> sample_arrivals(std::mt19937_64& rng, double intensity,
                                            const MarketState& market,
                                            int client_maturity_days);

/// Signed, unit-weighted option Greeks over liabilities and hedge options.
/// The underlying position is not included.
GreekTotals aggregate_greeks(const PortfolioSnapshot& snapshot, const MarketState& market);

/// cash + underlying_qty * spot + sum over live contracts of side * units * price.
double mark_to_market(const PortfolioSnapshot& snapshot, const MarketState& market);

/// Books a contract at its entry price: the premium moves through cash so the
/// total value is unchanged.
PortfolioSnapshot book_contract(PortfolioSnapshot snapshot, const OptionContract& contract,
                                bool as_hedge);

/// Removes contracts with no remaining maturity, moving their intrinsic payoff
/// into cash. Value at the expiry instant is unchanged.
PortfolioSnapshot expire_and_settle(PortfolioSnapshot snapshot, const MarketState& market);

struct LedgerRow {
  int step;
  double value;
  double delta_total;
  double vega_total;
  double cash;
  std::size_t n_liabilities;
  std::size_t n_hedges;
};

void write_ledger_csv(const std::vector<LedgerRow>& rows, std::ostream& out);

}  // namespace vegahedge
