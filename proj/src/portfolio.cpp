#include "vegahedge/portfolio.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

namespace vegahedge {
namespace {

double intrinsic(const OptionSpec& spec, double spot) {
  return spec.is_call ? std::max(spot - spec.strike, 0.0) : std::max(spec.strike - spot, 0.0);
}

std::string describe(const OptionContract& c, const char* book, std::size_t index) {
  std::ostringstream out;
  out << book << " contract #" << index << " (K=" << c.spec.strike << ", side=" << c.side
      << ", born step " << c.birth_step << ")";
  return out.str();
}

template <typename Fn>
void for_each_contract(const PortfolioSnapshot& snapshot, Fn&& fn) {
  for (std::size_t i = 0; i < snapshot.liabilities.size(); ++i) {
    fn(snapshot.liabilities[i], "liability", i);
  }
  for (std::size_t i = 0; i < snapshot.hedge_options.size(); ++i) {
    fn(snapshot.hedge_options[i], "hedge", i);
  }
}

}  // namespace

OptionContract make_contract(double strike, int maturity_steps, bool is_call, double units,
                             int side, const MarketState& market) {
  if (!(strike > 0.0) || maturity_steps < 0 || !(units > 0.0) || (side != 1 && side != -1)) {
    throw std::invalid_argument("make_contract: invalid contract terms");
  }
  OptionContract contract;
  contract.spec = {strike, maturity_steps * market.params.dt, is_call, units};
  contract.side = side;
  contract.birth_step = market.step;
  contract.maturity_steps = maturity_steps;
  contract.entry_price = contract_greeks(contract, market).price;
  return contract;
}

double remaining_years(const OptionContract& contract, const MarketState& market) {
  return std::max(contract.remaining_steps(market.step), 0) * market.params.dt;
}

double contract_implied_vol(const OptionContract& contract, const MarketState& market) {
  const double tau = remaining_years(contract, market);
  if (tau <= 0.0 || market.inst_vol <= 0.0) return 0.0;
  const SabrParams& p = market.params;
  const double forward = forward_price(market.spot, p.r, p.q, tau);
  if (p.upsilon == 0.0 && forward != contract.spec.strike) {
    const SabrTerms terms =
        sabr_terms(forward, contract.spec.strike, market.inst_vol, tau, p.beta, p.rho, 0.0);
    return terms.lambda * terms.psi;
  }
  return sabr_implied_vol(forward, contract.spec.strike, market.inst_vol, tau, p.beta, p.rho,
                          p.upsilon);
}

GreeksReport contract_greeks(const OptionContract& contract, const MarketState& market) {
  OptionSpec live = contract.spec;
  live.t_opt = remaining_years(contract, market);
  const double vol = contract_implied_vol(contract, market);
  return bs_greeks(live, market.spot, market.params.r, market.params.q, vol);
}

std::vector<OptionContract> sample_arrivals(std::mt19937_64& rng, double intensity,
                                            const MarketState& market,
                                            int client_maturity_days) {
  if (!(intensity >= 0.0)) throw std::invalid_argument("sample_arrivals: intensity < 0");
  std::vector<OptionContract> out;
  if (intensity == 0.0) return out;
  std::poisson_distribution<int> count_dist(intensity);
  std::bernoulli_distribution long_side(0.5);
  const int count = count_dist(rng);
  out.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    const int side = long_side(rng) ? 1 : -1;
    out.push_back(make_contract(market.spot, client_maturity_days, true, 100.0, side, market));
  }
  return out;
}

GreekTotals aggregate_greeks(const PortfolioSnapshot& snapshot, const MarketState& market) {
  GreekTotals totals;
  for_each_contract(snapshot, [&](const OptionContract& c, const char*, std::size_t) {
    const GreeksReport g = contract_greeks(c, market);
    const double weight = c.side * c.spec.units;
    totals.delta += weight * g.delta;
    totals.vega += weight * g.vega;
  });
  return totals;
}

double mark_to_market(const PortfolioSnapshot& snapshot, const MarketState& market) {
  double value = snapshot.cash + snapshot.underlying_qty * market.spot;
  for_each_contract(snapshot, [&](const OptionContract& c, const char* book, std::size_t i) {
    double price;
    try {
      price = contract_greeks(c, market).price;
    } catch (const std::exception& e) {
      throw UnpriceableContract(describe(c, book, i) + ": " + e.what());
    }
    if (!std::isfinite(price)) {
      throw UnpriceableContract(describe(c, book, i) + ": non-finite price");
    }
    value += c.side * c.spec.units * price;
  });
  return value;
}

PortfolioSnapshot book_contract(PortfolioSnapshot snapshot, const OptionContract& contract,
                                bool as_hedge) {
  snapshot.cash -= contract.side * contract.spec.units * contract.entry_price;
  (as_hedge ? snapshot.hedge_options : snapshot.liabilities).push_back(contract);
  return snapshot;
}

PortfolioSnapshot expire_and_settle(PortfolioSnapshot snapshot, const MarketState& market) {
  auto settle = [&](std::vector<OptionContract>& book) {
    std::erase_if(book, [&](const OptionContract& c) {
      if (c.remaining_steps(market.step) > 0) return false;
      snapshot.cash += c.side * c.spec.units * intrinsic(c.spec, market.spot);
      return true;
    });
  };
  settle(snapshot.liabilities);
  settle(snapshot.hedge_options);
  snapshot.step = market.step;
  snapshot.value = mark_to_market(snapshot, market);
  return snapshot;
}

void write_ledger_csv(const std::vector<LedgerRow>& rows, std::ostream& out) {
  out << "step,value,delta_total,vega_total,cash,n_liabilities,n_hedges\n";
  out.precision(17);
  for (const auto& row : rows) {
    out << row.step << ',' << row.value << ',' << row.delta_total << ',' << row.vega_total << ','
        << row.cash << ',' << row.n_liabilities << ',' << row.n_hedges << '\n';
  }
}

}  // namespace vegahedge
