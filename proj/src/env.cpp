#include "vegahedge/env.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vegahedge {

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t x = a * 0x9e3779b97f4a7c15ULL + b + 0x632be59bd9b4e019ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

void EnvConfig::validate() const {
  sabr.validate();
  if (hedge_maturity_days < 1) throw std::invalid_argument("EnvConfig: hedge_maturity_days < 1");
  if (episode_days < 1) throw std::invalid_argument("EnvConfig: episode_days < 1");
  if (!(cost_ratio >= 0.0)) throw std::invalid_argument("EnvConfig: cost_ratio < 0");
  if (!(risk_tolerance > 0.0)) throw std::invalid_argument("EnvConfig: risk_tolerance <= 0");
  if (!(arrival_intensity >= 0.0)) throw std::invalid_argument("EnvConfig: intensity < 0");
  if (realized_vol_window < 1) throw std::invalid_argument("EnvConfig: realized_vol_window < 1");
  if (client_maturity_days < 1) throw std::invalid_argument("EnvConfig: client_maturity_days < 1");
  if (!(premium_ratio >= 0.0)) throw std::invalid_argument("EnvConfig: premium_ratio < 0");
}

double action_bound(double vega_total, double risk_tolerance) {
  if (!(risk_tolerance > 0.0)) throw std::invalid_argument("action_bound: risk_tolerance <= 0");
  if (vega_total == 0.0) return 1.0;
  return std::min(1.0, risk_tolerance / std::abs(vega_total));
}

double portfolio_delta(const PortfolioSnapshot& snapshot, const MarketState& market) {
  return aggregate_greeks(snapshot, market).delta + snapshot.underlying_qty;
}

double delta_neutralize(const PortfolioSnapshot& snapshot, const MarketState& market) {
  return -portfolio_delta(snapshot, market);
}

double realized_vol(std::span<const double> prices, int window, double dt) {
  if (prices.size() < 3 || window < 2) return 0.0;
  const std::size_t n_returns = std::min<std::size_t>(window, prices.size() - 1);
  if (n_returns < 2) return 0.0;
  const auto tail = prices.last(n_returns + 1);
  std::vector<double> returns(n_returns);
  for (std::size_t i = 0; i < n_returns; ++i) returns[i] = std::log(tail[i + 1] / tail[i]);
  double mean = 0.0;
  for (double r : returns) mean += r;
  mean /= static_cast<double>(n_returns);
  double ss = 0.0;
  for (double r : returns) ss += (r - mean) * (r - mean);
  return std::sqrt(ss / static_cast<double>(n_returns - 1) / dt);
}

Observation build_observation(const PortfolioSnapshot& snapshot, const MarketState& market,
                              const ObservationHistory& history, const EnvConfig& config,
                              double vega_scale) {
  if (history.prices.empty()) throw std::invalid_argument("build_observation: empty history");
  Observation obs(kObsSize, 0.0);
  const GreekTotals greeks = aggregate_greeks(snapshot, market);
  const OptionContract hedge =
      make_contract(market.spot, config.hedge_maturity_days, true, 1.0, 1, market);
  obs[kObsSpot] = market.spot / market.params.p0;
  obs[kObsInstVol] = market.inst_vol;
  obs[kObsHedgeImpVol] = contract_implied_vol(hedge, market);
  obs[kObsRealizedVol] = realized_vol(history.prices, config.realized_vol_window, market.params.dt);
  obs[kObsVega] = greeks.vega / vega_scale;
  obs[kObsDelta] = (greeks.delta + snapshot.underlying_qty) / 100.0;
  obs[kObsTimeLeft] =
      static_cast<double>(config.episode_days - market.step) / config.episode_days;
  obs[kObsPrevAction] = history.prev_action;
  return obs;
}

HedgingEnv::HedgingEnv(EnvConfig config) : config_(std::move(config)) { config_.validate(); }

MarketState HedgingEnv::market_at(int step) const {
  return {path_.prices(0, step), path_.vols(0, step), step, config_.sabr};
}

MarketState HedgingEnv::market() const {
  if (!started_) throw std::logic_error("HedgingEnv: reset() not called");
  return market_at(step_);
}

OptionContract HedgingEnv::atm_hedge_option(const MarketState& market) const {
  return make_contract(market.spot, config_.hedge_maturity_days, true, 1.0, 1, market);
}

Observation HedgingEnv::reset(std::uint64_t episode) {
  const std::uint64_t episode_seed = mix_seed(config_.seed, episode);
  path_ = simulate(config_.sabr, draw_shocks(1, config_.episode_days, episode_seed));
  order_rng_.seed(mix_seed(episode_seed, 0x6f72646572ULL));
  step_ = 0;
  started_ = true;
  prev_action_ = 0.0;
  snapshot_ = PortfolioSnapshot{};
  price_history_.assign(1, path_.prices(0, 0));
  ledger_.clear();

  const MarketState m0 = market_at(0);
  const double unit_vega = contract_greeks(atm_hedge_option(m0), m0).vega;
  vega_scale_ = unit_vega > 0.0 ? 100.0 * unit_vega : 1.0;
  snapshot_.value = mark_to_market(snapshot_, m0);
  obs_ = build_observation(snapshot_, m0, {price_history_, prev_action_}, config_, vega_scale_);
  return obs_;
}

StepResult HedgingEnv::step(double action) {
  if (!started_) throw std::logic_error("HedgingEnv: reset() not called");
  if (done()) throw std::logic_error("HedgingEnv: stepping a finished episode");

  StepResult result;
  StepInfo& info = result.info;
  const MarketState now = market_at(step_);
  const double value_before = snapshot_.value;

  // (i) client orders at mid, premium credited on top.
  for (const auto& order :
       sample_arrivals(order_rng_, config_.arrival_intensity, now, config_.client_maturity_days)) {
    snapshot_ = book_contract(std::move(snapshot_), order, false);
    const double premium = config_.premium_ratio * order.entry_price * order.spec.units;
    snapshot_.cash += premium;
    info.premium += premium;
    ++info.arrivals;
  }

  // (ii) vega hedge with a fresh ATM option.
  const GreekTotals pre = aggregate_greeks(snapshot_, now);
  info.pre_trade_vega = pre.vega;
  info.a_max = action_bound(pre.vega, config_.risk_tolerance);
  info.action_requested = action;
  double a = std::isfinite(action) ? action : 0.0;
  a = std::clamp(a, 0.0, info.a_max);
  info.clipped = a != action;
  info.action_executed = a;

  OptionContract hedge = atm_hedge_option(now);
  const double hedge_unit_vega = contract_greeks(hedge, now).vega;
  info.hedge_price = hedge.entry_price;
  if (a > 0.0 && pre.vega != 0.0 && hedge_unit_vega > 0.0) {
    const double qty = a * (-pre.vega) / hedge_unit_vega;
    hedge.side = qty > 0.0 ? 1 : -1;
    hedge.spec.units = std::abs(qty);
    snapshot_ = book_contract(std::move(snapshot_), hedge, true);
    info.hedge_qty = qty;
    info.cost = config_.cost_ratio * hedge.entry_price * std::abs(qty);
    snapshot_.cash -= info.cost;
  }
  info.post_trade_vega = aggregate_greeks(snapshot_, now).vega;

  // (iii) costless delta neutralization.
  info.underlying_trade = delta_neutralize(snapshot_, now);
  snapshot_.underlying_qty += info.underlying_trade;
  snapshot_.cash -= info.underlying_trade * now.spot;
  info.post_trade_delta = portfolio_delta(snapshot_, now);

  // (iv) advance one day, reprice, settle.
  ++step_;
  const MarketState next = market_at(step_);
  price_history_.push_back(next.spot);
  snapshot_ = expire_and_settle(std::move(snapshot_), next);
  info.value = snapshot_.value;

  // (v) reward.
  info.pnl = info.value - value_before + info.cost - info.premium;
  result.reward = -std::abs(info.pnl) - info.cost;
  result.done = done();
  prev_action_ = a;

  const GreekTotals after = aggregate_greeks(snapshot_, next);
  ledger_.push_back({step_, snapshot_.value, after.delta + snapshot_.underlying_qty, after.vega,
                     snapshot_.cash, snapshot_.liabilities.size(), snapshot_.hedge_options.size()});

  obs_ = build_observation(snapshot_, next, {price_history_, prev_action_}, config_, vega_scale_);
  result.next_obs = obs_;
  return result;
}

}  // namespace vegahedge
