#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace vegahedge::metrics {

/// Larger is worse: every risk metric is computed on loss = -PNL.
inline constexpr const char* kLossConvention = "loss=-pnl";

struct MetricsSummary {
  double mean_std = 0.0;
  double var95 = 0.0;
  double cvar95 = 0.0;
  double mean_cost = 0.0;
  double premium_income = 0.0;
  std::string loss_convention = kLossConvention;
};

struct TailRisk {
  double var95;
  double cvar95;
};

/// Outcome of one evaluated episode.
struct EpisodeOutcome {
  double pnl = 0.0;      // hedged PNL net of option transaction costs, premium excluded
  double cost = 0.0;     // option transaction costs paid
  double premium = 0.0;  // premium income realized
  std::vector<double> step_pnls;
};

enum class PnlGranularity { kEpisode, kStep };

/// mean(losses) + c * sample std (n - 1 denominator). Needs two samples.
double mean_std(std::span<const double> losses, double c);

/// Empirical tail: with k = ceil(0.05 n), VaR is the k-th largest loss and CVaR
/// the mean of the k largest. Needs n >= 20.
TailRisk var_cvar_95(std::span<const double> losses);

/// Expected premium over the horizon: days * intensity * option_value * kappa.
double expected_premium_income(double kappa, double premium_option_value, double days,
                               double intensity);

/// Fills premium_income (expected, from the parameters) and mean_cost (realized
/// average per episode).
MetricsSummary profit_summary(std::span<const EpisodeOutcome> episodes, double kappa,
                              double premium_option_value, double days, double intensity);

/// Losses fed to the risk metrics at the chosen granularity.
std::vector<double> losses_from(std::span<const EpisodeOutcome> episodes,
                                PnlGranularity granularity);

struct SummaryOptions {
  double mean_std_c = 1.645;
  PnlGranularity granularity = PnlGranularity::kEpisode;
  double kappa = 0.005;
  double premium_option_value = 60.0;
  double days = 30.0;
  double intensity = 1.0;
};

MetricsSummary summarize(std::span<const EpisodeOutcome> episodes, const SummaryOptions& options);

struct SummaryRow {
  std::string strategy;
  std::string config_id;
  MetricsSummary metrics;
  std::size_t n_episodes = 0;
  std::uint64_t seed = 0;
};

inline constexpr const char* kSummaryHeader =
    "strategy,config_id,mean_std,var95,cvar95,mean_cost,premium_income,n_episodes,seed";

void write_summary_header(std::ostream& out);
void write_summary_row(const SummaryRow& row, std::ostream& out);

}  // namespace vegahedge::metrics
