#include "vegahedge/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace vegahedge::metrics {

double mean_std(std::span<const double> losses, double c) {
  if (losses.size() < 2) throw std::invalid_argument("mean_std: need at least two samples");
  const auto n = static_cast<double>(losses.size());
  const double mean = std::accumulate(losses.begin(), losses.end(), 0.0) / n;
  if (c == 0.0) return mean;
  double ss = 0.0;
  for (double x : losses) ss += (x - mean) * (x - mean);
  return mean + c * std::sqrt(ss / (n - 1.0));
}

TailRisk var_cvar_95(std::span<const double> losses) {
  const std::size_t n = losses.size();
  if (n < 20) throw std::invalid_argument("var_cvar_95: need at least 20 samples");
  const std::size_t k = (5 * n + 99) / 100;  // ceil(0.05 n) in integers
  std::vector<double> sorted(losses.begin(), losses.end());
  std::partial_sort(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(k), sorted.end(),
                    std::greater<>());
  const double tail_sum = std::accumulate(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(k), 0.0);
  return {sorted[k - 1], tail_sum / static_cast<double>(k)};
}

double expected_premium_income(double kappa, double premium_option_value, double days,
                               double intensity) {
  if (!(kappa >= 0.0)) throw std::invalid_argument("premium income: kappa must be >= 0");
  return days * intensity * premium_option_value * kappa;
}

MetricsSummary profit_summary(std::span<const EpisodeOutcome> episodes, double kappa,
                              double premium_option_value, double days, double intensity) {
  MetricsSummary summary;
  summary.premium_income = expected_premium_income(kappa, premium_option_value, days, intensity);
  if (!episodes.empty()) {
    double total = 0.0;
    for (const auto& e : episodes) total += e.cost;
    summary.mean_cost = total / static_cast<double>(episodes.size());
  }
  return summary;
}

std::vector<double> losses_from(std::span<const EpisodeOutcome> episodes,
                                PnlGranularity granularity) {
  std::vector<double> losses;
  for (const auto& e : episodes) {
    if (granularity == PnlGranularity::kEpisode) {
      losses.push_back(-e.pnl);
    } else {
      for (double p : e.step_pnls) losses.push_back(-p);
    }
  }
  return losses;
}

MetricsSummary summarize(std::span<const EpisodeOutcome> episodes, const SummaryOptions& options) {
  MetricsSummary summary = profit_summary(episodes, options.kappa, options.premium_option_value,
                                          options.days, options.intensity);
  const std::vector<double> losses = losses_from(episodes, options.granularity);
  summary.mean_std = mean_std(losses, options.mean_std_c);
  const TailRisk tail = var_cvar_95(losses);
  summary.var95 = tail.var95;
  summary.cvar95 = tail.cvar95;
  return summary;
}

void write_summary_header(std::ostream& out) { out << kSummaryHeader << '\n'; }

void write_summary_row(const SummaryRow& row, std::ostream& out) {
  const auto precision = out.precision(17);
  out << row.strategy << ',' << row.config_id << ',' << row.metrics.mean_std << ','
      << row.metrics.var95 << ',' << row.metrics.cvar95 << ',' << row.metrics.mean_cost << ','
      << row.metrics.premium_income << ',' << row.n_episodes << ',' << row.seed << '\n';
  out.precision(precision);
}

}  // namespace vegahedge::metrics
