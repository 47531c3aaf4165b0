#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "vegahedge/mlp.hpp"

namespace vegahedge::distrl {

/// Strictly increasing quantile levels in (0, 1). Each level is weighted by the
/// asymmetric quantile-regression weight |tau - 1{delta < 0}|.
struct QuantileLevels {
  std::vector<double> levels;

  /// tau_i = (2i - 1) / (2K), i = 1..K.
  static QuantileLevels midpoints(std::size_t k);
  std::size_t size() const { return levels.size(); }
  void validate() const;
};

/// Critic output: one return value per quantile level.
using QuantileSet = std::vector<double>;

/// An n-step transition. `a` is the executed (clipped) action, `a_raw` the
/// pre-clip Gaussian sample and `explore_std` the policy std it was drawn with.
struct Experience {
  std::vector<double> s;
  double a = 0.0;
  double a_raw = 0.0;
  double explore_std = 0.0;
  std::vector<double> rewards;
  std::vector<double> s_n;
  bool done = false;
};

class ReplayBuffer {
 public:
  ReplayBuffer(std::size_t capacity, std::uint64_t seed);

  /// Appends, evicting the oldest item once full.
  void push(Experience item);
  /// Uniform sampling with replacement. Throws if fewer than `batch_size` items.
  std::vector<Experience> sample(std::size_t batch_size);

  std::size_t size() const { return items_.size(); }
  std::size_t capacity() const { return capacity_; }
  /// Oldest-first access.
  const Experience& at(std::size_t i) const;

 private:
  std::vector<Experience> items_;
  std::size_t capacity_;
  std::size_t cursor_ = 0;
  std::mt19937_64 rng_;
};

/// Critic network input: state features followed by the action.
std::vector<double> critic_input(std::span<const double> s, double a);

QuantileSet critic_forward(const MlpParams& critic, std::span<const double> s, double a);

/// Deterministic policy mean in (0, 1).
double actor_forward(const MlpParams& actor, std::span<const double> s);

/// sum_{k<n} gamma^k r_k + gamma^n Z(s_n, pi(s_n)); the bootstrap term is
/// dropped when `done`.
QuantileSet compute_target(std::span<const double> rewards, std::span<const double> s_n,
                           bool done, const MlpParams& actor, const MlpParams& critic,
                           double gamma);

struct HuberLossResult {
  double loss = 0.0;
  std::vector<double> grad;        // d loss / d pred = rho * dH/ddelta
  std::vector<double> huber_grad;  // dH/ddelta, unweighted
  std::vector<double> weights;     // rho_tau
};

/// Quantile Huber loss for one sample: sum_tau rho_tau H(pred_tau - target_tau).
HuberLossResult quantile_huber_loss(std::span<const double> pred, std::span<const double> target,
                                    double huber_kappa, const QuantileLevels& levels);

struct CriticGradOptions {
  /// Treat the bootstrap target as a constant.
  bool stop_target_gradient = false;
  /// Bootstrap from a separate (e.g. soft-updated) target network. The target
  /// is then constant with respect to the trained parameters.
  const MlpParams* target_critic = nullptr;
};

struct GradientResult {
  double loss = 0.0;
  std::vector<double> grad;
};

/// Batch-mean quantile Huber loss of the critic (no gradient).
double critic_loss(std::span<const Experience> batch, const MlpParams& critic,
                   const MlpParams& actor, double gamma, double huber_kappa,
                   const QuantileLevels& levels, const CriticGradOptions& options = {});

/// Loss and full gradient with respect to the critic parameters. Unless the
/// target is stopped, the bootstrap contributes -gamma^n dZ(s_n, pi(s_n)).
GradientResult critic_gradient(std::span<const Experience> batch, const MlpParams& critic,
                               const MlpParams& actor, double gamma, double huber_kappa,
                               const QuantileLevels& levels,
                               const CriticGradOptions& options = {});

struct ActionSample {
  double a;         // clipped to [0, 1]
  double a_raw;     // pre-clip sample
  double log_prob;  // Gaussian log-density of a_raw
};

double gaussian_log_prob(double x, double mean, double std);

/// a = clip(mean + std z, 0, 1) for a given standard-normal z.
ActionSample sample_action_with_noise(double mean, double explore_std, double z);
ActionSample sample_action(double mean, double explore_std, std::mt19937_64& rng);

/// log pi(a_raw | s) under the Gaussian policy around the actor mean.
double actor_log_prob(const MlpParams& actor, std::span<const double> s, double a_raw,
                      double explore_std);
std::vector<double> actor_log_prob_gradient(const MlpParams& actor, std::span<const double> s,
                                            double a_raw, double explore_std);

/// Policy-gradient estimate of grad J (ascent direction):
///   mean_b grad log pi(a_b | s_b) * (Qhat_b - baseline)
/// with Qhat the critic's quantile mean at (s, a) and baseline the batch mean of
/// Qhat (zero when `use_baseline` is false).
std::vector<double> actor_gradient(std::span<const Experience> batch, const MlpParams& actor,
                                   const MlpParams& critic, bool use_baseline = true);

}  // namespace vegahedge::distrl
