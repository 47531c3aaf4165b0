#include "vegahedge/distrl.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace vegahedge::distrl {

QuantileLevels QuantileLevels::midpoints(std::size_t k) {
  if (k == 0) throw std::invalid_argument("QuantileLevels: need at least one level");
  QuantileLevels out;
  out.levels.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    out.levels[i] = static_cast<double>(2 * i + 1) / static_cast<double>(2 * k);
  }
  return out;
}

void QuantileLevels::validate() const {
  if (levels.empty()) throw std::invalid_argument("QuantileLevels: empty");
  double prev = 0.0;
  for (double tau : levels) {
    if (!(tau > prev) || !(tau < 1.0)) {
      throw std::invalid_argument("QuantileLevels: levels must increase strictly inside (0,1)");
    }
    prev = tau;
  }
}

std::vector<double> critic_input(std::span<const double> s, double a) {
  std::vector<double> input(s.begin(), s.end());
  input.push_back(a);
  return input;
}

QuantileSet critic_forward(const MlpParams& critic, std::span<const double> s, double a) {
  return mlp_forward(critic, critic_input(s, a));
}

double actor_forward(const MlpParams& actor, std::span<const double> s) {
  if (actor.shape.output_size() != 1) {
    throw std::invalid_argument("actor_forward: actor must have a single output");
  }
  return mlp_forward(actor, s).front();
}

namespace {

double discounted_sum(std::span<const double> rewards, double gamma) {
  double total = 0.0;
  double discount = 1.0;
  for (double r : rewards) {
    total += discount * r;
    discount *= gamma;
  }
  return total;
}

void check_gamma(double gamma) {
  if (!(gamma >= 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must lie in [0, 1)");
}

}  // namespace

QuantileSet compute_target(std::span<const double> rewards, std::span<const double> s_n,
                           bool done, const MlpParams& actor, const MlpParams& critic,
                           double gamma) {
  check_gamma(gamma);
  const std::size_t k = critic.shape.output_size();
  const double immediate = discounted_sum(rewards, gamma);
  QuantileSet target(k, immediate);
  if (done) return target;
  const double bootstrap_discount = std::pow(gamma, static_cast<double>(rewards.size()));
  if (bootstrap_discount == 0.0) return target;
  const QuantileSet next = critic_forward(critic, s_n, actor_forward(actor, s_n));
  for (std::size_t i = 0; i < k; ++i) target[i] += bootstrap_discount * next[i];
  return target;
}

HuberLossResult quantile_huber_loss(std::span<const double> pred, std::span<const double> target,
                                    double huber_kappa, const QuantileLevels& levels) {
  if (!(huber_kappa > 0.0)) throw std::invalid_argument("quantile_huber_loss: kappa <= 0");
  const std::size_t k = levels.size();
  if (pred.size() != k || target.size() != k) {
    throw std::invalid_argument("quantile_huber_loss: size mismatch with quantile levels");
  }
  HuberLossResult out;
  out.grad.resize(k);
  out.huber_grad.resize(k);
  out.weights.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    const double delta = pred[i] - target[i];
    const double abs_delta = std::abs(delta);
    double huber;
    double huber_grad;
    if (abs_delta <= huber_kappa) {
      huber = 0.5 * delta * delta;
      huber_grad = delta;
    } else {
      huber = huber_kappa * (abs_delta - 0.5 * huber_kappa);
      huber_grad = huber_kappa * (delta > 0.0 ? 1.0 : -1.0);
    }
    const double weight = std::abs(levels.levels[i] - (delta < 0.0 ? 1.0 : 0.0));
    out.loss += weight * huber;
    out.huber_grad[i] = huber_grad;
    out.weights[i] = weight;
    out.grad[i] = weight * huber_grad;
  }
  return out;
}

namespace {

struct TargetEval {
  QuantileSet target;
  MlpTrace bootstrap_trace;
  bool has_bootstrap = false;
  double bootstrap_discount = 0.0;
};

TargetEval evaluate_target(const Experience& e, const MlpParams& critic, const MlpParams& actor,
                           double gamma, const CriticGradOptions& options) {
  TargetEval eval;
  const std::size_t k = critic.shape.output_size();
  eval.target.assign(k, discounted_sum(e.rewards, gamma));
  if (e.done) return eval;
  eval.bootstrap_discount = std::pow(gamma, static_cast<double>(e.rewards.size()));
  if (eval.bootstrap_discount == 0.0) return eval;
  const MlpParams& bootstrap_net = options.target_critic ? *options.target_critic : critic;
  eval.bootstrap_trace =
      mlp_forward_trace(bootstrap_net, critic_input(e.s_n, actor_forward(actor, e.s_n)));
  const auto& next = eval.bootstrap_trace.output();
  for (std::size_t i = 0; i < k; ++i) eval.target[i] += eval.bootstrap_discount * next[i];
  eval.has_bootstrap = true;
  return eval;
}

void check_batch(std::span<const Experience> batch) {
  if (batch.empty()) throw std::invalid_argument("empty batch");
}

}  // namespace

double critic_loss(std::span<const Experience> batch, const MlpParams& critic,
                   const MlpParams& actor, double gamma, double huber_kappa,
                   const QuantileLevels& levels, const CriticGradOptions& options) {
  check_batch(batch);
  check_gamma(gamma);
  double total = 0.0;
  for (const auto& e : batch) {
    const TargetEval eval = evaluate_target(e, critic, actor, gamma, options);
    total += quantile_huber_loss(critic_forward(critic, e.s, e.a), eval.target, huber_kappa,
                                 levels)
                 .loss;
  }
  return total / static_cast<double>(batch.size());
}

GradientResult critic_gradient(std::span<const Experience> batch, const MlpParams& critic,
                               const MlpParams& actor, double gamma, double huber_kappa,
                               const QuantileLevels& levels, const CriticGradOptions& options) {
  check_batch(batch);
  check_gamma(gamma);
  GradientResult out;
  out.grad.assign(critic.values.size(), 0.0);
  const double inv_batch = 1.0 / static_cast<double>(batch.size());
  const bool target_flows = !options.stop_target_gradient && options.target_critic == nullptr;

  for (const auto& e : batch) {
    const TargetEval eval = evaluate_target(e, critic, actor, gamma, options);
    const MlpTrace pred_trace = mlp_forward_trace(critic, critic_input(e.s, e.a));
    const HuberLossResult h =
        quantile_huber_loss(pred_trace.output(), eval.target, huber_kappa, levels);
    out.loss += h.loss * inv_batch;

    std::vector<double> upstream(h.grad.size());
    for (std::size_t i = 0; i < upstream.size(); ++i) upstream[i] = h.grad[i] * inv_batch;
    mlp_backward(critic, pred_trace, upstream, out.grad);

    if (target_flows && eval.has_bootstrap) {
      for (double& g : upstream) g *= -eval.bootstrap_discount;
      mlp_backward(critic, eval.bootstrap_trace, upstream, out.grad);
    }
  }
  return out;
}

double gaussian_log_prob(double x, double mean, double std) {
  if (!(std > 0.0)) throw std::invalid_argument("gaussian_log_prob: std must be positive");
  const double z = (x - mean) / std;
  return -std::log(std * std::sqrt(2.0 * std::numbers::pi)) - 0.5 * z * z;
}

ActionSample sample_action_with_noise(double mean, double explore_std, double z) {
  if (!(explore_std >= 0.0)) throw std::invalid_argument("sample_action: explore_std < 0");
  if (explore_std == 0.0) return {mean, mean, 0.0};
  const double raw = mean + explore_std * z;
  return {std::clamp(raw, 0.0, 1.0), raw, gaussian_log_prob(raw, mean, explore_std)};
}

ActionSample sample_action(double mean, double explore_std, std::mt19937_64& rng) {
  if (explore_std == 0.0) return sample_action_with_noise(mean, 0.0, 0.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  return sample_action_with_noise(mean, explore_std, normal(rng));
}

double actor_log_prob(const MlpParams& actor, std::span<const double> s, double a_raw,
                      double explore_std) {
  return gaussian_log_prob(a_raw, actor_forward(actor, s), explore_std);
}

std::vector<double> actor_log_prob_gradient(const MlpParams& actor, std::span<const double> s,
                                            double a_raw, double explore_std) {
  if (!(explore_std > 0.0)) throw std::invalid_argument("log-prob gradient needs std > 0");
  const MlpTrace trace = mlp_forward_trace(actor, s);
  const double mean = trace.output().front();
  const double dlogp_dmean = (a_raw - mean) / (explore_std * explore_std);
  std::vector<double> grad(actor.values.size(), 0.0);
  const double upstream[1] = {dlogp_dmean};
  mlp_backward(actor, trace, upstream, grad);
  return grad;
}

std::vector<double> actor_gradient(std::span<const Experience> batch, const MlpParams& actor,
                                   const MlpParams& critic, bool use_baseline) {
  check_batch(batch);
  std::vector<double> q_hat(batch.size());
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const QuantileSet z = critic_forward(critic, batch[b].s, batch[b].a);
    q_hat[b] = std::accumulate(z.begin(), z.end(), 0.0) / static_cast<double>(z.size());
  }
  double baseline = 0.0;
  if (use_baseline) {
    baseline = std::accumulate(q_hat.begin(), q_hat.end(), 0.0) / static_cast<double>(q_hat.size());
  }
  const double inv_batch = 1.0 / static_cast<double>(batch.size());
  std::vector<double> grad(actor.values.size(), 0.0);
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const double advantage = q_hat[b] - baseline;
    if (advantage == 0.0) continue;
    const MlpTrace trace = mlp_forward_trace(actor, batch[b].s);
    const double mean = trace.output().front();
    const double std = batch[b].explore_std;
    if (!(std > 0.0)) throw std::invalid_argument("actor_gradient: experience has zero std");
    const double upstream[1] = {advantage * inv_batch * (batch[b].a_raw - mean) / (std * std)};
    mlp_backward(actor, trace, upstream, grad);
  }
  return grad;
}

}  // namespace vegahedge::distrl
