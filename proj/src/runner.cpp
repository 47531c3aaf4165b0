#include "vegahedge/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "vegahedge/distrl.hpp"
#include "vegahedge/env.hpp"

namespace vegahedge {

namespace {

constexpr std::uint64_t kTrainTag = 0x747261696eULL;    // "train"
constexpr std::uint64_t kEvalTag = 0x6576616cULL;       // "eval"
constexpr std::uint64_t kInitTag = 0x696e6974ULL;       // "init"
constexpr std::uint64_t kExploreTag = 0x6578706cULL;    // "expl"
constexpr std::uint64_t kReplayTag = 0x7265706cULL;     // "repl"
constexpr std::uint64_t kValidateTag = 0x76616c6964ULL; // "valid"

bool all_finite(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

double l2_norm(const std::vector<double>& v) {
  return std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
}

std::string divergence_dump(std::int64_t iteration, int episode, double loss,
                            const Checkpoint& ck) {
  std::ostringstream out;
  out << "iteration " << iteration << " episode " << episode << " critic_loss " << loss
      << " |actor| " << l2_norm(ck.actor.values) << " |critic| " << l2_norm(ck.critic.values)
      << " actor_finite " << all_finite(ck.actor.values) << " critic_finite "
      << all_finite(ck.critic.values) << " critic_v_max "
      << (ck.critic_opt.v.empty() ? 0.0 : *std::max_element(ck.critic_opt.v.begin(), ck.critic_opt.v.end()));
  return out.str();
}

struct Transition {
  Observation s;
  double a = 0.0;
  double a_raw = 0.0;
  double reward = 0.0;  // scaled
  Observation next;
};

}  // namespace

std::uint64_t train_env_seed(std::uint64_t seed) { return mix_seed(seed, kTrainTag); }
std::uint64_t eval_env_seed(std::uint64_t seed) { return mix_seed(seed, kEvalTag); }

distrl::MlpShape actor_shape(const TrainConfig& train) {
  return distrl::two_hidden_layer_shape(kObsSize, train.hidden_units, 1, distrl::Activation::kSigmoid);
}

distrl::MlpShape critic_shape(const TrainConfig& train) {
  return distrl::two_hidden_layer_shape(kObsSize + 1, train.hidden_units, train.quantiles,
                                        distrl::Activation::kIdentity);
}

Checkpoint initial_checkpoint(const TrainConfig& train, std::uint64_t seed) {
  std::mt19937_64 rng(mix_seed(seed, kInitTag));
  Checkpoint ck;
  ck.actor = distrl::init_mlp(actor_shape(train), rng, train.actor_output_scale);
  ck.critic = distrl::init_mlp(critic_shape(train), rng, train.critic_output_scale);
  if (train.target_tau > 0.0) ck.target_critic = ck.critic;
  ck.actor_opt = ana::make_state(ck.actor.values,
                                 {train.eta_actor, train.beta1, train.beta2, train.eps});
  ck.critic_opt = ana::make_state(ck.critic.values,
                                  {train.eta_critic, train.beta1, train.beta2, train.eps});
  return ck;
}

TrainResult train(const EnvConfig& env_config, const TrainConfig& tc, std::uint64_t seed,
                  const std::string& config_hash) {
  env_config.validate();
  tc.validate();

  TrainResult result;
  Checkpoint& ck = result.checkpoint;
  ck = initial_checkpoint(tc, seed);
  ck.config_hash = config_hash;

  EnvConfig ec = env_config;
  ec.seed = train_env_seed(seed);
  HedgingEnv env(ec);
  std::mt19937_64 explore_rng(mix_seed(seed, kExploreTag));
  distrl::ReplayBuffer buffer(tc.buffer_capacity, mix_seed(seed, kReplayTag));
  const auto levels = distrl::QuantileLevels::midpoints(tc.quantiles);
  const auto n = static_cast<std::size_t>(tc.trajectory_length);

  std::int64_t iteration = 0;
  for (int episode = 0; episode < tc.episodes; ++episode) {
    const double explore = tc.explore_std(episode);
    Observation obs = env.reset(static_cast<std::uint64_t>(episode));
    std::vector<Transition> traj;
    std::size_t pushed = 0;

    while (!env.done()) {
      for (std::size_t k = 0; k < n && !env.done(); ++k) {
        const double mean = distrl::actor_forward(ck.actor, obs);
        const auto sample = distrl::sample_action(mean, explore, explore_rng);
        StepResult step = env.step(sample.a);
        traj.push_back({obs, sample.a, sample.a_raw, step.reward * tc.reward_scale, step.next_obs});
        obs = std::move(step.next_obs);
      }
      const bool ended = env.done();
      while (pushed < traj.size() && (pushed + n <= traj.size() || ended)) {
        const std::size_t end = std::min(pushed + n, traj.size());
        distrl::Experience e;
        e.s = traj[pushed].s;
        e.a = traj[pushed].a;
        e.a_raw = traj[pushed].a_raw;
        e.explore_std = explore;
        for (std::size_t j = pushed; j < end; ++j) e.rewards.push_back(traj[j].reward);
        e.s_n = traj[end - 1].next;
        e.done = ended && end == traj.size();
        buffer.push(std::move(e));
        ++pushed;
      }

      if (buffer.size() < tc.batch_size) continue;
      ++iteration;
      const auto batch = buffer.sample(tc.batch_size);

      distrl::CriticGradOptions options;
      options.stop_target_gradient = tc.stop_target_gradient;
      if (ck.target_critic) options.target_critic = &*ck.target_critic;

      double loss = std::numeric_limits<double>::quiet_NaN();
      double actor_norm = 0.0;
      try {
        distrl::MlpParams critic_trial = ck.critic;
        const ana::GradFn critic_grad = [&](std::span<const double> y) {
          critic_trial.values.assign(y.begin(), y.end());
          auto g = distrl::critic_gradient(batch, critic_trial, ck.actor, tc.gamma, tc.huber_kappa,
                                           levels, options);
          loss = g.loss;
          return g.grad;
        };
        auto critic_step = ana::ana_step(ck.critic_opt, ck.critic.values, critic_grad);
        ck.critic.values = std::move(critic_step.theta);
        ck.critic_opt = std::move(critic_step.state);

        distrl::MlpParams actor_trial = ck.actor;
        const ana::GradFn actor_grad = [&](std::span<const double> y) {
          actor_trial.values.assign(y.begin(), y.end());
          auto g = distrl::actor_gradient(batch, actor_trial, ck.critic, tc.use_baseline);
          actor_norm = l2_norm(g);
          // The optimizer descends, so feed it -grad J.
          for (auto& x : g) x = -x;
          return g;
        };
        auto actor_step = ana::ana_step(ck.actor_opt, ck.actor.values, actor_grad);
        ck.actor.values = std::move(actor_step.theta);
        ck.actor_opt = std::move(actor_step.state);
      } catch (const ana::NonFiniteGradient& e) {
        throw DivergenceError(iteration, std::string("non-finite gradient: ") + e.what(),
                              divergence_dump(iteration, episode, loss, ck));
      }
      if (!std::isfinite(loss) || !all_finite(ck.critic.values) || !all_finite(ck.actor.values)) {
        throw DivergenceError(iteration, "training diverged",
                              divergence_dump(iteration, episode, loss, ck));
      }

      if (ck.target_critic) {
        auto& target = ck.target_critic->values;
        for (std::size_t i = 0; i < target.size(); ++i) {
          target[i] += tc.target_tau * (ck.critic.values[i] - target[i]);
        }
      }

      TrainLogRow row;
      row.iteration = iteration;
      row.episode = episode;
      row.critic_loss = loss;
      row.actor_grad_norm = actor_norm;
      row.explore_std = explore;
      for (const auto& e : batch) {
        row.mean_reward += e.rewards.front();
        row.mean_action += e.a;
      }
      row.mean_reward /= static_cast<double>(batch.size());
      row.mean_action /= static_cast<double>(batch.size());
      result.log.push_back(row);
    }
  }
  return result;
}

void write_train_log(const std::vector<TrainLogRow>& log, const std::string& config_id,
                     std::uint64_t seed, std::ostream& out) {
  const auto precision = out.precision(17);
  out << "config_id,seed,iteration,episode,critic_loss,actor_grad_norm,mean_reward,mean_action,"
         "explore_std\n";
  for (const auto& r : log) {
    out << config_id << ',' << seed << ',' << r.iteration << ',' << r.episode << ',' << r.critic_loss << ',' << r.actor_grad_norm
        << ',' << r.mean_reward << ',' << r.mean_action << ',' << r.explore_std << '\n';
  }
  out.precision(precision);
}

Policy checkpoint_policy(const Checkpoint& checkpoint) {
  return [actor = checkpoint.actor](const Observation& obs) {
    return distrl::actor_forward(actor, obs);
  };
}

metrics::SummaryOptions summary_options(const EnvConfig& env, const EvalConfig& eval) {
  metrics::SummaryOptions o;
  o.mean_std_c = eval.mean_std_c;
  o.granularity = eval.granularity;
  o.kappa = env.premium_ratio;
  o.premium_option_value = eval.premium_option_value;
  o.days = env.episode_days;
  o.intensity = env.arrival_intensity;
  return o;
}

EvalResult evaluate(const Policy& policy, const std::string& strategy, const EnvConfig& env_config,
                    const EvalConfig& eval, int n_episodes, std::span<const std::uint64_t> seeds) {
  env_config.validate();
  eval.validate();
  EvalResult result;
  for (const std::uint64_t seed : seeds) {
    EnvConfig ec = env_config;
    ec.seed = eval_env_seed(seed);
    HedgingEnv env(ec);
    for (int episode = 0; episode < n_episodes; ++episode) {
      EpisodeRecord rec;
      rec.strategy = strategy;
      rec.seed = seed;
      rec.episode = episode;
      Observation obs = env.reset(static_cast<std::uint64_t>(episode));
      int steps = 0;
      while (!env.done()) {
        const StepResult step = env.step(policy(obs));
        const double step_pnl = step.info.pnl - step.info.cost;
        rec.outcome.pnl += step_pnl;
        rec.outcome.cost += step.info.cost;
        rec.outcome.premium += step.info.premium;
        rec.outcome.step_pnls.push_back(step_pnl);
        rec.reward += step.reward;
        rec.mean_action += step.info.action_executed;
        ++steps;
        obs = step.next_obs;
      }
      if (steps > 0) rec.mean_action /= steps;
      result.episodes.push_back(std::move(rec));
    }
  }
  std::vector<metrics::EpisodeOutcome> outcomes;
  outcomes.reserve(result.episodes.size());
  for (const auto& r : result.episodes) outcomes.push_back(r.outcome);
  result.summary = metrics::summarize(outcomes, summary_options(env_config, eval));
  return result;
}

Policy resolve_policy(const std::string& strategy, const EvalConfig& eval) {
  if (strategy == "agent") {
    if (eval.checkpoint.empty()) throw CheckpointError("strategy 'agent' needs eval.checkpoint");
    return checkpoint_policy(load_checkpoint(eval.checkpoint));
  }
  return baseline_by_name(strategy);
}

void write_episodes_header(std::ostream& out) { out << kEpisodesHeader << '\n'; }

void write_episode_rows(const std::vector<EpisodeRecord>& records, const std::string& config_id,
                        std::ostream& out) {
  const auto precision = out.precision(17);
  for (const auto& r : records) {
    out << r.strategy << ',' << config_id << ',' << r.seed << ',' << r.episode << ','
        << r.outcome.pnl << ',' << r.outcome.cost << ',' << r.outcome.premium << ',' << r.reward
        << ',' << r.mean_action << '\n';
  }
  out.precision(precision);
}

std::vector<SweepPoint> expand_grid(const RunConfig& base) {
  RunConfig plain = base;
  plain.sweep.axes.clear();
  std::vector<SweepPoint> points{{{}, plain}};
  for (const auto& axis : base.sweep.axes) {
    std::vector<SweepPoint> next;
    for (const auto& p : points) {
      for (const auto& value : axis.values) {
        SweepPoint q = p;
        set_config_value(q.config, axis.key, value);
        q.assignments.emplace_back(axis.key, value);
        next.push_back(std::move(q));
      }
    }
    points = std::move(next);
  }
  return points;
}

std::vector<SweepCell> sweep(const RunConfig& base) {
  if (base.sweep.strategies.empty()) throw ConfigError("sweep.strategies is empty");
  std::vector<SweepCell> cells;
  for (const auto& point : expand_grid(base)) {
    const std::string id = config_id(point.config);
    for (const auto& strategy : base.sweep.strategies) {
      for (const std::uint64_t seed : point.config.train.seeds) {
        SweepCell cell;
        cell.strategy = strategy;
        cell.config_id = id;
        cell.assignments = point.assignments;
        cell.seed = seed;
        try {
          point.config.validate();
          Policy policy;
          if (strategy == "agent" && point.config.eval.checkpoint.empty()) {
            auto trained = train(point.config.env, point.config.train, seed, config_hash(point.config));
            policy = checkpoint_policy(trained.checkpoint);
          } else {
            policy = resolve_policy(strategy, point.config.eval);
          }
          const std::uint64_t seeds[] = {seed};
          auto eval = evaluate(policy, strategy, point.config.env, point.config.eval,
                               point.config.train.eval_episodes, seeds);
          cell.row = {strategy, id, eval.summary, eval.episodes.size(), seed};
          cell.episodes = std::move(eval.episodes);
          cell.ok = true;
        } catch (const std::exception& e) {
          cell.error = e.what();
        }
        cells.push_back(std::move(cell));
      }
    }
  }
  return cells;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string manifest_json(const RunManifest& m) {
  nlohmann::ordered_json config = nlohmann::ordered_json::object();
  for (const auto& [k, v] : config_entries(m.config)) config[k] = v;
  nlohmann::ordered_json j;
  j["command"] = m.command;
  j["config_hash"] = m.config_hash;
  j["config"] = config;
  j["seeds"] = m.seeds;
  j["started_at"] = m.started_at;
  j["finished_at"] = m.finished_at;
  j["outputs"] = m.outputs;
  return j.dump(2) + "\n";
}

std::vector<ValidationCheck> validate_optimizer(std::uint64_t seed) {
  std::vector<ValidationCheck> checks;

  {
    ValidationCheck c{"momentum schedule t_r >= (r+1)/2, r <= 10000", true, {}};
    double t = ana::next_t(0.0);
    for (int r = 1; r <= 10000; ++r) {
      if (t < (r + 1) / 2.0 - 1e-12) {
        c.passed = false;
        c.detail = "fails at r=" + std::to_string(r);
        break;
      }
      const double t_next = ana::next_t(t);
      if (!(t_next > t)) {
        c.passed = false;
        c.detail = "not increasing at r=" + std::to_string(r);
        break;
      }
      t = t_next;
    }
    checks.push_back(c);
  }

  std::mt19937_64 rng(mix_seed(seed, kValidateTag));
  std::normal_distribution<double> normal;
  auto random_vector = [&](Eigen::Index n) {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = normal(rng);
    return v;
  };

  {
    ValidationCheck c{"Nesterov bound, scalar L=4, r <= 100", true, {}};
    Eigen::MatrixXd a(1, 1);
    a(0, 0) = 4.0;
    const auto problem = ana::make_quadratic(a, Eigen::VectorXd::Zero(1));
    const auto ok = ana::nag_bound_check(problem, Eigen::VectorXd::Ones(1), 100);
    c.passed = std::all_of(ok.begin(), ok.end(), [](bool b) { return b; });
    checks.push_back(c);
  }
  {
    ValidationCheck c{"Nesterov bound, 10 random PSD problems, r <= 500", true, {}};
    std::uniform_int_distribution<int> dim(1, 20);
    for (int i = 0; i < 10 && c.passed; ++i) {
      const auto problem = ana::random_quadratic(dim(rng), rng);
      const auto ok = ana::nag_bound_check(problem, random_vector(problem.b.size()), 500);
      for (std::size_t r = 0; r < ok.size(); ++r) {
        if (!ok[r]) {
          c.passed = false;
          c.detail = "problem " + std::to_string(i) + " fails at r=" + std::to_string(r);
          break;
        }
      }
    }
    checks.push_back(c);
  }
  {
    ValidationCheck c{"majorizer holds on 1000 random triples", true, {}};
    ValidationCheck p{"optimal majorizer step survives +-1e-3 probes", true, {}};
    std::uniform_int_distribution<int> dim(1, 20);
    for (int i = 0; i < 1000; ++i) {
      const auto problem = ana::random_quadratic(dim(rng), rng);
      const auto n = problem.b.size();
      const Eigen::VectorXd y = random_vector(n);
      const Eigen::VectorXd theta = random_vector(n);
      if (c.passed && !ana::verify_majorizer(problem, y, theta)) {
        c.passed = false;
        c.detail = "fails on triple " + std::to_string(i);
      }
      const Eigen::VectorXd best = ana::optimal_majorizer_step(problem, y);
      const double base = ana::majorizer_value(problem, y, best);
      for (Eigen::Index k = 0; k < n && p.passed; ++k) {
        for (const double h : {1e-3, -1e-3}) {
          Eigen::VectorXd probe = best;
          probe[k] += h;
          if (!(ana::majorizer_value(problem, y, probe) > base)) {
            p.passed = false;
            p.detail = "probe increases nothing on triple " + std::to_string(i);
          }
        }
      }
    }
    checks.push_back(c);
    checks.push_back(p);
  }
  return checks;
}

}  // namespace vegahedge
