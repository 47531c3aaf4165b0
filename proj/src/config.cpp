#include "vegahedge/config.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <sstream>

namespace vegahedge {

namespace {

struct Field {
  const char* key;
  const char* doc;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&)> set;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <typename T>
T parse_number(const std::string& text, const std::string& key) {
  T value{};
  const std::string t = trim(text);
  const auto* first = t.data();
  const auto* last = t.data() + t.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || t.empty()) {
    throw ConfigError("config key " + key + ": cannot parse '" + text + "'");
  }
  return value;
}

bool parse_bool(const std::string& text, const std::string& key) {
  const std::string t = trim(text);
  if (t == "true" || t == "1") return true;
  if (t == "false" || t == "0") return false;
  throw ConfigError("config key " + key + ": expected true/false, got '" + text + "'");
}

std::string bool_text(bool b) { return b ? "true" : "false"; }

template <typename T>
std::string int_text(T v) {
  return std::to_string(v);
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ',';
    out += items[i];
  }
  return out;
}

#define VH_DOUBLE(KEY, DOC, MEMBER)                                                      \
  Field {                                                                                 \
    KEY, DOC, [](const RunConfig& c) { return format_double(c.MEMBER); },                 \
        [](RunConfig& c, const std::string& v) { c.MEMBER = parse_number<double>(v, KEY); } \
  }
#define VH_INT(KEY, DOC, MEMBER, TYPE)                                                  \
  Field {                                                                                \
    KEY, DOC, [](const RunConfig& c) { return int_text(c.MEMBER); },                     \
        [](RunConfig& c, const std::string& v) { c.MEMBER = parse_number<TYPE>(v, KEY); } \
  }
#define VH_BOOL(KEY, DOC, MEMBER)                                                   \
  Field {                                                                            \
    KEY, DOC, [](const RunConfig& c) { return bool_text(c.MEMBER); },                \
        [](RunConfig& c, const std::string& v) { c.MEMBER = parse_bool(v, KEY); }    \
  }

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      VH_DOUBLE("sabr.p0", "initial underlying price", env.sabr.p0),
      VH_DOUBLE("sabr.sigma0", "initial SABR volatility", env.sabr.sigma0),
      VH_DOUBLE("sabr.beta", "SABR elasticity in [0, 1]", env.sabr.beta),
      VH_DOUBLE("sabr.rho", "price/vol shock correlation", env.sabr.rho),
      VH_DOUBLE("sabr.upsilon", "volatility of volatility", env.sabr.upsilon),
      VH_DOUBLE("sabr.mu", "underlying drift", env.sabr.mu),
      VH_DOUBLE("sabr.r", "risk-free rate", env.sabr.r),
      VH_DOUBLE("sabr.q", "dividend yield", env.sabr.q),
      VH_DOUBLE("sabr.dt", "step length in years", env.sabr.dt),
      VH_INT("env.hedge_maturity_days", "maturity of the ATM hedge option", env.hedge_maturity_days, int),
      VH_INT("env.episode_days", "steps per episode", env.episode_days, int),
      VH_DOUBLE("env.cost_ratio", "hedge option trade cost as a fraction of price", env.cost_ratio),
      VH_DOUBLE("env.risk_tolerance", "vega budget bounding the hedge fraction", env.risk_tolerance),
      VH_DOUBLE("env.arrival_intensity", "client orders per day", env.arrival_intensity),
      VH_INT("env.realized_vol_window", "returns in the realized vol feature", env.realized_vol_window, int),
      VH_INT("env.client_maturity_days", "maturity of client options", env.client_maturity_days, int),
      VH_DOUBLE("env.premium_ratio", "premium charged per client option, times its price", env.premium_ratio),
      VH_DOUBLE("train.gamma", "discount factor in [0, 1)", train.gamma),
      VH_INT("train.trajectory_length", "steps per rollout and n-step return", train.trajectory_length, int),
      VH_INT("train.batch_size", "replay batch size", train.batch_size, std::size_t),
      VH_INT("train.buffer_capacity", "replay buffer capacity", train.buffer_capacity, std::size_t),
      VH_INT("train.quantiles", "critic quantile count", train.quantiles, std::size_t),
      VH_DOUBLE("train.huber_kappa", "Huber threshold", train.huber_kappa),
      VH_INT("train.hidden_units", "units per hidden layer", train.hidden_units, std::size_t),
      VH_DOUBLE("train.explore_std_start", "initial exploration std", train.explore_std_start),
      VH_DOUBLE("train.explore_std_end", "exploration std floor", train.explore_std_end),
      VH_INT("train.explore_decay_episodes", "episodes of linear std decay", train.explore_decay_episodes, int),
      VH_DOUBLE("train.eta_critic", "critic step scale", train.eta_critic),
      VH_DOUBLE("train.eta_actor", "actor step scale", train.eta_actor),
      VH_DOUBLE("train.beta1", "first moment decay", train.beta1),
      VH_DOUBLE("train.beta2", "second moment decay", train.beta2),
      VH_DOUBLE("train.eps", "added to v inside the square root", train.eps),
      VH_INT("train.episodes", "training episodes", train.episodes, int),
      VH_INT("train.eval_episodes", "evaluation episodes per seed", train.eval_episodes, int),
      Field{"train.seeds", "comma separated run seeds",
            [](const RunConfig& c) {
              std::vector<std::string> s;
              for (auto x : c.train.seeds) s.push_back(std::to_string(x));
              return join(s);
            },
            [](RunConfig& c, const std::string& v) {
              c.train.seeds.clear();
              for (const auto& item : split_list(v)) {
                c.train.seeds.push_back(parse_number<std::uint64_t>(item, "train.seeds"));
              }
            }},
      VH_DOUBLE("train.reward_scale", "multiplier applied to rewards before learning", train.reward_scale),
      VH_BOOL("train.stop_target_gradient", "treat the bootstrap target as constant", train.stop_target_gradient),
      VH_DOUBLE("train.target_tau", "soft target critic rate, 0 disables", train.target_tau),
      VH_BOOL("train.use_baseline", "subtract the batch mean critic value", train.use_baseline),
      VH_DOUBLE("train.critic_output_scale", "init scale of the critic output layer", train.critic_output_scale),
      VH_DOUBLE("train.actor_output_scale", "init scale of the actor output layer", train.actor_output_scale),
      VH_DOUBLE("eval.mean_std_c", "std multiplier in mean-std", eval.mean_std_c),
      Field{"eval.granularity", "episode or step PNL samples",
            [](const RunConfig& c) {
              return std::string(c.eval.granularity == metrics::PnlGranularity::kEpisode ? "episode"
                                                                                          : "step");
            },
            [](RunConfig& c, const std::string& v) {
              const std::string t = trim(v);
              if (t == "episode") {
                c.eval.granularity = metrics::PnlGranularity::kEpisode;
              } else if (t == "step") {
                c.eval.granularity = metrics::PnlGranularity::kStep;
              } else {
                throw ConfigError("config key eval.granularity: expected episode or step");
              }
            }},
      VH_DOUBLE("eval.premium_option_value", "option value used for premium income", eval.premium_option_value),
      Field{"eval.strategy", "delta, delta_vega or agent",
            [](const RunConfig& c) { return c.eval.strategy; },
            [](RunConfig& c, const std::string& v) { c.eval.strategy = trim(v); }},
      Field{"eval.checkpoint", "checkpoint path for the agent strategy",
            [](const RunConfig& c) { return c.eval.checkpoint; },
            [](RunConfig& c, const std::string& v) { c.eval.checkpoint = trim(v); }},
      Field{"sweep.strategies", "comma separated strategies",
            [](const RunConfig& c) { return join(c.sweep.strategies); },
            [](RunConfig& c, const std::string& v) { c.sweep.strategies = split_list(v); }},
      VH_INT("sim.paths", "paths written by simulate", sim_paths, int),
  };
  return table;
}

#undef VH_DOUBLE
#undef VH_INT
#undef VH_BOOL

const Field* find_field(const std::string& key) {
  for (const auto& f : fields()) {
    if (key == f.key) return &f;
  }
  return nullptr;
}

constexpr const char* kSweepPrefix = "sweep.";

}  // namespace

std::string format_double(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc()) throw std::runtime_error("format_double failed");
  return std::string(buf, ptr);
}

double TrainConfig::explore_std(int episode) const {
  if (explore_decay_episodes <= 0 || episode >= explore_decay_episodes) return explore_std_end;
  const double frac = static_cast<double>(std::max(episode, 0)) / explore_decay_episodes;
  return explore_std_start + (explore_std_end - explore_std_start) * frac;
}

void TrainConfig::validate() const {
  if (!(gamma >= 0.0 && gamma < 1.0)) throw ConfigError("train.gamma must be in [0, 1)");
  if (trajectory_length < 1) throw ConfigError("train.trajectory_length must be >= 1");
  if (batch_size == 0) throw ConfigError("train.batch_size must be positive");
  if (buffer_capacity < batch_size) throw ConfigError("train.buffer_capacity must be >= batch_size");
  if (quantiles == 0) throw ConfigError("train.quantiles must be positive");
  if (!(huber_kappa > 0.0)) throw ConfigError("train.huber_kappa must be positive");
  if (hidden_units == 0) throw ConfigError("train.hidden_units must be positive");
  if (!(explore_std_start > 0.0 && explore_std_end > 0.0)) {
    throw ConfigError("train exploration std must be positive");
  }
  if (!(eta_critic >= 0.0 && eta_actor >= 0.0)) throw ConfigError("train eta must be >= 0");
  if (!(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0)) {
    throw ConfigError("train.beta1 and train.beta2 must be in [0, 1)");
  }
  if (!(eps > 0.0)) throw ConfigError("train.eps must be positive");
  if (episodes < 0 || eval_episodes < 0) throw ConfigError("episode counts must be >= 0");
  if (seeds.empty()) throw ConfigError("train.seeds must not be empty");
  if (!(reward_scale > 0.0) || !std::isfinite(reward_scale)) {
    throw ConfigError("train.reward_scale must be positive");
  }
  if (!(target_tau >= 0.0 && target_tau <= 1.0)) throw ConfigError("train.target_tau must be in [0, 1]");
}

void EvalConfig::validate() const {
  if (!std::isfinite(mean_std_c)) throw ConfigError("eval.mean_std_c must be finite");
  if (!(premium_option_value >= 0.0)) throw ConfigError("eval.premium_option_value must be >= 0");
}

void RunConfig::validate() const {
  env.validate();
  train.validate();
  eval.validate();
  if (sim_paths < 1) throw ConfigError("sim.paths must be >= 1");
  for (const auto& axis : sweep.axes) {
    if (axis.values.empty()) throw ConfigError("sweep axis " + axis.key + " has no values");
  }
}

void set_config_value(RunConfig& config, const std::string& raw_key, const std::string& value) {
  const std::string key = trim(raw_key);
  if (const Field* f = find_field(key)) {
    f->set(config, value);
    return;
  }
  if (key.rfind(kSweepPrefix, 0) == 0) {
    const std::string target = key.substr(std::string(kSweepPrefix).size());
    if (!find_field(target) || target.rfind(kSweepPrefix, 0) == 0) {
      throw ConfigError("sweep over unknown key: " + target);
    }
    SweepAxis axis{target, split_list(value)};
    // Validate each value by applying it to a scratch copy.
    RunConfig scratch = config;
    for (const auto& v : axis.values) set_config_value(scratch, target, v);
    auto it = std::find_if(config.sweep.axes.begin(), config.sweep.axes.end(),
                           [&](const SweepAxis& a) { return a.key == target; });
    if (it != config.sweep.axes.end()) {
      *it = std::move(axis);
    } else {
      config.sweep.axes.push_back(std::move(axis));
    }
    return;
  }
  throw ConfigError("unknown config key: " + key);
}

RunConfig parse_config(std::istream& in) {
  RunConfig config;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    }
    try {
      set_config_value(config, line.substr(0, eq), line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  config.validate();
  return config;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  return parse_config(in);
}

std::vector<std::pair<std::string, std::string>> config_entries(const RunConfig& config) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& f : fields()) out.emplace_back(f.key, f.get(config));
  for (const auto& axis : config.sweep.axes) {
    out.emplace_back(kSweepPrefix + axis.key, join(axis.values));
  }
  return out;
}

std::string canonical_config(const RunConfig& config) {
  std::string out;
  for (const auto& [k, v] : config_entries(config)) out += k + " = " + v + "\n";
  return out;
}

std::string config_reference() {
  const RunConfig defaults;
  std::string out = "# vegahedge configuration keys and defaults\n";
  out += "# sweep.<key> = v1,v2,... adds a grid axis over any key below\n";
  for (const auto& f : fields()) {
    out += "\n# " + std::string(f.doc) + "\n";
    out += std::string(f.key) + " = " + f.get(defaults) + "\n";
  }
  return out;
}

std::string config_hash(const RunConfig& config) {
  std::string body;
  for (const auto& [k, v] : config_entries(config)) {
    if (k == "train.seeds") continue;
    body += k + " = " + v + "\n";
  }
  std::string blob = "blob " + std::to_string(body.size());
  blob.push_back('\0');
  blob += body;

  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(blob.data(), blob.size(), digest, &len, EVP_sha1(), nullptr) != 1) {
    throw std::runtime_error("SHA-1 digest failed");
  }
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  }
  return hex.str();
}

std::string config_id(const RunConfig& config) { return config_hash(config).substr(0, 12); }

}  // namespace vegahedge
