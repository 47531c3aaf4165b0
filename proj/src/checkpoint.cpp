#include "vegahedge/checkpoint.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace vegahedge {

namespace {

void write_reals(std::ostream& out, const char* tag, const std::vector<double>& values) {
  out << tag << ' ' << values.size() << '\n';
  char buf[32];
  for (double x : values) {
    std::snprintf(buf, sizeof buf, "%.17g", x);
    out << buf << '\n';
  }
}

void write_network(std::ostream& out, const char* name, const distrl::MlpParams& p) {
  out << "network " << name << '\n' << "layers";
  for (auto n : p.shape.layer_sizes) out << ' ' << n;
  out << '\n' << "activations";
  for (auto a : p.shape.activations) out << ' ' << distrl::to_string(a);
  out << '\n';
  write_reals(out, "values", p.values);
}

void write_optimizer(std::ostream& out, const char* name, const ana::AnaState& s) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "t %.17g steps %lld eta %.17g beta1 %.17g beta2 %.17g eps %.17g",
                s.t, static_cast<long long>(s.steps), s.config.eta, s.config.beta1,
                s.config.beta2, s.config.eps);
  out << "optimizer " << name << '\n' << buf << '\n';
  write_reals(out, "theta_prev", s.theta_prev);
  write_reals(out, "m", s.m);
  write_reals(out, "v", s.v);
}

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  std::string word() {
    std::string w;
    if (!(in_ >> w)) throw CheckpointError("checkpoint truncated");
    return w;
  }

  void expect(const std::string& w) {
    const std::string got = word();
    if (got != w) throw CheckpointError("checkpoint: expected '" + w + "', got '" + got + "'");
  }

  template <typename T>
  T number() {
    T x{};
    if (!(in_ >> x)) throw CheckpointError("checkpoint: malformed number");
    return x;
  }

  double real() {
    // strtod handles inf/nan spellings that operator>> rejects.
    const std::string w = word();
    char* end = nullptr;
    const double x = std::strtod(w.c_str(), &end);
    if (end == w.c_str() || *end != '\0') throw CheckpointError("checkpoint: malformed real '" + w + "'");
    return x;
  }

  std::vector<double> reals(const std::string& tag) {
    expect(tag);
    const auto n = number<std::size_t>();
    std::vector<double> v(n);
    for (auto& x : v) x = real();
    return v;
  }

  std::string rest_of_line() {
    std::string line;
    std::getline(in_ >> std::ws, line);
    return line;
  }

 private:
  std::istream& in_;
};

distrl::MlpParams read_network(Reader& r) {
  distrl::MlpParams p;
  r.expect("layers");
  std::istringstream layers(r.rest_of_line());
  for (std::size_t n; layers >> n;) p.shape.layer_sizes.push_back(n);
  r.expect("activations");
  std::istringstream acts(r.rest_of_line());
  for (std::string a; acts >> a;) p.shape.activations.push_back(distrl::activation_from_string(a));
  p.values = r.reals("values");
  try {
    p.shape.validate();
    p.validate();
  } catch (const std::exception& e) {
    throw CheckpointError(std::string("checkpoint network: ") + e.what());
  }
  return p;
}

ana::AnaState read_optimizer(Reader& r) {
  ana::AnaState s;
  r.expect("t");
  s.t = r.real();
  r.expect("steps");
  s.steps = r.number<long long>();
  r.expect("eta");
  s.config.eta = r.real();
  r.expect("beta1");
  s.config.beta1 = r.real();
  r.expect("beta2");
  s.config.beta2 = r.real();
  r.expect("eps");
  s.config.eps = r.real();
  s.theta_prev = r.reals("theta_prev");
  s.m = r.reals("m");
  s.v = r.reals("v");
  if (s.m.size() != s.theta_prev.size() || s.v.size() != s.theta_prev.size()) {
    throw CheckpointError("checkpoint optimizer: vector lengths differ");
  }
  return s;
}

}  // namespace

void write_checkpoint(const Checkpoint& c, std::ostream& out) {
  out << kCheckpointMagic << " v" << kCheckpointVersion << '\n';
  out << "config_hash " << (c.config_hash.empty() ? "-" : c.config_hash) << '\n';
  write_network(out, "actor", c.actor);
  write_network(out, "critic", c.critic);
  if (c.target_critic) write_network(out, "target_critic", *c.target_critic);
  write_optimizer(out, "actor", c.actor_opt);
  write_optimizer(out, "critic", c.critic_opt);
  out << "end\n";
}

Checkpoint read_checkpoint(std::istream& in) {
  Reader r(in);
  Checkpoint c;
  r.expect(kCheckpointMagic);
  const std::string version = r.word();
  if (version != "v" + std::to_string(kCheckpointVersion)) {
    throw CheckpointError("unsupported checkpoint version " + version);
  }
  r.expect("config_hash");
  c.config_hash = r.word();
  if (c.config_hash == "-") c.config_hash.clear();
  bool have_actor = false, have_critic = false, have_actor_opt = false, have_critic_opt = false;
  for (std::string section = r.word(); section != "end"; section = r.word()) {
    const std::string name = r.word();
    if (section == "network" && name == "actor") {
      c.actor = read_network(r);
      have_actor = true;
    } else if (section == "network" && name == "critic") {
      c.critic = read_network(r);
      have_critic = true;
    } else if (section == "network" && name == "target_critic") {
      c.target_critic = read_network(r);
    } else if (section == "optimizer" && name == "actor") {
      c.actor_opt = read_optimizer(r);
      have_actor_opt = true;
    } else if (section == "optimizer" && name == "critic") {
      c.critic_opt = read_optimizer(r);
      have_critic_opt = true;
    } else {
      throw CheckpointError("checkpoint: unknown section " + section + " " + name);
    }
  }
  if (!(have_actor && have_critic && have_actor_opt && have_critic_opt)) {
    throw CheckpointError("checkpoint: missing network or optimizer section");
  }
  if (c.actor_opt.theta_prev.size() != c.actor.values.size() ||
      c.critic_opt.theta_prev.size() != c.critic.values.size()) {
    throw CheckpointError("checkpoint: optimizer state does not match network size");
  }
  return c;
}

void save_checkpoint(const Checkpoint& checkpoint, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw CheckpointError("cannot write checkpoint: " + path);
  write_checkpoint(checkpoint, out);
  if (!out) throw CheckpointError("error writing checkpoint: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CheckpointError("checkpoint not found: " + path);
  return read_checkpoint(in);
}

}  // namespace vegahedge
