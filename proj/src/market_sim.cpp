#include "vegahedge/market_sim.hpp"

#include <cmath>
#include <numbers>
#include <ostream>
#include <sstream>

namespace vegahedge {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Maps 53 random bits into the open interval (0, 1).
double open_unit(std::uint64_t bits) {
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace

void SabrParams::validate() const {
  auto require = [](bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
  };
  require(p0 > 0.0, "SabrParams: p0 must be positive");
  require(sigma0 >= 0.0, "SabrParams: sigma0 must be non-negative");
  require(beta >= 0.0 && beta <= 1.0, "SabrParams: beta must lie in [0, 1]");
  require(std::abs(rho) <= 1.0, "SabrParams: |rho| must be <= 1");
  require(upsilon >= 0.0, "SabrParams: upsilon must be non-negative");
  require(dt > 0.0, "SabrParams: dt must be positive");
  require(std::isfinite(mu) && std::isfinite(r) && std::isfinite(q),
          "SabrParams: rates must be finite");
}

SimulationError::SimulationError(Eigen::Index path, Eigen::Index step, const std::string& what)
    : std::runtime_error(what), path_(path), step_(step) {}

NormalPair counter_normals(std::uint64_t seed, std::uint64_t path, std::uint64_t step) {
  std::uint64_t key = splitmix64(seed);
  key = splitmix64(key ^ path);
  key = splitmix64(key ^ (step * 0xd1b54a32d192ed03ULL));
  const double u1 = open_unit(splitmix64(key));
  const double u2 = open_unit(splitmix64(key + 0x632be59bd9b4e019ULL));
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  return {radius * std::cos(angle), radius * std::sin(angle)};
}

ShockSet draw_shocks(Eigen::Index n_paths, Eigen::Index n_steps, std::uint64_t seed) {
  if (n_paths < 1 || n_steps < 1) {
    throw std::invalid_argument("draw_shocks: n_paths and n_steps must be >= 1");
  }
  ShockSet shocks{PathMatrix(n_paths, n_steps + 1), PathMatrix(n_paths, n_steps + 1), seed};
  for (Eigen::Index t = 0; t <= n_steps; ++t) {
    for (Eigen::Index i = 0; i < n_paths; ++i) {
      const auto pair = counter_normals(seed, static_cast<std::uint64_t>(i),
                                        static_cast<std::uint64_t>(t));
      shocks.q_s(i, t) = pair.first;
      shocks.q_i(i, t) = pair.second;
    }
  }
  return shocks;
}

PathMatrix correlate(const ShockSet& shocks, double rho) {
  if (!(std::abs(rho) <= 1.0)) {
    throw std::domain_error("correlate: |rho| must be <= 1");
  }
  if (shocks.q_s.rows() != shocks.q_i.rows() || shocks.q_s.cols() != shocks.q_i.cols()) {
    throw std::invalid_argument("correlate: shock matrices differ in shape");
  }
  const double complement = std::sqrt(1.0 - rho * rho);
  return rho * shocks.q_s + complement * shocks.q_i;
}

PathSet simulate(const SabrParams& params, const ShockSet& shocks) {
  params.validate();
  const Eigen::Index n = shocks.n_paths();
  const Eigen::Index steps = shocks.n_steps();
  if (n < 1 || steps < 1) {
    throw std::invalid_argument("simulate: empty shock set");
  }
  const PathMatrix q_v = correlate(shocks, params.rho);
  const double sqrt_dt = std::sqrt(params.dt);
  const double vol_drift = -0.5 * params.upsilon * params.upsilon * params.dt;

  PathSet out{PathMatrix(n, steps + 1), PathMatrix(n, steps + 1), params};
  for (Eigen::Index i = 0; i < n; ++i) {
    double price = params.p0;
    double vol = params.sigma0;
    out.prices(i, 0) = price;
    out.vols(i, 0) = vol;
    for (Eigen::Index t = 0; t < steps; ++t) {
      const double local_vol = vol * std::pow(price, params.beta - 1.0);
      const double next_price =
          price * std::exp((params.mu - 0.5 * local_vol * local_vol) * params.dt +
                           local_vol * sqrt_dt * shocks.q_s(i, t));
      const double next_vol =
          vol * std::exp(vol_drift + params.upsilon * q_v(i, t) * sqrt_dt);
      if (!std::isfinite(next_price) || !std::isfinite(next_vol)) {
        std::ostringstream msg;
        msg << "simulate: non-finite state on path " << i << " at step " << t + 1;
        throw SimulationError(i, t + 1, msg.str());
      }
      price = next_price;
      vol = next_vol;
      out.prices(i, t + 1) = price;
      out.vols(i, t + 1) = vol;
    }
  }
  return out;
}

void write_paths_csv(const PathSet& paths, std::ostream& out) {
  out << "path,step,price,vol\n";
  out.precision(17);
  for (Eigen::Index i = 0; i < paths.prices.rows(); ++i) {
    for (Eigen::Index t = 0; t < paths.prices.cols(); ++t) {
      out << i << ',' << t << ',' << paths.prices(i, t) << ',' << paths.vols(i, t) << '\n';
    }
  }
}

}  // namespace vegahedge
