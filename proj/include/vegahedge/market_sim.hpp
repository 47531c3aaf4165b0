#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace vegahedge {

/// Rows are paths, columns are time steps 0..T.
using PathMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// SABR market parameters. All rates and volatilities are annualized.
struct SabrParams {
  double p0 = 100.0;
  double sigma0 = 0.3;
  double beta = 0.5;
  double rho = 0.2;
  double upsilon = 0.3;
  double mu = 0.0;
  double r = 0.0;
  double q = 0.0;
  double dt = 1.0 / 365.0;

  /// Throws std::invalid_argument naming the first violated invariant.
  void validate() const;
};

struct ShockSet {
  PathMatrix q_s;  // price shocks
  PathMatrix q_i;  // independent volatility shocks
  std::uint64_t seed = 0;

  Eigen::Index n_paths() const { return q_s.rows(); }
  Eigen::Index n_steps() const { return q_s.cols() - 1; }
};

struct PathSet {
  PathMatrix prices;
  PathMatrix vols;
  SabrParams params;
};

class SimulationError : public std::runtime_error {
 public:
  SimulationError(Eigen::Index path, Eigen::Index step, const std::string& what);
  Eigen::Index path() const { return path_; }
  Eigen::Index step() const { return step_; }

 private:
  Eigen::Index path_;
  Eigen::Index step_;
};

/// Counter-based standard-normal stream: the pair of draws at (path, step)
/// depends only on (seed, path, step), so changing the number of paths never
/// reshuffles earlier ones.
struct NormalPair {
  double first;
  double second;
};
NormalPair counter_normals(std::uint64_t seed, std::uint64_t path, std::uint64_t step);

ShockSet draw_shocks(Eigen::Index n_paths, Eigen::Index n_steps, std::uint64_t seed);

/// q_v = rho * q_s + sqrt(1 - rho^2) * q_i.
PathMatrix correlate(const ShockSet& shocks, double rho);

/// Exact per-step SABR updates:
///   sigma_{t+1} = sigma_t exp(-upsilon^2/2 dt + upsilon q_v sqrt(dt))
///   P_{t+1}     = P_t exp((mu - (sigma_t P_t^(beta-1))^2 / 2) dt
///                         + sigma_t P_t^(beta-1) sqrt(dt) q_s)
/// P_t enters the diffusion coefficient in raw currency units. No boundary is
/// applied at zero; the exponential updates keep paths positive.
PathSet simulate(const SabrParams& params, const ShockSet& shocks);

/// Writes `path,step,price,vol` rows.
void write_paths_csv(const PathSet& paths, std::ostream& out);

}  // namespace vegahedge
