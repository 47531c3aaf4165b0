#include "vegahedge/ana_opt.hpp"

#include <cmath>
#include <sstream>

namespace vegahedge::ana {
namespace {

constexpr double kBoundSlack = 1.0e-9;

void require_same_size(std::size_t a, std::size_t b, const char* what) {
  if (a != b) throw std::invalid_argument(std::string(what) + ": length mismatch");
}

}  // namespace

void AnaConfig::validate() const {
  if (!(eta >= 0.0)) throw std::invalid_argument("AnaConfig: eta must be non-negative");
  if (!(beta1 >= 0.0 && beta1 < 1.0)) throw std::invalid_argument("AnaConfig: beta1 not in [0,1)");
  if (!(beta2 >= 0.0 && beta2 < 1.0)) throw std::invalid_argument("AnaConfig: beta2 not in [0,1)");
  if (!(eps > 0.0)) throw std::invalid_argument("AnaConfig: eps must be positive");
}

AnaState make_state(std::span<const double> theta, const AnaConfig& config) {
  config.validate();
  AnaState state;
  state.config = config;
  state.t = next_t(0.0);
  state.theta_prev.assign(theta.begin(), theta.end());
  state.m.assign(theta.size(), 0.0);
  state.v.assign(theta.size(), 0.0);
  return state;
}

double next_t(double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("next_t: t must be non-negative");
  return 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
}

std::vector<double> auxiliary_point(std::span<const double> theta,
                                    std::span<const double> theta_prev, double t_r,
                                    double t_next) {
  require_same_size(theta.size(), theta_prev.size(), "auxiliary_point");
  const double coeff = (t_r - 1.0) / t_next;
  std::vector<double> y(theta.size());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = theta[i] + coeff * (theta[i] - theta_prev[i]);
  return y;
}

void update_moments(std::span<double> m, std::span<double> v, std::span<const double> g,
                    double beta1, double beta2) {
  require_same_size(m.size(), g.size(), "update_moments");
  require_same_size(v.size(), g.size(), "update_moments");
  for (std::size_t i = 0; i < g.size(); ++i) {
    m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
    v[i] = beta2 * v[i] + (1.0 - beta2) * g[i] * g[i];
  }
}

double bias_correction(double beta1, double beta2, std::int64_t r) {
  if (r < 1) throw std::invalid_argument("bias_correction: step index must be >= 1");
  const auto rr = static_cast<double>(r);
  return std::sqrt(1.0 - std::pow(beta2, rr)) / (1.0 - std::pow(beta1, rr));
}

std::vector<double> apply_update(std::span<const double> y, std::span<const double> m,
                                 std::span<const double> v, double beta1, double beta2,
                                 std::int64_t r, double eps, double eta) {
  require_same_size(y.size(), m.size(), "apply_update");
  require_same_size(y.size(), v.size(), "apply_update");
  const double scale = eta * bias_correction(beta1, beta2, r);
  std::vector<double> theta(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) theta[i] = y[i] - scale * m[i] / std::sqrt(v[i] + eps);
  return theta;
}

StepResult ana_step(const AnaState& state, std::span<const double> theta, const GradFn& grad_fn) {
  require_same_size(theta.size(), state.theta_prev.size(), "ana_step");
  const AnaConfig& cfg = state.config;
  const std::int64_t r = state.steps + 1;
  const double t_next = next_t(state.t);
  const std::vector<double> y = auxiliary_point(theta, state.theta_prev, state.t, t_next);

  const std::vector<double> g = grad_fn(y);
  require_same_size(g.size(), theta.size(), "ana_step gradient");
  for (double gi : g) {
    if (!std::isfinite(gi)) {
      std::ostringstream msg;
      msg << "ana_step: non-finite gradient at step " << r;
      throw NonFiniteGradient(r, msg.str());
    }
  }

  StepResult out{{}, state};
  update_moments(out.state.m, out.state.v, g, cfg.beta1, cfg.beta2);
  out.theta = apply_update(y, out.state.m, out.state.v, cfg.beta1, cfg.beta2, r, cfg.eps, cfg.eta);
  out.state.theta_prev.assign(theta.begin(), theta.end());
  out.state.t = t_next;
  out.state.steps = r;
  return out;
}

double QuadraticProblem::value(const Eigen::VectorXd& theta) const {
  return 0.5 * theta.dot(a * theta) + b.dot(theta);
}

Eigen::VectorXd QuadraticProblem::gradient(const Eigen::VectorXd& theta) const {
  return a * theta + b;
}

QuadraticProblem make_quadratic(Eigen::MatrixXd a, Eigen::VectorXd optimum) {
  if (a.rows() != a.cols() || a.rows() != optimum.size()) {
    throw std::invalid_argument("make_quadratic: dimension mismatch");
  }
  if (!a.isApprox(a.transpose(), 1e-12)) throw std::invalid_argument("make_quadratic: A not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a, Eigen::EigenvaluesOnly);
  const auto& values = eig.eigenvalues();
  if (values.minCoeff() < -1e-10 * std::max(1.0, values.maxCoeff())) {
    throw std::invalid_argument("make_quadratic: A not positive semidefinite");
  }
  QuadraticProblem problem;
  problem.smoothness = std::max(0.0, values.maxCoeff());
  problem.b = -(a * optimum);
  problem.a = std::move(a);
  problem.optimum = std::move(optimum);
  return problem;
}

QuadraticProblem random_quadratic(int dim, std::mt19937_64& rng) {
  if (dim < 1) throw std::invalid_argument("random_quadratic: dim must be >= 1");
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> spectrum(0.01, 10.0);
  std::bernoulli_distribution zero_eigen(0.25);
  Eigen::MatrixXd gauss(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) gauss(i, j) = normal(rng);
  const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(gauss).householderQ();
  Eigen::VectorXd eigenvalues(dim);
  for (int i = 0; i < dim; ++i) eigenvalues[i] = (i > 0 && zero_eigen(rng)) ? 0.0 : spectrum(rng);
  Eigen::MatrixXd a = q * eigenvalues.asDiagonal() * q.transpose();
  a = 0.5 * (a + a.transpose());
  Eigen::VectorXd optimum(dim);
  for (int i = 0; i < dim; ++i) optimum[i] = normal(rng);
  return make_quadratic(std::move(a), std::move(optimum));
}

double majorizer_value(const QuadraticProblem& problem, const Eigen::VectorXd& y,
                       const Eigen::VectorXd& theta) {
  const Eigen::VectorXd step = theta - y;
  return problem.value(y) + problem.gradient(y).dot(step) +
         0.5 * problem.smoothness * step.squaredNorm();
}

bool verify_majorizer(const QuadraticProblem& problem, const Eigen::VectorXd& y,
                      const Eigen::VectorXd& theta) {
  return problem.value(theta) <= majorizer_value(problem, y, theta) + kBoundSlack;
}

Eigen::VectorXd optimal_majorizer_step(const QuadraticProblem& problem, const Eigen::VectorXd& y) {
  if (!(problem.smoothness > 0.0)) {
    throw std::invalid_argument("optimal_majorizer_step: smoothness constant L must be positive");
  }
  return y - problem.gradient(y) / problem.smoothness;
}

std::vector<bool> nag_bound_check(const QuadraticProblem& problem, const Eigen::VectorXd& theta0,
                                  int r_max) {
  if (!(problem.smoothness > 0.0)) {
    throw std::invalid_argument("nag_bound_check: smoothness constant L must be positive");
  }
  const double f_star = problem.optimal_value();
  const double radius = (theta0 - problem.optimum).squaredNorm();
  auto within_bound = [&](const Eigen::VectorXd& theta, int r) {
    const double bound = 2.0 * problem.smoothness * radius / ((r + 1.0) * (r + 1.0));
    return problem.value(theta) - f_star <= bound + kBoundSlack;
  };

  std::vector<bool> checks;
  checks.reserve(static_cast<std::size_t>(r_max) + 1);
  checks.push_back(within_bound(theta0, 0));
  Eigen::VectorXd theta = theta0;
  Eigen::VectorXd theta_prev = theta0;
  // theta_r is paired with t_r, starting from t_0 = 0.
  double t = 0.0;
  for (int r = 1; r <= r_max; ++r) {
    const double t_next = next_t(t);
    const Eigen::VectorXd y = theta + ((t - 1.0) / t_next) * (theta - theta_prev);
    theta_prev = theta;
    theta = optimal_majorizer_step(problem, y);
    t = t_next;
    checks.push_back(within_bound(theta, r));
  }
  return checks;
}

}  // namespace vegahedge::ana
