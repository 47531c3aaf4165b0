#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace vegahedge::ana {

struct AnaConfig {
  double eta = 1.0e-3;   // global step scale; eta = 1 is the unscaled update
  double beta1 = 0.0;
  double beta2 = 0.999;
  double eps = 1.0e-8;   // added inside the square root

  void validate() const;
};

/// Optimizer state for one network. `t` is the momentum scalar t_r of the next
/// step r = steps + 1; starting from t_0 = 0 the first step uses t_1 = 1.
struct AnaState {
  AnaConfig config;
  double t = 1.0;
  std::vector<double> theta_prev;
  std::vector<double> m;
  std::vector<double> v;
  std::int64_t steps = 0;
};

AnaState make_state(std::span<const double> theta, const AnaConfig& config);

class NonFiniteGradient : public std::runtime_error {
 public:
  NonFiniteGradient(std::int64_t step, const std::string& what)
      : std::runtime_error(what), step_(step) {}
  std::int64_t step() const { return step_; }

 private:
  std::int64_t step_;
};

/// t_{r+1} = (1 + sqrt(1 + 4 t_r^2)) / 2.
double next_t(double t);

/// y = theta + ((t_r - 1) / t_next) (theta - theta_prev).
std::vector<double> auxiliary_point(std::span<const double> theta,
                                    std::span<const double> theta_prev, double t_r,
                                    double t_next);

/// m' = beta1 m + (1 - beta1) g;  v' = beta2 v + (1 - beta2) g^2, in place.
void update_moments(std::span<double> m, std::span<double> v, std::span<const double> g,
                    double beta1, double beta2);

/// Bias-corrected step factor sqrt(1 - beta2^r) / (1 - beta1^r).
double bias_correction(double beta1, double beta2, std::int64_t r);

/// theta = y - eta * bias_correction(r) * m / sqrt(v + eps).
std::vector<double> apply_update(std::span<const double> y, std::span<const double> m,
                                 std::span<const double> v, double beta1, double beta2,
                                 std::int64_t r, double eps, double eta);

using GradFn = std::function<std::vector<double>(std::span<const double>)>;

struct StepResult {
  std::vector<double> theta;
  AnaState state;
};

/// One look-ahead step: the gradient is evaluated at the auxiliary point.
StepResult ana_step(const AnaState& state, std::span<const double> theta, const GradFn& grad_fn);

/// f(theta) = 1/2 theta^T A theta + b^T theta with A symmetric PSD.
struct QuadraticProblem {
  Eigen::MatrixXd a;
  Eigen::VectorXd b;
  Eigen::VectorXd optimum;
  double smoothness = 0.0;  // largest eigenvalue of A

  double value(const Eigen::VectorXd& theta) const;
  Eigen::VectorXd gradient(const Eigen::VectorXd& theta) const;
  double optimal_value() const { return value(optimum); }
};

/// Builds the problem, computing L from the spectrum and b = -A optimum.
QuadraticProblem make_quadratic(Eigen::MatrixXd a, Eigen::VectorXd optimum);

/// Random PSD problem of the given dimension; roughly one in four eigenvalues
/// is zero so rank-deficient cases are covered.
QuadraticProblem random_quadratic(int dim, std::mt19937_64& rng);

/// psi(theta) = f(y) + grad f(y)^T (theta - y) + L/2 |theta - y|^2.
double majorizer_value(const QuadraticProblem& problem, const Eigen::VectorXd& y,
                       const Eigen::VectorXd& theta);

/// f(theta) <= psi(theta) + 1e-9.
bool verify_majorizer(const QuadraticProblem& problem, const Eigen::VectorXd& y,
                      const Eigen::VectorXd& theta);

/// Minimizer of the majorizer: y - grad f(y) / L.
Eigen::VectorXd optimal_majorizer_step(const QuadraticProblem& problem, const Eigen::VectorXd& y);

/// Runs the classic Nesterov iteration with 1/L steps and checks, for
/// r = 0..r_max, f(theta_r) - f* <= 2 L |theta_0 - theta*|^2 / (r + 1)^2 + 1e-9.
std::vector<bool> nag_bound_check(const QuadraticProblem& problem, const Eigen::VectorXd& theta0,
                                  int r_max);

}  // namespace vegahedge::ana
