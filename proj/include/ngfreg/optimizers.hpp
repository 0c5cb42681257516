#pragma once

#include <functional>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace ngfreg {

struct OptimizerSettings {
  int max_iterations = 50;
  double gradient_tolerance = 1e-6;          // relative to the initial gradient norm
  double objective_change_tolerance = 1e-6;  // relative to the previous objective
  double parameter_change_tolerance = 1e-6;  // relative to 1 + |x|
  int lbfgs_memory = 10;
  double armijo_constant = 1e-4;
  double backtracking_factor = 0.5;
  int max_backtracks = 20;
  double initial_step = 1.0;  // length of the first quasi-Newton trial step

  void validate() const;
};

enum class StopReason {
  GradientTolerance,
  ObjectiveChange,
  ParameterChange,
  MaxIterations,
  Stalled,
};

std::string_view to_string(StopReason r);

struct Diagnostics {
  int iterations = 0;
  int evaluations = 0;
  std::vector<double> objective_trace;  // accepted objective values, starting with f(x0)
  StopReason stop = StopReason::MaxIterations;
};

struct OptimizationResult {
  Eigen::VectorXd x;
  double value = 0.0;
  Diagnostics diagnostics;
};

/// Value, exact gradient and PSD Hessian approximation.
struct GaussNewtonSystem {
  double value = 0.0;
  Eigen::VectorXd gradient;
  Eigen::MatrixXd hessian;
};

struct GaussNewtonObjective {
  std::function<double(const Eigen::VectorXd&)> value;
  std::function<GaussNewtonSystem(const Eigen::VectorXd&)> system;
};

/// Returns f(x) and, when `gradient` is non-null, writes the gradient.
using SmoothObjective = std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd* gradient)>;

/// Gauss-Newton with Armijo backtracking. Singular systems are solved with
/// Tikhonov damping 1e-10 * trace(H) / n.
OptimizationResult gauss_newton(const GaussNewtonObjective& objective, Eigen::VectorXd x0,
                                const OptimizerSettings& settings);

/// Limited-memory BFGS (two-loop recursion) with Armijo backtracking.
OptimizationResult lbfgs(const SmoothObjective& objective, Eigen::VectorXd x0,
                         const OptimizerSettings& settings);

}  // namespace ngfreg
