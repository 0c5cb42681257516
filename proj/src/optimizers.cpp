#include "ngfreg/optimizers.hpp"

#include <cmath>
#include <deque>

#include <Eigen/Cholesky>

#include "ngfreg/errors.hpp"

namespace ngfreg {

void OptimizerSettings::validate() const {
  if (max_iterations < 0) throw InvalidInput("max_iterations must be non-negative");
  if (!(gradient_tolerance > 0.0) || !(objective_change_tolerance > 0.0) ||
      !(parameter_change_tolerance > 0.0))
    throw InvalidInput("optimizer tolerances must be positive");
  if (lbfgs_memory < 1) throw InvalidInput("lbfgs_memory must be at least 1");
  if (!(armijo_constant > 0.0 && armijo_constant < 1.0))
    throw InvalidInput("Armijo constant must lie in (0,1)");
  if (!(backtracking_factor > 0.0 && backtracking_factor < 1.0))
    throw InvalidInput("backtracking factor must lie in (0,1)");
  if (max_backtracks < 1) throw InvalidInput("max_backtracks must be at least 1");
  if (!(initial_step > 0.0)) throw InvalidInput("initial_step must be positive");
}

std::string_view to_string(StopReason r) {
  switch (r) {
    case StopReason::GradientTolerance: return "gradient_tolerance";
    case StopReason::ObjectiveChange: return "objective_change";
    case StopReason::ParameterChange: return "parameter_change";
    case StopReason::MaxIterations: return "max_iterations";
    case StopReason::Stalled: return "stalled";
  }
  return "unknown";
}

namespace {

// Checks applied after every accepted step; returns true when one fires.
bool converged(const OptimizerSettings& s, double g0_norm, double g_norm, double f_old, double f_new,
               double step_norm, double x_norm, StopReason& reason) {
  if (g_norm <= s.gradient_tolerance * g0_norm) {
    reason = StopReason::GradientTolerance;
    return true;
  }
  if (std::abs(f_old - f_new) <= s.objective_change_tolerance * std::max(std::abs(f_old), 1e-300)) {
    reason = StopReason::ObjectiveChange;
    return true;
  }
  if (step_norm <= s.parameter_change_tolerance * (1.0 + x_norm)) {
    reason = StopReason::ParameterChange;
    return true;
  }
  return false;
}

Eigen::VectorXd solve_damped(const Eigen::MatrixXd& H, const Eigen::VectorXd& g) {
  const Eigen::Index n = H.rows();
  Eigen::LLT<Eigen::MatrixXd> llt(H);
  if (llt.info() == Eigen::Success) {
    Eigen::VectorXd d = llt.solve(-g);
    if (d.allFinite()) return d;
  }
  double lambda = 1e-10 * H.trace() / static_cast<double>(n);
  if (!(lambda > 0.0)) lambda = 1e-10;
  for (int attempt = 0; attempt < 30; ++attempt, lambda *= 10.0) {
    Eigen::MatrixXd Hd = H;
    Hd.diagonal().array() += lambda;
    Eigen::LLT<Eigen::MatrixXd> damped(Hd);
    if (damped.info() == Eigen::Success) {
      Eigen::VectorXd d = damped.solve(-g);
      if (d.allFinite()) return d;
    }
  }
  return -g;
}

}  // namespace

OptimizationResult gauss_newton(const GaussNewtonObjective& objective, Eigen::VectorXd x0,
                                const OptimizerSettings& settings) {
  settings.validate();
  OptimizationResult res;
  res.x = std::move(x0);
  GaussNewtonSystem sys = objective.system(res.x);
  res.value = sys.value;
  Diagnostics& diag = res.diagnostics;
  diag.evaluations = 1;
  diag.objective_trace.push_back(sys.value);

  const double g0 = sys.gradient.norm();
  if (g0 < settings.gradient_tolerance) {
    diag.stop = StopReason::GradientTolerance;
    return res;
  }
  diag.stop = StopReason::MaxIterations;

  for (int it = 0; it < settings.max_iterations; ++it) {
    Eigen::VectorXd d = solve_damped(sys.hessian, sys.gradient);
    double slope = sys.gradient.dot(d);
    if (!(slope < 0.0)) {
      d = -sys.gradient;
      slope = -sys.gradient.squaredNorm();
    }

    double t = 1.0;
    bool accepted = false;
    Eigen::VectorXd trial;
    double f_trial = 0.0;
    for (int k = 0; k <= settings.max_backtracks; ++k) {
      trial = res.x + t * d;
      f_trial = objective.value(trial);
      ++diag.evaluations;
      if (std::isfinite(f_trial) && f_trial <= res.value + settings.armijo_constant * t * slope) {
        accepted = true;
        break;
      }
      t *= settings.backtracking_factor;
    }
    if (!accepted) {
      diag.stop = StopReason::Stalled;
      return res;
    }

    const double step_norm = (trial - res.x).norm();
    const double f_old = res.value;
    res.x = std::move(trial);
    sys = objective.system(res.x);
    ++diag.evaluations;
    res.value = f_trial;
    diag.objective_trace.push_back(res.value);
    diag.iterations = it + 1;

    StopReason reason;
    if (converged(settings, g0, sys.gradient.norm(), f_old, res.value, step_norm, res.x.norm(),
                  reason)) {
      diag.stop = reason;
      return res;
    }
  }
  return res;
}

OptimizationResult lbfgs(const SmoothObjective& objective, Eigen::VectorXd x0,
                         const OptimizerSettings& settings) {
  settings.validate();
  OptimizationResult res;
  res.x = std::move(x0);
  Eigen::VectorXd g(res.x.size());
  res.value = objective(res.x, &g);
  Diagnostics& diag = res.diagnostics;
  diag.evaluations = 1;
  diag.objective_trace.push_back(res.value);

  const double g0 = g.norm();
  if (g0 < settings.gradient_tolerance) {
    diag.stop = StopReason::GradientTolerance;
    return res;
  }
  diag.stop = StopReason::MaxIterations;

  std::deque<Eigen::VectorXd> S, Y;
  std::deque<double> rho;
  Eigen::VectorXd g_new(res.x.size());

  auto direction = [&]() -> Eigen::VectorXd {
    if (S.empty()) return -g * (settings.initial_step / g.norm());
    Eigen::VectorXd q = -g;
    std::vector<double> alpha(S.size());
    for (std::size_t i = S.size(); i-- > 0;) {
      alpha[i] = rho[i] * S[i].dot(q);
      q -= alpha[i] * Y[i];
    }
    q *= S.back().dot(Y.back()) / Y.back().squaredNorm();
    for (std::size_t i = 0; i < S.size(); ++i) {
      const double beta = rho[i] * Y[i].dot(q);
      q += (alpha[i] - beta) * S[i];
    }
    return q;
  };

  for (int it = 0; it < settings.max_iterations; ++it) {
    Eigen::VectorXd d = direction();
    double slope = g.dot(d);
    if (!(slope < 0.0) || !d.allFinite()) {
      S.clear(); Y.clear(); rho.clear();
      d = direction();
      slope = g.dot(d);
    }

    bool accepted = false;
    Eigen::VectorXd trial;
    double f_trial = 0.0;
    for (int restart = 0; restart < 2 && !accepted; ++restart) {
      double t = 1.0;
      for (int k = 0; k <= settings.max_backtracks; ++k) {
        trial = res.x + t * d;
        f_trial = objective(trial, nullptr);
        ++diag.evaluations;
        if (std::isfinite(f_trial) && f_trial <= res.value + settings.armijo_constant * t * slope) {
          accepted = true;
          break;
        }
        t *= settings.backtracking_factor;
      }
      if (!accepted && !S.empty()) {
        // Retry once along the scaled steepest-descent direction.
        S.clear(); Y.clear(); rho.clear();
        d = direction();
        slope = g.dot(d);
      } else {
        break;
      }
    }
    if (!accepted) {
      diag.stop = StopReason::Stalled;
      return res;
    }

    const double f_old = res.value;
    objective(trial, &g_new);
    res.value = f_trial;
    ++diag.evaluations;
    Eigen::VectorXd s = trial - res.x;
    Eigen::VectorXd y = g_new - g;
    const double step_norm = s.norm();
    res.x = std::move(trial);
    g = g_new;
    diag.objective_trace.push_back(res.value);
    diag.iterations = it + 1;

    const double sy = s.dot(y);
    if (sy > 1e-16 * s.norm() * y.norm() && sy > 0.0) {
      if (static_cast<int>(S.size()) == settings.lbfgs_memory) {
        S.pop_front(); Y.pop_front(); rho.pop_front();
      }
      rho.push_back(1.0 / sy);
      S.push_back(std::move(s));
      Y.push_back(std::move(y));
    }

    StopReason reason;
    if (converged(settings, g0, g.norm(), f_old, res.value, step_norm,
                  res.x.norm(), reason)) {
      diag.stop = reason;
      return res;
    }
  }
  return res;
}

}  // namespace ngfreg
