#include "nlsmooth/gn_smoother.hpp"

#include <cmath>
#include <limits>

#include "nlsmooth/blocktridiag.hpp"
#include "nlsmooth/errors.hpp"

namespace nlsmooth {

void GNOptions::validate() const {
  if (max_iterations == 0) throw ConfigError("max_iterations must be positive");
  if (!(armijo_c > 0.0 && armijo_c < 1.0)) throw ConfigError("armijo_c must lie in (0, 1)");
  if (!(backtrack_factor > 0.0 && backtrack_factor < 1.0)) {
    throw ConfigError("backtrack_factor must lie in (0, 1)");
  }
  if (max_backtracks == 0) throw ConfigError("max_backtracks must be positive");
  if (!(objective_tolerance >= 0.0)) throw ConfigError("objective_tolerance must be nonnegative");
}

const char* to_string(SmootherStatus status) {
  switch (status) {
    case SmootherStatus::Converged: return "converged";
    case SmootherStatus::MaxIterations: return "max_iterations";
    case SmootherStatus::LineSearchFailed: return "line_search_failed";
  }
  return "unknown";
}

Eigen::VectorXd gradient(const SmoothingProblem& problem, const StateSequence& x) {
  problem.check_sequence(x);
  const std::size_t steps = problem.num_steps();
  const auto n = static_cast<Eigen::Index>(problem.state_dim());
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(x.stacked().size());
  for (std::size_t k = 0; k < steps; ++k) {
    const auto row = static_cast<Eigen::Index>(k) * n;
    const Eigen::VectorXd wrp = problem.apply_process_inverse(k, problem.process_residual(x, k));
    grad.segment(row, n) += wrp;
    if (k > 0) {
      grad.segment(row - n, n) -= problem.process().jacobian(k, x.block(k - 1)).transpose() * wrp;
    }
    const Eigen::VectorXd wrm = problem.apply_measurement_inverse(k, problem.measurement_residual(x, k));
    grad.segment(row, n) += problem.measurement().jacobian(k, x.block(k)).transpose() * wrm;
  }
  return grad;
}

SmootherResult oks_smooth(const SmoothingProblem& problem, const StateSequence& init,
                          const GNOptions& opts) {
  opts.validate();
  problem.check_sequence(init);
  if (!init.all_finite()) throw DimensionMismatch("initial state sequence is not finite");

  SmootherResult result;
  result.estimate = init;
  double value = evaluate_objective(problem, init);
  result.objective_trace.push_back(value);

  const std::size_t n = problem.state_dim();
  for (std::size_t iter = 0; iter < opts.max_iterations; ++iter) {
    StateSequence& x = result.estimate;
    const NormalSystem system = assemble_normal_system(problem, x);
    const Eigen::VectorXd target = solve(factor(system.matrix), system.rhs);
    const Eigen::VectorXd direction = target - x.stacked();

    // -<grad, d> is twice the decrease predicted by the GN model.
    const double slope = gradient(problem, x).dot(direction);
    if (-slope <= opts.objective_tolerance * value) {
      result.converged = true;
      result.status = SmootherStatus::Converged;
      return result;
    }

    double step = 1.0;
    StateSequence candidate(n, x.stacked() + direction);
    double candidate_value = evaluate_objective(problem, candidate);
    if (opts.line_search) {
      std::size_t backtracks = 0;
      while (!(candidate_value <= value + opts.armijo_c * step * slope)) {
        if (++backtracks > opts.max_backtracks) {
          result.converged = false;
          result.status = SmootherStatus::LineSearchFailed;
          return result;
        }
        step *= opts.backtrack_factor;
        candidate = StateSequence(n, x.stacked() + step * direction);
        candidate_value = evaluate_objective(problem, candidate);
      }
    } else if (!std::isfinite(candidate_value)) {
      candidate_value = std::numeric_limits<double>::infinity();
    }

    const double decrease = value - candidate_value;
    x = std::move(candidate);
    value = candidate_value;
    result.objective_trace.push_back(value);
    result.iterations = iter + 1;
    if (opts.line_search && decrease <= opts.objective_tolerance * (value + decrease)) {
      result.converged = true;
      result.status = SmootherStatus::Converged;
      return result;
    }
  }
  result.status = SmootherStatus::MaxIterations;
  result.converged = false;
  return result;
}

SmootherResult eks_smooth(const SmoothingProblem& problem, const StateSequence& init, bool line_search) {
  GNOptions opts;
  opts.max_iterations = 1;
  opts.line_search = line_search;
  SmootherResult result = oks_smooth(problem, init, opts);
  // A single linearization is the whole method; reaching the cap is the
  // normal outcome rather than a failure.
  if (result.status == SmootherStatus::MaxIterations) {
    result.converged = true;
    result.status = SmootherStatus::Converged;
  }
  return result;
}

}  // namespace nlsmooth
