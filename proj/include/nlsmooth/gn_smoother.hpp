#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "nlsmooth/statespace.hpp"

namespace nlsmooth {

struct GNOptions {
  std::size_t max_iterations = 50;
  // Stop once an accepted step (or the GN model's predicted decrease) lowers
  // the objective by less than this fraction of its current value.
  double objective_tolerance = 1e-9;
  double armijo_c = 1e-4;
  double backtrack_factor = 0.5;
  std::size_t max_backtracks = 40;
  // Off: every iteration takes the full GN step.
  bool line_search = true;

  void validate() const;
};

enum class SmootherStatus { Converged, MaxIterations, LineSearchFailed };

const char* to_string(SmootherStatus status);

struct SmootherResult {
  StateSequence estimate;
  // Objective at the initial point and after every accepted iteration.
  std::vector<double> objective_trace;
  std::size_t iterations = 0;
  bool converged = false;
  SmootherStatus status = SmootherStatus::MaxIterations;
};

/// Gradient of the smoothing objective, J(x)^T W F(x).
Eigen::VectorXd gradient(const SmoothingProblem& problem, const StateSequence& x);

/// Optimized Kalman smoother: Gauss-Newton on the whole trajectory, each
/// iteration a block-tridiagonal solve, globalized by Armijo backtracking.
SmootherResult oks_smooth(const SmoothingProblem& problem, const StateSequence& init,
                          const GNOptions& opts = {});

/// Extended Kalman smoother as a single Gauss-Newton iteration. The step is
/// the full GN step unless `line_search` is set.
SmootherResult eks_smooth(const SmoothingProblem& problem, const StateSequence& init,
                          bool line_search = false);

}  // namespace nlsmooth
