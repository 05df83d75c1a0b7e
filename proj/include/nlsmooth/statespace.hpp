#pragma once

#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "nlsmooth/blocktridiag.hpp"

namespace nlsmooth {

/// State trajectory x = [x_0, ..., x_{M-1}], each block in R^n, stored
/// contiguously so it can be handed to the block-tridiagonal solver.
class StateSequence {
 public:
  StateSequence() = default;
  StateSequence(std::size_t state_dim, std::size_t num_steps);
  StateSequence(std::size_t state_dim, Eigen::VectorXd stacked);

  std::size_t state_dim() const { return n_; }
  std::size_t num_steps() const { return n_ == 0 ? 0 : static_cast<std::size_t>(values_.size()) / n_; }

  auto block(std::size_t k) { return values_.segment(static_cast<Eigen::Index>(k * n_), static_cast<Eigen::Index>(n_)); }
  auto block(std::size_t k) const {
    return values_.segment(static_cast<Eigen::Index>(k * n_), static_cast<Eigen::Index>(n_));
  }

  // Component c of every block, e.g. the position series.
  Eigen::VectorXd component(std::size_t c) const;

  const Eigen::VectorXd& stacked() const { return values_; }
  Eigen::VectorXd& stacked() { return values_; }

  bool all_finite() const { return values_.allFinite(); }

 private:
  std::size_t n_ = 0;
  Eigen::VectorXd values_;
};

using StepMap = std::function<Eigen::VectorXd(std::size_t step, const Eigen::VectorXd& x)>;
using StepJacobian = std::function<Eigen::MatrixXd(std::size_t step, const Eigen::VectorXd& x)>;

/// x_k = g_k(x_{k-1}) + e_k, e_k ~ N(0, Q_k) for k = 1..M-1, with the prior
/// x_0 ~ N(prior_mean, Q_0). `covariances[0]` is Q_0.
struct ProcessModel {
  StepMap transition;
  StepJacobian jacobian;
  std::vector<Eigen::MatrixXd> covariances;
  Eigen::VectorXd prior_mean;
};

/// z_k = h_k(x_k) + m_k, m_k ~ N(0, R_k) for k = 0..M-1.
struct MeasurementModel {
  StepMap measure;
  StepJacobian jacobian;
  std::vector<Eigen::MatrixXd> covariances;
  std::vector<Eigen::VectorXd> observations;
};

/// The MAP smoothing objective
///   1/2 sum_k |x_k - g_k(x_{k-1})|^2_{Q_k^{-1}} + 1/2 sum_k |h_k(x_k) - z_k|^2_{R_k^{-1}}
/// with the prior residual x_0 - prior_mean at k = 0.
///
/// Immutable after construction; the Cholesky factors of every Q_k and R_k
/// are computed once here and shared by all evaluations.
class SmoothingProblem {
 public:
  SmoothingProblem(ProcessModel process, MeasurementModel measurement);

  std::size_t state_dim() const { return n_; }
  std::size_t measurement_dim() const { return m_; }
  std::size_t num_steps() const { return steps_; }

  const ProcessModel& process() const { return process_; }
  const MeasurementModel& measurement() const { return measurement_; }

  // Process residual at step k: x_0 - prior_mean for k = 0, else x_k - g_k(x_{k-1}).
  Eigen::VectorXd process_residual(const StateSequence& x, std::size_t k) const;
  Eigen::VectorXd measurement_residual(const StateSequence& x, std::size_t k) const;

  // Q_k^{-1} v and R_k^{-1} v through the stored Cholesky factors.
  Eigen::VectorXd apply_process_inverse(std::size_t k, const Eigen::VectorXd& v) const;
  Eigen::MatrixXd apply_process_inverse(std::size_t k, const Eigen::MatrixXd& v) const;
  Eigen::VectorXd apply_measurement_inverse(std::size_t k, const Eigen::VectorXd& v) const;
  Eigen::MatrixXd apply_measurement_inverse(std::size_t k, const Eigen::MatrixXd& v) const;

  void check_sequence(const StateSequence& x) const;

 private:
  ProcessModel process_;
  MeasurementModel measurement_;
  std::vector<Eigen::LLT<Eigen::MatrixXd>> q_factors_;
  std::vector<Eigen::LLT<Eigen::MatrixXd>> r_factors_;
  std::size_t n_ = 0;
  std::size_t m_ = 0;
  std::size_t steps_ = 0;
};

double evaluate_objective(const SmoothingProblem& problem, const StateSequence& x);

struct NormalSystem {
  BlockTridiagonalMatrix matrix;
  Eigen::VectorXd rhs;
};

// Gauss-Newton system J^T W J x_new = J^T W J x - J^T W F(x), linearized at x.
// Its solution is the next iterate itself, not the step.
NormalSystem assemble_normal_system(const SmoothingProblem& problem, const StateSequence& x);

// Central differences: column j is (f(x + h e_j) - f(x - h e_j)) / (2h).
Eigen::MatrixXd finite_difference_jacobian(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x,
    double h);

}  // namespace nlsmooth
