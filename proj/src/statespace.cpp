#include "nlsmooth/statespace.hpp"

#include <string>

#include "nlsmooth/errors.hpp"

namespace nlsmooth {

namespace {

Eigen::LLT<Eigen::MatrixXd> checked_llt(const Eigen::MatrixXd& c, std::size_t k, const char* what) {
  Eigen::LLT<Eigen::MatrixXd> llt(c);
  if (llt.info() != Eigen::Success) throw NotPositiveDefinite(k, what);
  return llt;
}

}  // namespace

StateSequence::StateSequence(std::size_t state_dim, std::size_t num_steps)
    : n_(state_dim), values_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(state_dim * num_steps))) {}

StateSequence::StateSequence(std::size_t state_dim, Eigen::VectorXd stacked)
    : n_(state_dim), values_(std::move(stacked)) {
  if (n_ == 0 || values_.size() % static_cast<Eigen::Index>(n_) != 0) {
    throw DimensionMismatch("state sequence length is not a multiple of the state dimension");
  }
}

Eigen::VectorXd StateSequence::component(std::size_t c) const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(num_steps()));
  for (std::size_t k = 0; k < num_steps(); ++k) out(static_cast<Eigen::Index>(k)) = block(k)(static_cast<Eigen::Index>(c));
  return out;
}

SmoothingProblem::SmoothingProblem(ProcessModel process, MeasurementModel measurement)
    : process_(std::move(process)), measurement_(std::move(measurement)) {
  steps_ = measurement_.observations.size();
  if (steps_ == 0) throw DimensionMismatch("smoothing problem needs at least one observation");
  n_ = static_cast<std::size_t>(process_.prior_mean.size());
  m_ = static_cast<std::size_t>(measurement_.observations.front().size());
  if (n_ == 0 || m_ == 0) throw DimensionMismatch("state and measurement dimensions must be positive");
  if (process_.covariances.size() != steps_ || measurement_.covariances.size() != steps_) {
    throw DimensionMismatch("need one process and one measurement covariance per step (M = " +
                            std::to_string(steps_) + ")");
  }
  if (!process_.transition || !process_.jacobian || !measurement_.measure || !measurement_.jacobian) {
    throw DimensionMismatch("process and measurement maps must be set");
  }
  const auto n = static_cast<Eigen::Index>(n_);
  const auto m = static_cast<Eigen::Index>(m_);
  q_factors_.reserve(steps_);
  r_factors_.reserve(steps_);
  for (std::size_t k = 0; k < steps_; ++k) {
    const auto& q = process_.covariances[k];
    const auto& r = measurement_.covariances[k];
    if (q.rows() != n || q.cols() != n) throw DimensionMismatch("Q_" + std::to_string(k) + " has wrong shape");
    if (r.rows() != m || r.cols() != m) throw DimensionMismatch("R_" + std::to_string(k) + " has wrong shape");
    if (measurement_.observations[k].size() != m) {
      throw DimensionMismatch("observation " + std::to_string(k) + " has wrong length");
    }
    q_factors_.push_back(checked_llt(q, k, "process covariance is not positive definite"));
    r_factors_.push_back(checked_llt(r, k, "measurement covariance is not positive definite"));
  }
}

void SmoothingProblem::check_sequence(const StateSequence& x) const {
  if (x.state_dim() != n_ || x.num_steps() != steps_) {
    throw DimensionMismatch("state sequence is " + std::to_string(x.state_dim()) + "x" +
                            std::to_string(x.num_steps()) + ", problem is " + std::to_string(n_) + "x" +
                            std::to_string(steps_));
  }
}

Eigen::VectorXd SmoothingProblem::process_residual(const StateSequence& x, std::size_t k) const {
  if (k == 0) return x.block(0) - process_.prior_mean;
  return x.block(k) - process_.transition(k, x.block(k - 1));
}

Eigen::VectorXd SmoothingProblem::measurement_residual(const StateSequence& x, std::size_t k) const {
  return measurement_.measure(k, x.block(k)) - measurement_.observations[k];
}

Eigen::VectorXd SmoothingProblem::apply_process_inverse(std::size_t k, const Eigen::VectorXd& v) const {
  return q_factors_[k].solve(v);
}
Eigen::MatrixXd SmoothingProblem::apply_process_inverse(std::size_t k, const Eigen::MatrixXd& v) const {
  return q_factors_[k].solve(v);
}
Eigen::VectorXd SmoothingProblem::apply_measurement_inverse(std::size_t k, const Eigen::VectorXd& v) const {
  return r_factors_[k].solve(v);
}
Eigen::MatrixXd SmoothingProblem::apply_measurement_inverse(std::size_t k, const Eigen::MatrixXd& v) const {
  return r_factors_[k].solve(v);
}

double evaluate_objective(const SmoothingProblem& problem, const StateSequence& x) {
  problem.check_sequence(x);
  double total = 0.0;
  for (std::size_t k = 0; k < problem.num_steps(); ++k) {
    const Eigen::VectorXd rp = problem.process_residual(x, k);
    const Eigen::VectorXd rm = problem.measurement_residual(x, k);
    total += rp.dot(problem.apply_process_inverse(k, rp));
    total += rm.dot(problem.apply_measurement_inverse(k, rm));
  }
  return 0.5 * total;
}

NormalSystem assemble_normal_system(const SmoothingProblem& problem, const StateSequence& x) {
  problem.check_sequence(x);
  const std::size_t steps = problem.num_steps();
  const std::size_t n = problem.state_dim();
  const auto& proc = problem.process();
  const auto& meas = problem.measurement();

  BlockTridiagonalMatrix a(n, steps);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n * steps));
  const auto nn = static_cast<Eigen::Index>(n);

  // rhs = sum_i J_i^T W_i (J_i x - r_i), per term.
  for (std::size_t k = 0; k < steps; ++k) {
    const auto row = static_cast<Eigen::Index>(k) * nn;

    // Residual x_k - g_k(x_{k-1}): d/dx_k = I, d/dx_{k-1} = -A_k.
    a.diag(k) += problem.apply_process_inverse(k, Eigen::MatrixXd(Eigen::MatrixXd::Identity(nn, nn)));
    if (k == 0) {
      rhs.segment(row, nn) += problem.apply_process_inverse(0, proc.prior_mean);
    } else {
      const Eigen::VectorXd& prev = x.block(k - 1);
      const Eigen::MatrixXd jac = proc.jacobian(k, prev);
      const Eigen::MatrixXd wjac = problem.apply_process_inverse(k, jac);
      a.diag(k - 1) += jac.transpose() * wjac;
      a.lower(k - 1) -= wjac;
      const Eigen::VectorXd wy = problem.apply_process_inverse(k, Eigen::VectorXd(proc.transition(k, prev) - jac * prev));
      rhs.segment(row, nn) += wy;
      rhs.segment(row - nn, nn) -= jac.transpose() * wy;
    }

    const Eigen::MatrixXd hjac = meas.jacobian(k, x.block(k));
    const Eigen::VectorXd y = meas.observations[k] - meas.measure(k, x.block(k)) + hjac * x.block(k);
    a.diag(k) += hjac.transpose() * problem.apply_measurement_inverse(k, hjac);
    rhs.segment(row, nn) += hjac.transpose() * problem.apply_measurement_inverse(k, y);
  }

  return NormalSystem{std::move(a), std::move(rhs)};
}

Eigen::MatrixXd finite_difference_jacobian(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x,
    double h) {
  const Eigen::VectorXd f0 = f(x);
  Eigen::MatrixXd jac(f0.size(), x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    Eigen::VectorXd xp = x;
    Eigen::VectorXd xm = x;
    xp(j) += h;
    xm(j) -= h;
    jac.col(j) = (f(xp) - f(xm)) / (2.0 * h);
  }
  return jac;
}

}  // namespace nlsmooth
