#include "nlsmooth/unscented.hpp"

#include <cmath>
#include <string>

#include "nlsmooth/errors.hpp"

namespace nlsmooth {

namespace {

constexpr double kJitter = 1e-10;

Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& m) { return 0.5 * (m + m.transpose()); }

// Lower Cholesky factor of a symmetrized covariance, with a single jitter
// retry before giving up.
Eigen::MatrixXd covariance_sqrt(const Eigen::MatrixXd& cov, std::size_t step) {
  const Eigen::MatrixXd sym = symmetrized(cov);
  Eigen::LLT<Eigen::MatrixXd> llt(sym);
  if (llt.info() == Eigen::Success) return llt.matrixL();
  llt.compute(sym + kJitter * Eigen::MatrixXd::Identity(sym.rows(), sym.cols()));
  if (llt.info() == Eigen::Success) return llt.matrixL();
  throw NotPositiveDefinite(step, "sigma-point covariance is not positive definite");
}

SigmaPoints make_sigma_points(const GaussianBelief& belief, const UTParams& params, std::size_t step) {
  const auto n = belief.mean.size();
  const double lambda = params.lambda(static_cast<std::size_t>(n));
  const double spread = static_cast<double>(n) + lambda;
  if (spread <= 0.0) throw ConfigError("unscented transform needs n + lambda > 0");

  const Eigen::MatrixXd root = std::sqrt(spread) * covariance_sqrt(belief.covariance, step);
  SigmaPoints sp;
  sp.points.resize(n, 2 * n + 1);
  sp.points.col(0) = belief.mean;
  for (Eigen::Index i = 0; i < n; ++i) {
    sp.points.col(1 + i) = belief.mean + root.col(i);
    sp.points.col(1 + n + i) = belief.mean - root.col(i);
  }
  sp.mean_weights = Eigen::VectorXd::Constant(2 * n + 1, 0.5 / spread);
  sp.covariance_weights = sp.mean_weights;
  sp.mean_weights(0) = lambda / spread;
  sp.covariance_weights(0) = lambda / spread + (1.0 - params.alpha * params.alpha + params.beta);
  return sp;
}

UnscentedEstimate propagate(const SigmaPoints& sp, const Eigen::VectorXd& input_mean,
                            const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f) {
  const Eigen::Index count = sp.points.cols();
  Eigen::VectorXd first = f(sp.points.col(0));
  Eigen::MatrixXd mapped(first.size(), count);
  mapped.col(0) = first;
  for (Eigen::Index i = 1; i < count; ++i) mapped.col(i) = f(sp.points.col(i));

  UnscentedEstimate est;
  est.mean = mapped * sp.mean_weights;
  const Eigen::MatrixXd dy = mapped.colwise() - est.mean;
  const Eigen::MatrixXd dx = sp.points.colwise() - input_mean;
  est.covariance = dy * sp.covariance_weights.asDiagonal() * dy.transpose();
  est.cross_covariance = dx * sp.covariance_weights.asDiagonal() * dy.transpose();
  return est;
}

GaussianBelief measurement_update(const SmoothingProblem& problem, const GaussianBelief& prior,
                                  const UTParams& params, std::size_t k) {
  const SigmaPoints sp = make_sigma_points(prior, params, k);
  const auto& meas = problem.measurement();
  const UnscentedEstimate z = propagate(
      sp, prior.mean, [&](const Eigen::VectorXd& x) { return meas.measure(k, x); });
  const Eigen::MatrixXd innovation_cov = z.covariance + meas.covariances[k];
  Eigen::LLT<Eigen::MatrixXd> llt(symmetrized(innovation_cov));
  if (llt.info() != Eigen::Success) {
    throw NotPositiveDefinite(k, "innovation covariance is not positive definite");
  }
  // K = Pxz S^{-1}
  const Eigen::MatrixXd gain = llt.solve(z.cross_covariance.transpose()).transpose();
  GaussianBelief post;
  post.mean = prior.mean + gain * (meas.observations[k] - z.mean);
  post.covariance = symmetrized(prior.covariance - gain * innovation_cov * gain.transpose());
  return post;
}

}  // namespace

SigmaPoints sigma_points(const GaussianBelief& belief, const UTParams& params) {
  return make_sigma_points(belief, params, 0);
}

UnscentedEstimate unscented_transform(const GaussianBelief& belief, const UTParams& params,
                                      const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f) {
  return propagate(make_sigma_points(belief, params, 0), belief.mean, f);
}

FilteredTrajectory ukf_forward(const SmoothingProblem& problem, const GaussianBelief& init,
                               const UTParams& params) {
  const auto n = static_cast<Eigen::Index>(problem.state_dim());
  if (init.mean.size() != n || init.covariance.rows() != n || init.covariance.cols() != n) {
    throw DimensionMismatch("initial belief does not match the state dimension");
  }
  const auto& proc = problem.process();
  FilteredTrajectory out;
  out.reserve(problem.num_steps());

  FilterStep first;
  first.predicted = init;
  first.updated = measurement_update(problem, init, params, 0);
  out.push_back(std::move(first));

  for (std::size_t k = 1; k < problem.num_steps(); ++k) {
    const GaussianBelief& prev = out.back().updated;
    const SigmaPoints sp = make_sigma_points(prev, params, k);
    const UnscentedEstimate pred = propagate(
        sp, prev.mean, [&](const Eigen::VectorXd& x) { return proc.transition(k, x); });

    FilterStep step;
    step.predicted.mean = pred.mean;
    step.predicted.covariance = symmetrized(pred.covariance + proc.covariances[k]);
    step.cross_covariance = pred.cross_covariance;
    step.updated = measurement_update(problem, step.predicted, params, k);
    out.push_back(std::move(step));
  }
  return out;
}

SmoothedTrajectory urts_backward(const FilteredTrajectory& filtered, const SmoothingProblem& problem) {
  const std::size_t steps = filtered.size();
  if (steps != problem.num_steps()) {
    throw DimensionMismatch("filtered trajectory has " + std::to_string(steps) + " steps, problem has " +
                            std::to_string(problem.num_steps()));
  }
  const std::size_t n = problem.state_dim();

  SmoothedTrajectory out;
  out.beliefs.resize(steps);
  out.beliefs[steps - 1] = filtered[steps - 1].updated;
  for (std::size_t k = steps - 1; k-- > 0;) {
    const FilterStep& next = filtered[k + 1];
    Eigen::LLT<Eigen::MatrixXd> llt(next.predicted.covariance);
    if (llt.info() != Eigen::Success) {
      throw NotPositiveDefinite(k + 1, "predicted covariance is not positive definite");
    }
    // G = C P^-_{k+1}^{-1}
    const Eigen::MatrixXd gain = llt.solve(next.cross_covariance.transpose()).transpose();
    const GaussianBelief& later = out.beliefs[k + 1];
    GaussianBelief& cur = out.beliefs[k];
    cur.mean = filtered[k].updated.mean + gain * (later.mean - next.predicted.mean);
    cur.covariance = symmetrized(filtered[k].updated.covariance +
                                 gain * (later.covariance - next.predicted.covariance) * gain.transpose());
  }

  StateSequence estimate(n, steps);
  for (std::size_t k = 0; k < steps; ++k) estimate.block(k) = out.beliefs[k].mean;
  out.result.objective_trace.push_back(evaluate_objective(problem, estimate));
  out.result.estimate = std::move(estimate);
  out.result.iterations = 1;
  out.result.converged = true;
  out.result.status = SmootherStatus::Converged;
  return out;
}

SmootherResult uks_smooth(const SmoothingProblem& problem, const UTParams& params) {
  const GaussianBelief prior{problem.process().prior_mean, problem.process().covariances.front()};
  return urts_backward(ukf_forward(problem, prior, params), problem).result;
}

}  // namespace nlsmooth
