#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "nlsmooth/gn_smoother.hpp"
#include "nlsmooth/statespace.hpp"

namespace nlsmooth {

/// Scaled unscented transform parameters; lambda = alpha^2 (n + kappa) - n.
struct UTParams {
  double alpha = 1.0;
  double beta = 2.0;
  double kappa = 0.0;

  double lambda(std::size_t n) const { return alpha * alpha * (static_cast<double>(n) + kappa) - static_cast<double>(n); }
};

struct GaussianBelief {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
};

/// 2n+1 points stored column-wise: mu, mu + s*L_i (i = 1..n), mu - s*L_i.
struct SigmaPoints {
  Eigen::MatrixXd points;
  Eigen::VectorXd mean_weights;
  Eigen::VectorXd covariance_weights;
};

SigmaPoints sigma_points(const GaussianBelief& belief, const UTParams& params);

struct UnscentedEstimate {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;       // of the mapped points, no noise added
  Eigen::MatrixXd cross_covariance;  // between input and mapped points
};

UnscentedEstimate unscented_transform(const GaussianBelief& belief, const UTParams& params,
                                      const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f);

struct FilterStep {
  GaussianBelief predicted;  // equals the prior belief at k = 0
  GaussianBelief updated;
  // Cov(x_{k-1}, x_k^-) from the prediction into this step; empty at k = 0.
  Eigen::MatrixXd cross_covariance;
};

using FilteredTrajectory = std::vector<FilterStep>;

/// Additive-noise UKF. Step 0 updates `init` with z_0 directly; later steps
/// predict through g_k (plus Q_k) and then update with z_k.
FilteredTrajectory ukf_forward(const SmoothingProblem& problem, const GaussianBelief& init,
                               const UTParams& params = {});

/// Unscented RTS pass over the stored forward results.
struct SmoothedTrajectory {
  SmootherResult result;
  std::vector<GaussianBelief> beliefs;
};

SmoothedTrajectory urts_backward(const FilteredTrajectory& filtered, const SmoothingProblem& problem);

// Forward then backward pass, starting from the problem's prior (mean, Q_0).
SmootherResult uks_smooth(const SmoothingProblem& problem, const UTParams& params = {});

}  // namespace nlsmooth
