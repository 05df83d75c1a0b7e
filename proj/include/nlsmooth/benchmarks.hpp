#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "nlsmooth/statespace.hpp"

namespace nlsmooth {

// Both benchmark systems use the state ordering [acceleration, velocity, position].
inline constexpr std::size_t kStateDim = 3;
inline constexpr std::size_t kMeasurementDim = 2;
inline constexpr std::array<const char*, 3> kComponentNames = {"ddx", "dx", "x"};

struct Trajectory {
  std::vector<double> times;
  StateSequence states;

  double spacing() const { return times.size() > 1 ? times[1] - times[0] : 0.0; }
};

/// Non-harmonic oscillator  x'' = -w0^2 x - beta x' + k2 x^2 + k3 x^3 + xi(t).
struct NHOParams {
  double omega0 = 5.0;
  double beta_damp = 1.5;
  double k2 = 90.0;
  double k3 = -0.5;
  double sigma_p_true = 0.5;  // std of the acceleration noise per truth step
  double dt_truth = 0.03;
  std::size_t obs_stride = 2;
  std::size_t num_steps = 60;  // truth transitions after the initial state
  Eigen::Vector3d initial_state{0.0, 0.0, 0.1};

  void validate() const;
};

struct ObservationSet {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> measurements;  // [dx, x]
  double sigma_m_true = 0.0;                  // std
  std::uint64_t seed = 0;
  std::vector<std::size_t> truth_indices;     // source row in the truth trajectory

  double spacing() const { return times.size() > 1 ? times[1] - times[0] : 0.0; }
};

/// One period of sin(t) sampled at t_i = i * 2 pi / num_points.
Trajectory generate_sine_truth(std::size_t num_points);

/// Discrete NHO transition at step dt (noise excluded):
///   [a, v, x] -> [a - beta dt v - w0^2 dt x + k2 dt x^2 + k3 dt x^3, a dt + v, v dt + x]
Eigen::Vector3d nho_transition(const NHOParams& params, double dt, const Eigen::Vector3d& state);
Eigen::Matrix3d nho_jacobian(const NHOParams& params, double dt, const Eigen::Vector3d& state);

/// Iterates nho_transition at dt_truth, adding N(0, sigma_p_true^2) to the
/// acceleration every step. Returns num_steps + 1 states starting at t = 0.
Trajectory generate_nho_truth(const NHOParams& params, std::size_t num_steps, std::uint64_t seed);

/// Every stride-th state (starting with the first) observed as
/// [dx, x] + N(0, sigma_m_true^2 I).
ObservationSet observe(const Trajectory& truth, double sigma_m_true, std::size_t stride, std::uint64_t seed);

/// Q_k = scale * integrated-Brownian-motion covariance over dt.
Eigen::Matrix3d integrated_brownian_covariance(double dt, double scale);

/// [[0,1,0],[0,0,1]]: direct observation of velocity and position.
Eigen::Matrix<double, 2, 3> observation_matrix();

// Prior mean [0, z_dx, z_x] from the first observation.
Eigen::VectorXd prior_from_observations(const ObservationSet& obs);

// Smoother starting point: [0, z_dx, z_x] at every step.
StateSequence init_from_observations(const ObservationSet& obs);

/// Constant-acceleration tracker: G = [[1,0,0],[dt,1,0],[0,dt,1]],
/// Q_k = sigma_p2 * IBM(dt), Q_0 = I, R_k = sigma_m2 * I, dt = observation spacing.
SmoothingProblem build_linear_problem(const ObservationSet& obs, double sigma_p2, double sigma_m2);

/// NHO transition at the observation spacing, otherwise as the linear problem.
SmoothingProblem build_nho_problem(const ObservationSet& obs, const NHOParams& params, double sigma_p2,
                                   double sigma_m2);

// Truth rows aligned with the observation times.
StateSequence truth_at_observations(const Trajectory& truth, const ObservationSet& obs);

}  // namespace nlsmooth
