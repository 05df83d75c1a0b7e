#include "nlsmooth/benchmarks.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "nlsmooth/errors.hpp"
#include "nlsmooth/random.hpp"

namespace nlsmooth {

void NHOParams::validate() const {
  if (!(dt_truth > 0.0)) throw ConfigError("nho.dt_truth must be positive");
  if (obs_stride < 1) throw ConfigError("nho.obs_stride must be at least 1");
  if (!(sigma_p_true >= 0.0)) throw ConfigError("nho.sigma_p_true must be nonnegative");
  if (num_steps < 1) throw ConfigError("nho.num_steps must be at least 1");
}

Trajectory generate_sine_truth(std::size_t num_points) {
  if (num_points < 2) throw DimensionMismatch("sine truth needs at least two points");
  const double dt = 2.0 * std::numbers::pi / static_cast<double>(num_points);
  Trajectory tr;
  tr.times.resize(num_points);
  tr.states = StateSequence(kStateDim, num_points);
  for (std::size_t i = 0; i < num_points; ++i) {
    const double t = static_cast<double>(i) * dt;
    const double s = std::sin(t);
    tr.times[i] = t;
    tr.states.block(i) << -s, std::cos(t), s;
  }
  return tr;
}

Eigen::Vector3d nho_transition(const NHOParams& p, double dt, const Eigen::Vector3d& s) {
  const double a = s(0), v = s(1), x = s(2);
  return {a - p.beta_damp * dt * v - p.omega0 * p.omega0 * dt * x + p.k2 * dt * x * x + p.k3 * dt * x * x * x,
          dt * a + v, dt * v + x};
}

Eigen::Matrix3d nho_jacobian(const NHOParams& p, double dt, const Eigen::Vector3d& s) {
  const double x = s(2);
  Eigen::Matrix3d j;
  j << 1.0, -p.beta_damp * dt, -p.omega0 * p.omega0 * dt + 2.0 * p.k2 * dt * x + 3.0 * p.k3 * dt * x * x,
      dt, 1.0, 0.0,
      0.0, dt, 1.0;
  return j;
}

Trajectory generate_nho_truth(const NHOParams& params, std::size_t num_steps, std::uint64_t seed) {
  params.validate();
  GaussianStream noise(seed, GaussianStream::Trajectory);
  Trajectory tr;
  tr.times.resize(num_steps + 1);
  tr.states = StateSequence(kStateDim, num_steps + 1);
  Eigen::Vector3d state = params.initial_state;
  tr.times[0] = 0.0;
  tr.states.block(0) = state;
  for (std::size_t i = 1; i <= num_steps; ++i) {
    state = nho_transition(params, params.dt_truth, state);
    state(0) += params.sigma_p_true * noise.normal();
    tr.times[i] = static_cast<double>(i) * params.dt_truth;
    tr.states.block(i) = state;
  }
  return tr;
}

ObservationSet observe(const Trajectory& truth, double sigma_m_true, std::size_t stride, std::uint64_t seed) {
  if (stride < 1) throw DimensionMismatch("observation stride must be at least 1");
  if (!(sigma_m_true >= 0.0)) throw DimensionMismatch("measurement noise std must be nonnegative");
  GaussianStream noise(seed, GaussianStream::Observations);
  ObservationSet obs;
  obs.sigma_m_true = sigma_m_true;
  obs.seed = seed;
  for (std::size_t i = 0; i < truth.times.size(); i += stride) {
    Eigen::VectorXd z(2);
    z(0) = truth.states.block(i)(1) + sigma_m_true * noise.normal();
    z(1) = truth.states.block(i)(2) + sigma_m_true * noise.normal();
    obs.times.push_back(truth.times[i]);
    obs.measurements.push_back(std::move(z));
    obs.truth_indices.push_back(i);
  }
  return obs;
}

Eigen::Matrix3d integrated_brownian_covariance(double dt, double scale) {
  const double d2 = dt * dt, d3 = d2 * dt, d4 = d3 * dt, d5 = d4 * dt;
  Eigen::Matrix3d q;
  q << dt, d2 / 2.0, d3 / 6.0,
      d2 / 2.0, d3 / 3.0, d4 / 8.0,
      d3 / 6.0, d4 / 8.0, d5 / 20.0;
  return scale * q;
}

Eigen::Matrix<double, 2, 3> observation_matrix() {
  Eigen::Matrix<double, 2, 3> h;
  h << 0.0, 1.0, 0.0,
      0.0, 0.0, 1.0;
  return h;
}

Eigen::VectorXd prior_from_observations(const ObservationSet& obs) {
  if (obs.measurements.empty()) throw DimensionMismatch("observation set is empty");
  Eigen::VectorXd mean(3);
  mean << 0.0, obs.measurements.front()(0), obs.measurements.front()(1);
  return mean;
}

StateSequence init_from_observations(const ObservationSet& obs) {
  StateSequence x(kStateDim, obs.measurements.size());
  for (std::size_t k = 0; k < obs.measurements.size(); ++k) {
    x.block(k) << 0.0, obs.measurements[k](0), obs.measurements[k](1);
  }
  return x;
}

namespace {

MeasurementModel direct_measurements(const ObservationSet& obs, double sigma_m2) {
  const Eigen::MatrixXd h = observation_matrix();
  MeasurementModel meas;
  meas.measure = [h](std::size_t, const Eigen::VectorXd& x) -> Eigen::VectorXd { return h * x; };
  meas.jacobian = [h](std::size_t, const Eigen::VectorXd&) -> Eigen::MatrixXd { return h; };
  meas.covariances.assign(obs.measurements.size(), sigma_m2 * Eigen::MatrixXd::Identity(2, 2));
  meas.observations = obs.measurements;
  return meas;
}

void check_scales(double sigma_p2, double sigma_m2) {
  if (!(sigma_p2 > 0.0) || !(sigma_m2 > 0.0)) {
    throw ConfigError("covariance scales must be positive (sigma_p2 = " + std::to_string(sigma_p2) +
                      ", sigma_m2 = " + std::to_string(sigma_m2) + ")");
  }
}

double model_spacing(const ObservationSet& obs) {
  const double dt = obs.spacing();
  if (!(dt > 0.0)) throw DimensionMismatch("need at least two observations with increasing times");
  return dt;
}

std::vector<Eigen::MatrixXd> process_covariances(std::size_t steps, double dt, double sigma_p2) {
  std::vector<Eigen::MatrixXd> qs(steps, Eigen::MatrixXd(integrated_brownian_covariance(dt, sigma_p2)));
  qs.front() = Eigen::MatrixXd::Identity(3, 3);
  return qs;
}

}  // namespace

SmoothingProblem build_linear_problem(const ObservationSet& obs, double sigma_p2, double sigma_m2) {
  check_scales(sigma_p2, sigma_m2);
  const double dt = model_spacing(obs);
  Eigen::MatrixXd g(3, 3);
  g << 1.0, 0.0, 0.0,
      dt, 1.0, 0.0,
      0.0, dt, 1.0;

  ProcessModel proc;
  proc.transition = [g](std::size_t, const Eigen::VectorXd& x) -> Eigen::VectorXd { return g * x; };
  proc.jacobian = [g](std::size_t, const Eigen::VectorXd&) -> Eigen::MatrixXd { return g; };
  proc.covariances = process_covariances(obs.measurements.size(), dt, sigma_p2);
  proc.prior_mean = prior_from_observations(obs);
  return SmoothingProblem(std::move(proc), direct_measurements(obs, sigma_m2));
}

SmoothingProblem build_nho_problem(const ObservationSet& obs, const NHOParams& params, double sigma_p2,
                                   double sigma_m2) {
  check_scales(sigma_p2, sigma_m2);
  const double dt = model_spacing(obs);
  ProcessModel proc;
  proc.transition = [params, dt](std::size_t, const Eigen::VectorXd& x) -> Eigen::VectorXd {
    return nho_transition(params, dt, x);
  };
  proc.jacobian = [params, dt](std::size_t, const Eigen::VectorXd& x) -> Eigen::MatrixXd {
    return nho_jacobian(params, dt, x);
  };
  proc.covariances = process_covariances(obs.measurements.size(), dt, sigma_p2);
  proc.prior_mean = prior_from_observations(obs);
  return SmoothingProblem(std::move(proc), direct_measurements(obs, sigma_m2));
}

StateSequence truth_at_observations(const Trajectory& truth, const ObservationSet& obs) {
  StateSequence x(kStateDim, obs.truth_indices.size());
  for (std::size_t k = 0; k < obs.truth_indices.size(); ++k) {
    const std::size_t i = obs.truth_indices[k];
    if (i >= truth.times.size()) throw DimensionMismatch("observation refers past the end of the truth");
    x.block(k) = truth.states.block(i);
  }
  return x;
}

}  // namespace nlsmooth
