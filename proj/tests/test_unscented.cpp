#include <cmath>

#include <gtest/gtest.h>

#include "nlsmooth/benchmarks.hpp"
#include "nlsmooth/errors.hpp"
#include "nlsmooth/gn_smoother.hpp"
#include "nlsmooth/unscented.hpp"
#include "oracles.hpp"

using namespace nlsmooth;

TEST(SigmaPoints, ScalarWeights) {
  const GaussianBelief b{Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Identity(1, 1)};
  const UTParams params{1.0, 2.0, 2.0};
  EXPECT_DOUBLE_EQ(params.lambda(1), 2.0);
  const auto sp = sigma_points(b, params);
  ASSERT_EQ(sp.points.cols(), 3);
  EXPECT_DOUBLE_EQ(sp.points(0, 0), 0.0);
  EXPECT_DOUBLE_EQ(sp.points(0, 1), std::sqrt(3.0));
  EXPECT_DOUBLE_EQ(sp.points(0, 2), -std::sqrt(3.0));
  EXPECT_DOUBLE_EQ(sp.mean_weights(0), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(sp.mean_weights(1), 1.0 / 6.0);
  EXPECT_DOUBLE_EQ(sp.mean_weights(2), 1.0 / 6.0);
  EXPECT_DOUBLE_EQ(sp.covariance_weights(0), 2.0 / 3.0 + 2.0);
}

TEST(SigmaPoints, ReproduceMeanAndCovariance) {
  GaussianStream rng(31, GaussianStream::Test);
  for (int trial = 0; trial < 20; ++trial) {
    const GaussianBelief b{oracle::random_vector(3, rng), oracle::random_spd(3, rng, 0.1)};
    for (const UTParams& params : {UTParams{}, UTParams{0.5, 2.0, 1.0}, UTParams{1e-3, 2.0, 0.0}}) {
      const auto sp = sigma_points(b, params);
      // Small alpha gives large weights of both signs; roundoff grows with them.
      const double scale = sp.mean_weights.cwiseAbs().sum();
      EXPECT_NEAR(sp.mean_weights.sum(), 1.0, 1e-12 * scale);
      const Eigen::VectorXd mean = sp.points * sp.mean_weights;
      EXPECT_LE((mean - b.mean).norm(), 1e-12 * scale * (1.0 + sp.points.cwiseAbs().maxCoeff()));
      const Eigen::MatrixXd d = sp.points.colwise() - b.mean;
      // Covariance weights differ from mean weights only on the centre
      // point, whose deviation is zero.
      const Eigen::MatrixXd cov = d * sp.covariance_weights.asDiagonal() * d.transpose();
      EXPECT_LE((cov - b.covariance).norm() / b.covariance.norm(), 1e-12);
    }
  }
}

TEST(SigmaPoints, RejectsIndefiniteCovariance) {
  Eigen::Matrix2d c;
  c << 1.0, 2.0, 2.0, 1.0;
  EXPECT_THROW(sigma_points(GaussianBelief{Eigen::Vector2d::Zero(), c}, UTParams{}), NotPositiveDefinite);
}

TEST(UnscentedTransform, ExactForAffineMaps) {
  GaussianStream rng(41, GaussianStream::Test);
  for (int trial = 0; trial < 20; ++trial) {
    const GaussianBelief b{oracle::random_vector(3, rng), oracle::random_spd(3, rng)};
    Eigen::MatrixXd a(2, 3);
    for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = rng.normal();
    const Eigen::VectorXd off = oracle::random_vector(2, rng);
    const auto est = unscented_transform(b, UTParams{}, [&](const Eigen::VectorXd& x) -> Eigen::VectorXd { return a * x + off; });
    EXPECT_LE((est.mean - (a * b.mean + off)).norm(), 1e-10);
    EXPECT_LE((est.covariance - a * b.covariance * a.transpose()).norm(), 1e-10);
    EXPECT_LE((est.cross_covariance - b.covariance * a.transpose()).norm(), 1e-10);
  }
}

namespace {

struct LinearSetup {
  Trajectory truth;
  ObservationSet obs;
  SmoothingProblem problem;
};

LinearSetup linear_setup(std::uint64_t seed, double sp2, double sm2) {
  auto truth = generate_sine_truth(75);
  auto obs = observe(truth, std::sqrt(0.5), 1, seed);
  auto problem = build_linear_problem(obs, sp2, sm2);
  return {std::move(truth), std::move(obs), std::move(problem)};
}

oracle::LinearKalmanOutput kalman_oracle(const SmoothingProblem& p) {
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(3);
  const Eigen::MatrixXd g = p.process().jacobian(1, zero);
  const Eigen::MatrixXd h = p.measurement().jacobian(0, zero);
  return oracle::linear_kalman(g, h, p.process().covariances, p.measurement().covariances, p.measurement().observations,
                               p.process().prior_mean, p.process().covariances.front());
}

}  // namespace

TEST(Ukf, LinearMatchesKalmanFilter) {
  const auto s = linear_setup(3, 0.5, 5.0);
  const auto filtered = ukf_forward(s.problem, {s.problem.process().prior_mean, s.problem.process().covariances[0]});
  const auto ref = kalman_oracle(s.problem);
  ASSERT_EQ(filtered.size(), ref.filtered_mean.size());
  for (std::size_t k = 0; k < filtered.size(); ++k) {
    EXPECT_LE(oracle::relative_difference(filtered[k].updated.mean, ref.filtered_mean[k]), 1e-8) << k;
    EXPECT_LE((filtered[k].updated.covariance - ref.filtered_cov[k]).norm() / ref.filtered_cov[k].norm(), 1e-8) << k;
  }
}

TEST(Ukf, TinyMeasurementNoiseFollowsObservations) {
  // R = 1e-10 I with a measurement of the full state.
  const std::size_t steps = 10;
  ProcessModel proc;
  proc.transition = [](std::size_t, const Eigen::VectorXd& x) -> Eigen::VectorXd { return 0.9 * x; };
  proc.jacobian = [](std::size_t, const Eigen::VectorXd&) -> Eigen::MatrixXd { return 0.9 * Eigen::MatrixXd::Identity(2, 2); };
  proc.covariances.assign(steps, Eigen::MatrixXd::Identity(2, 2));
  proc.prior_mean = Eigen::VectorXd::Zero(2);
  MeasurementModel meas;
  meas.measure = [](std::size_t, const Eigen::VectorXd& x) -> Eigen::VectorXd { return x; };
  meas.jacobian = [](std::size_t, const Eigen::VectorXd&) -> Eigen::MatrixXd { return Eigen::MatrixXd::Identity(2, 2); };
  meas.covariances.assign(steps, 1e-10 * Eigen::MatrixXd::Identity(2, 2));
  GaussianStream rng(2, GaussianStream::Test);
  for (std::size_t k = 0; k < steps; ++k) meas.observations.push_back(oracle::random_vector(2, rng));
  const SmoothingProblem problem(proc, meas);
  const auto filtered = ukf_forward(problem, {proc.prior_mean, proc.covariances[0]});
  for (std::size_t k = 0; k < steps; ++k) {
    EXPECT_LE((filtered[k].updated.mean - meas.observations[k]).norm(), 1e-8);
  }
}

TEST(Ukf, NhoForwardPassCompletes) {
  NHOParams p;
  const auto obs = observe(generate_nho_truth(p, p.num_steps, 4), std::sqrt(0.5), p.obs_stride, 4);
  const auto problem = build_nho_problem(obs, p, 1.0, 1.0);
  const auto filtered = ukf_forward(problem, {problem.process().prior_mean, problem.process().covariances[0]});
  ASSERT_EQ(filtered.size(), obs.times.size());
  for (const auto& step : filtered) {
    EXPECT_TRUE(step.updated.mean.allFinite());
    EXPECT_EQ(Eigen::LLT<Eigen::MatrixXd>(step.updated.covariance).info(), Eigen::Success);
  }
}

TEST(Urts, LinearMatchesRtsAndGaussNewton) {
  const auto s = linear_setup(7, 0.2, 5.0);
  const GaussianBelief prior{s.problem.process().prior_mean, s.problem.process().covariances[0]};
  const auto filtered = ukf_forward(s.problem, prior);
  const auto smoothed = urts_backward(filtered, s.problem);
  const auto ref = kalman_oracle(s.problem);

  Eigen::VectorXd rts(225);
  for (std::size_t k = 0; k < 75; ++k) rts.segment(3 * static_cast<Eigen::Index>(k), 3) = ref.smoothed_mean[k];
  EXPECT_LE(oracle::relative_difference(smoothed.result.estimate.stacked(), rts), 1e-6);

  const auto oks = oks_smooth(s.problem, init_from_observations(s.obs));
  EXPECT_LE(oracle::relative_difference(smoothed.result.estimate.stacked(), oks.estimate.stacked()), 1e-6);
}

TEST(Urts, AccurateWhenNormalEquationsAreIllConditioned) {
  // Smallest process noise, largest measurement noise on the grid.
  const auto s = linear_setup(1, 0.01, 100.0);
  const auto uks = uks_smooth(s.problem);
  const Eigen::VectorXd ref = oracle::extended_linear_smoother(s.problem);
  EXPECT_LE(oracle::relative_difference(uks.estimate.stacked(), ref), 1e-6);
}

TEST(Urts, FinalStepEqualsFilter) {
  const auto s = linear_setup(8, 1.0, 1.0);
  const auto filtered = ukf_forward(s.problem, {s.problem.process().prior_mean, s.problem.process().covariances[0]});
  const auto smoothed = urts_backward(filtered, s.problem);
  EXPECT_EQ(smoothed.beliefs.back().mean, filtered.back().updated.mean);
  EXPECT_EQ(smoothed.beliefs.back().covariance, filtered.back().updated.covariance);
}

TEST(Urts, SmoothingNeverIncreasesUncertaintyOnLinearModel) {
  const auto s = linear_setup(9, 0.5, 5.0);
  const auto filtered = ukf_forward(s.problem, {s.problem.process().prior_mean, s.problem.process().covariances[0]});
  const auto smoothed = urts_backward(filtered, s.problem);
  for (std::size_t k = 0; k < filtered.size(); ++k) {
    EXPECT_LE(smoothed.beliefs[k].covariance.trace(), filtered[k].updated.covariance.trace() * (1.0 + 1e-12)) << k;
  }
}

TEST(Urts, RejectsMismatchedLength) {
  const auto s = linear_setup(1, 1.0, 1.0);
  auto filtered = ukf_forward(s.problem, {s.problem.process().prior_mean, s.problem.process().covariances[0]});
  filtered.pop_back();
  EXPECT_THROW(urts_backward(filtered, s.problem), DimensionMismatch);
}
