#include <cmath>

#include <gtest/gtest.h>

#include "nlsmooth/benchmarks.hpp"
#include "nlsmooth/errors.hpp"
#include "nlsmooth/gn_smoother.hpp"
#include "oracles.hpp"

using namespace nlsmooth;

namespace {

struct SineCase {
  ObservationSet obs;
  SmoothingProblem problem;
};

SineCase sine_case(std::uint64_t seed, double sp2 = 0.2, double sm2 = 5.0) {
  auto obs = observe(generate_sine_truth(75), std::sqrt(0.5), 1, seed);
  auto problem = build_linear_problem(obs, sp2, sm2);
  return {std::move(obs), std::move(problem)};
}

ObservationSet nho_obs(std::uint64_t seed, double sigma_m) {
  NHOParams p;
  return observe(generate_nho_truth(p, p.num_steps, seed), sigma_m, p.obs_stride, seed);
}

bool non_increasing(const std::vector<double>& trace) {
  for (std::size_t i = 1; i < trace.size(); ++i) {
    if (trace[i] > trace[i - 1]) return false;
  }
  return true;
}

}  // namespace

TEST(Gradient, ScalarHandComputation) {
  ProcessModel proc;
  proc.transition = [](std::size_t, const Eigen::VectorXd&) -> Eigen::VectorXd { return Eigen::VectorXd::Zero(1); };
  proc.jacobian = [](std::size_t, const Eigen::VectorXd&) -> Eigen::MatrixXd { return Eigen::MatrixXd::Zero(1, 1); };
  proc.covariances = {Eigen::MatrixXd::Identity(1, 1)};
  proc.prior_mean = Eigen::VectorXd::Zero(1);
  MeasurementModel meas;
  meas.measure = [](std::size_t, const Eigen::VectorXd& x) -> Eigen::VectorXd { return x; };
  meas.jacobian = [](std::size_t, const Eigen::VectorXd&) -> Eigen::MatrixXd { return Eigen::MatrixXd::Identity(1, 1); };
  meas.covariances = {Eigen::MatrixXd::Identity(1, 1)};
  meas.observations = {Eigen::VectorXd::Constant(1, 2.0)};
  const SmoothingProblem p(std::move(proc), std::move(meas));
  EXPECT_DOUBLE_EQ(gradient(p, StateSequence(1, 1))(0), -2.0);
}

TEST(Gradient, ZeroAtZeroResidual) {
  const NHOParams params;
  ObservationSet obs;
  StateSequence x(3, 15);
  Eigen::Vector3d s(0.0, 0.2, 0.1);
  for (std::size_t k = 0; k < 15; ++k) {
    x.block(k) = s;
    obs.times.push_back(0.06 * static_cast<double>(k));
    obs.measurements.push_back(observation_matrix() * s);
    s = nho_transition(params, 0.06, s);
  }
  const auto problem = build_nho_problem(obs, params, 1.0, 1.0);
  EXPECT_LE(gradient(problem, x).norm(), 1e-12);
}

TEST(Gradient, MatchesFiniteDifferencesOfObjective) {
  const auto obs = nho_obs(21, std::sqrt(0.5));
  const auto problem = build_nho_problem(obs, NHOParams{}, 1.0, 0.1);
  GaussianStream rng(21, GaussianStream::Test);
  StateSequence x(3, problem.num_steps());
  for (Eigen::Index i = 0; i < x.stacked().size(); ++i) x.stacked()(i) = 0.3 * rng.normal();

  const auto phi = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
    return Eigen::VectorXd::Constant(1, evaluate_objective(problem, StateSequence(3, v)));
  };
  const Eigen::VectorXd fd = finite_difference_jacobian(phi, x.stacked(), 1e-6).transpose();
  const Eigen::VectorXd g = gradient(problem, x);
  EXPECT_LE((g - fd).norm() / fd.norm(), 1e-5);
}

TEST(Oks, LinearConvergesInOneFullStep) {
  const auto c = sine_case(1);
  GaussianStream rng(1, GaussianStream::Test);
  StateSequence init(3, 75);
  for (Eigen::Index i = 0; i < init.stacked().size(); ++i) init.stacked()(i) = rng.normal();

  const auto res = oks_smooth(c.problem, init);
  EXPECT_TRUE(res.converged);
  EXPECT_EQ(res.status, SmootherStatus::Converged);
  EXPECT_EQ(res.iterations, 1u);
  ASSERT_EQ(res.objective_trace.size(), 2u);
  const double tol = oracle::solve_tolerance(assemble_normal_system(c.problem, init).matrix.to_dense());
  EXPECT_LE(oracle::relative_difference(res.estimate.stacked(), oracle::dense_linear_smoother(c.problem)), tol);
}

TEST(Oks, StationaryStartStaysPut) {
  const auto c = sine_case(2);
  const auto first = oks_smooth(c.problem, init_from_observations(c.obs));
  const auto second = oks_smooth(c.problem, first.estimate);
  EXPECT_TRUE(second.converged);
  EXPECT_EQ(second.iterations, 0u);
  EXPECT_NEAR(second.objective_trace.back(), first.objective_trace.back(), 1e-12 * first.objective_trace.back());
  EXPECT_EQ(second.estimate.stacked(), first.estimate.stacked());
}

TEST(Oks, LinearEqualsEks) {
  for (std::uint64_t seed : {3u, 4u, 5u}) {
    const auto c = sine_case(seed, 0.5, 25.0);
    const auto init = init_from_observations(c.obs);
    const auto oks = oks_smooth(c.problem, init);
    const auto eks = eks_smooth(c.problem, init);
    EXPECT_LE(oracle::relative_difference(oks.estimate.stacked(), eks.estimate.stacked()), 1e-12);
  }
}

TEST(Oks, SingleIterationWithoutLineSearchIsEks) {
  const auto obs = nho_obs(5, std::sqrt(0.5));
  const auto problem = build_nho_problem(obs, NHOParams{}, 1.0, 0.025);
  const auto init = init_from_observations(obs);
  GNOptions opts;
  opts.max_iterations = 1;
  opts.line_search = false;
  const auto a = oks_smooth(problem, init, opts);
  const auto b = eks_smooth(problem, init);
  EXPECT_EQ(a.estimate.stacked(), b.estimate.stacked());
  EXPECT_EQ(a.objective_trace, b.objective_trace);
}

TEST(Oks, MonotoneDescentOnNho) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto obs = nho_obs(seed, std::sqrt(0.5));
    for (double sm2 : {0.01, 0.1, 1.0}) {
      for (double sp2 : {0.1, 1.0, 100.0}) {
        const auto problem = build_nho_problem(obs, NHOParams{}, sp2, sm2);
        const auto res = oks_smooth(problem, init_from_observations(obs));
        EXPECT_TRUE(non_increasing(res.objective_trace)) << seed << " " << sm2 << " " << sp2;
        EXPECT_LE(res.objective_trace.back(), res.objective_trace.front());
      }
    }
  }
}

TEST(Oks, GaussNewtonDirectionDescends) {
  const auto obs = nho_obs(8, std::sqrt(0.5));
  const auto problem = build_nho_problem(obs, NHOParams{}, 1.0, 0.05);
  GaussianStream rng(8, GaussianStream::Test);
  for (int trial = 0; trial < 20; ++trial) {
    StateSequence x(3, problem.num_steps());
    for (Eigen::Index i = 0; i < x.stacked().size(); ++i) x.stacked()(i) = 0.5 * rng.normal();
    const auto sys = assemble_normal_system(problem, x);
    const Eigen::VectorXd d = solve(factor(sys.matrix), sys.rhs) - x.stacked();
    EXPECT_LT(gradient(problem, x).dot(d), 0.0);
  }
}

TEST(Oks, MultipleIterationsBeatOneOnNho) {
  // With moderate noise the converged MAP estimate fits the objective at
  // least as well as the one-step estimate.
  const auto obs = nho_obs(6, 0.1);
  const auto problem = build_nho_problem(obs, NHOParams{}, 1.0, 0.01);
  const auto init = init_from_observations(obs);
  const auto oks = oks_smooth(problem, init);
  const auto eks = eks_smooth(problem, init);
  EXPECT_GT(oks.iterations, 1u);
  EXPECT_LT(oks.objective_trace.back(), evaluate_objective(problem, eks.estimate));
}

TEST(Eks, ZeroNoiseTruthIsFixedPoint) {
  NHOParams p;
  p.sigma_p_true = 0.0;
  const auto truth = generate_nho_truth(p, 40, 1);
  auto obs = observe(truth, 0.0, 1, 1);
  // Observed every truth step, so the model spacing equals the truth spacing.
  const auto problem = build_nho_problem(obs, p, 1.0, 1.0);
  const auto x = truth_at_observations(truth, obs);
  const auto res = eks_smooth(problem, x);
  EXPECT_LE((res.estimate.stacked() - x.stacked()).norm(), 1e-12);
}

TEST(Eks, LineSearchVariantNeverIncreases) {
  const auto obs = nho_obs(9, std::sqrt(0.5));
  const auto problem = build_nho_problem(obs, NHOParams{}, 100.0, 0.01);
  const auto res = eks_smooth(problem, init_from_observations(obs), true);
  EXPECT_TRUE(non_increasing(res.objective_trace));
}

TEST(Options, Validation) {
  GNOptions o;
  o.armijo_c = 1.0;
  EXPECT_THROW(o.validate(), ConfigError);
  o = GNOptions{};
  o.backtrack_factor = 0.0;
  EXPECT_THROW(o.validate(), ConfigError);
  o = GNOptions{};
  o.max_iterations = 0;
  EXPECT_THROW(o.validate(), ConfigError);
}

TEST(Oks, LineSearchFailureReturnsBestIterate) {
  // Near-unit Armijo constant and one backtrack: a nonlinear step cannot
  // realise its predicted decrease.
  const auto obs = nho_obs(10, std::sqrt(0.5));
  const auto problem = build_nho_problem(obs, NHOParams{}, 100.0, 0.01);
  GNOptions opts;
  opts.max_backtracks = 1;
  opts.backtrack_factor = 0.5;
  opts.armijo_c = 0.999;
  const auto init = init_from_observations(obs);
  const auto res = oks_smooth(problem, init, opts);
  EXPECT_EQ(res.status, SmootherStatus::LineSearchFailed);
  EXPECT_FALSE(res.converged);
  EXPECT_LE(res.objective_trace.back(), res.objective_trace.front());
  EXPECT_EQ(res.objective_trace.back(), evaluate_objective(problem, res.estimate));
  EXPECT_TRUE(non_increasing(res.objective_trace));
}
