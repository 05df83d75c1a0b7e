// Timing: serial vs OpenMP oracle grid search, block vs dense solve.
#include <chrono>
#include <cstdio>
#include <cstdlib>

#include <omp.h>

#include "nlsmooth/blocktridiag.hpp"
#include "nlsmooth/harness.hpp"

using namespace nlsmooth;

namespace {

template <class F>
double seconds(F&& f, int reps = 1) {
  const auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < reps; ++i) f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() / reps;
}

}  // namespace

int main(int argc, char** argv) {
  const std::size_t workers = argc > 1 ? static_cast<std::size_t>(std::atoi(argv[1])) : 0;
  std::printf("omp max threads: %d\n", omp_get_max_threads());

  for (auto system : {SystemKind::Sine, SystemKind::Nho}) {
    ExperimentConfig cfg;
    cfg.system = system;
    cfg.seed = 1;
    const auto inst = make_instance(cfg);
    const auto in = make_search_inputs(inst, cfg);
    const auto grid = ParameterGrid::from_spec(cfg.grid);
    for (auto kind : kAllSmoothers) {
      GridSearchResult a, b;
      const double ts = seconds([&] { a = oracle_grid_search_serial(in, grid, kind); });
      const double tp = seconds([&] { b = oracle_grid_search(in, grid, kind, workers); });
      std::printf("%-4s %-3s grid %zu cells: serial %.3f s, parallel %.3f s, speedup %.2f, identical %s\n",
                  to_string(system), to_string(kind), grid.size(), ts, tp, ts / tp, a == b ? "yes" : "no");
    }
  }

  ExperimentConfig cfg;
  cfg.system = SystemKind::Sine;
  const auto inst = make_instance(cfg);
  const auto problem = build_linear_problem(inst.observations, 1.0, 1.0);
  const auto sys = assemble_normal_system(problem, init_from_observations(inst.observations));
  const Eigen::MatrixXd dense = sys.matrix.to_dense();
  Eigen::VectorXd xb, xd;
  const double tb = seconds([&] { xb = solve(factor(sys.matrix), sys.rhs); }, 200);
  const double td = seconds([&] { xd = dense.llt().solve(sys.rhs); }, 200);
  std::printf("solve %zu x %zu: block %.2e s, dense %.2e s, ratio %.1f, rel diff %.2e\n", static_cast<std::size_t>(dense.rows()),
              static_cast<std::size_t>(dense.cols()), tb, td, td / tb, (xb - xd).norm() / xd.norm());
  return 0;
}
