#include "nlsmooth/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <omp.h>

#include "nlsmooth/csv.hpp"
#include "nlsmooth/errors.hpp"
#include "nlsmooth/random.hpp"

namespace nlsmooth {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Exponents are snapped to 1e-10 so that 0.2-step grids print as -1.8, not
// -1.7999999999999998.
double snapped_exponent(double e) { return std::round(e * 1e10) / 1e10; }

}  // namespace

const char* to_string(SmootherKind k) {
  switch (k) {
    case SmootherKind::Eks: return "eks";
    case SmootherKind::Uks: return "uks";
    case SmootherKind::Oks: return "oks";
  }
  return "?";
}

SmootherKind parse_smoother(const std::string& s) {
  if (s == "eks") return SmootherKind::Eks;
  if (s == "uks") return SmootherKind::Uks;
  if (s == "oks") return SmootherKind::Oks;
  throw ConfigError("unknown smoother '" + s + "' (expected eks, uks, oks or all)");
}

std::vector<SmootherKind> parse_smoother_list(const std::string& s) {
  if (s == "all") return {kAllSmoothers.begin(), kAllSmoothers.end()};
  std::vector<SmootherKind> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = s.find(',', start);
    const auto kind = parse_smoother(s.substr(start, comma - start));
    if (std::find(out.begin(), out.end(), kind) == out.end()) out.push_back(kind);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

SmootherResult run_smoother(SmootherKind kind, const SmoothingProblem& problem, const StateSequence& init,
                            const SmootherSettings& settings) {
  switch (kind) {
    case SmootherKind::Eks: return eks_smooth(problem, init, settings.eks_line_search);
    case SmootherKind::Uks: return uks_smooth(problem, settings.ut);
    case SmootherKind::Oks: return oks_smooth(problem, init, settings.gn);
  }
  throw ConfigError("unknown smoother");
}

double relative_l2(std::span<const double> series, std::span<const double> truth) {
  if (series.size() != truth.size()) {
    throw DimensionMismatch("relative_l2: series has " + std::to_string(series.size()) + " samples, truth has " +
                            std::to_string(truth.size()));
  }
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const double d = series[i] - truth[i];
    num += d * d;
    den += truth[i] * truth[i];
  }
  if (den == 0.0) throw DegenerateTruth("relative_l2: truth has zero norm");
  return std::sqrt(num / den);
}

ParameterGrid::ParameterGrid(std::vector<double> sigma_m2_values, std::vector<double> sigma_p2_values)
    : m_(std::move(sigma_m2_values)), p_(std::move(sigma_p2_values)) {
  for (const auto* axis : {&m_, &p_}) {
    if (axis->empty()) throw ConfigError("parameter grid axes must be nonempty");
    for (std::size_t i = 0; i < axis->size(); ++i) {
      if (!((*axis)[i] > 0.0)) throw ConfigError("parameter grid values must be positive");
      if (i > 0 && !((*axis)[i] > (*axis)[i - 1])) throw ConfigError("parameter grid values must increase");
    }
  }
}

ParameterGrid ParameterGrid::log_spaced(double exp_min, double exp_max, double exp_step) {
  if (!(exp_step > 0.0) || !(exp_max >= exp_min)) {
    throw ConfigError("grid needs exp_step > 0 and exp_max >= exp_min");
  }
  std::vector<double> values;
  for (std::size_t i = 0;; ++i) {
    const double e = snapped_exponent(exp_min + static_cast<double>(i) * exp_step);
    if (e > exp_max + 1e-9) break;
    values.push_back(std::pow(10.0, e));
  }
  return ParameterGrid(values, values);
}

ParameterGrid ParameterGrid::from_spec(const GridSpec& spec) {
  if (!spec.sigma_m2_values.empty() || !spec.sigma_p2_values.empty()) {
    return ParameterGrid(spec.sigma_m2_values, spec.sigma_p2_values);
  }
  return log_spaced(spec.exp_min, spec.exp_max, spec.exp_step);
}

double GridSearchResult::average_spread() const {
  double lo = kInf, hi = -kInf;
  for (const auto& c : cells) {
    if (!c.ok) continue;
    lo = std::min(lo, c.average);
    hi = std::max(hi, c.average);
  }
  return hi >= lo ? hi - lo : kInf;
}

CellResult evaluate_cell(const SearchInputs& in, SmootherKind kind, double sigma_m2, double sigma_p2) {
  CellResult cell;
  cell.sigma_m2 = sigma_m2;
  cell.sigma_p2 = sigma_p2;
  try {
    const SmoothingProblem problem = in.build(sigma_p2, sigma_m2);
    const SmootherResult res = run_smoother(kind, problem, in.init, in.settings);
    if (!res.estimate.all_finite()) throw Error("smoother produced a non-finite estimate");
    for (std::size_t c = 0; c < 3; ++c) {
      const Eigen::VectorXd est = res.estimate.component(c);
      const Eigen::VectorXd tru = in.truth.component(c);
      cell.errors[c] = relative_l2({est.data(), static_cast<std::size_t>(est.size())},
                                   {tru.data(), static_cast<std::size_t>(tru.size())});
    }
    cell.average = (cell.errors[0] + cell.errors[1] + cell.errors[2]) / 3.0;
    cell.ok = true;
    cell.converged = res.converged;
    cell.iterations = res.iterations;
    for (std::size_t i = 1; i < res.objective_trace.size(); ++i) {
      if (res.objective_trace[i] > res.objective_trace[i - 1]) cell.monotone = false;
    }
  } catch (const Error& e) {
    cell.errors = {kInf, kInf, kInf};
    cell.average = kInf;
    cell.ok = false;
    cell.converged = false;
    cell.failure = e.what();
  }
  return cell;
}

void select_best(GridSearchResult& result) {
  result.best_component = {0, 0, 0};
  result.best_average = 0;
  for (std::size_t i = 1; i < result.cells.size(); ++i) {
    const CellResult& c = result.cells[i];
    for (std::size_t comp = 0; comp < 3; ++comp) {
      if (c.errors[comp] < result.cells[result.best_component[comp]].errors[comp]) result.best_component[comp] = i;
    }
    if (c.average < result.cells[result.best_average].average) result.best_average = i;
  }
}

GridSearchResult oracle_grid_search(const SearchInputs& in, const ParameterGrid& grid, SmootherKind kind,
                                    std::size_t workers) {
  GridSearchResult result;
  result.smoother = kind;
  result.cells.resize(grid.size());
  const auto count = static_cast<std::ptrdiff_t>(grid.size());
  const int threads = workers > 0 ? static_cast<int>(workers) : omp_get_max_threads();

#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    const auto cell = static_cast<std::size_t>(i);
    result.cells[cell] = evaluate_cell(in, kind, grid.sigma_m2(cell), grid.sigma_p2(cell));
  }
  select_best(result);
  return result;
}

GridSearchResult oracle_grid_search_serial(const SearchInputs& in, const ParameterGrid& grid, SmootherKind kind,
                                           std::span<const std::size_t> order) {
  GridSearchResult result;
  result.smoother = kind;
  result.cells.resize(grid.size());
  if (order.empty()) {
    for (std::size_t cell = 0; cell < grid.size(); ++cell) {
      result.cells[cell] = evaluate_cell(in, kind, grid.sigma_m2(cell), grid.sigma_p2(cell));
    }
  } else {
    if (order.size() != grid.size()) throw DimensionMismatch("evaluation order must cover every grid cell");
    for (const std::size_t cell : order) {
      result.cells.at(cell) = evaluate_cell(in, kind, grid.sigma_m2(cell), grid.sigma_p2(cell));
    }
  }
  select_best(result);
  return result;
}

ProblemFactory problem_factory(SystemKind system, const ObservationSet& obs, const NHOParams& nho) {
  if (system == SystemKind::Sine) {
    return [obs](double sp2, double sm2) { return build_linear_problem(obs, sp2, sm2); };
  }
  return [obs, nho](double sp2, double sm2) { return build_nho_problem(obs, nho, sp2, sm2); };
}

BenchmarkInstance make_instance(const ExperimentConfig& cfg) {
  BenchmarkInstance inst;
  inst.system = cfg.system;
  inst.nho = cfg.nho;
  const double sigma_m = std::sqrt(cfg.sigma_m2_true);
  if (cfg.system == SystemKind::Sine) {
    inst.truth = generate_sine_truth(cfg.sine_points);
    inst.observations = observe(inst.truth, sigma_m, 1, cfg.seed);
  } else {
    inst.truth = generate_nho_truth(cfg.nho, cfg.nho.num_steps, cfg.seed);
    if (!inst.truth.states.all_finite()) {
      throw Error("NHO truth diverged; shorten nho.num_steps or lower nho.sigma_p_true");
    }
    inst.observations = observe(inst.truth, sigma_m, cfg.nho.obs_stride, cfg.seed);
  }
  inst.truth_at_obs = truth_at_observations(inst.truth, inst.observations);
  return inst;
}

SearchInputs make_search_inputs(const BenchmarkInstance& inst, const ExperimentConfig& cfg) {
  SearchInputs in;
  in.build = problem_factory(inst.system, inst.observations, inst.nho);
  in.truth = inst.truth_at_obs;
  if (cfg.init_mode == InitMode::Observations) {
    in.init = init_from_observations(inst.observations);
  } else {
    in.init = inst.truth_at_obs;
    GaussianStream noise(cfg.seed, GaussianStream::Initialization);
    for (Eigen::Index i = 0; i < in.init.stacked().size(); ++i) {
      in.init.stacked()(i) += cfg.init_perturbation * noise.normal();
    }
  }
  in.settings.gn = cfg.gn;
  in.settings.ut = cfg.ut;
  in.settings.eks_line_search = cfg.eks_line_search;
  return in;
}

ExperimentOutput run_experiment(const ExperimentConfig& cfg, std::span<const SmootherKind> smoothers) {
  ExperimentOutput out{make_instance(cfg), ParameterGrid::from_spec(cfg.grid), {}};
  const SearchInputs in = make_search_inputs(out.instance, cfg);
  for (const SmootherKind kind : smoothers) {
    out.results.push_back(oracle_grid_search(in, out.grid, kind, cfg.workers));
  }
  return out;
}

namespace {

std::string exponent_text(double v) { return csv::format_double(snapped_exponent(std::log10(v))); }

nlohmann::json cell_json(const CellResult& c) {
  return {{"sigma_m2", c.sigma_m2},   {"sigma_p2", c.sigma_p2}, {"err_ddx", c.errors[0]},
          {"err_dx", c.errors[1]},    {"err_x", c.errors[2]},   {"err_avg", c.average},
          {"iterations", c.iterations}, {"converged", c.converged}};
}

}  // namespace

std::vector<std::filesystem::path> emit_results(const std::filesystem::path& dir, const ExperimentOutput& out,
                                                const ExperimentConfig& cfg, const RunMetadata& meta) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
  std::vector<std::filesystem::path> written;
  const ParameterGrid& grid = out.grid;

  std::vector<std::string> rows{
      "smoother,log10_sigma_m2,log10_sigma_p2,sigma_m2,sigma_p2,err_ddx,err_dx,err_x,err_avg,ok,converged,iterations"};
  for (const auto& res : out.results) {
    for (const auto& c : res.cells) {
      rows.push_back(csv::join({to_string(res.smoother), exponent_text(c.sigma_m2), exponent_text(c.sigma_p2),
                                csv::format_double(c.sigma_m2), csv::format_double(c.sigma_p2),
                                csv::format_double(c.errors[0]), csv::format_double(c.errors[1]),
                                csv::format_double(c.errors[2]), csv::format_double(c.average), c.ok ? "1" : "0",
                                c.converged ? "1" : "0", std::to_string(c.iterations)}));
    }
  }
  written.push_back(dir / "grid.csv");
  csv::write_lines(written.back(), rows);

  // Heatmaps: rows follow sigma_m2, columns sigma_p2, both on log10 axes.
  for (const auto& res : out.results) {
    for (std::size_t comp = 0; comp <= 3; ++comp) {
      const std::string name = comp < 3 ? kComponentNames[comp] : "avg";
      std::vector<std::string> header{"log10_sigma_m2\\log10_sigma_p2"};
      for (double p : grid.sigma_p2_values()) header.push_back(exponent_text(p));
      std::vector<std::string> lines{csv::join(header)};
      for (std::size_t im = 0; im < grid.sigma_m2_values().size(); ++im) {
        std::vector<std::string> line{exponent_text(grid.sigma_m2_values()[im])};
        for (std::size_t ip = 0; ip < grid.sigma_p2_values().size(); ++ip) {
          const CellResult& c = res.cells[im * grid.sigma_p2_values().size() + ip];
          line.push_back(csv::format_double(comp < 3 ? c.errors[comp] : c.average));
        }
        lines.push_back(csv::join(line));
      }
      written.push_back(dir / ("heatmap_" + std::string(to_string(res.smoother)) + "_" + name + ".csv"));
      csv::write_lines(written.back(), lines);
    }
  }

  written.push_back(dir / "truth.csv");
  csv::write_truth(written.back(), out.instance.truth);
  written.push_back(dir / "observations.csv");
  csv::write_observations(written.back(), out.instance.observations);

  // Best-average cell of each smoother, rerun to recover its trajectory.
  const SearchInputs in = make_search_inputs(out.instance, cfg);
  const ObservationSet& obs = out.instance.observations;
  for (const auto& res : out.results) {
    const CellResult& best = res.best_average_cell();
    std::vector<std::string> lines{"time,true_ddx,true_dx,true_x,z_dx,z_x,est_ddx,est_dx,est_x"};
    std::optional<StateSequence> est;
    if (best.ok) {
      est = run_smoother(res.smoother, in.build(best.sigma_p2, best.sigma_m2), in.init, in.settings).estimate;
    }
    for (std::size_t k = 0; k < obs.times.size(); ++k) {
      const auto t = in.truth.block(k);
      std::vector<std::string> line{csv::format_double(obs.times[k]), csv::format_double(t(0)),
                                    csv::format_double(t(1)), csv::format_double(t(2)),
                                    csv::format_double(obs.measurements[k](0)),
                                    csv::format_double(obs.measurements[k](1))};
      for (Eigen::Index c = 0; c < 3; ++c) {
        line.push_back(est ? csv::format_double(est->block(k)(c)) : "nan");
      }
      lines.push_back(csv::join(line));
    }
    written.push_back(dir / ("trajectory_" + std::string(to_string(res.smoother)) + ".csv"));
    csv::write_lines(written.back(), lines);
  }

  nlohmann::json manifest;
  manifest["tool"] = "nlsmooth";
  manifest["version"] = NLSMOOTH_VERSION;
  manifest["config"] = config_to_json(cfg);
  manifest["seeds"] = {{"experiment", cfg.seed},
                       {"trajectory_stream", static_cast<std::uint64_t>(GaussianStream::Trajectory)},
                       {"observation_stream", static_cast<std::uint64_t>(GaussianStream::Observations)},
                       {"initialization_stream", static_cast<std::uint64_t>(GaussianStream::Initialization)}};
  manifest["grid"] = {{"sigma_m2_values", grid.sigma_m2_values()}, {"sigma_p2_values", grid.sigma_p2_values()}};
  manifest["num_observations"] = obs.times.size();
  nlohmann::json best = nlohmann::json::object();
  for (const auto& res : out.results) {
    nlohmann::json b;
    for (std::size_t comp = 0; comp < 3; ++comp) b[kComponentNames[comp]] = cell_json(res.best_cell(comp));
    b["avg"] = cell_json(res.best_average_cell());
    b["failed_cells"] = std::count_if(res.cells.begin(), res.cells.end(), [](const CellResult& c) { return !c.ok; });
    best[to_string(res.smoother)] = b;
  }
  manifest["best"] = best;
  nlohmann::json extra = nlohmann::json::object();
  for (const auto& [k, v] : meta.entries) extra[k] = v;
  manifest["metadata"] = extra;
  written.push_back(dir / "manifest.json");
  csv::write_lines(written.back(), {manifest.dump(2)});
  return written;
}

}  // namespace nlsmooth
