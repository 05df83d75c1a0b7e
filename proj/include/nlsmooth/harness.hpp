#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nlsmooth/benchmarks.hpp"
#include "nlsmooth/config.hpp"
#include "nlsmooth/gn_smoother.hpp"
#include "nlsmooth/unscented.hpp"

namespace nlsmooth {

enum class SmootherKind { Eks, Uks, Oks };
inline constexpr std::array<SmootherKind, 3> kAllSmoothers = {SmootherKind::Eks, SmootherKind::Uks, SmootherKind::Oks};

const char* to_string(SmootherKind k);
SmootherKind parse_smoother(const std::string& s);
std::vector<SmootherKind> parse_smoother_list(const std::string& s);  // comma separated, or "all"

struct SmootherSettings {
  GNOptions gn;
  UTParams ut;
  bool eks_line_search = false;
};

SmootherResult run_smoother(SmootherKind kind, const SmoothingProblem& problem, const StateSequence& init,
                            const SmootherSettings& settings);

/// sqrt(sum (s_i - g_i)^2 / sum g_j^2). Throws DegenerateTruth for a zero truth.
double relative_l2(std::span<const double> series, std::span<const double> truth);

class ParameterGrid {
 public:
  ParameterGrid(std::vector<double> sigma_m2_values, std::vector<double> sigma_p2_values);
  // 10^e for e = exp_min, exp_min + step, ... <= exp_max, shared by both axes.
  static ParameterGrid log_spaced(double exp_min, double exp_max, double exp_step);
  static ParameterGrid from_spec(const GridSpec& spec);

  const std::vector<double>& sigma_m2_values() const { return m_; }
  const std::vector<double>& sigma_p2_values() const { return p_; }
  std::size_t size() const { return m_.size() * p_.size(); }
  // Cells are numbered row-major: index = i_m * |p| + i_p.
  double sigma_m2(std::size_t cell) const { return m_[cell / p_.size()]; }
  double sigma_p2(std::size_t cell) const { return p_[cell % p_.size()]; }

 private:
  std::vector<double> m_;
  std::vector<double> p_;
};

struct CellResult {
  double sigma_m2 = 0.0;
  double sigma_p2 = 0.0;
  std::array<double, 3> errors{};  // ddx, dx, x
  double average = 0.0;
  bool ok = false;  // false: the smoother threw; errors are +inf
  bool converged = false;
  std::size_t iterations = 0;
  bool monotone = true;  // objective trace non-increasing
  std::string failure;

  bool operator==(const CellResult&) const = default;
};

struct GridSearchResult {
  SmootherKind smoother = SmootherKind::Oks;
  std::vector<CellResult> cells;
  std::array<std::size_t, 3> best_component{};
  std::size_t best_average = 0;

  const CellResult& best_cell(std::size_t component) const { return cells[best_component[component]]; }
  const CellResult& best_average_cell() const { return cells[best_average]; }
  // max - min of the average error over cells that ran.
  double average_spread() const;

  bool operator==(const GridSearchResult&) const = default;
};

using ProblemFactory = std::function<SmoothingProblem(double sigma_p2, double sigma_m2)>;

struct SearchInputs {
  ProblemFactory build;
  StateSequence truth;  // on the observation grid
  StateSequence init;
  SmootherSettings settings;
};

CellResult evaluate_cell(const SearchInputs& in, SmootherKind kind, double sigma_m2, double sigma_p2);

/// OpenMP over grid cells; each cell writes only its own slot, so the result
/// does not depend on scheduling. workers = 0 uses the OpenMP default.
GridSearchResult oracle_grid_search(const SearchInputs& in, const ParameterGrid& grid, SmootherKind kind,
                                    std::size_t workers = 0);

/// Single-threaded reference. `order`, when given, is the evaluation order of
/// the cell indices.
GridSearchResult oracle_grid_search_serial(const SearchInputs& in, const ParameterGrid& grid, SmootherKind kind,
                                           std::span<const std::size_t> order = {});

/// Fills best_component / best_average from the stored cells.
void select_best(GridSearchResult& result);

/// A generated benchmark: truth, observations and everything needed to
/// build problems on the observation grid.
struct BenchmarkInstance {
  SystemKind system = SystemKind::Nho;
  Trajectory truth;
  ObservationSet observations;
  StateSequence truth_at_obs;
  NHOParams nho;
};

BenchmarkInstance make_instance(const ExperimentConfig& cfg);
SearchInputs make_search_inputs(const BenchmarkInstance& inst, const ExperimentConfig& cfg);
ProblemFactory problem_factory(SystemKind system, const ObservationSet& obs, const NHOParams& nho);

struct ExperimentOutput {
  BenchmarkInstance instance;
  ParameterGrid grid;
  std::vector<GridSearchResult> results;
};

ExperimentOutput run_experiment(const ExperimentConfig& cfg, std::span<const SmootherKind> smoothers);

struct RunMetadata {
  std::vector<std::pair<std::string, std::string>> entries;
};

/// Writes grid.csv, heatmap_<smoother>_<component>.csv, truth.csv,
/// observations.csv, trajectory_<smoother>.csv and manifest.json into `dir`.
/// Returns the written paths.
std::vector<std::filesystem::path> emit_results(const std::filesystem::path& dir, const ExperimentOutput& out,
                                                const ExperimentConfig& cfg, const RunMetadata& meta = {});

}  // namespace nlsmooth
