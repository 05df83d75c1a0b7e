#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nlsmooth/benchmarks.hpp"
#include "nlsmooth/gn_smoother.hpp"
#include "nlsmooth/unscented.hpp"

namespace nlsmooth {

enum class SystemKind { Sine, Nho };
enum class InitMode { Observations, TruthPerturbed };

struct GridSpec {
  double exp_min = -2.0;
  double exp_max = 2.0;
  double exp_step = 0.2;
  // Explicit lists override the exponent range when non-empty.
  std::vector<double> sigma_m2_values;
  std::vector<double> sigma_p2_values;
};

struct ExperimentConfig {
  SystemKind system = SystemKind::Nho;
  std::uint64_t seed = 0;
  double sigma_m2_true = 0.5;  // variance of the simulated measurement noise
  std::size_t sine_points = 75;
  NHOParams nho;
  GridSpec grid;
  UTParams ut;
  GNOptions gn;
  bool eks_line_search = false;
  InitMode init_mode = InitMode::Observations;
  double init_perturbation = 0.0;  // std added to the truth in TruthPerturbed mode
  std::size_t workers = 0;         // 0: OpenMP default
  // Single-run scales used by `solve`.
  double sigma_p2 = 1.0;
  double sigma_m2 = 1.0;
};

const char* to_string(SystemKind s);
SystemKind parse_system(const std::string& s);

/// Reads a JSON object; missing keys keep their defaults, unknown keys are
/// rejected with ConfigError naming the offending path.
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);
nlohmann::json config_to_json(const ExperimentConfig& c);

}  // namespace nlsmooth
