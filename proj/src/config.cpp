#include "nlsmooth/config.hpp"

#include <fstream>
#include <set>

#include "nlsmooth/errors.hpp"

namespace nlsmooth {

using nlohmann::json;

const char* to_string(SystemKind s) { return s == SystemKind::Sine ? "sine" : "nho"; }

SystemKind parse_system(const std::string& s) {
  if (s == "sine") return SystemKind::Sine;
  if (s == "nho") return SystemKind::Nho;
  throw ConfigError("unknown system '" + s + "' (expected sine or nho)");
}

namespace {

void reject_unknown(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  std::set<std::string> names(allowed.begin(), allowed.end());
  for (const auto& [key, value] : j.items()) {
    if (!names.count(key)) throw ConfigError("unknown config key '" + where + key + "'");
  }
}

template <typename T>
void read(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError("bad value for '" + where + key + "': " + e.what());
  }
}

}  // namespace

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig c;
  reject_unknown(j, "", {"system", "seed", "sigma_m2_true", "sine", "nho", "grid", "ut", "gn", "init",
                         "workers", "model"});
  if (j.contains("system")) c.system = parse_system(j.at("system").get<std::string>());
  read(j, "seed", c.seed, "");
  read(j, "sigma_m2_true", c.sigma_m2_true, "");
  read(j, "workers", c.workers, "");

  if (j.contains("sine")) {
    const auto& s = j.at("sine");
    reject_unknown(s, "sine.", {"num_points"});
    read(s, "num_points", c.sine_points, "sine.");
  }
  if (j.contains("nho")) {
    const auto& s = j.at("nho");
    reject_unknown(s, "nho.", {"omega0", "beta_damp", "k2", "k3", "sigma_p_true", "dt_truth", "obs_stride",
                               "num_steps", "initial_state"});
    read(s, "omega0", c.nho.omega0, "nho.");
    read(s, "beta_damp", c.nho.beta_damp, "nho.");
    read(s, "k2", c.nho.k2, "nho.");
    read(s, "k3", c.nho.k3, "nho.");
    read(s, "sigma_p_true", c.nho.sigma_p_true, "nho.");
    read(s, "dt_truth", c.nho.dt_truth, "nho.");
    read(s, "obs_stride", c.nho.obs_stride, "nho.");
    read(s, "num_steps", c.nho.num_steps, "nho.");
    if (s.contains("initial_state")) {
      std::vector<double> v;
      read(s, "initial_state", v, "nho.");
      if (v.size() != 3) throw ConfigError("nho.initial_state needs 3 entries [ddx, dx, x]");
      c.nho.initial_state = Eigen::Vector3d(v[0], v[1], v[2]);
    }
  }
  if (j.contains("grid")) {
    const auto& s = j.at("grid");
    reject_unknown(s, "grid.", {"exp_min", "exp_max", "exp_step", "sigma_m2_values", "sigma_p2_values"});
    read(s, "exp_min", c.grid.exp_min, "grid.");
    read(s, "exp_max", c.grid.exp_max, "grid.");
    read(s, "exp_step", c.grid.exp_step, "grid.");
    read(s, "sigma_m2_values", c.grid.sigma_m2_values, "grid.");
    read(s, "sigma_p2_values", c.grid.sigma_p2_values, "grid.");
  }
  if (j.contains("ut")) {
    const auto& s = j.at("ut");
    reject_unknown(s, "ut.", {"alpha", "beta", "kappa"});
    read(s, "alpha", c.ut.alpha, "ut.");
    read(s, "beta", c.ut.beta, "ut.");
    read(s, "kappa", c.ut.kappa, "ut.");
  }
  if (j.contains("gn")) {
    const auto& s = j.at("gn");
    reject_unknown(s, "gn.", {"max_iterations", "objective_tolerance", "armijo_c", "backtrack_factor",
                              "max_backtracks", "eks_line_search"});
    read(s, "max_iterations", c.gn.max_iterations, "gn.");
    read(s, "objective_tolerance", c.gn.objective_tolerance, "gn.");
    read(s, "armijo_c", c.gn.armijo_c, "gn.");
    read(s, "backtrack_factor", c.gn.backtrack_factor, "gn.");
    read(s, "max_backtracks", c.gn.max_backtracks, "gn.");
    read(s, "eks_line_search", c.eks_line_search, "gn.");
  }
  if (j.contains("init")) {
    const auto& s = j.at("init");
    reject_unknown(s, "init.", {"mode", "perturbation"});
    if (s.contains("mode")) {
      const auto mode = s.at("mode").get<std::string>();
      if (mode == "observations") {
        c.init_mode = InitMode::Observations;
      } else if (mode == "truth_perturbed") {
        c.init_mode = InitMode::TruthPerturbed;
      } else {
        throw ConfigError("init.mode must be 'observations' or 'truth_perturbed'");
      }
    }
    read(s, "perturbation", c.init_perturbation, "init.");
  }
  if (j.contains("model")) {
    const auto& s = j.at("model");
    reject_unknown(s, "model.", {"sigma_p2", "sigma_m2"});
    read(s, "sigma_p2", c.sigma_p2, "model.");
    read(s, "sigma_m2", c.sigma_m2, "model.");
  }

  c.nho.validate();
  c.gn.validate();
  if (!(c.sigma_m2_true >= 0.0)) throw ConfigError("sigma_m2_true must be nonnegative");
  if (c.sine_points < 2) throw ConfigError("sine.num_points must be at least 2");
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

json config_to_json(const ExperimentConfig& c) {
  json j;
  j["system"] = to_string(c.system);
  j["seed"] = c.seed;
  j["sigma_m2_true"] = c.sigma_m2_true;
  j["workers"] = c.workers;
  j["sine"] = {{"num_points", c.sine_points}};
  j["nho"] = {{"omega0", c.nho.omega0},
              {"beta_damp", c.nho.beta_damp},
              {"k2", c.nho.k2},
              {"k3", c.nho.k3},
              {"sigma_p_true", c.nho.sigma_p_true},
              {"dt_truth", c.nho.dt_truth},
              {"obs_stride", c.nho.obs_stride},
              {"num_steps", c.nho.num_steps},
              {"initial_state", {c.nho.initial_state(0), c.nho.initial_state(1), c.nho.initial_state(2)}}};
  j["grid"] = {{"exp_min", c.grid.exp_min},
               {"exp_max", c.grid.exp_max},
               {"exp_step", c.grid.exp_step},
               {"sigma_m2_values", c.grid.sigma_m2_values},
               {"sigma_p2_values", c.grid.sigma_p2_values}};
  j["ut"] = {{"alpha", c.ut.alpha}, {"beta", c.ut.beta}, {"kappa", c.ut.kappa}};
  j["gn"] = {{"max_iterations", c.gn.max_iterations},
             {"objective_tolerance", c.gn.objective_tolerance},
             {"armijo_c", c.gn.armijo_c},
             {"backtrack_factor", c.gn.backtrack_factor},
             {"max_backtracks", c.gn.max_backtracks},
             {"eks_line_search", c.eks_line_search}};
  j["init"] = {{"mode", c.init_mode == InitMode::Observations ? "observations" : "truth_perturbed"},
               {"perturbation", c.init_perturbation}};
  j["model"] = {{"sigma_p2", c.sigma_p2}, {"sigma_m2", c.sigma_m2}};
  return j;
}

}  // namespace nlsmooth
