#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "nlsmooth/benchmarks.hpp"

namespace nlsmooth::csv {

// 17 significant digits, %g style.
std::string format_double(double v);

std::string join(const std::vector<std::string>& cells);

void write_lines(const std::filesystem::path& path, const std::vector<std::string>& lines);

// time,ddx,dx,x
void write_truth(const std::filesystem::path& path, const Trajectory& truth);
// time,z_dx,z_x
void write_observations(const std::filesystem::path& path, const ObservationSet& obs);
ObservationSet read_observations(const std::filesystem::path& path);
// time,ddx,dx,x for an estimate on the observation grid.
void write_estimate(const std::filesystem::path& path, const std::vector<double>& times, const StateSequence& x);

}  // namespace nlsmooth::csv
