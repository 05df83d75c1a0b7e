#include "nlsmooth/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "nlsmooth/errors.hpp"

namespace nlsmooth::csv {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::string join(const std::vector<std::string>& cells) {
  std::string line;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) line += ',';
    line += cells[i];
  }
  return line;
}

void write_lines(const std::filesystem::path& path, const std::vector<std::string>& lines) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  for (const auto& l : lines) out << l << '\n';
  out.flush();
  if (!out) throw IoError("write failed: " + path.string());
}

void write_truth(const std::filesystem::path& path, const Trajectory& truth) {
  write_estimate(path, truth.times, truth.states);
}

void write_estimate(const std::filesystem::path& path, const std::vector<double>& times, const StateSequence& x) {
  if (times.size() != x.num_steps()) throw DimensionMismatch("times and states differ in length");
  std::vector<std::string> lines{"time,ddx,dx,x"};
  for (std::size_t i = 0; i < times.size(); ++i) {
    const auto b = x.block(i);
    lines.push_back(join({format_double(times[i]), format_double(b(0)), format_double(b(1)), format_double(b(2))}));
  }
  write_lines(path, lines);
}

void write_observations(const std::filesystem::path& path, const ObservationSet& obs) {
  std::vector<std::string> lines{"time,z_dx,z_x"};
  for (std::size_t i = 0; i < obs.times.size(); ++i) {
    lines.push_back(join({format_double(obs.times[i]), format_double(obs.measurements[i](0)),
                          format_double(obs.measurements[i](1))}));
  }
  write_lines(path, lines);
}

namespace {

double parse_number(const std::string& cell, const std::filesystem::path& path, std::size_t line) {
  double v = 0.0;
  const char* first = cell.data();
  const char* last = first + cell.size();
  while (first < last && *first == ' ') ++first;
  while (last > first && (last[-1] == ' ' || last[-1] == '\r')) --last;
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last) {
    throw IoError(path.string() + ":" + std::to_string(line) + ": not a number: '" + cell + "'");
  }
  return v;
}

}  // namespace

ObservationSet read_observations(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw IoError(path.string() + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "time,z_dx,z_x") throw IoError(path.string() + ": expected header 'time,z_dx,z_x'");

  ObservationSet obs;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 3) throw IoError(path.string() + ":" + std::to_string(lineno) + ": expected 3 columns");
    const double t = parse_number(cells[0], path, lineno);
    if (!obs.times.empty() && !(t > obs.times.back())) {
      throw IoError(path.string() + ":" + std::to_string(lineno) + ": times must increase");
    }
    Eigen::VectorXd z(2);
    z << parse_number(cells[1], path, lineno), parse_number(cells[2], path, lineno);
    if (!z.allFinite()) throw IoError(path.string() + ":" + std::to_string(lineno) + ": non-finite value");
    obs.truth_indices.push_back(obs.times.size());
    obs.times.push_back(t);
    obs.measurements.push_back(std::move(z));
  }
  if (obs.times.size() < 2) throw IoError(path.string() + ": need at least two observations");
  return obs;
}

}  // namespace nlsmooth::csv
