#pragma once

#include <cstdint>
#include <random>

namespace nlsmooth {

/// Seedable Gaussian source with a fixed, documented stream layout.
///
/// Every experiment seed fans out into independent streams through
/// splitmix64(seed ^ stream * golden-ratio constant); the engine is
/// std::mt19937_64 (fully specified by the standard) and normals come from
/// the Box-Muller transform written out here, because std::normal_distribution
/// differs between standard libraries.
class GaussianStream {
 public:
  enum Stream : std::uint64_t { Trajectory = 1, Observations = 2, Initialization = 3, Test = 99 };

  GaussianStream(std::uint64_t seed, std::uint64_t stream);

  double uniform();  // in (0, 1)
  double normal();   // N(0, 1)

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace nlsmooth
