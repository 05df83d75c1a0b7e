#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nlsmooth {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

// Raised when a Cholesky factorization fails. `index` is the block or time
// step at which the pivot broke down.
class NotPositiveDefinite : public Error {
 public:
  NotPositiveDefinite(std::size_t index, const std::string& what)
      : Error(what + " (index " + std::to_string(index) + ")"), index_(index) {}

  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

class DegenerateTruth : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace nlsmooth
