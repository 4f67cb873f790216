#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pcsr {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Mismatched or too-small grids.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Missing or inconsistent arguments.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// Value outside the domain of a function (log singularities, negative
/// discriminants, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

class IndexError : public Error {
 public:
  using Error::Error;
};

/// Not enough previous frames for the requested time integrator.
class HistoryError : public Error {
 public:
  using Error::Error;
};

/// Newton failure inside the time stepper.
class SolverError : public Error {
 public:
  SolverError(const std::string& what, double residual_norm, long step = -1)
      : Error(what), residual_norm_(residual_norm), step_(step) {}

  double residual_norm() const noexcept { return residual_norm_; }
  long step() const noexcept { return step_; }

 private:
  double residual_norm_;
  long step_;
};

/// Malformed series file; carries the byte offset where decoding failed.
class FormatError : public Error {
 public:
  FormatError(const std::string& what, std::size_t offset)
      : Error(what + " (at byte " + std::to_string(offset) + ")"), offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class OptimizationError : public Error {
 public:
  OptimizationError(const std::string& what, int iteration)
      : Error(what + " (iteration " + std::to_string(iteration) + ")"), iteration_(iteration) {}

  int iteration() const noexcept { return iteration_; }

 private:
  int iteration_;
};

}  // namespace pcsr
