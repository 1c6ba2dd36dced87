#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace fmt_engine {

/// Base class of every error thrown by the engine.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid geometric input: open or non-convex meshes, bad radii, malformed files.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// File that cannot be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the domain of a function (n_v >= 1, k < 1, zero direction, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Iterative procedure that did not reach its tolerance.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, std::vector<double> history = {})
      : Error(what), history_(std::move(history)) {}

  const std::vector<double>& history() const noexcept { return history_; }

 private:
  std::vector<double> history_;
};

}  // namespace fmt_engine
