#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "tcs/array_cell.hpp"

namespace tcs {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A parameter lies outside the domain of the requested function.
class DomainError : public Error {
 public:
  using Error::Error;
};

// The power parameter is valid but the operation is not available for it
// (alpha at p = 1, scaling of Poisson variates, sampling outside {0} ∪ [1, 2]).
class UnsupportedPower : public Error {
 public:
  using Error::Error;
};

class IncompatibleSummands : public Error {
 public:
  using Error::Error;
};

class InvalidPartition : public Error {
 public:
  InvalidPartition(const std::string& what, std::vector<CellId> cells)
      : Error(what), cells_(std::move(cells)) {}

  const std::vector<CellId>& cells() const noexcept { return cells_; }

 private:
  std::vector<CellId> cells_;
};

class ComponentAbsent : public Error {
 public:
  using Error::Error;
};

// The p = 1 model requires a common canonical parameter across components.
class ConstraintViolation : public Error {
 public:
  using Error::Error;
};

// An operation was requested on an object in the wrong state, e.g. kappa on
// an unbalanced report or per-replication output that was not retained.
class InvalidState : public Error {
 public:
  using Error::Error;
};

// Configuration document problem. `path()` is a JSON-pointer style location.
class ConfigError : public Error {
 public:
  ConfigError(std::string path, const std::string& message)
      : Error(path.empty() ? message : path + ": " + message),
        path_(std::move(path)) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace tcs
