#pragma once

#include <stdexcept>
#include <string>

namespace flvr {

/// Malformed or inconsistent input data (CSV content, series invariants).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid run configuration or arguments.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A computation left its valid domain (e.g. portfolio wiped out by costs).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace flvr
