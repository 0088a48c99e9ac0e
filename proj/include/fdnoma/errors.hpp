#pragma once

#include <stdexcept>
#include <string>

namespace fdnoma {

/// The channel draw cannot meet every QoS target with any admissible alpha.
class Infeasible : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An interior-point solve ran out of iterations or lost feasibility.
class SolverFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Every grid point of the exhaustive search violates some QoS target.
class NoFeasibleGridPoint : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad configuration file or command-line value.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fdnoma
