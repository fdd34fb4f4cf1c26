#pragma once

#include <stdexcept>
#include <string>

namespace atsmc {

/// Base class for operational errors raised by the library.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Bad scenario configuration (unknown leaf, nonpositive cold rate, ...).
struct ScenarioError : Error {
  using Error::Error;
};

/// Invalid automaton network handed to compose().
struct CompositionError : Error {
  using Error::Error;
};

/// Raised by the simulator, e.g. on a zero-delay livelock.
struct SimulationError : Error {
  using Error::Error;
};

/// Malformed query text or unresolvable target.
struct QueryError : Error {
  using Error::Error;
};

/// Tree shape the analytic evaluator does not support.
struct OracleError : Error {
  using Error::Error;
};

/// Invalid mitigation transform or plan step.
struct TransformError : Error {
  using Error::Error;
};

/// Tree failed validation where a valid tree is required.
struct InvalidTreeError : Error {
  using Error::Error;
};

}  // namespace atsmc
