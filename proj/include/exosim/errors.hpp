#pragma once

#include <stdexcept>
#include <string>

namespace exosim {

// Exit codes used by the CLI. Library code throws; the CLI maps to these.
enum class ExitCode : int {
  Ok = 0,
  Failure = 1,
  ConfigError = 2,
  SchemaError = 3,
  SimulationDiverged = 4,
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed input data (CSV/JSON rows that violate a documented schema).
struct SchemaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SimulationError : std::runtime_error {
  enum class Kind { Diverged, Fell, Degenerate };
  SimulationError(Kind k, const std::string& what)
      : std::runtime_error(what), kind(k) {}
  Kind kind;
};

// Analysis preconditions (too few cycles, zero-area profiles, ...).
struct AnalysisError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace exosim
