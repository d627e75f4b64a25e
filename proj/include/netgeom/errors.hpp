#pragma once

#include <stdexcept>
#include <string>

namespace netgeom {

// Exit codes used by the CLI. Library code throws; main() maps.
enum ExitCode : int {
  kExitOk = 0,
  kExitPropertyFailure = 1,
  kExitConfigError = 2,
  kExitDataError = 3,
};

// Bad user configuration: unknown names, invalid schedules, spec mismatches.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad data or shape: dimension mismatches, malformed files, simplex violations.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Training produced NaN/Inf; message carries epoch, batch and layer norms.
struct DivergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace netgeom
