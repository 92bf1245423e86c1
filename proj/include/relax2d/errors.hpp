#pragma once

#include <stdexcept>
#include <string>

// Exception taxonomy shared across the library.  The command-line tool maps
// these onto its exit codes: configuration problems -> 2, numerical failures
// -> 3, resource-limit refusals -> 4.

namespace relax2d {

// Invalid or inconsistent run configuration (bad JSON, unknown density,
// malformed bounds, ...).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A computation produced non-finite values or failed to converge.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A requested allocation or run would exceed a declared budget.  Carries the
// estimate so callers can report it.
struct ResourceLimitError : std::runtime_error {
  ResourceLimitError(const std::string& what, std::size_t requested_bytes,
                     std::size_t budget_bytes)
      : std::runtime_error(what),
        requested_bytes(requested_bytes),
        budget_bytes(budget_bytes) {}
  std::size_t requested_bytes;
  std::size_t budget_bytes;
};

}  // namespace relax2d
