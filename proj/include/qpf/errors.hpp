#pragma once

#include <stdexcept>
#include <string>

namespace qpf {

// Bad inputs: malformed model files, invalid parameter ranges, schedules
// that violate their contracts.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Desk-scale guardrails: state spaces or simulated dimensions beyond the
// configured caps.
struct CapError : std::runtime_error {
  explicit CapError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical contract violations detected at runtime (non-reversible chain,
// degenerate ancilla basis, non-convergent bisection).
struct NumericError : std::runtime_error {
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace qpf
