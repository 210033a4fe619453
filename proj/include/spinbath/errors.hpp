#pragma once

#include <stdexcept>

namespace spinbath {

// Inputs describe a physically inconsistent or undefined model
// (e.g. kernel moments with <AA+> < |<AA>|, unthermalizable ensemble).
struct ModelError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A runtime certification (trace, hermiticity, positivity, norm) failed
// during an engine run.
struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace spinbath
