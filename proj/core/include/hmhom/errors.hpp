#pragma once

#include <stdexcept>
#include <string>

namespace hmhom {

/// Base class for all errors raised by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Rejection-sampling placement gave up; the requested packing is too dense.
struct PlacementFailure : Error {
  using Error::Error;
};

/// An iterative solver did not reach its tolerance, or broke down.
struct SolverFailure : Error {
  using Error::Error;
};

}  // namespace hmhom
