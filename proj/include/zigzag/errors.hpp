#pragma once

#include <stdexcept>
#include <string>

namespace zigzag {

/// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Argument outside the documented domain (bad t, bad N, malformed input).
struct DomainError : Error {
  using Error::Error;
};

/// The ODE propagator could not reach the requested tolerance.
struct AccuracyError : Error {
  double achieved;
  AccuracyError(const std::string& msg, double achieved_estimate)
      : Error(msg), achieved(achieved_estimate) {}
};

/// lambda is (numerically) a Dirichlet eigenvalue; the sector monodromy has a pole there.
struct DirichletPoleError : Error {
  using Error::Error;
};

/// Level outside [-5/4, 1]; realness of the roots is no longer guaranteed.
struct LevelRangeError : Error {
  using Error::Error;
};

/// Sorted roots do not realize the expected labeling pattern: a root was missed.
struct LabelingError : Error {
  using Error::Error;
};

/// Band/gap assembly found inconsistent interleaving.
struct AssemblyError : Error {
  using Error::Error;
};

/// An operation precondition was violated (e.g. mu is not a Dirichlet eigenvalue).
struct PreconditionError : Error {
  using Error::Error;
};

}  // namespace zigzag
