#pragma once

#include <stdexcept>
#include <string>

namespace ddlqr {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes do not conform.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// An index window falls outside the available data.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// A matrix required to be PSD/PD is not.
class DefinitenessError : public Error {
 public:
  using Error::Error;
};

/// An iteration hit its cap before meeting its tolerance.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Random generation could not satisfy its postcondition.
class GenerationError : public Error {
 public:
  using Error::Error;
};

/// Input/state data fail the rank condition rank[U0;X0] = n + m.
class DataRichnessError : public Error {
 public:
  using Error::Error;
};

/// A solver returned a point that cannot be turned into gains.
class DegenerateSolutionError : public Error {
 public:
  using Error::Error;
};

/// The SDP solver did not reach an optimal status.
class SolverError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace ddlqr
