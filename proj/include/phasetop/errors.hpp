#pragma once

#include <stdexcept>
#include <string>

namespace phasetop {

// Root of every error raised by the library. The CLI maps ConfigError to
// exit code 2 and everything else to exit code 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input violates a mathematical precondition (non-Hermitian, odd dimension,
// parity mismatch, wrong manifold).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Matrix too close to singular for a polar retraction.
class SingularityError : public Error {
 public:
  using Error::Error;
};

// Sampling too coarse: a phase step, flux, or edge increment is ambiguous.
// Callers refine the grid and retry.
class ResolutionError : public Error {
 public:
  using Error::Error;
};

// Principal matrix logarithm is ill-defined (eigenvalue at -1).
class BranchError : public Error {
 public:
  using Error::Error;
};

// Pfaffian vanishes on every admissible fundamental-domain boundary.
class DegenerateConfigurationError : public Error {
 public:
  using Error::Error;
};

// Gauge field could not be extended over the disk.
class ExtensionError : public Error {
 public:
  using Error::Error;
};

// A tracked band group is not gapped at the endpoints of a path.
class TrackingError : public Error {
 public:
  using Error::Error;
};

// Any other failed numerical consistency check (lost gap, unitarity, ...).
class NumericalError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace phasetop
