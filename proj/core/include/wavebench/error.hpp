#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace wavebench {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Zero or negative extents, mismatched grid shapes.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Storage or scratch requirement exceeds what is allowed.
class CapacityError : public Error {
 public:
  using Error::Error;
};

class BoundsError : public Error {
 public:
  using Error::Error;
};

class DecompositionError : public Error {
 public:
  using Error::Error;
};

/// Parameter outside the supported numeric range (e.g. stencil radius).
class RangeError : public Error {
 public:
  using Error::Error;
};

/// Grid halo narrower than the stencil radius.
class StencilRadiusError : public Error {
 public:
  using Error::Error;
};

/// Inconsistent or invalid user configuration.
class ConfigurationError : public Error {
 public:
  using Error::Error;
};

class UndefinedIntensityError : public Error {
 public:
  using Error::Error;
};

/// NaN or Inf appeared in the wavefield.
class NumericalBlowupError : public Error {
 public:
  explicit NumericalBlowupError(std::int64_t step);

  [[nodiscard]] std::int64_t step() const noexcept { return step_; }

 private:
  std::int64_t step_;
};

}  // namespace wavebench
