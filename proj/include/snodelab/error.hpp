#pragma once

#include <complex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace snodelab {

enum class ErrorKind {
  NotHermitian,
  NotPositiveDefinite,
  DimensionMismatch,
  PoleAtLambda,
  PoleAtZ,
  NotContractive,
  IndexOutOfRange,
  EvaluationFailure,
  SingularDenominator,
  InvalidPair,
  SingularResolvent,
  NotInUpperHalfPlane,
  NotConverged,
  QuadratureNotConverged,
  ExtractionNotConverged,
  Unsupported,
  SzegoViolated,
  SingularF,
  SingularOnGrid,
  HypothesisViolated,
  BadInput,
  IoError,
};

std::string_view to_string(ErrorKind kind);

// Single exception type for the library. The kind is the machine-readable
// part; index/point/value carry the location that failed when one exists.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

  std::optional<long> index() const noexcept { return index_; }
  std::optional<std::complex<double>> point() const noexcept { return point_; }
  std::optional<double> value() const noexcept { return value_; }

  Error& at_index(long k) {
    index_ = k;
    return *this;
  }
  Error& at_point(std::complex<double> z) {
    point_ = z;
    return *this;
  }
  Error& with_value(double v) {
    value_ = v;
    return *this;
  }

 private:
  ErrorKind kind_;
  std::optional<long> index_;
  std::optional<std::complex<double>> point_;
  std::optional<double> value_;
};

}  // namespace snodelab
