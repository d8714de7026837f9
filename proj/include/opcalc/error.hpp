#pragma once

#include <complex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace opcalc {

enum class Errc {
  DimensionMismatch,
  SingularOperator,
  SpectralProximity,
  ConvergenceFailure,
  DefectiveMatrix,
  DomainViolation,
  BranchCutViolation,
  QuadratureNonconvergence,
  HorizonViolation,
  IntegrationBlowup,
  StencilOutOfRange,
  DerivativeNoise,
  SingularDerivative,
  OrderCapExceeded,
  ZeroModeDivision,
  InvalidArgument,
  ParseError,
  ConfigError,
  UnknownCase,
};

std::string_view to_string(Errc code) noexcept;

/// Single exception type for the library. `value` carries the numeric payload
/// the error reports (condition estimate, last quadrature delta, order k, ...),
/// `point` carries an offending eigenvalue where one exists.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what, double value = 0.0,
        std::optional<std::complex<double>> point = std::nullopt)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code),
        value_(value),
        point_(point) {}

  Errc code() const noexcept { return code_; }
  double value() const noexcept { return value_; }
  const std::optional<std::complex<double>>& point() const noexcept { return point_; }

 private:
  Errc code_;
  double value_;
  std::optional<std::complex<double>> point_;
};

}  // namespace opcalc
