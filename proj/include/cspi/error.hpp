#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cspi {

enum class ErrorKind {
  InvalidArgument,
  DivergentSum,
  PolicyExhausted,
  PrecisionLoss,
  TruncationTooSmall,
  SingularMatrix,
  PoleHit,
  CutoffTooSmall,
  NonConvergent,
  UnsupportedDegree,
  QuadratureNotConverged,
  DenominatorPole,
  SeriesNotDecaying,
  NearPoleSample,
  ContourDeformationRequired,
  ConfigInvalid,
  IoError,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries one of the kinds above so that
/// callers (and the CLI) can branch on it without parsing messages.
class LabError : public std::runtime_error {
 public:
  LabError(ErrorKind kind, const std::string& what);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace cspi
