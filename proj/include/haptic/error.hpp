#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace haptic {

enum class ErrorCode {
  // validation
  InvalidWindow,
  MalformedCurve,
  IncompressibleMaterial,
  InvalidMaterial,
  CatalogValidation,
  DomainError,
  DegenerateInterface,
  InvalidStack,
  InvalidLoad,
  InvalidDesign,
  IncomparableDesigns,
  EmptySpace,
  InvalidSearchSpace,
  InvalidTrace,
  InvalidBand,
  Io,
  // numerical
  DegenerateNormalization,
  ResonanceOrConditioning,
  QuadratureAccuracy,
  FitFailure,
};

enum class ErrorCategory { Validation, Numerical };

ErrorCategory category_of(ErrorCode code) noexcept;
std::string_view to_string(ErrorCode code) noexcept;

/// Single exception type for the library. The code identifies the failure;
/// the category decides the CLI exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  ErrorCode code() const noexcept { return code_; }
  ErrorCategory category() const noexcept { return category_of(code_); }

 private:
  ErrorCode code_;
};

}  // namespace haptic
