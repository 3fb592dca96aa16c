#include "haptic/error.hpp"

namespace haptic {

ErrorCategory category_of(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::DegenerateNormalization:
    case ErrorCode::ResonanceOrConditioning:
    case ErrorCode::QuadratureAccuracy:
    case ErrorCode::FitFailure:
      return ErrorCategory::Numerical;
    default:
      return ErrorCategory::Validation;
  }
}

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidWindow: return "invalid-window";
    case ErrorCode::MalformedCurve: return "malformed-curve";
    case ErrorCode::IncompressibleMaterial: return "incompressible-material";
    case ErrorCode::InvalidMaterial: return "invalid-material";
    case ErrorCode::CatalogValidation: return "catalog-validation";
    case ErrorCode::DomainError: return "domain-error";
    case ErrorCode::DegenerateInterface: return "degenerate-interface";
    case ErrorCode::InvalidStack: return "invalid-stack";
    case ErrorCode::InvalidLoad: return "invalid-load";
    case ErrorCode::InvalidDesign: return "invalid-design";
    case ErrorCode::IncomparableDesigns: return "incomparable-designs";
    case ErrorCode::EmptySpace: return "empty-space";
    case ErrorCode::InvalidSearchSpace: return "invalid-search-space";
    case ErrorCode::InvalidTrace: return "invalid-trace";
    case ErrorCode::InvalidBand: return "invalid-band";
    case ErrorCode::Io: return "io";
    case ErrorCode::DegenerateNormalization: return "degenerate-normalization";
    case ErrorCode::ResonanceOrConditioning: return "resonance-or-conditioning";
    case ErrorCode::QuadratureAccuracy: return "quadrature-accuracy";
    case ErrorCode::FitFailure: return "fit-failure";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

}  // namespace haptic
