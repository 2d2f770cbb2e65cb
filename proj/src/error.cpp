#include "lpisim/error.hpp"

namespace lpisim {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MalformedRecord: return "MalformedRecord";
    case ErrorCode::EmptyEphemeris: return "EmptyEphemeris";
    case ErrorCode::NonMonotonicTime: return "NonMonotonicTime";
    case ErrorCode::IrregularSpacing: return "IrregularSpacing";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::InsufficientRecords: return "InsufficientRecords";
    case ErrorCode::BadAltitude: return "BadAltitude";
    case ErrorCode::BadLatitude: return "BadLatitude";
    case ErrorCode::InvalidState: return "InvalidState";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::DegenerateGeometry: return "DegenerateGeometry";
    case ErrorCode::InsufficientScan: return "InsufficientScan";
    case ErrorCode::FitDiverged: return "FitDiverged";
    case ErrorCode::DegenerateVisibility: return "DegenerateVisibility";
    case ErrorCode::SingularFit: return "SingularFit";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::BadAxis: return "BadAxis";
    case ErrorCode::NonHermitian: return "NonHermitian";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotNormalized: return "NotNormalized";
    case ErrorCode::OrthogonalSelection: return "OrthogonalSelection";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::FileUnreadable: return "FileUnreadable";
  }
  return "Unknown";
}

}  // namespace lpisim
