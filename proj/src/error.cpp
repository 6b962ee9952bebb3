#include "ovicast/error.hpp"

namespace ovicast {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Config: return "ConfigError";
    case ErrorKind::UnknownModel: return "UnknownModel";
    case ErrorKind::MalformedRow: return "MalformedRow";
    case ErrorKind::DuplicateDate: return "DuplicateDate";
    case ErrorKind::EmptyFile: return "EmptyFile";
    case ErrorKind::TooFewObservations: return "TooFewObservations";
    case ErrorKind::NoOverlap: return "NoOverlap";
    case ErrorKind::ZeroVariance: return "ZeroVariance";
    case ErrorKind::ZeroDenominator: return "ZeroDenominator";
    case ErrorKind::LagTooLarge: return "LagTooLarge";
    case ErrorKind::ConstantInput: return "ConstantInput";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::NoSignificantFeatures: return "NoSignificantFeatures";
    case ErrorKind::UnknownVariable: return "UnknownVariable";
    case ErrorKind::GridMismatch: return "GridMismatch";
    case ErrorKind::TooFewSamples: return "TooFewSamples";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::FeatureMismatch: return "FeatureMismatch";
    case ErrorKind::Io: return "IoError";
    case ErrorKind::TooManyComponents: return "TooManyComponents";
    case ErrorKind::DegenerateData: return "DegenerateData";
    case ErrorKind::SingularDesign: return "SingularDesign";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::DivergedLoss: return "DivergedLoss";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::MissingModelFile: return "MissingModelFile";
    case ErrorKind::BadModelFile: return "BadModelFile";
  }
  return "Error";
}

ErrorCategory category(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Config:
    case ErrorKind::UnknownModel:
      return ErrorCategory::Config;
    case ErrorKind::TooManyComponents:
    case ErrorKind::DegenerateData:
    case ErrorKind::SingularDesign:
    case ErrorKind::NoConvergence:
    case ErrorKind::DivergedLoss:
    case ErrorKind::ShapeMismatch:
    case ErrorKind::MissingModelFile:
    case ErrorKind::BadModelFile:
      return ErrorCategory::Model;
    default:
      return ErrorCategory::Data;
  }
}

}  // namespace ovicast
