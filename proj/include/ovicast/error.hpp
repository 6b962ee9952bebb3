#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ovicast {

enum class ErrorKind {
  // configuration / usage
  Config,
  UnknownModel,
  // data
  MalformedRow,
  DuplicateDate,
  EmptyFile,
  TooFewObservations,
  NoOverlap,
  ZeroVariance,
  ZeroDenominator,
  LagTooLarge,
  ConstantInput,
  LengthMismatch,
  NoSignificantFeatures,
  UnknownVariable,
  GridMismatch,
  TooFewSamples,
  EmptyInput,
  FeatureMismatch,
  Io,
  // model
  TooManyComponents,
  DegenerateData,
  SingularDesign,
  NoConvergence,
  DivergedLoss,
  ShapeMismatch,
  MissingModelFile,
  BadModelFile,
};

enum class ErrorCategory { Config, Data, Model };

std::string_view to_string(ErrorKind kind) noexcept;
ErrorCategory category(ErrorKind kind) noexcept;

/// All library failures are reported through this type; `kind()` identifies
/// the contract that was violated and `what()` carries human-readable context.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind), message_(message) {}

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }
  /// Message without the kind prefix, for re-throwing with added context.
  [[nodiscard]] const std::string& message() const noexcept { return message_; }

 private:
  ErrorKind kind_;
  std::string message_;
};

}  // namespace ovicast
