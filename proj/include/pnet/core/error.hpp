#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace pnet {

enum class ErrorCode : std::uint8_t {
  // network-core
  UnknownId,
  KindMismatch,
  SelfLink,
  NoSuchParamForKind,
  NonPositiveInertia,
  MalformedTable,
  InvalidValue,
  // label-system
  LabelTaken,
  MalformedLabel,
  UnknownLabel,
  SystemLabelProtected,
  PickerSyntaxError,
  // pnsl
  UnbalancedBrace,
  UnbalancedBracket,
  UnbalancedQuote,
  EmptyVariableName,
  UnknownCommand,
  WrongArity,
  RuntimeError,
  ExprSyntaxError,
  LimitExceeded,
  DuplicatePackage,
  AmbiguousCommand,
  // sim-engine
  NotValidated,
  MissingSignal,
  NumericBlowup,
  Cancelled,
  EngineRejected,
  // model-io
  ParseError,
  VersionUnsupported,
  IntegrityError,
  IoError,
  EmptyChannelSet,
  UnsupportedFormat,
  RateMismatch,
  BadScheme,
  MissingParameter,
  // service-api
  BadVerb,
  BadPayload,
  ConflictingSimulation,
  NoSuchChannel,
  NoResult,
};

std::string_view error_name(ErrorCode code);

/// Line/column in a script or document, both 1-based.
struct SourcePos {
  int line = 1;
  int column = 1;
  friend bool operator==(const SourcePos&, const SourcePos&) = default;
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);
  Error(ErrorCode code, const std::string& message, SourcePos pos);

  ErrorCode code() const noexcept { return code_; }
  const std::optional<SourcePos>& pos() const noexcept { return pos_; }

  // Set when a RuntimeError wraps the failure of an underlying operation.
  std::optional<ErrorCode> cause() const noexcept { return cause_; }
  Error& with_cause(ErrorCode cause) {
    cause_ = cause;
    return *this;
  }

 private:
  ErrorCode code_;
  std::optional<SourcePos> pos_;
  std::optional<ErrorCode> cause_;
};

}  // namespace pnet
