#include "pnet/core/error.hpp"

namespace pnet {

std::string_view error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownId: return "UnknownId";
    case ErrorCode::KindMismatch: return "KindMismatch";
    case ErrorCode::SelfLink: return "SelfLink";
    case ErrorCode::NoSuchParamForKind: return "NoSuchParamForKind";
    case ErrorCode::NonPositiveInertia: return "NonPositiveInertia";
    case ErrorCode::MalformedTable: return "MalformedTable";
    case ErrorCode::InvalidValue: return "InvalidValue";
    case ErrorCode::LabelTaken: return "LabelTaken";
    case ErrorCode::MalformedLabel: return "MalformedLabel";
    case ErrorCode::UnknownLabel: return "UnknownLabel";
    case ErrorCode::SystemLabelProtected: return "SystemLabelProtected";
    case ErrorCode::PickerSyntaxError: return "PickerSyntaxError";
    case ErrorCode::UnbalancedBrace: return "UnbalancedBrace";
    case ErrorCode::UnbalancedBracket: return "UnbalancedBracket";
    case ErrorCode::UnbalancedQuote: return "UnbalancedQuote";
    case ErrorCode::EmptyVariableName: return "EmptyVariableName";
    case ErrorCode::UnknownCommand: return "UnknownCommand";
    case ErrorCode::WrongArity: return "WrongArity";
    case ErrorCode::RuntimeError: return "RuntimeError";
    case ErrorCode::ExprSyntaxError: return "ExprSyntaxError";
    case ErrorCode::LimitExceeded: return "LimitExceeded";
    case ErrorCode::DuplicatePackage: return "DuplicatePackage";
    case ErrorCode::AmbiguousCommand: return "AmbiguousCommand";
    case ErrorCode::NotValidated: return "NotValidated";
    case ErrorCode::MissingSignal: return "MissingSignal";
    case ErrorCode::NumericBlowup: return "NumericBlowup";
    case ErrorCode::Cancelled: return "Cancelled";
    case ErrorCode::EngineRejected: return "EngineRejected";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::VersionUnsupported: return "VersionUnsupported";
    case ErrorCode::IntegrityError: return "IntegrityError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::EmptyChannelSet: return "EmptyChannelSet";
    case ErrorCode::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::RateMismatch: return "RateMismatch";
    case ErrorCode::BadScheme: return "BadScheme";
    case ErrorCode::MissingParameter: return "MissingParameter";
    case ErrorCode::BadVerb: return "BadVerb";
    case ErrorCode::BadPayload: return "BadPayload";
    case ErrorCode::ConflictingSimulation: return "ConflictingSimulation";
    case ErrorCode::NoSuchChannel: return "NoSuchChannel";
    case ErrorCode::NoResult: return "NoResult";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(message), code_(code) {}

Error::Error(ErrorCode code, const std::string& message, SourcePos pos)
    : std::runtime_error(message), code_(code), pos_(pos) {}

}  // namespace pnet
