#include "skillroute/error.hpp"

namespace skillroute {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::FileNotFound: return "FileNotFound";
    case ErrorCode::MalformedHeader: return "MalformedHeader";
    case ErrorCode::UnsupportedDatatype: return "UnsupportedDatatype";
    case ErrorCode::LabelOutOfRange: return "LabelOutOfRange";
    case ErrorCode::NonFiniteData: return "NonFiniteData";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::DimsMismatch: return "DimsMismatch";
    case ErrorCode::EmptyMask: return "EmptyMask";
    case ErrorCode::ConstantIntensity: return "ConstantIntensity";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::BadRange: return "BadRange";
    case ErrorCode::BadWindow: return "BadWindow";
    case ErrorCode::BadConfig: return "BadConfig";
    case ErrorCode::DegenerateClustering: return "DegenerateClustering";
    case ErrorCode::BadEpsilon: return "BadEpsilon";
    case ErrorCode::NonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::CommandFailed: return "CommandFailed";
    case ErrorCode::Timeout: return "Timeout";
    case ErrorCode::OutputMissing: return "OutputMissing";
    case ErrorCode::BadClass: return "BadClass";
    case ErrorCode::BadSpec: return "BadSpec";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::MissingFile: return "MissingFile";
    case ErrorCode::DuplicateSubject: return "DuplicateSubject";
    case ErrorCode::UnknownSubject: return "UnknownSubject";
    case ErrorCode::SplitInvalid: return "SplitInvalid";
  }
  return "Unknown";
}

namespace {

std::string compose(ErrorCode code, const std::string& stage,
                    const std::string& message) {
  std::string out;
  if (!stage.empty()) out += "[" + stage + "] ";
  out += std::string(to_string(code));
  if (!message.empty()) out += ": " + message;
  return out;
}

}  // namespace

Error::Error(ErrorCode code, const std::string& message)
    : Error(code, std::string(), message) {}

Error::Error(ErrorCode code, std::string stage, const std::string& message)
    : std::runtime_error(compose(code, stage, message)),
      code_(code),
      stage_(std::move(stage)),
      detail_(message) {}

}  // namespace skillroute
