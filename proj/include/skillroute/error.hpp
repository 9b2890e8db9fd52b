#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace skillroute {

enum class ErrorCode {
  FileNotFound,
  MalformedHeader,
  UnsupportedDatatype,
  LabelOutOfRange,
  NonFiniteData,
  IoFailure,
  DimsMismatch,
  EmptyMask,
  ConstantIntensity,
  EmptyInput,
  BadRange,
  BadWindow,
  BadConfig,
  DegenerateClustering,
  BadEpsilon,
  NonFiniteLoss,
  CommandFailed,
  Timeout,
  OutputMissing,
  BadClass,
  BadSpec,
  ParseError,
  MissingFile,
  DuplicateSubject,
  UnknownSubject,
  SplitInvalid,
};

std::string_view to_string(ErrorCode code);

/// Every failure in the library is reported through this type. `stage()` is
/// set when the error escaped from a named pipeline stage.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);
  Error(ErrorCode code, std::string stage, const std::string& message);

  ErrorCode code() const noexcept { return code_; }
  const std::string& stage() const noexcept { return stage_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string stage_;
  std::string detail_;
};

/// Runs `fn`, re-throwing any Error (or std::exception) tagged with `stage`.
template <typename Fn>
decltype(auto) with_stage(std::string_view stage, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    if (!e.stage().empty()) throw;
    throw Error(e.code(), std::string(stage), e.detail());
  }
}

}  // namespace skillroute
