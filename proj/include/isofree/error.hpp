#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace isofree {

// Machine-readable failure codes surfaced by every module and by the CLI.
enum class ErrorCode {
  NonpositiveWeight,
  NonpositiveRate,
  NegativeSlope,
  DuplicateRate,
  NegativeArgument,
  MTooSmall,
  OverlapOutOfRange,
  NotStrictlyIncreasing,
  OutOfRange,
  BallVariantUnsupported,
  InvalidStateSpace,
  GridTooNarrow,
  NonfiniteValue,
  CFLViolation,
  InfimumDiverges,
  PlateauNotReached,
  NoDescent,
  AllRInfeasible,
  QmaxAtBoundary,
  NonpositiveLogArgument,
  TreeTooLarge,
  DepthMismatch,
  TruncationDominates,
  NotPSD,
  TooManyPoints,
  TailTooLarge,
  MemoryCap,
  EnumerationTooLarge,
  SchemaError,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::string path = {})
      : std::runtime_error(message), code_(code), path_(std::move(path)) {}

  ErrorCode code() const noexcept { return code_; }
  // Config path of the offending key, empty when not applicable.
  const std::string& path() const noexcept { return path_; }

 private:
  ErrorCode code_;
  std::string path_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace isofree
