#include "isofree/error.hpp"

namespace isofree {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonpositiveWeight: return "NonpositiveWeight";
    case ErrorCode::NonpositiveRate: return "NonpositiveRate";
    case ErrorCode::NegativeSlope: return "NegativeSlope";
    case ErrorCode::DuplicateRate: return "DuplicateRate";
    case ErrorCode::NegativeArgument: return "NegativeArgument";
    case ErrorCode::MTooSmall: return "MTooSmall";
    case ErrorCode::OverlapOutOfRange: return "OverlapOutOfRange";
    case ErrorCode::NotStrictlyIncreasing: return "NotStrictlyIncreasing";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::BallVariantUnsupported: return "BallVariantUnsupported";
    case ErrorCode::InvalidStateSpace: return "InvalidStateSpace";
    case ErrorCode::GridTooNarrow: return "GridTooNarrow";
    case ErrorCode::NonfiniteValue: return "NonfiniteValue";
    case ErrorCode::CFLViolation: return "CFLViolation";
    case ErrorCode::InfimumDiverges: return "InfimumDiverges";
    case ErrorCode::PlateauNotReached: return "PlateauNotReached";
    case ErrorCode::NoDescent: return "NoDescent";
    case ErrorCode::AllRInfeasible: return "AllRInfeasible";
    case ErrorCode::QmaxAtBoundary: return "QmaxAtBoundary";
    case ErrorCode::NonpositiveLogArgument: return "NonpositiveLogArgument";
    case ErrorCode::TreeTooLarge: return "TreeTooLarge";
    case ErrorCode::DepthMismatch: return "DepthMismatch";
    case ErrorCode::TruncationDominates: return "TruncationDominates";
    case ErrorCode::NotPSD: return "NotPSD";
    case ErrorCode::TooManyPoints: return "TooManyPoints";
    case ErrorCode::TailTooLarge: return "TailTooLarge";
    case ErrorCode::MemoryCap: return "MemoryCap";
    case ErrorCode::EnumerationTooLarge: return "EnumerationTooLarge";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace isofree
