#include "tsdr/error.hpp"

namespace tsdr {

const char* ToString(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDimensionMismatch: return "dimension_mismatch";
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kNotPositiveDefinite: return "not_positive_definite";
    case ErrorCode::kNotSymmetric: return "not_symmetric";
    case ErrorCode::kUnderIdentified: return "under_identified";
    case ErrorCode::kParse: return "parse";
    case ErrorCode::kSchema: return "schema";
    case ErrorCode::kEmptyResult: return "empty_result";
    case ErrorCode::kUnseenCategory: return "unseen_category";
    case ErrorCode::kDegenerateGroup: return "degenerate_group";
    case ErrorCode::kNonConvergence: return "non_convergence";
    case ErrorCode::kZeroVariance: return "zero_variance";
    case ErrorCode::kIo: return "io";
  }
  return "unknown";
}

}  // namespace tsdr
