#pragma once

#include <stdexcept>
#include <string>

namespace tsdr {

enum class ErrorCode {
  kDimensionMismatch,
  kInvalidArgument,
  kNotPositiveDefinite,
  kNotSymmetric,
  kUnderIdentified,
  kParse,
  kSchema,
  kEmptyResult,
  kUnseenCategory,
  kDegenerateGroup,
  kNonConvergence,
  kZeroVariance,
  kIo,
};

const char* ToString(ErrorCode code);

// Every failure raised by the library carries a machine-checkable code. The
// experiment runner additionally tags errors with the pipeline stage.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace tsdr
