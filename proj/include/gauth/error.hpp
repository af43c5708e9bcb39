#pragma once

#include <stdexcept>
#include <string>

namespace gauth {

enum class ErrorCode {
  kInvalidArgument = 1,
  kDimensionMismatch,
  kDependentBasis,
  kDegenerate,
  kAuthFailure,
  kMalformed,
  kOracleInconsistent,
  kIo,
};

const char* error_code_name(ErrorCode code);

// Every failure raised by the library carries one of the codes above so the
// C API can map it without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace gauth
