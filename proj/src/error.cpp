#include "gauth/error.hpp"

namespace gauth {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kDimensionMismatch: return "dimension_mismatch";
    case ErrorCode::kDependentBasis: return "dependent_basis";
    case ErrorCode::kDegenerate: return "degenerate";
    case ErrorCode::kAuthFailure: return "auth_failure";
    case ErrorCode::kMalformed: return "malformed";
    case ErrorCode::kOracleInconsistent: return "oracle_inconsistent";
    case ErrorCode::kIo: return "io";
  }
  return "unknown";
}

}  // namespace gauth
