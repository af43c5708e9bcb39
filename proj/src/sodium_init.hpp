#pragma once

#include <sodium.h>

#include <mutex>

#include "gauth/error.hpp"

namespace gauth::internal {

inline void ensure_sodium() {
  static std::once_flag once;
  std::call_once(once, [] {
    if (sodium_init() < 0) {
      throw Error(ErrorCode::kInvalidArgument, "libsodium failed to initialize");
    }
  });
}

}  // namespace gauth::internal
