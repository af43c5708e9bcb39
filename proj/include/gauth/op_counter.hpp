#pragma once

#include <cstdint>

namespace gauth::metrics {

enum class Scope { kUser, kGm };

// Protocol-level operation tally. One Scalar*Scalar is one mult, one
// Scalar/Scalar one div, and a whole Vector inner product one inner_prod
// (its internal products are not counted as mults).
struct OpCounter {
  Scope scope = Scope::kUser;
  std::uint64_t mult = 0;
  std::uint64_t div = 0;
  std::uint64_t inner_prod = 0;
  std::uint64_t add = 0;
  std::uint64_t decrypt = 0;

  OpCounter& operator+=(const OpCounter& o) {
    mult += o.mult;
    div += o.div;
    inner_prod += o.inner_prod;
    add += o.add;
    decrypt += o.decrypt;
    return *this;
  }
  friend bool operator==(const OpCounter&, const OpCounter&) = default;
};

inline void bump(OpCounter* c, std::uint64_t OpCounter::*field,
                 std::uint64_t by = 1) {
  if (c != nullptr) c->*field += by;
}

}  // namespace gauth::metrics
