#include "gauth/rng.hpp"

#include <algorithm>
#include <limits>

#include "gauth/error.hpp"

namespace gauth {

std::int64_t Rng::nonzero_int32_range() {
  constexpr std::int64_t kHalf = std::int64_t{1} << 31;
  const auto u = static_cast<std::int64_t>(next_u64() >> 32);  // [0, 2^32)
  return u < kHalf ? u - kHalf : u - kHalf + 1;
}

std::uint64_t Rng::uniform(std::uint64_t bound) {
  if (bound == 0) {
    throw Error(ErrorCode::kInvalidArgument, "uniform: bound must be positive");
  }
  // Rejection sampling keeps the result independent of the stdlib's
  // distribution implementation.
  const std::uint64_t limit =
      std::numeric_limits<std::uint64_t>::max() -
      std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = next_u64();
  } while (x >= limit);
  return x % bound;
}

void Rng::fill(std::span<std::uint8_t> out) {
  std::size_t i = 0;
  while (i < out.size()) {
    std::uint64_t word = next_u64();
    const std::size_t take = std::min<std::size_t>(8, out.size() - i);
    for (std::size_t k = 0; k < take; ++k) {
      out[i++] = static_cast<std::uint8_t>(word & 0xFF);
      word >>= 8;
    }
  }
}

}  // namespace gauth
