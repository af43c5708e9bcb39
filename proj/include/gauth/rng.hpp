#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace gauth {

// Seeded, reproducible randomness for every protocol draw (vectors, f,
// nonces, delegation factors). Not a CSPRNG: the harness needs bit-exact
// reruns, so all callers share this single deterministic source.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform over [-2^31, 2^31] \ {0}; exactly 2^32 outcomes.
  std::int64_t nonzero_int32_range();

  // Uniform over [0, bound). bound must be > 0.
  std::uint64_t uniform(std::uint64_t bound);

  void fill(std::span<std::uint8_t> out);

  // Independent child stream, e.g. one per simulated actor.
  Rng fork() { return Rng(next_u64()); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace gauth
