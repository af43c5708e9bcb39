#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gauth/op_counter.hpp"
#include "json.hpp"

namespace gauth::metrics {

// Counts for one authentication round with roster size m >= 2:
//   user: div = m-1, mult = (m-2) + d, inner_prod = 1, add = m-1
//         (m-2 products combining the m-1 Lagrange terms plus the d products
//          of scaling the agreed basis vector by A_j)
//   gm:   mult = 1, inner_prod = 1, add = m-1, decrypt = m
struct ClosedForm {
  static std::uint64_t user_mult(std::size_t m, std::size_t d) { return (m - 2) + d; }
  static std::uint64_t user_div(std::size_t m) { return m - 1; }
  static std::uint64_t user_inner_prod() { return 1; }
  static std::uint64_t gm_mult() { return 1; }
  static std::uint64_t gm_inner_prod() { return 1; }
  static std::uint64_t gm_add(std::size_t m) { return m - 1; }
  static std::uint64_t gm_decrypt(std::size_t m) { return m; }

  static const char* description();
};

struct AuthOpCounts {
  OpCounter user{Scope::kUser};  // one member's share computation
  OpCounter gm{Scope::kGm};      // one full verification
};

// Instruments one real session (d = 10, n = 3 unless given) with roster
// 1..m and returns the tallies. Requires m >= 2.
AuthOpCounts count_auth_ops(std::size_t m, std::size_t d = 10, std::size_t n = 3,
                            std::uint64_t seed = 1);

struct BenchReport {
  std::size_t d = 10;
  std::size_t n = 3;
  std::uint64_t seed = 0;
  std::vector<std::size_t> roster_sizes;
  std::vector<double> per_user_ms;  // mean share computation + encryption
  std::vector<double> gm_ms;        // one gm_verify over all shares
  std::vector<double> total_ms;     // every user sequentially plus the GM
  std::vector<OpCounter> user_counters;
  std::vector<OpCounter> gm_counters;
  std::optional<std::uint64_t> peak_memory_bytes;
};

// Sizes must be ascending; each must be >= 2. Single-threaded.
BenchReport run_scaling_bench(std::span<const std::size_t> roster_sizes, std::size_t d,
                              std::size_t n, std::uint64_t seed);

// Header "size,user_ms,gm_ms,total_ms" then one row per size.
std::string to_csv(const BenchReport& report);
nlohmann::json to_json(const BenchReport& report);
nlohmann::json to_json(const OpCounter& counter);

struct MicroBench {
  double inner_product_ns = 0;  // 10-element vectors
  double division_ns = 0;
  double multiplication_ns = 0;
};

// Median-of-batches timing on integer operands drawn like protocol values.
MicroBench run_micro_bench(std::uint64_t seed, std::size_t ops_per_batch = 20000,
                           int batches = 7);

std::optional<std::uint64_t> peak_resident_bytes();

}  // namespace gauth::metrics
