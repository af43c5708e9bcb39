#include "gauth/metrics.hpp"

#include <sys/resource.h>

#include <algorithm>
#include <chrono>
#include <iomanip>
#include <sstream>

#include "gauth/error.hpp"
#include "gauth/protocol.hpp"

namespace gauth::metrics {
namespace {

using Clock = std::chrono::steady_clock;

volatile std::size_t benchmark_sink = 0;
using protocol::PublicKey;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::vector<PublicKey> consecutive_roster(std::size_t m) {
  std::vector<PublicKey> roster;
  roster.reserve(m);
  for (std::size_t i = 1; i <= m; ++i) roster.emplace_back(static_cast<std::int64_t>(i));
  return roster;
}

struct Fixture {
  protocol::GroupSecret secret;
  std::vector<protocol::Credential> creds;
  protocol::SessionParams params;
  protocol::GroupKey key;
};

Fixture make_fixture(std::size_t m, std::size_t d, std::size_t n, Rng& rng) {
  protocol::GroupSecret secret = protocol::gm_setup(rng, d, n);
  std::vector<protocol::Credential> creds;
  creds.reserve(m);
  auto roster = consecutive_roster(m);
  for (const auto& x : roster) creds.push_back(protocol::issue_credential(secret, x));
  protocol::SessionParams params = protocol::new_session(secret, rng, std::move(roster));
  // Every member derives the same key; derive once from a member credential.
  protocol::GroupKey key = protocol::derive_group_key(creds.front(), params);
  return Fixture{std::move(secret), std::move(creds), std::move(params), std::move(key)};
}

template <class F>
double median_batch_ns(int batches, std::size_t ops, F&& body) {
  std::vector<double> per_op;
  for (int b = 0; b < batches; ++b) {
    const auto start = Clock::now();
    body();
    const double ns =
        std::chrono::duration<double, std::nano>(Clock::now() - start).count();
    per_op.push_back(ns / static_cast<double>(ops));
  }
  std::sort(per_op.begin(), per_op.end());
  return per_op[per_op.size() / 2];
}

}  // namespace

const char* ClosedForm::description() {
  return "user: div = m-1 [one per Lagrange term]; mult = (m-2) + d [m-2 products "
         "combining the m-1 Lagrange terms, d for scaling the agreed basis vector by "
         "A_j; f(x_j) is folded into the credential at issuance]; inner_prod = 1. "
         "gm: mult = 1; inner_prod = 1; add = m-1; decrypt = m.";
}

AuthOpCounts count_auth_ops(std::size_t m, std::size_t d, std::size_t n,
                            std::uint64_t seed) {
  if (m < 2) {
    throw Error(ErrorCode::kInvalidArgument, "count_auth_ops needs a roster of at least 2");
  }
  Rng rng(seed);
  const Fixture fx = make_fixture(m, d, n, rng);
  AuthOpCounts counts;
  std::vector<protocol::AuthShare> shares;
  shares.reserve(m);
  for (std::size_t j = 0; j < m; ++j) {
    // The first member is the instrumented one; the rest only feed the GM.
    OpCounter* counter = j == 0 ? &counts.user : nullptr;
    const auto c = protocol::compute_share(fx.creds[j], fx.params, counter);
    shares.push_back(protocol::encrypt_share(fx.key, c, fx.creds[j].public_key, rng));
  }
  const auto outcome = protocol::gm_verify(fx.secret, fx.params, shares, fx.key, &counts.gm);
  if (!outcome.accepted()) {
    throw Error(ErrorCode::kDegenerate, "instrumented honest session was rejected");
  }
  return counts;
}

BenchReport run_scaling_bench(std::span<const std::size_t> roster_sizes, std::size_t d,
                              std::size_t n, std::uint64_t seed) {
  if (!std::is_sorted(roster_sizes.begin(), roster_sizes.end())) {
    throw Error(ErrorCode::kInvalidArgument, "bench sizes must be ascending");
  }
  BenchReport report;
  report.d = d;
  report.n = n;
  report.seed = seed;
  for (const std::size_t m : roster_sizes) {
    if (m < 2) throw Error(ErrorCode::kInvalidArgument, "bench sizes must be >= 2");
    Rng rng(seed ^ (0x9E3779B97F4A7C15ULL * m));
    const Fixture fx = make_fixture(m, d, n, rng);

    OpCounter user_ops{Scope::kUser};
    std::vector<protocol::AuthShare> shares;
    shares.reserve(m);
    double users_ms = 0;
    for (std::size_t j = 0; j < m; ++j) {
      OpCounter* counter = j == 0 ? &user_ops : nullptr;
      const auto start = Clock::now();
      const auto c = protocol::compute_share(fx.creds[j], fx.params, counter);
      shares.push_back(protocol::encrypt_share(fx.key, c, fx.creds[j].public_key, rng));
      users_ms += ms_since(start);
    }

    OpCounter gm_ops{Scope::kGm};
    const auto start = Clock::now();
    const auto outcome = protocol::gm_verify(fx.secret, fx.params, shares, fx.key, &gm_ops);
    const double gm_ms = ms_since(start);
    if (!outcome.accepted()) {
      throw Error(ErrorCode::kDegenerate, "benchmark session was rejected");
    }

    report.roster_sizes.push_back(m);
    report.per_user_ms.push_back(users_ms / static_cast<double>(m));
    report.gm_ms.push_back(gm_ms);
    report.total_ms.push_back(users_ms + gm_ms);
    report.user_counters.push_back(user_ops);
    report.gm_counters.push_back(gm_ops);
  }
  report.peak_memory_bytes = peak_resident_bytes();
  return report;
}

std::string to_csv(const BenchReport& report) {
  std::ostringstream out;
  out << "size,user_ms,gm_ms,total_ms\n";
  out << std::fixed << std::setprecision(6);
  for (std::size_t i = 0; i < report.roster_sizes.size(); ++i) {
    out << report.roster_sizes[i] << ',' << report.per_user_ms[i] << ','
        << report.gm_ms[i] << ',' << report.total_ms[i] << '\n';
  }
  return out.str();
}

nlohmann::json to_json(const OpCounter& c) {
  return {{"scope", c.scope == Scope::kUser ? "user" : "gm"},
          {"mult", c.mult},
          {"div", c.div},
          {"inner_prod", c.inner_prod},
          {"add", c.add},
          {"decrypt", c.decrypt}};
}

nlohmann::json to_json(const BenchReport& report) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < report.roster_sizes.size(); ++i) {
    rows.push_back({{"size", report.roster_sizes[i]},
                    {"user_ms", report.per_user_ms[i]},
                    {"gm_ms", report.gm_ms[i]},
                    {"total_ms", report.total_ms[i]},
                    {"user_ops", to_json(report.user_counters[i])},
                    {"gm_ops", to_json(report.gm_counters[i])}});
  }
  nlohmann::json j = {{"d", report.d},
                      {"n", report.n},
                      {"seed", report.seed},
                      {"counting_convention", ClosedForm::description()},
                      {"rows", rows}};
  j["peak_memory_bytes"] =
      report.peak_memory_bytes ? nlohmann::json(*report.peak_memory_bytes) : nlohmann::json();
  return j;
}

MicroBench run_micro_bench(std::uint64_t seed, std::size_t ops_per_batch, int batches) {
  using exactmath::Scalar;
  using exactmath::Vector;
  Rng rng(seed);
  constexpr std::size_t kPool = 256;
  std::vector<Scalar> lhs;
  std::vector<Scalar> rhs;
  std::vector<Vector> us;
  std::vector<Vector> ws;
  for (std::size_t i = 0; i < kPool; ++i) {
    lhs.emplace_back(rng.nonzero_int32_range());
    rhs.emplace_back(rng.nonzero_int32_range());
    us.push_back(exactmath::sample_vector(rng, 10));
    ws.push_back(exactmath::sample_vector(rng, 10));
  }

  // Sink keeps results observable so the work is not elided.
  std::size_t sink = 0;
  MicroBench out;
  out.multiplication_ns = median_batch_ns(batches, ops_per_batch, [&] {
    for (std::size_t i = 0; i < ops_per_batch; ++i) {
      sink += static_cast<std::size_t>((lhs[i % kPool] * rhs[(i + 1) % kPool]).sign() + 1);
    }
  });
  out.division_ns = median_batch_ns(batches, ops_per_batch, [&] {
    for (std::size_t i = 0; i < ops_per_batch; ++i) {
      sink += static_cast<std::size_t>((lhs[i % kPool] / rhs[(i + 1) % kPool]).sign() + 1);
    }
  });
  out.inner_product_ns = median_batch_ns(batches, ops_per_batch, [&] {
    for (std::size_t i = 0; i < ops_per_batch; ++i) {
      sink += static_cast<std::size_t>(
          exactmath::inner_product(us[i % kPool], ws[(i + 1) % kPool]).sign() + 1);
    }
  });
  benchmark_sink = sink;
  return out;
}

std::optional<std::uint64_t> peak_resident_bytes() {
  rusage usage{};
  if (getrusage(RUSAGE_SELF, &usage) != 0) return std::nullopt;
  return static_cast<std::uint64_t>(usage.ru_maxrss) * 1024;  // Linux reports KiB
}

}  // namespace gauth::metrics
