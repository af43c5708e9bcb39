// Acceptance suite. Each criterion prints one PASS/FAIL line with its
// measured time against the allowed budget; the exit status is nonzero if
// any criterion fails.
#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "gauth/detection.hpp"
#include "gauth/error.hpp"
#include "gauth/json_io.hpp"
#include "gauth/metrics.hpp"
#include "gauth/protocol.hpp"
#include "gauth/simnet.hpp"
#include "oracle.hpp"

namespace gp = gauth::protocol;
namespace gs = gauth::simnet;
namespace gd = gauth::detection;
namespace gm = gauth::metrics;
using gauth::Rng;
using gp::PublicKey;
using gp::Scalar;

namespace {

struct Result {
  bool ok = true;
  std::string detail;
};

// Collects the first few failure messages without stopping the sweep.
class Tally {
 public:
  void expect(bool cond, const std::string& what) {
    ++checks_;
    if (cond) return;
    ++failures_;
    if (first_.empty()) first_ = what;
  }
  Result result(const std::string& summary) const {
    std::ostringstream out;
    out << summary << "; " << (checks_ - failures_) << "/" << checks_ << " checks";
    if (failures_ > 0) out << "; first failure: " << first_;
    return {failures_ == 0, out.str()};
  }

 private:
  std::size_t checks_ = 0;
  std::size_t failures_ = 0;
  std::string first_;
};

struct Instance {
  std::size_t d = 0;
  std::size_t n = 0;
  gp::GroupSecret secret;
  std::vector<gp::Credential> creds;
  gp::SessionParams params;
};

// Instance i of the seed-enumerated sweep: d in [3,16], n in [1,d-1], m in
// [2,32], distinct nonzero integer keys drawn from [-1000,1000].
Instance make_instance(std::uint64_t i) {
  Rng rng(0xACCE55ULL + i);
  const std::size_t d = 3 + rng.uniform(14);
  const std::size_t n = 1 + rng.uniform(d - 1);
  const std::size_t m = 2 + rng.uniform(31);
  gp::GroupSecret secret = gp::gm_setup(rng, d, n);
  std::vector<PublicKey> roster;
  std::vector<gp::Credential> creds;
  while (roster.size() < m) {
    const PublicKey x(static_cast<std::int64_t>(rng.uniform(2001)) - 1000);
    if (x.is_zero() || secret.f(x).is_zero() ||
        std::find(roster.begin(), roster.end(), x) != roster.end()) {
      continue;
    }
    roster.push_back(x);
    creds.push_back(gp::issue_credential(secret, x));
  }
  const std::size_t basis_index = 1 + rng.uniform(n);
  gp::SessionParams params = gp::new_session(secret, rng, roster, basis_index);
  return Instance{d, n, std::move(secret), std::move(creds), std::move(params)};
}

constexpr std::uint64_t kSweep = 1000;

Result completeness() {
  Tally t;
  for (std::uint64_t i = 0; i < kSweep; ++i) {
    const Instance in = make_instance(i);
    const gp::GroupKey key = gp::gm_group_key(in.secret, in.params);
    Rng rng(i);
    std::vector<gp::AuthShare> shares;
    oracle::Q sum = 0;
    for (const auto& c : in.creds) {
      const Scalar share = gp::compute_share(c, in.params);
      sum += oracle::from_scalar(share);
      shares.push_back(gp::encrypt_share(key, share, c.public_key, rng));
    }
    const auto vi = oracle::from_vector(in.secret.basis()[in.params.basis_index - 1]);
    const oracle::Q expected =
        oracle::from_scalar(in.secret.f_b()) * oracle::dot(vi, oracle::from_vector(in.params.g));
    t.expect(sum == expected, "oracle sum mismatch at instance " + std::to_string(i));
    t.expect(gp::gm_verify(in.secret, in.params, shares, key).accepted(),
             "honest roster rejected at instance " + std::to_string(i));
  }
  return t.result(std::to_string(kSweep) + " honest instances accepted, sums exact");
}

Result key_consistency() {
  Tally t;
  for (std::uint64_t i = 0; i < kSweep; ++i) {
    const Instance in = make_instance(i);
    Rng rng(i ^ 0xDE1EULL);
    const gp::Credential guest =
        gp::delegate_credential(in.creds[rng.uniform(in.creds.size())], rng);
    const Scalar s = gp::gm_group_key(in.secret, in.params).s;
    bool all_equal = gp::derive_group_key(guest, in.params).s == s;
    for (const auto& c : in.creds) all_equal = all_equal && gp::derive_group_key(c, in.params).s == s;
    t.expect(all_equal, "members disagree at instance " + std::to_string(i));
    const auto proj = oracle::project(oracle::from_vector(in.params.v),
                                      oracle::from_basis(in.secret.basis()));
    t.expect(oracle::from_scalar(s) == oracle::dot(proj, oracle::from_vector(in.params.h)),
             "oracle key mismatch at instance " + std::to_string(i));
  }
  return t.result("every member and one delegated member per instance agree on s");
}

Result soundness() {
  Tally t;
  std::size_t flipped = 0;
  std::size_t aead_rejects = 0;
  for (std::uint64_t i = 0; i < kSweep; ++i) {
    const Instance in = make_instance(i);
    const gp::GroupKey key = gp::gm_group_key(in.secret, in.params);
    Rng rng(i + 17);
    std::vector<gp::AuthShare> shares;
    std::vector<Scalar> values;
    for (const auto& c : in.creds) {
      values.push_back(gp::compute_share(c, in.params));
      shares.push_back(gp::encrypt_share(key, values.back(), c.public_key, rng));
    }
    const std::size_t victim = rng.uniform(shares.size());
    const Scalar offset = Scalar(rng.nonzero_int32_range()) / Scalar(rng.nonzero_int32_range());
    auto mutated = shares;
    mutated[victim] = gp::encrypt_share(key, values[victim] + offset,
                                        in.creds[victim].public_key, rng);
    const auto out = gp::gm_verify(in.secret, in.params, mutated, key);
    const bool ok = !out.accepted() && out.reason == gp::RejectReason::kSumMismatch;
    flipped += ok ? 1 : 0;
    t.expect(ok, "mutation accepted at trial " + std::to_string(i));

    // The outsider holds a basis of a subspace it invented itself.
    Rng own(i * 7919 + 3);
    const gp::GroupSecret fake = gp::gm_setup(own, in.d, in.n);
    const gp::Credential outsider = gp::issue_credential(fake, in.creds[victim].public_key);
    const gp::GroupKey wrong = gp::derive_group_key(outsider, in.params);
    auto forged = shares;
    forged[victim] = gp::encrypt_share(wrong, gp::compute_share(outsider, in.params),
                                       outsider.public_key, rng);
    const auto fo = gp::gm_verify(in.secret, in.params, forged, key);
    const bool rejected = fo.reason == gp::RejectReason::kOutsiderOrBadKey;
    aead_rejects += rejected ? 1 : 0;
    t.expect(rejected, "outsider not rejected by AEAD at trial " + std::to_string(i));
  }
  return t.result("mutations rejected " + std::to_string(flipped) + "/" + std::to_string(kSweep) +
                  ", outsider AEAD failures " + std::to_string(aead_rejects) + "/" +
                  std::to_string(kSweep));
}

Result detection_exactness() {
  Tally t;
  std::size_t cases = 0;
  std::size_t max_calls = 0;
  for (std::size_t n = 1; n <= 12; ++n) {
    std::vector<PublicKey> roster;
    for (std::size_t i = 1; i <= n; ++i) roster.emplace_back(static_cast<std::int64_t>(i));
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
      std::set<PublicKey> bad;
      std::vector<PublicKey> planted;
      for (std::size_t i = 0; i < n; ++i) {
        if ((mask >> i) & 1u) {
          bad.insert(roster[i]);
          planted.push_back(roster[i]);
        }
      }
      const gd::SubgroupOracle oracle = [&](std::span<const PublicKey> s) {
        return std::none_of(s.begin(), s.end(), [&](const PublicKey& x) { return bad.count(x) > 0; });
      };
      const auto report = gd::detect_malicious(roster, oracle);
      const std::string where = "n=" + std::to_string(n) + " mask=" + std::to_string(mask);
      t.expect(report.malicious == planted, "wrong set at " + where);
      t.expect(report.oracle_calls <= 2 * n - 1, "too many calls at " + where);
      if (mask == 0) t.expect(report.oracle_calls == 1, "clean group needed >1 call at " + where);
      max_calls = std::max(max_calls, report.oracle_calls);
      ++cases;
    }
  }
  return t.result(std::to_string(cases) + " planted subsets recovered exactly, max calls " +
                  std::to_string(max_calls) + " (bound 23 at n=12)");
}

Result op_counts() {
  Tally t;
  std::ostringstream detail;
  for (const std::size_t m : {2, 10, 100}) {
    const auto c = gm::count_auth_ops(m, 10, 3);
    const std::string tag = "m=" + std::to_string(m);
    t.expect(c.user.div == m - 1, tag + " user div");
    t.expect(c.user.inner_prod == 1, tag + " user inner_prod");
    t.expect(c.gm.inner_prod == 1, tag + " gm inner_prod");
    t.expect(c.user.mult == gm::ClosedForm::user_mult(m, 10), tag + " user mult closed form");
    detail << tag << " div=" << c.user.div << " mult=" << c.user.mult << " ip=" << c.user.inner_prod
           << "/" << c.gm.inner_prod << "; ";
  }
  return t.result(detail.str() + "mult = (m-2)+d");
}

Result scaling() {
  Tally t;
  const std::vector<std::size_t> sizes{1000};
  const gm::BenchReport r = gm::run_scaling_bench(sizes, 10, 3, 2024);
  t.expect(r.per_user_ms[0] <= 50.0, "per-user time over 50 ms");
  t.expect(r.gm_ms[0] <= 50.0, "GM verification over 50 ms");

  gs::Scenario sc;
  sc.roster_size = 1000;
  sc.seed = 2024;
  const auto start = std::chrono::steady_clock::now();
  const gs::Transcript tr = gs::run_scenario(sc);
  const double demo_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  t.expect(tr.auth_outcome && tr.auth_outcome->accepted(), "m=1000 demo rejected");
  t.expect(demo_ms <= 1000.0, "demo-auth at m=1000 over 1 s");

  const gm::MicroBench mb = gm::run_micro_bench(7);
  t.expect(mb.inner_product_ns > mb.division_ns, "inner product not slower than division");
  t.expect(mb.division_ns > mb.multiplication_ns, "division not slower than multiplication");

  char buf[320];
  std::snprintf(buf, sizeof buf,
                "m=1000 user %.3f ms, gm %.3f ms, demo %.1f ms; ip %.0f ns > div %.0f ns > "
                "mult %.0f ns",
                r.per_user_ms[0], r.gm_ms[0], demo_ms, mb.inner_product_ns, mb.division_ns,
                mb.multiplication_ns);
  return t.result(buf);
}

Result ratio_equivalence() {
  Tally t;
  Rng rng(99);
  const gp::GroupSecret secret = gp::gm_setup(rng, 10, 3);
  const PublicKey keys[] = {PublicKey(3), PublicKey(-11)};
  for (int trial = 0; trial < 100; ++trial) {
    const Scalar c = Scalar(rng.nonzero_int32_range()) / Scalar(rng.nonzero_int32_range());
    const gp::GroupSecret twin(secret.basis().scaled(c), secret.f_a() / c, secret.f_b() / c);
    t.expect(!(twin.basis() == secret.basis()) || c == Scalar(1), "twin secret not distinct");
    for (const auto& x : keys) {
      const auto a = gp::to_json(gp::issue_credential(secret, x)).dump();
      const auto b = gp::to_json(gp::issue_credential(twin, x)).dump();
      t.expect(a == b, "credentials differ for c=" + c.to_string());
    }
  }
  return t.result("100 scalings give byte-identical credentials for both keys");
}

std::vector<gs::Scenario> determinism_scenarios() {
  using P = gs::Phase;
  std::vector<gs::Scenario> out;
  const auto add = [&](std::size_t m, std::uint64_t seed, auto configure) {
    gs::Scenario sc;
    sc.roster_size = m;
    sc.seed = seed;
    sc.phases = {P::kKeygen, P::kGroupKey, P::kAuth, P::kDetect};
    configure(sc);
    out.push_back(sc);
  };
  add(3, 42, [](gs::Scenario& sc) { sc.phases = {P::kKeygen, P::kGroupKey, P::kAuth}; });
  add(8, 7, [](gs::Scenario& sc) { sc.behaviors[PublicKey(4)] = gs::BogusShare{Scalar(17, 3)}; });
  add(5, 11, [](gs::Scenario& sc) { sc.behaviors[PublicKey(2)] = gs::RandomBasisOutsider{99}; });
  add(4, 5, [](gs::Scenario& sc) { sc.behaviors[PublicKey(3)] = gs::Replay{}; });
  add(4, 23, [](gs::Scenario& sc) {
    sc.behaviors[PublicKey(4)] = gs::DelegatedMember{PublicKey(2)};
    sc.broadcaster = PublicKey(1);
  });
  add(12, 1, [](gs::Scenario& sc) {
    sc.behaviors[PublicKey(2)] = gs::BogusShare{Scalar(-1)};
    sc.behaviors[PublicKey(9)] = gs::BogusShare{Scalar(5)};
  });
  add(2, 3, [](gs::Scenario& sc) { sc.d = 3; sc.n = 1; });
  add(1, 8, [](gs::Scenario& sc) { sc.d = 4; sc.n = 2; });
  add(16, 13, [](gs::Scenario& sc) {
    sc.d = 16;
    sc.n = 9;
    sc.behaviors[PublicKey(7)] = gs::RandomBasisOutsider{4};
    sc.behaviors[PublicKey(12)] = gs::Replay{};
  });
  add(6, 77, [](gs::Scenario& sc) { sc.phases = {P::kKeygen, P::kGroupKey}; });
  return out;
}

Result determinism() {
  Tally t;
  const auto scenarios = determinism_scenarios();
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    std::string transcript;
    std::string report;
    for (int rerun = 0; rerun < 3; ++rerun) {
      const gs::Transcript tr = gs::run_scenario(scenarios[i]);
      const std::string text = tr.to_jsonl();
      const std::string summary = tr.summary().dump(2);
      if (rerun == 0) {
        transcript = text;
        report = summary;
        continue;
      }
      const std::string tag = "scenario " + std::to_string(i) + " rerun " + std::to_string(rerun);
      t.expect(text == transcript, tag + " transcript differs");
      t.expect(summary == report, tag + " report differs");
    }
    t.expect(gs::replay_transcript(gs::Transcript::from_jsonl(transcript), scenarios[i]),
             "scenario " + std::to_string(i) + " failed replay from file");
  }
  return t.result(std::to_string(scenarios.size()) + " scenarios x 3 reruns byte-identical");
}

struct Criterion {
  const char* name;
  double budget_s;
  std::function<Result()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {"completeness", 60, completeness},
      {"group_key_consistency", 30, key_consistency},
      {"soundness", 60, soundness},
      {"detection_exactness", 300, detection_exactness},
      {"operation_counts", 10, op_counts},
      {"scaling", 60, scaling},
      {"ratio_equivalence", 10, ratio_equivalence},
      {"determinism", 30, determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Result r;
    try {
      r = c.run();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs <= c.budget_s;
    const bool pass = r.ok && in_time;
    failed += pass ? 0 : 1;
    std::printf("%s %-22s %.2fs/%.0fs%s  %s\n", pass ? "PASS" : "FAIL", c.name, secs, c.budget_s,
                in_time ? "" : " (over budget)", r.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
