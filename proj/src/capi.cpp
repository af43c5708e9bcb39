#include <cstring>
#include <new>
#include <string>
#include <vector>

#include "gauth/error.hpp"
#include "gauth/gauth.h"
#include "gauth/json_io.hpp"
#include "gauth/metrics.hpp"
#include "gauth/protocol.hpp"
#include "gauth/simnet.hpp"

namespace gp = gauth::protocol;
namespace gs = gauth::simnet;

struct gauth_rng {
  gauth::Rng rng;
};
struct gauth_group_secret {
  gp::GroupSecret secret;
};
struct gauth_credential {
  gp::Credential cred;
};
struct gauth_session {
  gp::SessionParams params;
};
struct gauth_group_key {
  gp::GroupKey key;
};
struct gauth_share {
  gp::AuthShare share;
};
struct gauth_scenario {
  gs::Scenario scenario;
};
struct gauth_transcript {
  gs::Transcript transcript;
};
struct gauth_bench_report {
  gauth::metrics::BenchReport report;
};

namespace {

thread_local std::string last_error;

gauth_status to_status(gauth::ErrorCode code) {
  switch (code) {
    case gauth::ErrorCode::kInvalidArgument: return GAUTH_ERR_INVALID_ARGUMENT;
    case gauth::ErrorCode::kDimensionMismatch: return GAUTH_ERR_DIMENSION_MISMATCH;
    case gauth::ErrorCode::kDependentBasis: return GAUTH_ERR_DEPENDENT_BASIS;
    case gauth::ErrorCode::kDegenerate: return GAUTH_ERR_DEGENERATE;
    case gauth::ErrorCode::kAuthFailure: return GAUTH_ERR_AUTH_FAILURE;
    case gauth::ErrorCode::kMalformed: return GAUTH_ERR_MALFORMED;
    case gauth::ErrorCode::kOracleInconsistent: return GAUTH_ERR_ORACLE_INCONSISTENT;
    case gauth::ErrorCode::kIo: return GAUTH_ERR_IO;
  }
  return GAUTH_ERR_INTERNAL;
}

gauth_verdict to_verdict(const gp::VerifyOutcome& outcome) {
  if (outcome.accepted()) return GAUTH_ACCEPT;
  switch (outcome.reason) {
    case gp::RejectReason::kSumMismatch: return GAUTH_REJECT_SUM_MISMATCH;
    case gp::RejectReason::kOutsiderOrBadKey: return GAUTH_REJECT_OUTSIDER_OR_BAD_KEY;
    default: return GAUTH_REJECT_MALFORMED_SESSION;
  }
}

// Runs body, translating every exception into a status and last_error.
template <class F>
gauth_status guarded(F&& body) {
  try {
    body();
    last_error.clear();
    return GAUTH_OK;
  } catch (const gauth::Error& e) {
    last_error = e.what();
    return to_status(e.code());
  } catch (const nlohmann::json::exception& e) {
    last_error = std::string("JSON: ") + e.what();
    return GAUTH_ERR_MALFORMED;
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return GAUTH_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return GAUTH_ERR_INTERNAL;
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw gauth::Error(gauth::ErrorCode::kInvalidArgument, what);
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

std::vector<gp::PublicKey> to_roster(const int64_t* roster, size_t len) {
  require(roster != nullptr || len == 0, "roster pointer is null");
  std::vector<gp::PublicKey> out;
  out.reserve(len);
  for (size_t i = 0; i < len; ++i) out.emplace_back(roster[i]);
  return out;
}

}  // namespace

extern "C" {

const char* gauth_version(void) { return "1.0.0"; }

const char* gauth_last_error(void) { return last_error.c_str(); }

const char* gauth_status_name(gauth_status status) {
  switch (status) {
    case GAUTH_OK: return "ok";
    case GAUTH_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case GAUTH_ERR_DIMENSION_MISMATCH: return "dimension_mismatch";
    case GAUTH_ERR_DEPENDENT_BASIS: return "dependent_basis";
    case GAUTH_ERR_DEGENERATE: return "degenerate";
    case GAUTH_ERR_AUTH_FAILURE: return "auth_failure";
    case GAUTH_ERR_MALFORMED: return "malformed";
    case GAUTH_ERR_ORACLE_INCONSISTENT: return "oracle_inconsistent";
    case GAUTH_ERR_IO: return "io";
    case GAUTH_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* gauth_verdict_name(gauth_verdict verdict) {
  switch (verdict) {
    case GAUTH_ACCEPT: return "accept";
    case GAUTH_REJECT_SUM_MISMATCH: return "sum_mismatch";
    case GAUTH_REJECT_OUTSIDER_OR_BAD_KEY: return "outsider_or_bad_key";
    case GAUTH_REJECT_MALFORMED_SESSION: return "malformed_session";
  }
  return "unknown";
}

void gauth_string_free(char* s) { std::free(s); }

gauth_status gauth_rng_new(uint64_t seed, gauth_rng** out) {
  return guarded([&] {
    require(out != nullptr, "out is null");
    *out = new gauth_rng{gauth::Rng(seed)};
  });
}

void gauth_rng_free(gauth_rng* rng) { delete rng; }

gauth_status gauth_group_secret_new(gauth_rng* rng, uint32_t d, uint32_t n,
                                    gauth_group_secret** out) {
  return guarded([&] {
    require(rng != nullptr && out != nullptr, "null argument");
    *out = new gauth_group_secret{gp::gm_setup(rng->rng, d, n)};
  });
}

gauth_status gauth_group_secret_from_json(const char* json, gauth_group_secret** out) {
  return guarded([&] {
    require(json != nullptr && out != nullptr, "null argument");
    *out = new gauth_group_secret{gp::group_secret_from_json(nlohmann::json::parse(json))};
  });
}

gauth_status gauth_group_secret_to_json(const gauth_group_secret* secret, char** out) {
  return guarded([&] {
    require(secret != nullptr && out != nullptr, "null argument");
    *out = dup_string(gp::to_json(secret->secret).dump());
  });
}

void gauth_group_secret_free(gauth_group_secret* secret) { delete secret; }

gauth_status gauth_credential_issue(const gauth_group_secret* secret, int64_t public_key,
                                    gauth_credential** out) {
  return guarded([&] {
    require(secret != nullptr && out != nullptr, "null argument");
    *out = new gauth_credential{gp::issue_credential(secret->secret, gp::PublicKey(public_key))};
  });
}

gauth_status gauth_credential_delegate(const gauth_credential* host, gauth_rng* rng,
                                       int64_t new_public_key, gauth_credential** out) {
  return guarded([&] {
    require(host != nullptr && rng != nullptr && out != nullptr, "null argument");
    *out = new gauth_credential{
        gp::delegate_credential(host->cred, rng->rng, gp::PublicKey(new_public_key))};
  });
}

gauth_status gauth_credential_from_json(const char* json, gauth_credential** out) {
  return guarded([&] {
    require(json != nullptr && out != nullptr, "null argument");
    *out = new gauth_credential{gp::credential_from_json(nlohmann::json::parse(json))};
  });
}

gauth_status gauth_credential_to_json(const gauth_credential* cred, char** out) {
  return guarded([&] {
    require(cred != nullptr && out != nullptr, "null argument");
    *out = dup_string(gp::to_json(cred->cred).dump());
  });
}

void gauth_credential_free(gauth_credential* cred) { delete cred; }

gauth_status gauth_session_new(const gauth_group_secret* secret, gauth_rng* rng,
                               const int64_t* roster, size_t roster_len,
                               uint32_t basis_index, gauth_session** out) {
  return guarded([&] {
    require(secret != nullptr && rng != nullptr && out != nullptr, "null argument");
    *out = new gauth_session{gp::new_session(secret->secret, rng->rng,
                                             to_roster(roster, roster_len),
                                             basis_index == 0 ? 1 : basis_index)};
  });
}

gauth_status gauth_session_renew(const gauth_group_secret* secret, const gauth_session* base,
                                 gauth_rng* rng, const int64_t* roster, size_t roster_len,
                                 gauth_session** out) {
  return guarded([&] {
    require(secret != nullptr && base != nullptr && rng != nullptr && out != nullptr,
            "null argument");
    *out = new gauth_session{gp::renew_nonce(secret->secret, base->params, rng->rng,
                                             to_roster(roster, roster_len))};
  });
}

gauth_status gauth_session_from_json(const char* json, gauth_session** out) {
  return guarded([&] {
    require(json != nullptr && out != nullptr, "null argument");
    *out = new gauth_session{nlohmann::json::parse(json).get<gp::SessionParams>()};
  });
}

gauth_status gauth_session_to_json(const gauth_session* session, char** out) {
  return guarded([&] {
    require(session != nullptr && out != nullptr, "null argument");
    *out = dup_string(nlohmann::json(session->params).dump());
  });
}

void gauth_session_free(gauth_session* session) { delete session; }

gauth_status gauth_derive_group_key(const gauth_credential* cred, const gauth_session* session,
                                    gauth_group_key** out) {
  return guarded([&] {
    require(cred != nullptr && session != nullptr && out != nullptr, "null argument");
    *out = new gauth_group_key{gp::derive_group_key(cred->cred, session->params)};
  });
}

gauth_status gauth_gm_group_key(const gauth_group_secret* secret, const gauth_session* session,
                                gauth_group_key** out) {
  return guarded([&] {
    require(secret != nullptr && session != nullptr && out != nullptr, "null argument");
    *out = new gauth_group_key{gp::gm_group_key(secret->secret, session->params)};
  });
}

gauth_status gauth_group_key_bytes(const gauth_group_key* key, uint8_t out[32]) {
  return guarded([&] {
    require(key != nullptr && out != nullptr, "null argument");
    std::memcpy(out, key->key.key_bytes.data(), key->key.key_bytes.size());
  });
}

gauth_status gauth_group_key_equal(const gauth_group_key* a, const gauth_group_key* b,
                                   int* equal) {
  return guarded([&] {
    require(a != nullptr && b != nullptr && equal != nullptr, "null argument");
    *equal = a->key == b->key ? 1 : 0;
  });
}

void gauth_group_key_free(gauth_group_key* key) { delete key; }

gauth_status gauth_share_create(const gauth_credential* cred, const gauth_session* session,
                                const gauth_group_key* key, gauth_rng* rng,
                                gauth_share** out) {
  return guarded([&] {
    require(cred != nullptr && session != nullptr && key != nullptr && rng != nullptr &&
                out != nullptr,
            "null argument");
    const auto c = gp::compute_share(cred->cred, session->params);
    *out = new gauth_share{gp::encrypt_share(key->key, c, cred->cred.public_key, rng->rng)};
  });
}

gauth_status gauth_share_to_wire(const gauth_share* share, uint8_t* buf, size_t cap,
                                 size_t* len) {
  return guarded([&] {
    require(share != nullptr && len != nullptr, "null argument");
    const auto wire = share->share.to_wire();
    *len = wire.size();
    if (buf == nullptr) return;
    require(cap >= wire.size(), "buffer too small for share");
    std::memcpy(buf, wire.data(), wire.size());
  });
}

gauth_status gauth_share_from_wire(const uint8_t* buf, size_t len, gauth_share** out) {
  return guarded([&] {
    require(buf != nullptr && out != nullptr, "null argument");
    *out = new gauth_share{gp::AuthShare::from_wire({buf, len})};
  });
}

void gauth_share_free(gauth_share* share) { delete share; }

gauth_status gauth_gm_verify(const gauth_group_secret* secret, const gauth_session* session,
                             const gauth_share* const* shares, size_t count,
                             const gauth_group_key* key, gauth_verdict* verdict) {
  return guarded([&] {
    require(secret != nullptr && session != nullptr && key != nullptr && verdict != nullptr,
            "null argument");
    require(shares != nullptr || count == 0, "shares pointer is null");
    std::vector<gp::AuthShare> list;
    list.reserve(count);
    for (size_t i = 0; i < count; ++i) {
      require(shares[i] != nullptr, "null share");
      list.push_back(shares[i]->share);
    }
    const gp::VerifyOutcome outcome =
        session->params.roster.size() == 1 && list.size() == 1
            ? gp::gm_verify_single(secret->secret, session->params, list.front(), key->key)
            : gp::gm_verify(secret->secret, session->params, list, key->key);
    *verdict = to_verdict(outcome);
  });
}

gauth_status gauth_scenario_from_json(const char* json, gauth_scenario** out) {
  return guarded([&] {
    require(json != nullptr && out != nullptr, "null argument");
    gs::Scenario sc = gs::scenario_from_json(nlohmann::json::parse(json));
    *out = new gauth_scenario{std::move(sc)};
  });
}

gauth_status gauth_scenario_to_json(const gauth_scenario* scenario, char** out) {
  return guarded([&] {
    require(scenario != nullptr && out != nullptr, "null argument");
    *out = dup_string(gs::to_json(scenario->scenario).dump());
  });
}

gauth_status gauth_scenario_set_seed(gauth_scenario* scenario, uint64_t seed) {
  return guarded([&] {
    require(scenario != nullptr, "null argument");
    scenario->scenario.seed = seed;
  });
}

gauth_status gauth_scenario_require_phase(gauth_scenario* scenario, const char* phase) {
  return guarded([&] {
    require(scenario != nullptr && phase != nullptr, "null argument");
    auto& phases = scenario->scenario.phases;
    const gs::Phase wanted = gs::phase_from_name(phase);
    std::vector<gs::Phase> needed{gs::Phase::kKeygen, wanted};
    if (wanted == gs::Phase::kAuth || wanted == gs::Phase::kDetect) {
      needed.push_back(gs::Phase::kGroupKey);
    }
    for (const gs::Phase p : needed) {
      if (std::find(phases.begin(), phases.end(), p) == phases.end()) phases.push_back(p);
    }
    std::sort(phases.begin(), phases.end());
  });
}

void gauth_scenario_free(gauth_scenario* scenario) { delete scenario; }

gauth_status gauth_run_scenario(const gauth_scenario* scenario, gauth_transcript** out) {
  return guarded([&] {
    require(scenario != nullptr && out != nullptr, "null argument");
    *out = new gauth_transcript{gs::run_scenario(scenario->scenario)};
  });
}

gauth_status gauth_transcript_to_jsonl(const gauth_transcript* t, char** out) {
  return guarded([&] {
    require(t != nullptr && out != nullptr, "null argument");
    *out = dup_string(t->transcript.to_jsonl());
  });
}

gauth_status gauth_transcript_summary_json(const gauth_transcript* t, char** out) {
  return guarded([&] {
    require(t != nullptr && out != nullptr, "null argument");
    *out = dup_string(t->transcript.summary().dump());
  });
}

gauth_status gauth_transcript_from_jsonl(const char* text, gauth_transcript** out) {
  return guarded([&] {
    require(text != nullptr && out != nullptr, "null argument");
    *out = new gauth_transcript{gs::Transcript::from_jsonl(text)};
  });
}

gauth_status gauth_transcript_auth_verdict(const gauth_transcript* t, gauth_verdict* verdict) {
  return guarded([&] {
    require(t != nullptr && verdict != nullptr, "null argument");
    const auto& outcomes = t->transcript.outcomes;
    require(outcomes.contains("auth"), "transcript has no auth phase");
    const auto& auth = outcomes.at("auth");
    if (auth.at("verdict") == "accept") {
      *verdict = GAUTH_ACCEPT;
      return;
    }
    const auto reason = auth.value("reason", std::string());
    *verdict = reason == "sum_mismatch"          ? GAUTH_REJECT_SUM_MISMATCH
               : reason == "outsider_or_bad_key" ? GAUTH_REJECT_OUTSIDER_OR_BAD_KEY
                                                 : GAUTH_REJECT_MALFORMED_SESSION;
  });
}

void gauth_transcript_free(gauth_transcript* t) { delete t; }

gauth_status gauth_replay_transcript(const gauth_transcript* t, const gauth_scenario* scenario,
                                     int* identical) {
  return guarded([&] {
    require(t != nullptr && scenario != nullptr && identical != nullptr, "null argument");
    *identical = gs::replay_transcript(t->transcript, scenario->scenario) ? 1 : 0;
  });
}

gauth_status gauth_keygen_json(uint64_t seed, uint32_t d, uint32_t n, uint32_t users,
                               char** out) {
  return guarded([&] {
    require(out != nullptr, "null argument");
    require(users >= 1, "need at least one user");
    gauth::Rng rng(seed);
    const gp::GroupSecret secret = gp::gm_setup(rng, d, n);
    nlohmann::json creds = nlohmann::json::array();
    for (uint32_t i = 1; i <= users; ++i) {
      creds.push_back(gp::to_json(gp::issue_credential(secret, gp::PublicKey(i))));
    }
    *out = dup_string(
        nlohmann::json{{"group_secret", gp::to_json(secret)}, {"credentials", creds}}.dump());
  });
}

gauth_status gauth_bench_run(const uint32_t* sizes, size_t count, uint32_t d, uint32_t n,
                             uint64_t seed, gauth_bench_report** out) {
  return guarded([&] {
    require(sizes != nullptr && count > 0 && out != nullptr, "null or empty argument");
    const std::vector<std::size_t> list(sizes, sizes + count);
    *out = new gauth_bench_report{gauth::metrics::run_scaling_bench(list, d, n, seed)};
  });
}

gauth_status gauth_bench_report_csv(const gauth_bench_report* r, char** out) {
  return guarded([&] {
    require(r != nullptr && out != nullptr, "null argument");
    *out = dup_string(gauth::metrics::to_csv(r->report));
  });
}

gauth_status gauth_bench_report_json(const gauth_bench_report* r, char** out) {
  return guarded([&] {
    require(r != nullptr && out != nullptr, "null argument");
    *out = dup_string(gauth::metrics::to_json(r->report).dump());
  });
}

void gauth_bench_report_free(gauth_bench_report* r) { delete r; }

gauth_status gauth_count_auth_ops_json(uint32_t m, uint32_t d, uint32_t n, char** out) {
  return guarded([&] {
    require(out != nullptr, "null argument");
    const auto counts = gauth::metrics::count_auth_ops(m, d, n);
    *out = dup_string(nlohmann::json{{"m", m},
                                     {"user", gauth::metrics::to_json(counts.user)},
                                     {"gm", gauth::metrics::to_json(counts.gm)},
                                     {"convention", gauth::metrics::ClosedForm::description()}}
                          .dump());
  });
}

gauth_status gauth_micro_bench_json(uint64_t seed, char** out) {
  return guarded([&] {
    require(out != nullptr, "null argument");
    const auto mb = gauth::metrics::run_micro_bench(seed);
    *out = dup_string(nlohmann::json{{"inner_product_ns", mb.inner_product_ns},
                                     {"division_ns", mb.division_ns},
                                     {"multiplication_ns", mb.multiplication_ns}}
                          .dump());
  });
}

}  // extern "C"
