/*
 * gauth.h - C interface to the inner-product group authentication library.
 *
 * All objects are opaque handles created by a *_new / *_from_* / producing
 * call and released with the matching *_free. Every fallible call returns a
 * gauth_status; on failure gauth_last_error() describes the problem for the
 * calling thread. Strings returned through char** are heap allocated and must
 * be released with gauth_string_free().
 *
 * Scalars cross the boundary as "num/den" strings inside JSON; public keys,
 * which are always integers, cross as int64_t.
 */
#ifndef GAUTH_GAUTH_H_
#define GAUTH_GAUTH_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define GAUTH_API __declspec(dllexport)
#else
#define GAUTH_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum gauth_status {
  GAUTH_OK = 0,
  GAUTH_ERR_INVALID_ARGUMENT = 1,
  GAUTH_ERR_DIMENSION_MISMATCH = 2,
  GAUTH_ERR_DEPENDENT_BASIS = 3,
  GAUTH_ERR_DEGENERATE = 4,
  GAUTH_ERR_AUTH_FAILURE = 5,
  GAUTH_ERR_MALFORMED = 6,
  GAUTH_ERR_ORACLE_INCONSISTENT = 7,
  GAUTH_ERR_IO = 8,
  GAUTH_ERR_INTERNAL = 99
} gauth_status;

typedef enum gauth_verdict {
  GAUTH_ACCEPT = 0,
  GAUTH_REJECT_SUM_MISMATCH = 1,
  GAUTH_REJECT_OUTSIDER_OR_BAD_KEY = 2,
  GAUTH_REJECT_MALFORMED_SESSION = 3
} gauth_verdict;

typedef struct gauth_rng gauth_rng;
typedef struct gauth_group_secret gauth_group_secret;
typedef struct gauth_credential gauth_credential;
typedef struct gauth_session gauth_session;
typedef struct gauth_group_key gauth_group_key;
typedef struct gauth_share gauth_share;
typedef struct gauth_scenario gauth_scenario;
typedef struct gauth_transcript gauth_transcript;
typedef struct gauth_bench_report gauth_bench_report;

GAUTH_API const char* gauth_version(void);
GAUTH_API const char* gauth_last_error(void);
GAUTH_API const char* gauth_status_name(gauth_status status);
GAUTH_API const char* gauth_verdict_name(gauth_verdict verdict);
GAUTH_API void gauth_string_free(char* s);

/* Deterministic random source. Not safe to share across threads. */
GAUTH_API gauth_status gauth_rng_new(uint64_t seed, gauth_rng** out);
GAUTH_API void gauth_rng_free(gauth_rng* rng);

/* Group manager secret: basis of W (n vectors in Q^d) and f(x) = ax + b. */
GAUTH_API gauth_status gauth_group_secret_new(gauth_rng* rng, uint32_t d, uint32_t n,
                                              gauth_group_secret** out);
GAUTH_API gauth_status gauth_group_secret_from_json(const char* json,
                                                    gauth_group_secret** out);
GAUTH_API gauth_status gauth_group_secret_to_json(const gauth_group_secret* secret,
                                                  char** out);
GAUTH_API void gauth_group_secret_free(gauth_group_secret* secret);

GAUTH_API gauth_status gauth_credential_issue(const gauth_group_secret* secret,
                                              int64_t public_key, gauth_credential** out);
GAUTH_API gauth_status gauth_credential_delegate(const gauth_credential* host,
                                                 gauth_rng* rng, int64_t new_public_key,
                                                 gauth_credential** out);
GAUTH_API gauth_status gauth_credential_from_json(const char* json, gauth_credential** out);
GAUTH_API gauth_status gauth_credential_to_json(const gauth_credential* cred, char** out);
GAUTH_API void gauth_credential_free(gauth_credential* cred);

/* Session parameters: fresh v, h, a non-degenerate g and the roster.
 * basis_index is 1-based; pass 0 for the default (first vector). */
GAUTH_API gauth_status gauth_session_new(const gauth_group_secret* secret, gauth_rng* rng,
                                         const int64_t* roster, size_t roster_len,
                                         uint32_t basis_index, gauth_session** out);
/* Keeps v, h of base; draws a new g for the given roster. */
GAUTH_API gauth_status gauth_session_renew(const gauth_group_secret* secret,
                                           const gauth_session* base, gauth_rng* rng,
                                           const int64_t* roster, size_t roster_len,
                                           gauth_session** out);
GAUTH_API gauth_status gauth_session_from_json(const char* json, gauth_session** out);
GAUTH_API gauth_status gauth_session_to_json(const gauth_session* session, char** out);
GAUTH_API void gauth_session_free(gauth_session* session);

GAUTH_API gauth_status gauth_derive_group_key(const gauth_credential* cred,
                                              const gauth_session* session,
                                              gauth_group_key** out);
GAUTH_API gauth_status gauth_gm_group_key(const gauth_group_secret* secret,
                                          const gauth_session* session,
                                          gauth_group_key** out);
GAUTH_API gauth_status gauth_group_key_bytes(const gauth_group_key* key, uint8_t out[32]);
GAUTH_API gauth_status gauth_group_key_equal(const gauth_group_key* a,
                                             const gauth_group_key* b, int* equal);
GAUTH_API void gauth_group_key_free(gauth_group_key* key);

/* Computes the member's blinded contribution and encrypts it under key. */
GAUTH_API gauth_status gauth_share_create(const gauth_credential* cred,
                                          const gauth_session* session,
                                          const gauth_group_key* key, gauth_rng* rng,
                                          gauth_share** out);
/* Binary wire form. Call with buf == NULL to learn the required length. */
GAUTH_API gauth_status gauth_share_to_wire(const gauth_share* share, uint8_t* buf,
                                           size_t cap, size_t* len);
GAUTH_API gauth_status gauth_share_from_wire(const uint8_t* buf, size_t len,
                                             gauth_share** out);
GAUTH_API void gauth_share_free(gauth_share* share);

/* GM-side check. A roster of one uses the single-member identity check. */
GAUTH_API gauth_status gauth_gm_verify(const gauth_group_secret* secret,
                                       const gauth_session* session,
                                       const gauth_share* const* shares, size_t count,
                                       const gauth_group_key* key, gauth_verdict* verdict);

/* Simulation harness. */
GAUTH_API gauth_status gauth_scenario_from_json(const char* json, gauth_scenario** out);
GAUTH_API gauth_status gauth_scenario_to_json(const gauth_scenario* scenario, char** out);
GAUTH_API gauth_status gauth_scenario_set_seed(gauth_scenario* scenario, uint64_t seed);
/* Adds the phase (and its prerequisites) if missing, keeping phase order. */
GAUTH_API gauth_status gauth_scenario_require_phase(gauth_scenario* scenario,
                                                    const char* phase);
GAUTH_API void gauth_scenario_free(gauth_scenario* scenario);

GAUTH_API gauth_status gauth_run_scenario(const gauth_scenario* scenario,
                                          gauth_transcript** out);
GAUTH_API gauth_status gauth_transcript_to_jsonl(const gauth_transcript* t, char** out);
GAUTH_API gauth_status gauth_transcript_summary_json(const gauth_transcript* t, char** out);
GAUTH_API gauth_status gauth_transcript_from_jsonl(const char* text, gauth_transcript** out);
/* GAUTH_ERR_INVALID_ARGUMENT when the transcript has no auth phase. */
GAUTH_API gauth_status gauth_transcript_auth_verdict(const gauth_transcript* t,
                                                     gauth_verdict* verdict);
GAUTH_API void gauth_transcript_free(gauth_transcript* t);
GAUTH_API gauth_status gauth_replay_transcript(const gauth_transcript* t,
                                               const gauth_scenario* scenario,
                                               int* identical);

/* GM secret plus credentials for public keys 1..users, as one JSON object. */
GAUTH_API gauth_status gauth_keygen_json(uint64_t seed, uint32_t d, uint32_t n,
                                         uint32_t users, char** out);

/* Benchmarks and operation counts. */
GAUTH_API gauth_status gauth_bench_run(const uint32_t* sizes, size_t count, uint32_t d,
                                       uint32_t n, uint64_t seed, gauth_bench_report** out);
GAUTH_API gauth_status gauth_bench_report_csv(const gauth_bench_report* r, char** out);
GAUTH_API gauth_status gauth_bench_report_json(const gauth_bench_report* r, char** out);
GAUTH_API void gauth_bench_report_free(gauth_bench_report* r);
GAUTH_API gauth_status gauth_count_auth_ops_json(uint32_t m, uint32_t d, uint32_t n,
                                                 char** out);
GAUTH_API gauth_status gauth_micro_bench_json(uint64_t seed, char** out);

#ifdef __cplusplus
}
#endif

#endif /* GAUTH_GAUTH_H_ */
