#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gauth/exactmath.hpp"
#include "gauth/op_counter.hpp"
#include "gauth/rng.hpp"

namespace gauth::protocol {

using exactmath::Basis;
using exactmath::Bytes;
using exactmath::Scalar;
using exactmath::Vector;

// Public keys are nonzero integers carried as Scalars.
using PublicKey = Scalar;

// The GM's secret: a basis of the hidden subspace W and f(x) = f_a*x + f_b.
class GroupSecret {
 public:
  GroupSecret(Basis basis, Scalar f_a, Scalar f_b);

  const Basis& basis() const { return basis_; }
  const Scalar& f_a() const { return f_a_; }
  const Scalar& f_b() const { return f_b_; }
  std::size_t ambient_dim() const { return basis_.ambient_dim(); }
  std::size_t dim() const { return basis_.size(); }

  Scalar f(const Scalar& x) const { return f_a_ * x + f_b_; }

 private:
  Basis basis_;
  Scalar f_a_;
  Scalar f_b_;
};

struct Provenance {
  enum class Kind { kGmIssued, kDelegated };
  Kind kind = Kind::kGmIssued;
  std::optional<PublicKey> host;  // set iff kind == kDelegated

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

struct Credential {
  PublicKey public_key;
  Basis private_basis;
  Provenance provenance;

  friend bool operator==(const Credential&, const Credential&) = default;
};

struct SessionParams {
  Vector v;
  Vector h;
  Vector g;
  std::vector<PublicKey> roster;
  std::size_t basis_index = 1;  // 1-based

  // Throws kInvalidArgument / kDimensionMismatch on any violated invariant.
  void validate(std::size_t ambient_dim, std::size_t dim) const;
};

struct GroupKey {
  Scalar s;
  std::array<std::uint8_t, 32> key_bytes{};

  // key_bytes = SHA-256(encode(s)).
  static GroupKey from_scalar(Scalar s);

  friend bool operator==(const GroupKey&, const GroupKey&) = default;
};

inline constexpr std::size_t kNonceBytes = 12;
inline constexpr std::size_t kTagBytes = 16;

struct AuthShare {
  PublicKey sender;
  std::array<std::uint8_t, kNonceBytes> nonce{};
  Bytes ciphertext_and_tag;

  // sender encoding || nonce || ciphertext || tag
  Bytes to_wire() const;
  static AuthShare from_wire(std::span<const std::uint8_t> wire);

  friend bool operator==(const AuthShare&, const AuthShare&) = default;
};

enum class Verdict { kAccept, kReject };

enum class RejectReason {
  kNone,
  kSumMismatch,
  kOutsiderOrBadKey,
  kMalformedSession,
};

const char* reject_reason_name(RejectReason reason);

struct VerifyOutcome {
  Verdict verdict = Verdict::kReject;
  RejectReason reason = RejectReason::kNone;
  std::optional<PublicKey> sender;  // the offending share, when known
  std::string detail;

  bool accepted() const { return verdict == Verdict::kAccept; }
  static VerifyOutcome accept() { return {Verdict::kAccept, RejectReason::kNone, {}, {}}; }
  static VerifyOutcome reject(RejectReason reason, std::optional<PublicKey> sender,
                              std::string detail) {
    return {Verdict::kReject, reason, std::move(sender), std::move(detail)};
  }
};

// --- GM side -------------------------------------------------------------

GroupSecret gm_setup(Rng& rng, std::size_t d, std::size_t n);

Credential issue_credential(const GroupSecret& secret, const PublicKey& x);

using NonceSampler = std::function<Vector(Rng&, std::size_t dim)>;

struct NonceDraw {
  Vector g;
  int resamples = 0;
};

// Draws g with <v_i, g> != 0 so the session is not vacuous. Gives up after
// kMaxResamples redraws.
NonceDraw draw_nonce(const GroupSecret& secret, std::size_t basis_index, Rng& rng,
                     const NonceSampler& sampler = {});

// Fresh v, h and a non-degenerate g for the given roster.
SessionParams new_session(const GroupSecret& secret, Rng& rng,
                          std::vector<PublicKey> roster, std::size_t basis_index = 1);

// Same as new_session but keeps the key-derivation vectors v, h of `base`.
SessionParams renew_nonce(const GroupSecret& secret, const SessionParams& base,
                          Rng& rng, std::vector<PublicKey> roster);

Scalar gm_expected_value(const GroupSecret& secret, const SessionParams& params,
                         metrics::OpCounter* counter = nullptr);

// The GM derives the group key from its own basis.
GroupKey gm_group_key(const GroupSecret& secret, const SessionParams& params);

VerifyOutcome gm_verify(const GroupSecret& secret, const SessionParams& params,
                        std::span<const AuthShare> shares, const GroupKey& key,
                        metrics::OpCounter* counter = nullptr);

VerifyOutcome gm_verify_single(const GroupSecret& secret, const SessionParams& params,
                               const AuthShare& share, const GroupKey& key,
                               metrics::OpCounter* counter = nullptr);

// --- member side -----------------------------------------------------------

GroupKey derive_group_key(const Credential& cred, const SessionParams& params);

Scalar lagrange_coefficient(const PublicKey& x, std::span<const PublicKey> roster,
                            metrics::OpCounter* counter = nullptr);

// <b_i * A_j, g>, where b_i is the agreed vector of the member's basis.
Scalar compute_share(const Credential& cred, const SessionParams& params,
                     metrics::OpCounter* counter = nullptr);

AuthShare encrypt_share(const GroupKey& key, const Scalar& contribution,
                        const PublicKey& sender, Rng& rng);

// Throws kAuthFailure on tag mismatch, kMalformed on a bad plaintext.
Scalar decrypt_share(const GroupKey& key, const AuthShare& share);

// New member's basis is t * host basis for a random nonzero integer t.
Credential delegate_credential(const Credential& host, Rng& rng,
                               const PublicKey& new_public_key);
Credential delegate_credential(const Credential& host, Rng& rng);

}  // namespace gauth::protocol
