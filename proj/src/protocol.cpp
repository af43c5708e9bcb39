#include "gauth/protocol.hpp"

#include <sodium.h>

#include <algorithm>
#include <set>

#include "gauth/error.hpp"
#include "sodium_init.hpp"

namespace gauth::protocol {
namespace {

using metrics::bump;
using metrics::OpCounter;
using internal::ensure_sodium;

void require_distinct_nonzero(std::span<const PublicKey> roster) {
  if (roster.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "roster must not be empty");
  }
  std::vector<const PublicKey*> sorted;
  sorted.reserve(roster.size());
  for (const auto& x : roster) {
    if (x.is_zero()) {
      throw Error(ErrorCode::kInvalidArgument, "roster contains a zero public key");
    }
    sorted.push_back(&x);
  }
  std::sort(sorted.begin(), sorted.end(),
            [](const PublicKey* a, const PublicKey* b) { return *a < *b; });
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (*sorted[i - 1] == *sorted[i]) {
      throw Error(ErrorCode::kInvalidArgument,
                  "duplicate public key in roster: " + sorted[i]->to_string());
    }
  }
}

const Vector& agreed_vector(const Basis& basis, std::size_t basis_index) {
  if (basis_index < 1 || basis_index > basis.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "basis_index " + std::to_string(basis_index) + " outside [1, " +
                    std::to_string(basis.size()) + "]");
  }
  return basis[basis_index - 1];
}

Scalar sample_nonzero(Rng& rng) { return Scalar(rng.nonzero_int32_range()); }

}  // namespace

const char* reject_reason_name(RejectReason reason) {
  switch (reason) {
    case RejectReason::kNone: return "none";
    case RejectReason::kSumMismatch: return "sum_mismatch";
    case RejectReason::kOutsiderOrBadKey: return "outsider_or_bad_key";
    case RejectReason::kMalformedSession: return "malformed_session";
  }
  return "unknown";
}

GroupSecret::GroupSecret(Basis basis, Scalar f_a, Scalar f_b)
    : basis_(std::move(basis)), f_a_(std::move(f_a)), f_b_(std::move(f_b)) {
  if (f_a_.is_zero()) {
    throw Error(ErrorCode::kInvalidArgument, "f must have degree exactly 1 (f_a != 0)");
  }
}

void SessionParams::validate(std::size_t ambient_dim, std::size_t dim) const {
  require_distinct_nonzero(roster);
  if (basis_index < 1 || basis_index > dim) {
    throw Error(ErrorCode::kInvalidArgument,
                "basis_index " + std::to_string(basis_index) + " outside [1, " +
                    std::to_string(dim) + "]");
  }
  for (const Vector* vec : {&v, &h, &g}) {
    if (vec->dim() != ambient_dim) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "session vector has dimension " + std::to_string(vec->dim()) +
                      ", expected " + std::to_string(ambient_dim));
    }
  }
}

GroupKey GroupKey::from_scalar(Scalar s) {
  ensure_sodium();
  GroupKey key;
  const Bytes encoded = exactmath::encode(s);
  crypto_hash_sha256(key.key_bytes.data(), encoded.data(), encoded.size());
  key.s = std::move(s);
  return key;
}

Bytes AuthShare::to_wire() const {
  Bytes out = exactmath::encode(sender);
  out.insert(out.end(), nonce.begin(), nonce.end());
  out.insert(out.end(), ciphertext_and_tag.begin(), ciphertext_and_tag.end());
  return out;
}

AuthShare AuthShare::from_wire(std::span<const std::uint8_t> wire) {
  std::size_t offset = 0;
  AuthShare share;
  share.sender = exactmath::decode_scalar(wire, offset);
  if (wire.size() - offset < kNonceBytes + kTagBytes) {
    throw Error(ErrorCode::kMalformed, "auth share too short");
  }
  std::copy_n(wire.begin() + static_cast<std::ptrdiff_t>(offset), kNonceBytes,
              share.nonce.begin());
  offset += kNonceBytes;
  share.ciphertext_and_tag.assign(wire.begin() + static_cast<std::ptrdiff_t>(offset),
                                  wire.end());
  return share;
}

GroupSecret gm_setup(Rng& rng, std::size_t d, std::size_t n) {
  if (n < 1 || n >= d) {
    throw Error(ErrorCode::kInvalidArgument,
                "gm_setup needs 1 <= n < d (got n=" + std::to_string(n) +
                    ", d=" + std::to_string(d) + ")");
  }
  Basis basis = exactmath::sample_basis(rng, d, n);
  Scalar f_a = sample_nonzero(rng);
  Scalar f_b = sample_nonzero(rng);
  return GroupSecret(std::move(basis), std::move(f_a), std::move(f_b));
}

Credential issue_credential(const GroupSecret& secret, const PublicKey& x) {
  if (x.is_zero() || !x.is_integer()) {
    throw Error(ErrorCode::kInvalidArgument,
                "public key must be a nonzero integer, got " + x.to_string());
  }
  const Scalar fx = secret.f(x);
  if (fx.is_zero()) {
    throw Error(ErrorCode::kDegenerate,
                "f(x) = 0 for x = " + x.to_string() + "; choose a different public key");
  }
  return Credential{x, secret.basis().scaled(fx), Provenance{}};
}

NonceDraw draw_nonce(const GroupSecret& secret, std::size_t basis_index, Rng& rng,
                     const NonceSampler& sampler) {
  const Vector& vi = agreed_vector(secret.basis(), basis_index);
  const std::size_t d = secret.ambient_dim();
  for (int attempt = 0; attempt <= exactmath::kMaxResamples; ++attempt) {
    Vector g = sampler ? sampler(rng, d) : exactmath::sample_vector(rng, d);
    if (!exactmath::inner_product(vi, g).is_zero()) return NonceDraw{std::move(g), attempt};
  }
  throw Error(ErrorCode::kDegenerate,
              "nonce g stayed orthogonal to the agreed basis vector after 16 redraws");
}

SessionParams new_session(const GroupSecret& secret, Rng& rng,
                          std::vector<PublicKey> roster, std::size_t basis_index) {
  SessionParams params;
  params.v = exactmath::sample_vector(rng, secret.ambient_dim());
  params.h = exactmath::sample_vector(rng, secret.ambient_dim());
  params.g = draw_nonce(secret, basis_index, rng).g;
  params.roster = std::move(roster);
  params.basis_index = basis_index;
  params.validate(secret.ambient_dim(), secret.dim());
  return params;
}

SessionParams renew_nonce(const GroupSecret& secret, const SessionParams& base,
                          Rng& rng, std::vector<PublicKey> roster) {
  SessionParams params = base;
  params.g = draw_nonce(secret, base.basis_index, rng).g;
  params.roster = std::move(roster);
  params.validate(secret.ambient_dim(), secret.dim());
  return params;
}

Scalar gm_expected_value(const GroupSecret& secret, const SessionParams& params,
                         OpCounter* counter) {
  const Vector& vi = agreed_vector(secret.basis(), params.basis_index);
  const Scalar ip = exactmath::inner_product(vi, params.g);
  bump(counter, &OpCounter::inner_prod);
  bump(counter, &OpCounter::mult);
  return secret.f_b() * ip;
}

GroupKey gm_group_key(const GroupSecret& secret, const SessionParams& params) {
  return GroupKey::from_scalar(
      exactmath::inner_product(exactmath::project(params.v, secret.basis()), params.h));
}

VerifyOutcome gm_verify(const GroupSecret& secret, const SessionParams& params,
                        std::span<const AuthShare> shares, const GroupKey& key,
                        OpCounter* counter) {
  try {
    params.validate(secret.ambient_dim(), secret.dim());
  } catch (const Error& e) {
    return VerifyOutcome::reject(RejectReason::kMalformedSession, {}, e.what());
  }
  if (shares.size() != params.roster.size()) {
    return VerifyOutcome::reject(RejectReason::kMalformedSession, {},
                                 "expected " + std::to_string(params.roster.size()) +
                                     " shares, got " + std::to_string(shares.size()));
  }
  const std::set<PublicKey> roster(params.roster.begin(), params.roster.end());
  std::set<PublicKey> seen;
  for (const auto& share : shares) {
    if (roster.count(share.sender) == 0) {
      return VerifyOutcome::reject(RejectReason::kMalformedSession, share.sender,
                                   "sender not in roster");
    }
    if (!seen.insert(share.sender).second) {
      return VerifyOutcome::reject(RejectReason::kMalformedSession, share.sender,
                                   "duplicate sender");
    }
  }

  Scalar sum;
  bool first = true;
  for (const auto& share : shares) {
    Scalar contribution;
    try {
      bump(counter, &OpCounter::decrypt);
      contribution = decrypt_share(key, share);
    } catch (const Error& e) {
      const auto reason = e.code() == ErrorCode::kAuthFailure
                              ? RejectReason::kOutsiderOrBadKey
                              : RejectReason::kMalformedSession;
      return VerifyOutcome::reject(reason, share.sender, e.what());
    }
    if (!first) bump(counter, &OpCounter::add);
    sum += contribution;
    first = false;
  }

  if (sum == gm_expected_value(secret, params, counter)) return VerifyOutcome::accept();
  return VerifyOutcome::reject(RejectReason::kSumMismatch, {},
                               "sum of contributions differs from <v_i,g> f(0)");
}

VerifyOutcome gm_verify_single(const GroupSecret& secret, const SessionParams& params,
                               const AuthShare& share, const GroupKey& key,
                               OpCounter* counter) {
  try {
    params.validate(secret.ambient_dim(), secret.dim());
  } catch (const Error& e) {
    return VerifyOutcome::reject(RejectReason::kMalformedSession, {}, e.what());
  }
  if (params.roster.size() != 1 || !(params.roster.front() == share.sender)) {
    return VerifyOutcome::reject(RejectReason::kMalformedSession, share.sender,
                                 "single verification needs a roster of exactly the sender");
  }
  Scalar contribution;
  try {
    bump(counter, &OpCounter::decrypt);
    contribution = decrypt_share(key, share);
  } catch (const Error& e) {
    const auto reason = e.code() == ErrorCode::kAuthFailure
                            ? RejectReason::kOutsiderOrBadKey
                            : RejectReason::kMalformedSession;
    return VerifyOutcome::reject(reason, share.sender, e.what());
  }
  const Vector& vi = agreed_vector(secret.basis(), params.basis_index);
  bump(counter, &OpCounter::inner_prod);
  bump(counter, &OpCounter::mult, 2);
  bump(counter, &OpCounter::add);
  const Scalar expected = secret.f(share.sender) * exactmath::inner_product(vi, params.g);
  if (contribution == expected) return VerifyOutcome::accept();
  return VerifyOutcome::reject(RejectReason::kSumMismatch, share.sender,
                               "contribution differs from f(x_j) <v_i,g>");
}

GroupKey derive_group_key(const Credential& cred, const SessionParams& params) {
  return GroupKey::from_scalar(exactmath::inner_product(
      exactmath::project(params.v, cred.private_basis), params.h));
}

Scalar lagrange_coefficient(const PublicKey& x, std::span<const PublicKey> roster,
                            OpCounter* counter) {
  require_distinct_nonzero(roster);
  if (std::find(roster.begin(), roster.end(), x) == roster.end()) {
    throw Error(ErrorCode::kInvalidArgument,
                "public key " + x.to_string() + " is not in the roster");
  }
  // A_j = prod_{k != j} (-x_k) / (x_j - x_k). One division per term, then a
  // balanced product tree so operand sizes stay matched (m-2 products).
  std::vector<mpq_class> terms(roster.size() - 1);
  mpq_class diff;
  std::size_t t = 0;
  for (const auto& xk : roster) {
    if (xk == x) continue;
    bump(counter, &OpCounter::add);
    bump(counter, &OpCounter::div);
    mpq_sub(diff.get_mpq_t(), x.value().get_mpq_t(), xk.value().get_mpq_t());
    mpq_div(terms[t].get_mpq_t(), xk.value().get_mpq_t(), diff.get_mpq_t());
    mpq_neg(terms[t].get_mpq_t(), terms[t].get_mpq_t());
    ++t;
  }
  if (terms.empty()) return Scalar(1);
  while (terms.size() > 1) {
    std::size_t out = 0;
    for (std::size_t i = 0; i + 1 < terms.size(); i += 2) {
      bump(counter, &OpCounter::mult);
      mpq_mul(terms[out].get_mpq_t(), terms[i].get_mpq_t(), terms[i + 1].get_mpq_t());
      ++out;
    }
    if (terms.size() % 2 == 1) mpq_swap(terms[out++].get_mpq_t(), terms.back().get_mpq_t());
    terms.resize(out);
  }
  return Scalar(std::move(terms.front()));
}

Scalar compute_share(const Credential& cred, const SessionParams& params,
                     OpCounter* counter) {
  const Vector& bi = agreed_vector(cred.private_basis, params.basis_index);
  const Scalar a = lagrange_coefficient(cred.public_key, params.roster, counter);
  const Vector blinded = bi.scaled(a);
  bump(counter, &OpCounter::mult, blinded.dim());
  bump(counter, &OpCounter::inner_prod);
  return exactmath::inner_product(blinded, params.g);
}

AuthShare encrypt_share(const GroupKey& key, const Scalar& contribution,
                        const PublicKey& sender, Rng& rng) {
  ensure_sodium();
  AuthShare share;
  share.sender = sender;
  rng.fill(share.nonce);
  const Bytes aad = exactmath::encode(sender);
  const Bytes plaintext = exactmath::encode(contribution);
  share.ciphertext_and_tag.resize(plaintext.size() +
                                  crypto_aead_chacha20poly1305_ietf_ABYTES);
  unsigned long long written = 0;
  crypto_aead_chacha20poly1305_ietf_encrypt(
      share.ciphertext_and_tag.data(), &written, plaintext.data(), plaintext.size(),
      aad.data(), aad.size(), nullptr, share.nonce.data(), key.key_bytes.data());
  share.ciphertext_and_tag.resize(written);
  return share;
}

Scalar decrypt_share(const GroupKey& key, const AuthShare& share) {
  ensure_sodium();
  if (share.ciphertext_and_tag.size() < crypto_aead_chacha20poly1305_ietf_ABYTES) {
    throw Error(ErrorCode::kMalformed, "ciphertext shorter than the tag");
  }
  const Bytes aad = exactmath::encode(share.sender);
  Bytes plaintext(share.ciphertext_and_tag.size() -
                  crypto_aead_chacha20poly1305_ietf_ABYTES);
  unsigned long long written = 0;
  if (crypto_aead_chacha20poly1305_ietf_decrypt(
          plaintext.data(), &written, nullptr, share.ciphertext_and_tag.data(),
          share.ciphertext_and_tag.size(), aad.data(), aad.size(), share.nonce.data(),
          key.key_bytes.data()) != 0) {
    throw Error(ErrorCode::kAuthFailure,
                "share from " + share.sender.to_string() + " failed authentication");
  }
  plaintext.resize(written);
  return exactmath::decode_scalar(plaintext);
}

Credential delegate_credential(const Credential& host, Rng& rng,
                               const PublicKey& new_public_key) {
  if (new_public_key.is_zero() || !new_public_key.is_integer()) {
    throw Error(ErrorCode::kInvalidArgument, "delegated public key must be a nonzero integer");
  }
  const Scalar t = sample_nonzero(rng);
  return Credential{new_public_key, host.private_basis.scaled(t),
                    Provenance{Provenance::Kind::kDelegated, host.public_key}};
}

Credential delegate_credential(const Credential& host, Rng& rng) {
  const PublicKey fresh = sample_nonzero(rng);
  return delegate_credential(host, rng, fresh);
}

}  // namespace gauth::protocol
