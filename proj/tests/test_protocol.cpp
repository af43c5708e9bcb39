#include <algorithm>
#include <vector>

#include "doctest.h"
#include "gauth/error.hpp"
#include "gauth/json_io.hpp"
#include "gauth/protocol.hpp"
#include "oracle.hpp"

using namespace gauth::protocol;
using gauth::Error;
using gauth::ErrorCode;
using gauth::Rng;
namespace exactmath = gauth::exactmath;

namespace {

// d = 3, n = 1, v_1 = (1,0,3), f(x) = 2x + 5.
GroupSecret worked_secret() { return GroupSecret(Basis({Vector{1, 0, 3}}), 2, 5); }

SessionParams worked_params(std::vector<PublicKey> roster) {
  SessionParams p;
  p.v = Vector{1, 2, 3};
  p.h = Vector{4, 5, 6};
  p.g = Vector{1, 1, 1};
  p.roster = std::move(roster);
  return p;
}

std::vector<PublicKey> keys(std::initializer_list<int> xs) {
  std::vector<PublicKey> out;
  for (int x : xs) out.emplace_back(x);
  return out;
}

std::vector<AuthShare> honest_shares(const std::vector<Credential>& creds,
                                     const SessionParams& params, const GroupKey& key,
                                     Rng& rng) {
  std::vector<AuthShare> out;
  for (const auto& c : creds) {
    out.push_back(encrypt_share(key, compute_share(c, params), c.public_key, rng));
  }
  return out;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected gauth::Error");
  return ErrorCode::kIo;
}

}  // namespace

TEST_CASE("gm setup") {
  Rng a(1);
  Rng b(1);
  const GroupSecret s1 = gm_setup(a, 3, 1);
  const GroupSecret s2 = gm_setup(b, 3, 1);
  CHECK(s1.basis() == s2.basis());
  CHECK(s1.f_a() == s2.f_a());
  CHECK(exactmath::rank(s1.basis().vectors()) == 1);

  Rng r(2);
  const GroupSecret big = gm_setup(r, 10, 3);
  CHECK(big.dim() == 3);
  CHECK_FALSE(big.f_a().is_zero());
  CHECK_THROWS_AS(gm_setup(r, 2, 2), Error);
  CHECK(code_of([] { GroupSecret(Basis({Vector{1, 0}}), 0, 1); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("credential issuance") {
  const GroupSecret secret = worked_secret();
  const Credential c = issue_credential(secret, 1);
  CHECK(c.private_basis[0] == Vector{7, 0, 21});
  CHECK(c.provenance.kind == Provenance::Kind::kGmIssued);
  CHECK(code_of([&] { issue_credential(secret, Scalar(-5, 2)); }) == ErrorCode::kInvalidArgument);

  // A rational root of f cannot be hit by an integer key, so use f = 2x + 6.
  const GroupSecret even(Basis({Vector{1, 0, 3}}), 2, 6);
  CHECK(code_of([&] { issue_credential(even, -3); }) == ErrorCode::kDegenerate);
  CHECK(code_of([&] { issue_credential(secret, 0); }) == ErrorCode::kInvalidArgument);

  Rng rng(4);
  const GroupSecret s = gm_setup(rng, 8, 3);
  const Credential cj = issue_credential(s, 17);
  std::vector<Vector> both(cj.private_basis.vectors().begin(), cj.private_basis.vectors().end());
  both.insert(both.end(), s.basis().vectors().begin(), s.basis().vectors().end());
  CHECK(exactmath::rank(cj.private_basis.vectors()) == 3);
  CHECK(exactmath::rank(both) == 3);
}

TEST_CASE("lagrange coefficients") {
  CHECK(lagrange_coefficient(5, keys({5})) == Scalar(1));
  CHECK(lagrange_coefficient(1, keys({1, 2})) == Scalar(2));
  CHECK(lagrange_coefficient(2, keys({1, 2})) == Scalar(-1));
  CHECK(code_of([] { lagrange_coefficient(3, keys({1, 2})); }) == ErrorCode::kInvalidArgument);
  CHECK(code_of([] { lagrange_coefficient(1, keys({1, 1, 2})); }) == ErrorCode::kInvalidArgument);

  Rng rng(8);
  for (int trial = 0; trial < 40; ++trial) {
    const Scalar a(rng.nonzero_int32_range());
    const Scalar b(rng.nonzero_int32_range());
    std::vector<PublicKey> roster;
    const std::size_t m = 2 + rng.uniform(11);  // linear f needs two nodes
    while (roster.size() < m) {
      const PublicKey x(static_cast<std::int64_t>(rng.uniform(2000)) - 1000);
      if (x.is_zero() || std::find(roster.begin(), roster.end(), x) != roster.end()) continue;
      roster.push_back(x);
    }
    std::vector<oracle::Q> nodes;
    for (const auto& x : roster) nodes.push_back(oracle::from_scalar(x));
    Scalar sum;
    for (const auto& x : roster) {
      const Scalar coeff = lagrange_coefficient(x, roster);
      CHECK(oracle::from_scalar(coeff) == oracle::lagrange_at_zero(oracle::from_scalar(x), nodes));
      sum += (a * x + b) * coeff;
    }
    CHECK(sum == b);
    CHECK(oracle::interpolate_linear_at_zero(oracle::from_scalar(a), oracle::from_scalar(b),
                                             nodes) == oracle::from_scalar(b));
  }
}

TEST_CASE("worked two-member example") {
  const GroupSecret secret = worked_secret();
  const SessionParams params = worked_params(keys({1, 2}));
  const Credential u1 = issue_credential(secret, 1);
  const Credential u2 = issue_credential(secret, 2);
  CHECK(compute_share(u1, params) == Scalar(56));
  CHECK(compute_share(u2, params) == Scalar(-36));
  CHECK(gm_expected_value(secret, params) == Scalar(20));

  const GroupKey key = derive_group_key(u1, params);
  CHECK(key == derive_group_key(u2, params));
  CHECK(key == gm_group_key(secret, params));
  Rng rng(1);
  const auto shares = honest_shares({u1, u2}, params, key, rng);
  CHECK(gm_verify(secret, params, shares, key).accepted());
}

TEST_CASE("share edge cases") {
  const GroupSecret secret = worked_secret();
  SessionParams single = worked_params(keys({3}));
  const Credential u3 = issue_credential(secret, 3);
  CHECK(compute_share(u3, single) == secret.f(3) * Scalar(4));

  SessionParams orth = worked_params(keys({3, 1}));
  orth.g = Vector{3, 7, -1};  // orthogonal to v_1
  CHECK(compute_share(u3, orth).is_zero());
  CHECK(gm_expected_value(secret, orth).is_zero());

  const GroupSecret zero_b(Basis({Vector{1, 0, 3}}), 2, 0);
  CHECK(gm_expected_value(zero_b, worked_params(keys({1}))).is_zero());

  SessionParams bad_index = worked_params(keys({3}));
  bad_index.basis_index = 2;
  CHECK_THROWS_AS(compute_share(u3, bad_index), Error);
}

TEST_CASE("group key derivation") {
  const GroupSecret plane(Basis({Vector{1, 0, 0}, Vector{0, 1, 0}}), 3, 1);
  SessionParams p;
  p.v = Vector{1, 1, 1};
  p.h = Vector{2, 3, 4};
  p.g = Vector{1, 1, 1};
  p.roster = keys({1, 2});
  const GroupKey k = derive_group_key(issue_credential(plane, 1), p);
  CHECK(k.s == Scalar(5));
  CHECK(k == GroupKey::from_scalar(5));
  CHECK(k.key_bytes == gauth::sha256(exactmath::encode(Scalar(5))));

  p.v = Vector{4, -2, 0};  // already in W
  CHECK(derive_group_key(issue_credential(plane, 9), p).s == exactmath::inner_product(p.v, p.h));

  Rng rng(13);
  for (int trial = 0; trial < 10; ++trial) {
    const GroupSecret s = gm_setup(rng, 9, 4);
    const SessionParams sp = new_session(s, rng, keys({1, 2, 3}));
    const Credential a = issue_credential(s, 1);
    const Credential b = issue_credential(s, 2);
    const Credential c = delegate_credential(a, rng, 99);
    const GroupKey ka = derive_group_key(a, sp);
    CHECK(ka == derive_group_key(b, sp));
    CHECK(ka == derive_group_key(c, sp));
    CHECK(ka == gm_group_key(s, sp));
    const auto proj = oracle::project(oracle::from_vector(sp.v), oracle::from_basis(s.basis()));
    CHECK(oracle::from_scalar(ka.s) == oracle::dot(proj, oracle::from_vector(sp.h)));
  }
}

TEST_CASE("share encryption") {
  Rng rng(21);
  const GroupKey key = GroupKey::from_scalar(Scalar(17, 3));
  const GroupKey other = GroupKey::from_scalar(Scalar(18, 3));
  const Scalar c(-123456789, 7);
  const AuthShare share = encrypt_share(key, c, 4, rng);
  CHECK(decrypt_share(key, share) == c);
  CHECK(code_of([&] { decrypt_share(other, share); }) == ErrorCode::kAuthFailure);

  AuthShare tampered = share;
  tampered.ciphertext_and_tag[0] ^= 0x01;
  CHECK(code_of([&] { decrypt_share(key, tampered); }) == ErrorCode::kAuthFailure);

  AuthShare resent = share;  // sender is bound as associated data
  resent.sender = 5;
  CHECK(code_of([&] { decrypt_share(key, resent); }) == ErrorCode::kAuthFailure);

  CHECK(AuthShare::from_wire(share.to_wire()) == share);
  auto wire = share.to_wire();
  wire.pop_back();
  wire.resize(8);
  CHECK_THROWS_AS(AuthShare::from_wire(wire), Error);

  // Fresh nonces per encryption.
  CHECK(encrypt_share(key, c, 4, rng).nonce != share.nonce);
}

TEST_CASE("nonce resampling") {
  const GroupSecret secret = worked_secret();
  int calls = 0;
  const NonceSampler sampler = [&](Rng&, std::size_t) {
    return ++calls == 1 ? Vector{3, 7, -1} : Vector{1, 1, 1};
  };
  Rng rng(1);
  const NonceDraw draw = draw_nonce(secret, 1, rng, sampler);
  CHECK(draw.resamples == 1);
  CHECK(draw.g == Vector{1, 1, 1});

  const NonceSampler always_bad = [](Rng&, std::size_t) { return Vector{3, 7, -1}; };
  CHECK(code_of([&] { draw_nonce(secret, 1, rng, always_bad); }) == ErrorCode::kDegenerate);
}

TEST_CASE("gm verification") {
  Rng rng(31);
  const GroupSecret secret = gm_setup(rng, 10, 3);
  const auto roster = keys({1, 2, 3});
  std::vector<Credential> creds;
  for (const auto& x : roster) creds.push_back(issue_credential(secret, x));
  const SessionParams params = new_session(secret, rng, roster);
  const GroupKey key = gm_group_key(secret, params);
  auto shares = honest_shares(creds, params, key, rng);

  CHECK(gm_verify(secret, params, shares, key).accepted());

  SUBCASE("order does not matter") {
    std::reverse(shares.begin(), shares.end());
    CHECK(gm_verify(secret, params, shares, key).accepted());
  }
  SUBCASE("plus one is rejected") {
    const Scalar c = compute_share(creds[1], params) + Scalar(1);
    shares[1] = encrypt_share(key, c, creds[1].public_key, rng);
    const auto out = gm_verify(secret, params, shares, key);
    CHECK(out.reason == RejectReason::kSumMismatch);
  }
  SUBCASE("outsider key is rejected") {
    Rng other(999);
    const GroupSecret fake = gm_setup(other, 10, 3);
    const Credential outsider = issue_credential(fake, 2);
    const GroupKey wrong = derive_group_key(outsider, params);
    CHECK_FALSE(wrong == key);
    shares[1] = encrypt_share(wrong, compute_share(outsider, params), 2, rng);
    const auto out = gm_verify(secret, params, shares, key);
    CHECK(out.reason == RejectReason::kOutsiderOrBadKey);
    CHECK(out.sender == PublicKey(2));
  }
  SUBCASE("malformed sessions") {
    auto missing = shares;
    missing.pop_back();
    CHECK(gm_verify(secret, params, missing, key).reason == RejectReason::kMalformedSession);
    auto dup = shares;
    dup[2] = dup[1];
    CHECK(gm_verify(secret, params, dup, key).reason == RejectReason::kMalformedSession);
    auto stranger = shares;
    stranger[0] = encrypt_share(key, Scalar(1), 42, rng);
    CHECK(gm_verify(secret, params, stranger, key).reason == RejectReason::kMalformedSession);
  }
}

TEST_CASE("single-member verification and delegation") {
  Rng rng(41);
  const GroupSecret secret = gm_setup(rng, 6, 2);
  const Credential host = issue_credential(secret, 5);
  const SessionParams params = new_session(secret, rng, keys({5}));
  const GroupKey key = gm_group_key(secret, params);
  CHECK(gm_verify_single(secret, params, encrypt_share(key, compute_share(host, params), 5, rng), key)
            .accepted());

  const AuthShare bogus = encrypt_share(key, compute_share(host, params) + Scalar(3), 5, rng);
  CHECK(gm_verify_single(secret, params, bogus, key).reason == RejectReason::kSumMismatch);

  const Credential guest = delegate_credential(host, rng, 6);
  CHECK(guest.provenance.kind == Provenance::Kind::kDelegated);
  CHECK(guest.provenance.host == PublicKey(5));
  std::vector<Vector> both(guest.private_basis.vectors().begin(), guest.private_basis.vectors().end());
  both.insert(both.end(), host.private_basis.vectors().begin(), host.private_basis.vectors().end());
  CHECK(exactmath::rank(both) == 2);
  CHECK(derive_group_key(guest, params) == key);

  const SessionParams gp = renew_nonce(secret, params, rng, keys({6}));
  CHECK(gp.v == params.v);
  CHECK(gp.h == params.h);
  const AuthShare gs = encrypt_share(key, compute_share(guest, gp), 6, rng);
  CHECK(gm_verify_single(secret, gp, gs, key).reason == RejectReason::kSumMismatch);
}

TEST_CASE("observationally equivalent secrets") {
  Rng rng(51);
  const GroupSecret secret = gm_setup(rng, 6, 2);
  for (int trial = 0; trial < 20; ++trial) {
    const Scalar c = Scalar(rng.nonzero_int32_range()) / Scalar(rng.nonzero_int32_range());
    const GroupSecret twin(secret.basis().scaled(c), secret.f_a() / c, secret.f_b() / c);
    for (const int x : {1, 2, -7}) {
      const auto a = gauth::protocol::to_json(issue_credential(secret, x)).dump();
      const auto b = gauth::protocol::to_json(issue_credential(twin, x)).dump();
      CHECK(a == b);
    }
  }
}

TEST_CASE("json round trips") {
  Rng rng(61);
  const GroupSecret secret = gm_setup(rng, 5, 2);
  const auto sj = to_json(secret);
  CHECK(to_json(group_secret_from_json(sj)) == sj);
  const Credential host = issue_credential(secret, 3);
  const Credential guest = delegate_credential(host, rng, 4);
  CHECK(credential_from_json(to_json(host)) == host);
  CHECK(credential_from_json(to_json(guest)) == guest);
  const SessionParams p = new_session(secret, rng, keys({3, 4}));
  const nlohmann::json pj = p;
  CHECK(nlohmann::json(pj.get<SessionParams>()) == pj);
  const AuthShare share = encrypt_share(gm_group_key(secret, p), Scalar(9), 3, rng);
  const nlohmann::json shj = share;
  CHECK(shj.get<AuthShare>() == share);
}
