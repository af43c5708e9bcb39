#include "gauth/json_io.hpp"

#include <sodium.h>

#include "gauth/error.hpp"
#include "sodium_init.hpp"

namespace gauth {

std::string base64_encode(std::span<const std::uint8_t> bytes) {
  constexpr int kVariant = sodium_base64_VARIANT_ORIGINAL;
  std::string out(sodium_base64_encoded_len(bytes.size(), kVariant), '\0');
  sodium_bin2base64(out.data(), out.size(), bytes.data(), bytes.size(), kVariant);
  out.resize(out.size() - 1);  // trailing NUL
  return out;
}

exactmath::Bytes base64_decode(const std::string& text) {
  exactmath::Bytes out(text.size());
  std::size_t len = 0;
  if (sodium_base642bin(out.data(), out.size(), text.data(), text.size(), nullptr, &len,
                        nullptr, sodium_base64_VARIANT_ORIGINAL) != 0) {
    throw Error(ErrorCode::kMalformed, "invalid base64");
  }
  out.resize(len);
  return out;
}

std::string hex_encode(std::span<const std::uint8_t> bytes) {
  std::string out(bytes.size() * 2 + 1, '\0');
  sodium_bin2hex(out.data(), out.size(), bytes.data(), bytes.size());
  out.pop_back();
  return out;
}

exactmath::Bytes hex_decode(const std::string& text) {
  exactmath::Bytes out(text.size() / 2);
  std::size_t len = 0;
  if (text.size() % 2 != 0 ||
      sodium_hex2bin(out.data(), out.size(), text.data(), text.size(), nullptr, &len,
                     nullptr) != 0 ||
      len != out.size()) {
    throw Error(ErrorCode::kMalformed, "invalid hex string");
  }
  return out;
}

std::array<std::uint8_t, 32> sha256(std::span<const std::uint8_t> bytes) {
  internal::ensure_sodium();
  std::array<std::uint8_t, 32> out{};
  crypto_hash_sha256(out.data(), bytes.data(), bytes.size());
  return out;
}

}  // namespace gauth

namespace gauth::exactmath {

void to_json(nlohmann::json& j, const Scalar& s) { j = s.to_string(); }

void from_json(const nlohmann::json& j, Scalar& s) {
  if (j.is_string()) {
    s = Scalar::parse(j.get<std::string>());
  } else if (j.is_number_integer()) {
    s = Scalar(j.get<std::int64_t>());
  } else {
    throw Error(ErrorCode::kMalformed, "scalar must be a \"num/den\" string");
  }
}

void to_json(nlohmann::json& j, const Vector& v) {
  j = nlohmann::json::array();
  for (const auto& c : v.components()) j.push_back(c);
}

void from_json(const nlohmann::json& j, Vector& v) {
  v = Vector(j.get<std::vector<Scalar>>());
}

nlohmann::json basis_to_json(const Basis& basis) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& v : basis.vectors()) j.push_back(v);
  return j;
}

Basis basis_from_json(const nlohmann::json& j) {
  return Basis(j.get<std::vector<Vector>>());
}

}  // namespace gauth::exactmath

namespace gauth::protocol {

nlohmann::json to_json(const GroupSecret& secret) {
  return {{"basis", exactmath::basis_to_json(secret.basis())},
          {"f_a", secret.f_a()},
          {"f_b", secret.f_b()},
          {"ambient_dim", secret.ambient_dim()},
          {"dim", secret.dim()}};
}

GroupSecret group_secret_from_json(const nlohmann::json& j) {
  return GroupSecret(exactmath::basis_from_json(j.at("basis")), j.at("f_a").get<Scalar>(),
                     j.at("f_b").get<Scalar>());
}

nlohmann::json to_json(const Credential& cred) {
  nlohmann::json provenance;
  if (cred.provenance.kind == Provenance::Kind::kGmIssued) {
    provenance = {{"kind", "gm_issued"}};
  } else {
    provenance = {{"kind", "delegated"}, {"host", *cred.provenance.host}};
  }
  return {{"public_key", cred.public_key},
          {"private_basis", exactmath::basis_to_json(cred.private_basis)},
          {"provenance", provenance}};
}

Credential credential_from_json(const nlohmann::json& j) {
  Provenance provenance;
  const auto& p = j.at("provenance");
  const auto kind = p.at("kind").get<std::string>();
  if (kind == "delegated") {
    provenance = {Provenance::Kind::kDelegated, p.at("host").get<Scalar>()};
  } else if (kind != "gm_issued") {
    throw Error(ErrorCode::kMalformed, "unknown provenance kind '" + kind + "'");
  }
  return Credential{j.at("public_key").get<Scalar>(),
                    exactmath::basis_from_json(j.at("private_basis")), provenance};
}

void to_json(nlohmann::json& j, const SessionParams& params) {
  j = {{"v", params.v},
       {"h", params.h},
       {"g", params.g},
       {"roster", params.roster},
       {"basis_index", params.basis_index}};
}

void from_json(const nlohmann::json& j, SessionParams& params) {
  params.v = j.at("v").get<Vector>();
  params.h = j.at("h").get<Vector>();
  params.g = j.at("g").get<Vector>();
  params.roster = j.at("roster").get<std::vector<Scalar>>();
  params.basis_index = j.value("basis_index", std::size_t{1});
}

void to_json(nlohmann::json& j, const AuthShare& share) {
  j = {{"sender", share.sender},
       {"nonce", base64_encode(share.nonce)},
       {"ciphertext", base64_encode(share.ciphertext_and_tag)}};
}

void from_json(const nlohmann::json& j, AuthShare& share) {
  share.sender = j.at("sender").get<Scalar>();
  const auto nonce = base64_decode(j.at("nonce").get<std::string>());
  if (nonce.size() != kNonceBytes) {
    throw Error(ErrorCode::kMalformed, "nonce must be 12 bytes");
  }
  std::copy(nonce.begin(), nonce.end(), share.nonce.begin());
  share.ciphertext_and_tag = base64_decode(j.at("ciphertext").get<std::string>());
}

nlohmann::json to_json(const VerifyOutcome& outcome) {
  nlohmann::json j = {{"verdict", outcome.accepted() ? "accept" : "reject"}};
  if (!outcome.accepted()) {
    j["reason"] = reject_reason_name(outcome.reason);
    if (outcome.sender) j["sender"] = *outcome.sender;
  }
  return j;
}

}  // namespace gauth::protocol
