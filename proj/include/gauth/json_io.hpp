#pragma once

// JSON forms of the protocol types: Scalars as "num/den" strings, byte
// fields as standard base64.

#include <array>
#include <cstdint>
#include <span>
#include <string>

#include "gauth/protocol.hpp"
#include "json.hpp"

namespace gauth {

std::string base64_encode(std::span<const std::uint8_t> bytes);
exactmath::Bytes base64_decode(const std::string& text);
std::string hex_encode(std::span<const std::uint8_t> bytes);
exactmath::Bytes hex_decode(const std::string& text);
std::array<std::uint8_t, 32> sha256(std::span<const std::uint8_t> bytes);

}  // namespace gauth

namespace gauth::exactmath {

void to_json(nlohmann::json& j, const Scalar& s);
void from_json(const nlohmann::json& j, Scalar& s);
void to_json(nlohmann::json& j, const Vector& v);
void from_json(const nlohmann::json& j, Vector& v);

nlohmann::json basis_to_json(const Basis& basis);
Basis basis_from_json(const nlohmann::json& j);

}  // namespace gauth::exactmath

namespace gauth::protocol {

nlohmann::json to_json(const GroupSecret& secret);
GroupSecret group_secret_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Credential& cred);
Credential credential_from_json(const nlohmann::json& j);

void to_json(nlohmann::json& j, const SessionParams& params);
void from_json(const nlohmann::json& j, SessionParams& params);

void to_json(nlohmann::json& j, const AuthShare& share);
void from_json(const nlohmann::json& j, AuthShare& share);

nlohmann::json to_json(const VerifyOutcome& outcome);

}  // namespace gauth::protocol
