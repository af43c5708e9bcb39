#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "gauth/detection.hpp"
#include "gauth/op_counter.hpp"
#include "gauth/protocol.hpp"
#include "json.hpp"

namespace gauth::simnet {

using protocol::AuthShare;
using protocol::PublicKey;
using protocol::Scalar;

struct Honest {};

// Adds a nonzero offset to its true contribution.
struct BogusShare {
  Scalar offset;
};

// Claims a roster slot but holds a basis of a self-invented subspace.
struct RandomBasisOutsider {
  std::uint64_t seed = 0;
};

// Resubmits a share from an earlier session. When `previous` is empty the
// harness captures one from a prior honest round.
struct Replay {
  std::optional<AuthShare> previous;
};

// Joined through an existing member instead of the GM.
struct DelegatedMember {
  PublicKey host;
};

using ActorBehavior =
    std::variant<Honest, BogusShare, RandomBasisOutsider, Replay, DelegatedMember>;

const char* behavior_name(const ActorBehavior& behavior);

enum class Phase { kKeygen, kGroupKey, kAuth, kDetect };

const char* phase_name(Phase phase);
Phase phase_from_name(std::string_view name);

// Roster public keys are 1..roster_size.
struct Scenario {
  std::size_t d = 10;
  std::size_t n = 3;
  std::size_t roster_size = 3;
  std::map<PublicKey, ActorBehavior> behaviors;  // absent members are honest
  std::uint64_t seed = 0;
  std::vector<Phase> phases{Phase::kKeygen, Phase::kGroupKey, Phase::kAuth};
  std::optional<PublicKey> broadcaster;  // v, h sender; GM when empty

  std::vector<PublicKey> roster() const;
  const ActorBehavior& behavior_of(const PublicKey& x) const;
  bool has_phase(Phase phase) const;

  // Throws kInvalidArgument describing the first problem found.
  void validate() const;
};

nlohmann::json to_json(const Scenario& scenario);
Scenario scenario_from_json(const nlohmann::json& j);

enum class Channel : int {
  kRegistration = 1,  // secure user <-> GM line
  kGmUser = 2,        // public GM <-> user
  kUserUser = 3,      // public user <-> user
};

inline const std::string kGmName = "GM";
inline const std::string kBroadcast = "*";

struct Event {
  std::size_t seq = 0;
  Phase phase = Phase::kKeygen;
  Channel channel = Channel::kRegistration;
  std::string sender;
  std::string receiver;
  std::string kind;
  exactmath::Bytes payload;  // in memory only; files carry the digest
  std::array<std::uint8_t, 32> digest{};

  nlohmann::json to_json() const;
};

struct Transcript {
  std::vector<Event> events;
  nlohmann::json outcomes = nlohmann::json::object();  // phase name -> outcome
  metrics::OpCounter user_ops{metrics::Scope::kUser};
  metrics::OpCounter gm_ops{metrics::Scope::kGm};
  std::optional<protocol::VerifyOutcome> auth_outcome;
  std::optional<detection::DetectionReport> detection;

  nlohmann::json summary() const;

  // One event per line followed by a {"summary": ...} line.
  std::string to_jsonl() const;
  static Transcript from_jsonl(std::string_view text);

  // SHA-256 over the concatenated event digests, hex.
  std::string digest_hex() const;

 private:
  // Kept when loaded from a file so re-serialization is byte-identical.
  std::optional<nlohmann::json> loaded_summary_;
};

// Throws kInvalidArgument for an invalid scenario before running anything.
Transcript run_scenario(const Scenario& scenario);

// Re-runs the scenario and compares every event digest and the summary.
bool replay_transcript(const Transcript& transcript, const Scenario& scenario);

}  // namespace gauth::simnet
