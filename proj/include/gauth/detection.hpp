#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "gauth/protocol.hpp"
#include "json.hpp"

namespace gauth::detection {

using protocol::PublicKey;

// True iff the given subgroup authenticates cleanly. Must be consistent for
// the whole run: clean subsets pass, subsets with a malicious member fail.
using SubgroupOracle = std::function<bool(std::span<const PublicKey>)>;

struct OracleCall {
  std::vector<PublicKey> subset;
  bool verdict = false;
};

struct DetectionReport {
  std::vector<PublicKey> malicious;  // in roster order
  std::size_t oracle_calls = 0;
  std::vector<OracleCall> call_log;
};

// Recursive halving: query the group; on failure split into order-preserving
// halves (extra member on the left) and recurse into each failing half down
// to single members.
//
// Throws kOracleInconsistent when a failing subgroup has two passing halves.
DetectionReport detect_malicious(std::span<const PublicKey> roster,
                                 const SubgroupOracle& oracle);

// What one participant submits for a sub-session. Honest members compute and
// encrypt their share; adversaries do something else.
using Participant =
    std::function<protocol::AuthShare(const protocol::SessionParams&, Rng&)>;

// Builds the SessionParams for a queried subset (fresh g per call).
using ParamsFactory =
    std::function<protocol::SessionParams(std::span<const PublicKey>)>;

// Optional hook to observe each sub-session (for transcripts).
using SessionObserver =
    std::function<void(const protocol::SessionParams&,
                       std::span<const protocol::AuthShare>,
                       const protocol::VerifyOutcome&)>;

// Binds the detector to real sub-sessions: gm_verify for |S| >= 2 and
// gm_verify_single for singletons. `key` is the GM's group key for the
// session's v, h. The returned oracle holds references to its arguments.
SubgroupOracle subgroup_oracle_from_session(
    const protocol::GroupSecret& secret, const protocol::GroupKey& key,
    ParamsFactory params_factory, const std::map<PublicKey, Participant>& participants,
    Rng& rng, SessionObserver observer = {});

nlohmann::json to_json(const DetectionReport& report);
DetectionReport detection_report_from_json(const nlohmann::json& j);

}  // namespace gauth::detection
