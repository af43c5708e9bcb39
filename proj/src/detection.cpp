#include "gauth/detection.hpp"

#include <set>
#include <string>

#include "gauth/error.hpp"
#include "gauth/json_io.hpp"

namespace gauth::detection {
namespace {

std::string describe(std::span<const PublicKey> subset) {
  std::string out = "{";
  for (std::size_t i = 0; i < subset.size(); ++i) {
    if (i > 0) out += ",";
    out += subset[i].to_string();
  }
  return out + "}";
}

class Bisector {
 public:
  explicit Bisector(const SubgroupOracle& oracle) : oracle_(oracle) {}

  bool query(std::span<const PublicKey> subset) {
    const bool verdict = oracle_(subset);
    report_.call_log.push_back({{subset.begin(), subset.end()}, verdict});
    ++report_.oracle_calls;
    return verdict;
  }

  // Called only for subsets that already failed.
  void resolve(std::span<const PublicKey> failing) {
    if (failing.size() == 1) {
      report_.malicious.push_back(failing.front());
      return;
    }
    const std::size_t left_size = (failing.size() + 1) / 2;
    const auto left = failing.first(left_size);
    const auto right = failing.subspan(left_size);
    const bool left_ok = query(left);
    const bool right_ok = query(right);
    if (left_ok && right_ok) {
      throw Error(ErrorCode::kOracleInconsistent,
                  "subgroup " + describe(failing) + " failed but both halves " +
                      describe(left) + " and " + describe(right) + " passed");
    }
    if (!left_ok) resolve(left);
    if (!right_ok) resolve(right);
  }

  DetectionReport take() { return std::move(report_); }

 private:
  const SubgroupOracle& oracle_;
  DetectionReport report_;
};

// Public keys are integers, so reports use plain decimal strings ("4").
nlohmann::json keys_to_json(std::span<const PublicKey> keys) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& x : keys) {
    out.push_back(x.is_integer() ? x.value().get_num().get_str() : x.to_string());
  }
  return out;
}

}  // namespace

DetectionReport detect_malicious(std::span<const PublicKey> roster,
                                 const SubgroupOracle& oracle) {
  if (roster.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "detection needs a nonempty roster");
  }
  std::set<PublicKey> seen;
  for (const auto& x : roster) {
    if (!seen.insert(x).second) {
      throw Error(ErrorCode::kInvalidArgument,
                  "duplicate public key in roster: " + x.to_string());
    }
  }
  Bisector bisector(oracle);
  if (!bisector.query(roster)) bisector.resolve(roster);
  return bisector.take();
}

SubgroupOracle subgroup_oracle_from_session(
    const protocol::GroupSecret& secret, const protocol::GroupKey& key,
    ParamsFactory params_factory, const std::map<PublicKey, Participant>& participants,
    Rng& rng, SessionObserver observer) {
  return [&secret, &key, &participants, &rng, params_factory = std::move(params_factory),
          observer = std::move(observer)](std::span<const PublicKey> subset) {
    const protocol::SessionParams params = params_factory(subset);
    std::vector<protocol::AuthShare> shares;
    shares.reserve(subset.size());
    for (const auto& x : subset) {
      const auto it = participants.find(x);
      if (it == participants.end()) {
        throw Error(ErrorCode::kInvalidArgument,
                    "no participant registered for " + x.to_string());
      }
      shares.push_back(it->second(params, rng));
    }
    const protocol::VerifyOutcome outcome =
        subset.size() == 1
            ? protocol::gm_verify_single(secret, params, shares.front(), key)
            : protocol::gm_verify(secret, params, shares, key);
    if (observer) observer(params, shares, outcome);
    return outcome.accepted();
  };
}

nlohmann::json to_json(const DetectionReport& report) {
  nlohmann::json log = nlohmann::json::array();
  for (const auto& call : report.call_log) {
    log.push_back({{"subset", keys_to_json(call.subset)}, {"verdict", call.verdict}});
  }
  return {{"malicious", keys_to_json(report.malicious)},
          {"oracle_calls", report.oracle_calls},
          {"call_log", log}};
}

DetectionReport detection_report_from_json(const nlohmann::json& j) {
  DetectionReport report;
  report.malicious = j.at("malicious").get<std::vector<PublicKey>>();
  report.oracle_calls = j.at("oracle_calls").get<std::size_t>();
  for (const auto& call : j.at("call_log")) {
    report.call_log.push_back(
        {call.at("subset").get<std::vector<PublicKey>>(), call.at("verdict").get<bool>()});
  }
  if (report.oracle_calls != report.call_log.size()) {
    throw Error(ErrorCode::kMalformed, "oracle_calls does not match call_log length");
  }
  return report;
}

}  // namespace gauth::detection
