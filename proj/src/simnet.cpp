#include "gauth/simnet.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "gauth/error.hpp"
#include "gauth/json_io.hpp"

namespace gauth::simnet {
namespace {

using protocol::Credential;
using protocol::GroupKey;
using protocol::GroupSecret;
using protocol::SessionParams;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

const ActorBehavior kHonest = Honest{};

std::string key_name(const PublicKey& x) {
  return x.is_integer() ? x.value().get_num().get_str() : x.to_string();
}

exactmath::Bytes to_bytes(const std::string& s) { return {s.begin(), s.end()}; }

nlohmann::json counter_json(const metrics::OpCounter& c) {
  return {{"mult", c.mult},
          {"div", c.div},
          {"inner_prod", c.inner_prod},
          {"add", c.add},
          {"decrypt", c.decrypt}};
}

// One simulated participant. Holds whatever credential its behavior gives it
// and caches the group key for the current (v, h).
class Actor {
 public:
  Actor(PublicKey x, const ActorBehavior& behavior) : x_(std::move(x)), behavior_(behavior) {}

  const PublicKey& public_key() const { return x_; }
  const ActorBehavior& behavior() const { return behavior_; }
  const std::optional<Credential>& credential() const { return cred_; }
  void set_credential(Credential cred) { cred_ = std::move(cred); }
  bool is_outsider() const { return std::holds_alternative<RandomBasisOutsider>(behavior_); }

  void set_replay_share(AuthShare share) { replay_share_ = std::move(share); }
  bool needs_replay_capture() const {
    const auto* replay = std::get_if<Replay>(&behavior_);
    return replay != nullptr && !replay->previous && !replay_share_;
  }

  const GroupKey& key_for(const SessionParams& params) {
    if (!key_ || !(key_v_ == params.v) || !(key_h_ == params.h)) {
      key_ = protocol::derive_group_key(*cred_, params);
      key_v_ = params.v;
      key_h_ = params.h;
    }
    return *key_;
  }

  // The honest computation, regardless of behavior.
  AuthShare honest_share(const SessionParams& params, Rng& rng,
                         metrics::OpCounter* ops) {
    const Scalar c = protocol::compute_share(*cred_, params, ops);
    return protocol::encrypt_share(key_for(params), c, x_, rng);
  }

  AuthShare submit(const SessionParams& params, Rng& rng, metrics::OpCounter* ops) {
    return std::visit(
        Overloaded{
            [&](const BogusShare& b) {
              const Scalar c = protocol::compute_share(*cred_, params, ops) + b.offset;
              return protocol::encrypt_share(key_for(params), c, x_, rng);
            },
            [&](const Replay& r) {
              if (r.previous) return *r.previous;
              return *replay_share_;
            },
            [&](const auto&) { return honest_share(params, rng, ops); },
        },
        behavior_);
  }

 private:
  PublicKey x_;
  ActorBehavior behavior_;
  std::optional<Credential> cred_;
  std::optional<GroupKey> key_;
  exactmath::Vector key_v_;
  exactmath::Vector key_h_;
  std::optional<AuthShare> replay_share_;
};

class Simulation {
 public:
  explicit Simulation(const Scenario& sc) : sc_(sc), rng_(sc.seed) {}

  Transcript run() {
    for (const Phase phase : sc_.phases) {
      switch (phase) {
        case Phase::kKeygen: keygen(); break;
        case Phase::kGroupKey: group_key(); break;
        case Phase::kAuth: auth(); break;
        case Phase::kDetect: detect(); break;
      }
    }
    return std::move(t_);
  }

 private:
  void emit(Phase phase, Channel channel, std::string sender, std::string receiver,
            std::string kind, exactmath::Bytes payload) {
    Event e;
    e.seq = t_.events.size();
    e.phase = phase;
    e.channel = channel;
    e.sender = std::move(sender);
    e.receiver = std::move(receiver);
    e.kind = std::move(kind);
    e.digest = sha256(payload);
    e.payload = std::move(payload);
    t_.events.push_back(std::move(e));
  }

  Actor& actor(const PublicKey& x) {
    return *std::find_if(actors_.begin(), actors_.end(),
                         [&](const Actor& a) { return a.public_key() == x; });
  }

  void keygen() {
    secret_.emplace(protocol::gm_setup(rng_, sc_.d, sc_.n));
    for (const auto& x : sc_.roster()) actors_.emplace_back(x, sc_.behavior_of(x));

    std::size_t issued = 0;
    std::size_t delegated = 0;
    // GM registrations first, then delegations, which need a host credential.
    for (auto& a : actors_) {
      if (std::holds_alternative<DelegatedMember>(a.behavior())) continue;
      if (const auto* outsider = std::get_if<RandomBasisOutsider>(&a.behavior())) {
        Rng own(outsider->seed);
        const GroupSecret fake = protocol::gm_setup(own, sc_.d, sc_.n);
        a.set_credential(protocol::issue_credential(fake, a.public_key()));
        continue;
      }
      a.set_credential(protocol::issue_credential(*secret_, a.public_key()));
      emit(Phase::kKeygen, Channel::kRegistration, kGmName, key_name(a.public_key()),
           "credential", to_bytes(protocol::to_json(*a.credential()).dump()));
      ++issued;
    }
    for (auto& a : actors_) {
      const auto* d = std::get_if<DelegatedMember>(&a.behavior());
      if (d == nullptr) continue;
      const Actor& host = actor(d->host);
      a.set_credential(protocol::delegate_credential(*host.credential(), rng_, a.public_key()));
      // A member acting as registrar still uses the secure line.
      emit(Phase::kKeygen, Channel::kRegistration, key_name(d->host),
           key_name(a.public_key()), "delegated_credential",
           to_bytes(protocol::to_json(*a.credential()).dump()));
      ++delegated;
    }
    t_.outcomes["keygen"] = {{"issued", issued}, {"delegated", delegated}};
  }

  void group_key() {
    base_.v = exactmath::sample_vector(rng_, sc_.d);
    base_.h = exactmath::sample_vector(rng_, sc_.d);
    base_.roster = sc_.roster();
    base_.basis_index = 1;
    exactmath::Bytes payload = exactmath::encode(base_.v);
    exactmath::append_encoding(payload, base_.h);
    if (sc_.broadcaster) {
      emit(Phase::kGroupKey, Channel::kUserUser, key_name(*sc_.broadcaster), kBroadcast,
           "key_vectors", std::move(payload));
    } else {
      emit(Phase::kGroupKey, Channel::kGmUser, kGmName, kBroadcast, "key_vectors",
           std::move(payload));
    }

    gm_key_.emplace(protocol::gm_group_key(*secret_, base_));
    std::size_t members = 0;
    std::size_t matching = 0;
    std::size_t outsiders_matching = 0;
    for (auto& a : actors_) {
      const bool match = a.key_for(base_) == *gm_key_;
      if (a.is_outsider()) {
        outsiders_matching += match ? 1 : 0;
      } else {
        ++members;
        matching += match ? 1 : 0;
      }
    }
    t_.outcomes["group_key"] = {{"consistent", matching == members},
                                {"members", members},
                                {"members_matching", matching},
                                {"outsiders_matching", outsiders_matching}};
  }

  void emit_session(Phase phase, const SessionParams& params, const std::string& kind) {
    nlohmann::json j = params;
    emit(phase, Channel::kGmUser, kGmName, kBroadcast, kind, to_bytes(j.dump()));
  }

  void auth() {
    // Replay adversaries eavesdropped on an earlier round with another nonce.
    if (std::any_of(actors_.begin(), actors_.end(),
                    [](const Actor& a) { return a.needs_replay_capture(); })) {
      const SessionParams prior = protocol::renew_nonce(*secret_, base_, rng_, sc_.roster());
      emit_session(Phase::kAuth, prior, "prior_session_params");
      for (auto& a : actors_) {
        if (!a.needs_replay_capture()) continue;
        AuthShare share = a.honest_share(prior, rng_, nullptr);
        emit(Phase::kAuth, Channel::kGmUser, key_name(a.public_key()), kGmName,
             "prior_auth_share", share.to_wire());
        a.set_replay_share(std::move(share));
      }
    }

    const SessionParams params = protocol::renew_nonce(*secret_, base_, rng_, sc_.roster());
    emit_session(Phase::kAuth, params, "session_params");
    std::vector<AuthShare> shares;
    shares.reserve(actors_.size());
    for (auto& a : actors_) {
      shares.push_back(a.submit(params, rng_, &t_.user_ops));
      emit(Phase::kAuth, Channel::kGmUser, key_name(a.public_key()), kGmName, "auth_share",
           shares.back().to_wire());
    }
    const protocol::VerifyOutcome outcome =
        shares.size() == 1
            ? protocol::gm_verify_single(*secret_, params, shares.front(), *gm_key_,
                                         &t_.gm_ops)
            : protocol::gm_verify(*secret_, params, shares, *gm_key_, &t_.gm_ops);
    const nlohmann::json outcome_json = protocol::to_json(outcome);
    emit(Phase::kAuth, Channel::kGmUser, kGmName, kBroadcast, "verdict",
         to_bytes(outcome_json.dump()));
    t_.outcomes["auth"] = outcome_json;
    t_.auth_outcome = outcome;
  }

  void detect() {
    for (auto& a : actors_) {
      if (a.needs_replay_capture()) {
        const SessionParams prior =
            protocol::renew_nonce(*secret_, base_, rng_, sc_.roster());
        a.set_replay_share(a.honest_share(prior, rng_, nullptr));
      }
    }
    std::map<PublicKey, detection::Participant> participants;
    for (auto& a : actors_) {
      participants[a.public_key()] = [&a](const SessionParams& p, Rng& rng) {
        return a.submit(p, rng, nullptr);
      };
    }
    auto factory = [this](std::span<const PublicKey> subset) {
      SessionParams p = protocol::renew_nonce(*secret_, base_, rng_,
                                              {subset.begin(), subset.end()});
      emit_session(Phase::kDetect, p, "session_params");
      return p;
    };
    auto observer = [this](const SessionParams&, std::span<const AuthShare> shares,
                           const protocol::VerifyOutcome& outcome) {
      for (const auto& s : shares) {
        emit(Phase::kDetect, Channel::kGmUser, key_name(s.sender), kGmName, "auth_share",
             s.to_wire());
      }
      emit(Phase::kDetect, Channel::kGmUser, kGmName, kBroadcast, "verdict",
           to_bytes(protocol::to_json(outcome).dump()));
    };
    const auto oracle = detection::subgroup_oracle_from_session(
        *secret_, *gm_key_, factory, participants, rng_, observer);
    const auto roster = sc_.roster();
    detection::DetectionReport report = detection::detect_malicious(roster, oracle);
    t_.outcomes["detect"] = {{"malicious", detection::to_json(report)["malicious"]},
                             {"oracle_calls", report.oracle_calls}};
    t_.detection = std::move(report);
  }

  const Scenario& sc_;
  Rng rng_;
  Transcript t_;
  std::optional<GroupSecret> secret_;
  std::vector<Actor> actors_;
  SessionParams base_;
  std::optional<GroupKey> gm_key_;
};

}  // namespace

const char* behavior_name(const ActorBehavior& behavior) {
  return std::visit(Overloaded{
                        [](const Honest&) { return "honest"; },
                        [](const BogusShare&) { return "bogus_share"; },
                        [](const RandomBasisOutsider&) { return "random_basis_outsider"; },
                        [](const Replay&) { return "replay"; },
                        [](const DelegatedMember&) { return "delegated_member"; },
                    },
                    behavior);
}

const char* phase_name(Phase phase) {
  switch (phase) {
    case Phase::kKeygen: return "keygen";
    case Phase::kGroupKey: return "group_key";
    case Phase::kAuth: return "auth";
    case Phase::kDetect: return "detect";
  }
  return "unknown";
}

Phase phase_from_name(std::string_view name) {
  for (const Phase p : {Phase::kKeygen, Phase::kGroupKey, Phase::kAuth, Phase::kDetect}) {
    if (name == phase_name(p)) return p;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown phase '" + std::string(name) + "'");
}

std::vector<PublicKey> Scenario::roster() const {
  std::vector<PublicKey> out;
  out.reserve(roster_size);
  for (std::size_t i = 1; i <= roster_size; ++i) {
    out.emplace_back(static_cast<std::int64_t>(i));
  }
  return out;
}

const ActorBehavior& Scenario::behavior_of(const PublicKey& x) const {
  const auto it = behaviors.find(x);
  return it == behaviors.end() ? kHonest : it->second;
}

bool Scenario::has_phase(Phase phase) const {
  return std::find(phases.begin(), phases.end(), phase) != phases.end();
}

void Scenario::validate() const {
  auto fail = [](const std::string& what) {
    throw Error(ErrorCode::kInvalidArgument, "invalid scenario: " + what);
  };
  if (n < 1 || n >= d) fail("need 1 <= n < d");
  if (roster_size < 1) fail("roster_size must be at least 1");
  const auto in_roster = [&](const PublicKey& x) {
    return x.is_integer() && x.sign() > 0 &&
           x.value().get_num() <= static_cast<unsigned long>(roster_size);
  };
  for (const auto& [x, behavior] : behaviors) {
    if (!in_roster(x)) fail("behavior for " + x.to_string() + " outside the roster");
    if (const auto* b = std::get_if<BogusShare>(&behavior); b && b->offset.is_zero()) {
      fail("bogus_share offset must be nonzero");
    }
    if (const auto* del = std::get_if<DelegatedMember>(&behavior)) {
      if (!in_roster(del->host)) fail("delegation host outside the roster");
      if (del->host == x) fail("a member cannot delegate to itself");
      const auto& host = behavior_of(del->host);
      if (std::holds_alternative<DelegatedMember>(host) ||
          std::holds_alternative<RandomBasisOutsider>(host)) {
        fail("delegation host " + del->host.to_string() + " holds no GM credential");
      }
    }
  }
  if (broadcaster && !in_roster(*broadcaster)) fail("broadcaster outside the roster");

  if (phases.empty()) fail("no phases");
  for (std::size_t i = 1; i < phases.size(); ++i) {
    if (static_cast<int>(phases[i]) <= static_cast<int>(phases[i - 1])) {
      fail("phases must be distinct and in keygen, group_key, auth, detect order");
    }
  }
  if (phases.front() != Phase::kKeygen) fail("the first phase must be keygen");
  if ((has_phase(Phase::kAuth) || has_phase(Phase::kDetect)) &&
      !has_phase(Phase::kGroupKey)) {
    fail("auth and detect need the group_key phase");
  }
}

nlohmann::json to_json(const Scenario& sc) {
  nlohmann::json behaviors = nlohmann::json::object();
  for (const auto& [x, b] : sc.behaviors) {
    nlohmann::json entry = {{"kind", behavior_name(b)}};
    std::visit(Overloaded{
                   [](const Honest&) {},
                   [&](const BogusShare& v) { entry["offset"] = v.offset; },
                   [&](const RandomBasisOutsider& v) { entry["seed"] = v.seed; },
                   [&](const Replay& v) {
                     if (v.previous) entry["previous"] = *v.previous;
                   },
                   [&](const DelegatedMember& v) { entry["host"] = key_name(v.host); },
               },
               b);
    behaviors[key_name(x)] = entry;
  }
  nlohmann::json phases = nlohmann::json::array();
  for (const Phase p : sc.phases) phases.push_back(phase_name(p));
  nlohmann::json j = {{"d", sc.d},
                      {"n", sc.n},
                      {"roster_size", sc.roster_size},
                      {"behaviors", behaviors},
                      {"seed", sc.seed},
                      {"phases", phases}};
  j["broadcaster"] = sc.broadcaster ? key_name(*sc.broadcaster) : kGmName;
  return j;
}

Scenario scenario_from_json(const nlohmann::json& j) {
  Scenario sc;
  try {
    sc.d = j.value("d", sc.d);
    sc.n = j.value("n", sc.n);
    sc.roster_size = j.at("roster_size").get<std::size_t>();
    sc.seed = j.value("seed", sc.seed);
    if (j.contains("phases")) {
      sc.phases.clear();
      for (const auto& p : j.at("phases")) sc.phases.push_back(phase_from_name(p.get<std::string>()));
    }
    if (j.contains("broadcaster") && j.at("broadcaster") != kGmName) {
      sc.broadcaster = j.at("broadcaster").get<Scalar>();
    }
    const nlohmann::json behaviors = j.value("behaviors", nlohmann::json::object());
    for (const auto& [key, entry] : behaviors.items()) {
      const PublicKey x = Scalar::parse(key);
      const auto kind = entry.at("kind").get<std::string>();
      if (kind == "honest") {
        sc.behaviors[x] = Honest{};
      } else if (kind == "bogus_share") {
        sc.behaviors[x] = BogusShare{entry.value("offset", nlohmann::json("1")).get<Scalar>()};
      } else if (kind == "random_basis_outsider") {
        sc.behaviors[x] = RandomBasisOutsider{entry.value("seed", std::uint64_t{0})};
      } else if (kind == "replay") {
        Replay r;
        if (entry.contains("previous")) r.previous = entry.at("previous").get<AuthShare>();
        sc.behaviors[x] = r;
      } else if (kind == "delegated_member") {
        sc.behaviors[x] = DelegatedMember{entry.at("host").get<Scalar>()};
      } else {
        throw Error(ErrorCode::kInvalidArgument, "unknown behavior kind '" + kind + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("invalid scenario JSON: ") + e.what());
  }
  return sc;
}

nlohmann::json Event::to_json() const {
  return {{"seq", seq},
          {"phase", phase_name(phase)},
          {"channel", static_cast<int>(channel)},
          {"sender", sender},
          {"receiver", receiver},
          {"kind", kind},
          {"digest", hex_encode(digest)}};
}

std::string Transcript::digest_hex() const {
  exactmath::Bytes all;
  all.reserve(events.size() * 32);
  for (const auto& e : events) all.insert(all.end(), e.digest.begin(), e.digest.end());
  return hex_encode(sha256(all));
}

nlohmann::json Transcript::summary() const {
  if (loaded_summary_) return *loaded_summary_;
  nlohmann::json j = {{"events", events.size()},
                      {"transcript_digest", digest_hex()},
                      {"outcomes", outcomes},
                      {"metrics", {{"user", counter_json(user_ops)}, {"gm", counter_json(gm_ops)}}}};
  if (detection) j["detection"] = detection::to_json(*detection);
  return j;
}

std::string Transcript::to_jsonl() const {
  std::string out;
  for (const auto& e : events) {
    out += e.to_json().dump();
    out += '\n';
  }
  out += nlohmann::json{{"summary", summary()}}.dump();
  out += '\n';
  return out;
}

Transcript Transcript::from_jsonl(std::string_view text) {
  Transcript t;
  std::istringstream in{std::string(text)};
  std::string line;
  bool have_summary = false;
  try {
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      if (have_summary) throw Error(ErrorCode::kMalformed, "content after summary line");
      const auto j = nlohmann::json::parse(line);
      if (j.contains("summary")) {
        t.loaded_summary_ = j.at("summary");
        t.outcomes = j.at("summary").value("outcomes", nlohmann::json::object());
        have_summary = true;
        continue;
      }
      Event e;
      e.seq = j.at("seq").get<std::size_t>();
      e.phase = phase_from_name(j.at("phase").get<std::string>());
      e.channel = static_cast<Channel>(j.at("channel").get<int>());
      e.sender = j.at("sender").get<std::string>();
      e.receiver = j.at("receiver").get<std::string>();
      e.kind = j.at("kind").get<std::string>();
      const auto digest = hex_decode(j.at("digest").get<std::string>());
      if (digest.size() != e.digest.size()) {
        throw Error(ErrorCode::kMalformed, "bad event digest");
      }
      std::copy(digest.begin(), digest.end(), e.digest.begin());
      t.events.push_back(std::move(e));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kMalformed, std::string("bad transcript line: ") + e.what());
  }
  if (!have_summary) throw Error(ErrorCode::kMalformed, "transcript has no summary line");
  return t;
}

Transcript run_scenario(const Scenario& scenario) {
  scenario.validate();
  return Simulation(scenario).run();
}

bool replay_transcript(const Transcript& transcript, const Scenario& scenario) {
  return run_scenario(scenario).to_jsonl() == transcript.to_jsonl();
}

}  // namespace gauth::simnet
