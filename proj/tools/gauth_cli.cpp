// Command-line front end. Talks to the library only through gauth.h.
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstdint>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gauth/gauth.h"
#include "json.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitReject = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Config {
  std::string scenario_path;
  std::string transcript_path;
  std::optional<std::uint64_t> seed;
  std::string out_path;
  std::string format = "json";
  std::string sizes;
  std::uint32_t d = 10;
  std::uint32_t n = 3;
  std::uint32_t users = 3;
  bool parallel = false;
};

void check(gauth_status st, const char* what) {
  if (st != GAUTH_OK) {
    throw UsageError(std::string(what) + ": " + gauth_status_name(st) + ": " +
                     gauth_last_error());
  }
}

struct StringDeleter {
  void operator()(char* s) const { gauth_string_free(s); }
};

std::string take(char* s) {
  std::unique_ptr<char, StringDeleter> owned(s);
  return owned ? std::string(owned.get()) : std::string();
}

template <class T, void (*Free)(T*)>
struct Handle {
  T* p = nullptr;
  Handle() = default;
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  ~Handle() { Free(p); }
};

using ScenarioHandle = Handle<gauth_scenario, gauth_scenario_free>;
using TranscriptHandle = Handle<gauth_transcript, gauth_transcript_free>;
using ReportHandle = Handle<gauth_bench_report, gauth_bench_report_free>;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read '" + path + "': " + std::strerror(errno));
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write '" + path + "': " + std::strerror(errno));
  out << text;
  if (!out.flush()) throw UsageError("write to '" + path + "' failed");
}

// Either writes to --out or to stdout.
void emit(const Config& cfg, const std::string& text) {
  if (cfg.out_path.empty()) {
    std::cout << text;
  } else {
    write_file(cfg.out_path, text);
  }
}

std::optional<std::uint64_t> effective_seed(const Config& cfg) {
  if (const char* env = std::getenv("GAUTH_SEED"); env != nullptr && *env != '\0') {
    try {
      std::size_t used = 0;
      const std::uint64_t v = std::stoull(env, &used, 10);
      if (used != std::strlen(env)) throw std::invalid_argument("trailing");
      return v;
    } catch (const std::exception&) {
      throw UsageError(std::string("GAUTH_SEED is not an unsigned integer: ") + env);
    }
  }
  return cfg.seed;
}

std::uint64_t parse_u64(const std::string& s) {
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(s, &used, 10);
  } catch (const std::exception&) {
    used = 0;
  }
  if (s.empty() || used != s.size() || s[0] == '-') {
    throw UsageError("not a roster size: '" + s + "'");
  }
  return v;
}

// Accepts "100,200,300" and the range form "100,200,...,1000".
std::vector<std::uint32_t> parse_sizes(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) parts.push_back(item);
  std::vector<std::uint32_t> out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (parts[i] == "...") {
      if (out.size() < 2 || i + 1 != parts.size() - 1) {
        throw UsageError("'...' needs two leading sizes and one final size");
      }
      const auto step = static_cast<std::int64_t>(out.back()) - out[out.size() - 2];
      const auto last = parse_u64(parts[i + 1]);
      if (step <= 0) throw UsageError("'...' needs ascending sizes");
      for (std::uint64_t v = out.back() + step; v <= last; v += step) {
        out.push_back(static_cast<std::uint32_t>(v));
      }
      if (out.back() != last) throw UsageError("range end is not on the step");
      break;
    }
    const auto v = parse_u64(parts[i]);
    if (v > UINT32_MAX) throw UsageError("roster size too large");
    out.push_back(static_cast<std::uint32_t>(v));
  }
  if (out.empty()) throw UsageError("--sizes is empty");
  return out;
}

void load_scenario(const Config& cfg, const char* phase, ScenarioHandle& sc) {
  if (cfg.scenario_path.empty()) throw UsageError("--scenario is required");
  const std::string text = read_file(cfg.scenario_path);
  check(gauth_scenario_from_json(text.c_str(), &sc.p), "scenario");
  check(gauth_scenario_require_phase(sc.p, phase), "scenario");
  if (const auto seed = effective_seed(cfg)) check(gauth_scenario_set_seed(sc.p, *seed), "seed");
}

int cmd_keygen(const Config& cfg) {
  char* out = nullptr;
  check(gauth_keygen_json(effective_seed(cfg).value_or(0), cfg.d, cfg.n, cfg.users, &out),
        "keygen");
  const auto doc = nlohmann::json::parse(take(out));
  if (cfg.format == "text") {
    std::ostringstream text;
    text << "d=" << cfg.d << " n=" << cfg.n << " users=" << cfg.users << '\n';
    for (const auto& c : doc.at("credentials")) {
      text << "credential " << c.at("public_key").dump() << '\n';
    }
    emit(cfg, text.str());
  } else if (cfg.format == "json") {
    emit(cfg, doc.dump(2) + "\n");
  } else {
    throw UsageError("keygen supports --format json or text");
  }
  return kExitOk;
}

int cmd_demo_auth(const Config& cfg) {
  ScenarioHandle sc;
  load_scenario(cfg, "auth", sc);
  TranscriptHandle t;
  check(gauth_run_scenario(sc.p, &t.p), "run");
  char* s = nullptr;
  check(gauth_transcript_summary_json(t.p, &s), "summary");
  const auto summary = nlohmann::json::parse(take(s));
  if (!cfg.out_path.empty()) {
    char* lines = nullptr;
    check(gauth_transcript_to_jsonl(t.p, &lines), "transcript");
    write_file(cfg.out_path, take(lines));
  }
  gauth_verdict verdict = GAUTH_ACCEPT;
  check(gauth_transcript_auth_verdict(t.p, &verdict), "verdict");
  const auto& auth = summary.at("outcomes").at("auth");
  if (cfg.format == "text") {
    if (verdict == GAUTH_ACCEPT) {
      std::cout << "accept ";
    } else {
      std::cout << "reject " << gauth_verdict_name(verdict) << ' ';
    }
    std::cout << summary.at("transcript_digest").get<std::string>() << '\n';
  } else if (cfg.format == "json") {
    std::cout << nlohmann::json{{"verdict", auth.at("verdict")},
                                {"reason", gauth_verdict_name(verdict)},
                                {"summary", summary}}
                     .dump(2)
              << '\n';
  } else {
    throw UsageError("demo-auth supports --format json or text");
  }
  return verdict == GAUTH_ACCEPT ? kExitOk : kExitReject;
}

int cmd_detect(const Config& cfg) {
  ScenarioHandle sc;
  load_scenario(cfg, "detect", sc);
  TranscriptHandle t;
  check(gauth_run_scenario(sc.p, &t.p), "run");
  char* s = nullptr;
  check(gauth_transcript_summary_json(t.p, &s), "summary");
  const auto summary = nlohmann::json::parse(take(s));
  if (!cfg.out_path.empty()) {
    char* lines = nullptr;
    check(gauth_transcript_to_jsonl(t.p, &lines), "transcript");
    write_file(cfg.out_path, take(lines));
  }
  const auto& det = summary.at("outcomes").at("detect");
  if (cfg.format == "text") {
    std::cout << "malicious {";
    bool first = true;
    for (const auto& k : det.at("malicious")) {
      std::cout << (first ? "" : ",") << k.get<std::string>();
      first = false;
    }
    std::cout << "} oracle_calls " << det.at("oracle_calls").get<std::size_t>() << '\n';
  } else if (cfg.format == "json") {
    std::cout << nlohmann::json{{"malicious", det.at("malicious")},
                                {"oracle_calls", det.at("oracle_calls")},
                                {"summary", summary}}
                     .dump(2)
              << '\n';
  } else {
    throw UsageError("detect supports --format json or text");
  }
  return kExitOk;
}

int cmd_replay(const Config& cfg) {
  if (cfg.transcript_path.empty()) throw UsageError("--transcript is required");
  ScenarioHandle sc;
  if (cfg.scenario_path.empty()) throw UsageError("--scenario is required");
  const std::string text = read_file(cfg.scenario_path);
  check(gauth_scenario_from_json(text.c_str(), &sc.p), "scenario");
  if (const auto seed = effective_seed(cfg)) check(gauth_scenario_set_seed(sc.p, *seed), "seed");
  const std::string lines = read_file(cfg.transcript_path);
  TranscriptHandle t;
  check(gauth_transcript_from_jsonl(lines.c_str(), &t.p), "transcript");
  int identical = 0;
  check(gauth_replay_transcript(t.p, sc.p, &identical), "replay");
  if (cfg.format == "text") {
    std::cout << (identical ? "identical" : "mismatch transcript_differs") << '\n';
  } else {
    std::cout << nlohmann::json{{"identical", identical != 0},
                                {"reason", identical ? "none" : "transcript_differs"}}
                     .dump()
              << '\n';
  }
  return identical ? kExitOk : kExitReject;
}

std::string run_bench_json(const std::vector<std::uint32_t>& sizes, const Config& cfg,
                           std::uint64_t seed) {
  ReportHandle r;
  check(gauth_bench_run(sizes.data(), sizes.size(), cfg.d, cfg.n, seed, &r.p), "bench");
  char* out = nullptr;
  check(gauth_bench_report_json(r.p, &out), "bench");
  return take(out);
}

// One worker process per size; each writes its JSON report into a pipe.
nlohmann::json run_bench_parallel(const std::vector<std::uint32_t>& sizes, const Config& cfg,
                                  std::uint64_t seed) {
  struct Worker {
    pid_t pid;
    int fd;
  };
  std::vector<Worker> workers;
  for (const std::uint32_t m : sizes) {
    int fds[2];
    if (pipe(fds) != 0) throw UsageError("pipe failed");
    std::cout.flush();
    const pid_t pid = fork();
    if (pid < 0) throw UsageError("fork failed");
    if (pid == 0) {
      close(fds[0]);
      int rc = 0;
      try {
        const std::string doc = run_bench_json({m}, cfg, seed);
        std::size_t off = 0;
        while (off < doc.size()) {
          const ssize_t w = write(fds[1], doc.data() + off, doc.size() - off);
          if (w <= 0) break;
          off += static_cast<std::size_t>(w);
        }
      } catch (const std::exception& e) {
        std::cerr << "worker for size " << m << ": " << e.what() << '\n';
        rc = 1;
      }
      close(fds[1]);
      _exit(rc);
    }
    close(fds[1]);
    workers.push_back({pid, fds[0]});
  }
  nlohmann::json merged;
  bool failed = false;
  for (const auto& w : workers) {
    std::string doc;
    char buf[4096];
    for (ssize_t r; (r = read(w.fd, buf, sizeof buf)) > 0;) doc.append(buf, static_cast<std::size_t>(r));
    close(w.fd);
    int status = 0;
    waitpid(w.pid, &status, 0);
    if (!WIFEXITED(status) || WEXITSTATUS(status) != 0 || doc.empty()) {
      failed = true;
      continue;
    }
    auto part = nlohmann::json::parse(doc);
    if (merged.is_null()) {
      merged = part;
      continue;
    }
    for (auto& row : part.at("rows")) merged["rows"].push_back(row);
    const auto& pm = part.at("peak_memory_bytes");
    if (!pm.is_null() && (merged["peak_memory_bytes"].is_null() ||
                          pm.get<std::uint64_t>() > merged["peak_memory_bytes"].get<std::uint64_t>())) {
      merged["peak_memory_bytes"] = pm;
    }
  }
  if (failed) throw UsageError("a bench worker failed");
  return merged;
}

std::string bench_csv(const nlohmann::json& report) {
  std::ostringstream out;
  out << "size,user_ms,gm_ms,total_ms\n" << std::fixed << std::setprecision(6);
  for (const auto& row : report.at("rows")) {
    out << row.at("size").get<std::size_t>() << ',' << row.at("user_ms").get<double>() << ','
        << row.at("gm_ms").get<double>() << ',' << row.at("total_ms").get<double>() << '\n';
  }
  return out.str();
}

int cmd_bench(const Config& cfg) {
  if (cfg.sizes.empty()) throw UsageError("--sizes is required");
  const auto sizes = parse_sizes(cfg.sizes);
  const std::uint64_t seed = effective_seed(cfg).value_or(0);
  const nlohmann::json report = cfg.parallel ? run_bench_parallel(sizes, cfg, seed)
                                             : nlohmann::json::parse(run_bench_json(sizes, cfg, seed));
  if (cfg.format == "csv") {
    emit(cfg, bench_csv(report));
  } else if (cfg.format == "json") {
    emit(cfg, report.dump(2) + "\n");
  } else {
    std::ostringstream text;
    text << std::fixed << std::setprecision(3);
    for (const auto& row : report.at("rows")) {
      text << "m=" << row.at("size").get<std::size_t>() << " user " << row.at("user_ms").get<double>()
           << " ms, gm " << row.at("gm_ms").get<double>() << " ms, total "
           << row.at("total_ms").get<double>() << " ms\n";
    }
    emit(cfg, text.str());
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Inner-product group authentication toolkit"};
  app.require_subcommand(1);
  Config cfg;

  const auto add_common = [&cfg](CLI::App* sub) {
    sub->add_option("--seed", cfg.seed, "RNG seed (GAUTH_SEED overrides)");
    sub->add_option("--out", cfg.out_path, "Output file");
    sub->add_option("--format", cfg.format, "Output format")
        ->check(CLI::IsMember({"json", "csv", "text"}));
  };

  auto* keygen = app.add_subcommand("keygen", "Create a group secret and member credentials");
  add_common(keygen);
  keygen->add_option("--d", cfg.d, "Ambient dimension");
  keygen->add_option("--n", cfg.n, "Subspace dimension");
  keygen->add_option("--users", cfg.users, "Credentials to issue (keys 1..users)");

  auto* demo = app.add_subcommand("demo-auth", "Run a scenario through authentication");
  add_common(demo);
  demo->add_option("--scenario", cfg.scenario_path, "Scenario JSON")->required();

  auto* detect = app.add_subcommand("detect", "Run a scenario and isolate malicious members");
  add_common(detect);
  detect->add_option("--scenario", cfg.scenario_path, "Scenario JSON")->required();

  auto* bench = app.add_subcommand("bench", "Time authentication across roster sizes");
  add_common(bench);
  bench->add_option("--sizes", cfg.sizes, "Comma list, e.g. 100,200,...,1000")->required();
  bench->add_option("--d", cfg.d, "Ambient dimension");
  bench->add_option("--n", cfg.n, "Subspace dimension");
  bench->add_flag("--parallel", cfg.parallel, "One worker process per size");

  auto* replay = app.add_subcommand("replay", "Rerun a scenario and compare to a transcript");
  add_common(replay);
  replay->add_option("--scenario", cfg.scenario_path, "Scenario JSON")->required();
  replay->add_option("--transcript", cfg.transcript_path, "Transcript JSONL")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*keygen) return cmd_keygen(cfg);
    if (*demo) return cmd_demo_auth(cfg);
    if (*detect) return cmd_detect(cfg);
    if (*bench) return cmd_bench(cfg);
    if (*replay) return cmd_replay(cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
