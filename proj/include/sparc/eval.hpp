#pragma once

// Evaluation harness: chat-completion client, sampling k answers per puzzle,
// raw completion storage, grading and report aggregation.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "sparc/dataset.hpp"
#include "sparc/difficulty.hpp"
#include "sparc/error.hpp"
#include "sparc/prompt.hpp"

namespace sparc {


struct ModelEndpoint {
  std::string base_url;  // e.g. http://localhost:8000/v1
  std::string model;
  double temperature = 1.0;
  int max_tokens = 16384;
  std::string token_env = "SPARC_API_KEY";
  int max_retries = 5;
  double backoff_base_s = 1.0;
  unsigned concurrency = 4;
  bool request_n = true;  // ask for all samples at once; the rest are fetched one by one
  int timeout_s = 600;
  std::uint64_t seed = 0;  // backoff jitter
};

struct Completion {
  std::string text;
  std::int64_t prompt_tokens = 0;
  std::int64_t completion_tokens = 0;
};

// A request that still failed after all retries.
class RequestFailed : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Chat-completion client

class ChatClient {
 public:
  explicit ChatClient(ModelEndpoint ep) : ep_(std::move(ep)), rng_(ep_.seed) {
    const auto scheme = ep_.base_url.find("://");
    if (scheme == std::string::npos) throw Error("endpoint URL needs a scheme: " + ep_.base_url);
    const auto slash = ep_.base_url.find('/', scheme + 3);
    origin_ = ep_.base_url.substr(0, slash);
    prefix_ = slash == std::string::npos ? "" : ep_.base_url.substr(slash);
    while (!prefix_.empty() && prefix_.back() == '/') prefix_.pop_back();
    if (const char* tok = std::getenv(ep_.token_env.c_str()); tok && *tok) token_ = tok;
  }

  // Throws EndpointUnreachable when no HTTP connection can be made.
  void probe() {
    auto cli = client();
    cli.set_read_timeout(10, 0);
    if (!cli.Get(prefix_ + "/models", headers())) throw EndpointUnreachable("cannot reach " + ep_.base_url);
  }

  std::vector<Completion> complete(const std::string& prompt, int n) {
    std::vector<Completion> out;
    bool batch = ep_.request_n && n > 1;
    while (static_cast<int>(out.size()) < n) {
      const int want = batch ? n - static_cast<int>(out.size()) : 1;
      auto got = request(prompt, want);
      // Endpoints that ignore n answer with a single choice.
      if (static_cast<int>(got.size()) < want) batch = false;
      for (auto& c : got)
        if (static_cast<int>(out.size()) < n) out.push_back(std::move(c));
    }
    return out;
  }

 private:
  httplib::Client client() const {
    httplib::Client cli(origin_);
    cli.set_connection_timeout(10, 0);
    cli.set_read_timeout(ep_.timeout_s, 0);
    cli.set_write_timeout(60, 0);
    return cli;
  }

  httplib::Headers headers() const {
    httplib::Headers h;
    if (!token_.empty()) h.emplace("Authorization", "Bearer " + token_);
    return h;
  }

  double backoff(int attempt) {
    std::lock_guard lock(rng_mutex_);
    std::uniform_real_distribution<double> jitter(0.5, 1.5);
    return ep_.backoff_base_s * static_cast<double>(1u << std::min(attempt, 16)) * jitter(rng_);
  }

  std::vector<Completion> request(const std::string& prompt, int n) {
    json body = {{"model", ep_.model},
                 {"messages", json::array({{{"role", "user"}, {"content", prompt}}})},
                 {"temperature", ep_.temperature},
                 {"max_tokens", ep_.max_tokens},
                 {"n", n}};
    const std::string payload = body.dump();
    std::string last_error;
    for (int attempt = 0; attempt <= ep_.max_retries; ++attempt) {
      auto cli = client();
      auto res = cli.Post(prefix_ + "/chat/completions", headers(), payload, "application/json");
      double wait = -1;
      if (!res) {
        last_error = "transport error: " + httplib::to_string(res.error());
      } else if (res->status == 200) {
        return parse(res->body);
      } else if (res->status == 429 || res->status >= 500) {
        last_error = "HTTP " + std::to_string(res->status);
        if (res->has_header("Retry-After")) {
          try {
            wait = std::stod(res->get_header_value("Retry-After"));
          } catch (const std::exception&) {
          }
        }
      } else {
        throw RequestFailed("HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 200));
      }
      if (attempt == ep_.max_retries) break;
      if (wait < 0) wait = backoff(attempt);
      std::this_thread::sleep_for(std::chrono::duration<double>(wait));
    }
    throw RequestFailed(last_error);
  }

  static std::vector<Completion> parse(const std::string& body) {
    std::vector<Completion> out;
    try {
      const auto j = json::parse(body);
      for (const auto& c : j.at("choices")) {
        Completion x;
        const auto& content = c.at("message").at("content");
        x.text = content.is_string() ? content.get<std::string>() : "";
        out.push_back(std::move(x));
      }
      if (!out.empty() && j.contains("usage") && j["usage"].is_object()) {
        out.front().prompt_tokens = j["usage"].value("prompt_tokens", std::int64_t{0});
        out.front().completion_tokens = j["usage"].value("completion_tokens", std::int64_t{0});
      }
    } catch (const json::exception& e) {
      throw RequestFailed(std::string("malformed completion response: ") + e.what());
    }
    if (out.empty()) throw RequestFailed("completion response has no choices");
    return out;
  }

  ModelEndpoint ep_;
  std::string origin_, prefix_, token_;
  std::mt19937_64 rng_;
  std::mutex rng_mutex_;
};

// ---------------------------------------------------------------------------
// Raw completion store, addressed by the FNV-1a hash of the text.

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string content_key(std::string_view text) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  auto h = fnv1a(text);
  for (int i = 15; i >= 0; --i, h >>= 4) out[static_cast<std::size_t>(i)] = digits[h & 15];
  return out;
}

class RawStore {
 public:
  explicit RawStore(std::filesystem::path dir) : dir_(std::move(dir)) { std::filesystem::create_directories(dir_); }

  std::string put(const std::string& text) {
    const auto key = content_key(text);
    const auto file = dir_ / (key + ".txt");
    std::lock_guard lock(mutex_);
    if (!std::filesystem::exists(file)) write_file(file.string(), text);
    return key;
  }

  std::string get(const std::string& key) const { return read_file((dir_ / (key + ".txt")).string()); }

 private:
  std::filesystem::path dir_;
  std::mutex mutex_;
};

// ---------------------------------------------------------------------------
// Records

struct SampleRef {
  std::string raw_key;
  std::int64_t prompt_tokens = 0;
  std::int64_t completion_tokens = 0;
};

struct PuzzleOutcome {
  std::string puzzle_id;
  int level = 0;
  std::optional<std::string> split;
  bool graded = false;
  std::string error;  // why it is ungraded
  std::vector<SampleRef> raw;
  std::vector<GradeRecord> samples;
};

inline int puzzle_level(const Puzzle& p, const DifficultyParams& params = {}) {
  return p.difficulty ? p.difficulty->level : score_puzzle(p, params).level;
}

inline json to_json(const PuzzleOutcome& o) {
  json samples = json::array();
  for (const auto& s : o.samples) samples.push_back(to_json(s));
  json raw = json::array();
  for (const auto& r : o.raw)
    raw.push_back({{"key", r.raw_key}, {"prompt_tokens", r.prompt_tokens}, {"completion_tokens", r.completion_tokens}});
  json j = {{"puzzle_id", o.puzzle_id}, {"level", o.level}, {"graded", o.graded}, {"raw", raw}, {"samples", samples}};
  j["split"] = o.split ? json(*o.split) : json(nullptr);
  if (!o.error.empty()) j["error"] = o.error;
  return j;
}

inline PuzzleOutcome outcome_from_json(const json& j) {
  try {
    PuzzleOutcome o;
    o.puzzle_id = j.at("puzzle_id").get<std::string>();
    o.level = j.at("level").get<int>();
    if (j.contains("split") && !j["split"].is_null()) o.split = j["split"].get<std::string>();
    o.graded = j.at("graded").get<bool>();
    o.error = j.value("error", "");
    for (const auto& r : j.value("raw", json::array()))
      o.raw.push_back({r.at("key").get<std::string>(), r.value("prompt_tokens", std::int64_t{0}),
                       r.value("completion_tokens", std::int64_t{0})});
    for (const auto& s : j.value("samples", json::array())) o.samples.push_back(grade_record_from_json(s));
    return o;
  } catch (const json::exception& e) {
    throw Error(std::string("malformed outcome record: ") + e.what());
  }
}

inline std::string save_outcomes(std::span<const PuzzleOutcome> outcomes) {
  std::string out;
  for (const auto& o : outcomes) out += to_json(o).dump() + "\n";
  return out;
}

inline std::vector<PuzzleOutcome> load_outcomes(std::string_view bytes) {
  std::vector<PuzzleOutcome> out;
  std::istringstream in{std::string(bytes)};
  std::string line;
  while (std::getline(in, line)) {
    if (detail::trim(line).empty()) continue;
    try {
      out.push_back(outcome_from_json(json::parse(line)));
    } catch (const json::exception& e) {
      throw Error(std::string("malformed outcome line: ") + e.what());
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Aggregation

struct Ratio {
  std::int64_t num = 0;
  std::int64_t den = 0;

  double value() const { return den ? static_cast<double>(num) / static_cast<double>(den) : 0.0; }
  // Reduced "a/b".
  std::string exact() const {
    if (den == 0) return "0/0";
    const auto g = std::gcd(num, den);
    return std::to_string(num / g) + "/" + std::to_string(den / g);
  }
  friend bool operator==(const Ratio&, const Ratio&) = default;
};

inline constexpr std::array<int, 4> kPassAtK = {1, 2, 4, 8};
inline constexpr std::array<const char*, 5> kViolationNames = {
    "invalid_path", "incorrect_start_end", "disconnected_line", "intersecting_line", "rule_cell_crossing"};

struct EvalReport {
  std::size_t puzzles = 0;
  std::size_t graded = 0;
  std::size_t ungraded = 0;
  bool partial = false;
  int samples_per_puzzle = 0;
  Ratio accuracy;                      // first sample solved, over graded puzzles
  std::array<Ratio, 5> by_level{};     // levels 1..5
  std::map<std::string, Ratio> by_split;
  Ratio full_set;                      // baseline for split deltas
  std::array<Ratio, 5> violations{};   // over all graded generations, order of kViolationNames
  std::int64_t extraction_failures = 0;
  std::map<int, Ratio> pass_at;        // k -> solved within the first k samples
  std::int64_t prompt_tokens = 0;
  std::int64_t completion_tokens = 0;
};

inline EvalReport aggregate(std::span<const PuzzleOutcome> outcomes) {
  EvalReport r;
  r.puzzles = outcomes.size();
  int min_samples = -1;
  for (const auto& o : outcomes) {
    for (const auto& s : o.raw) {
      r.prompt_tokens += s.prompt_tokens;
      r.completion_tokens += s.completion_tokens;
    }
    if (!o.graded || o.samples.empty()) {
      ++r.ungraded;
      continue;
    }
    ++r.graded;
    const int n = static_cast<int>(o.samples.size());
    min_samples = min_samples < 0 ? n : std::min(min_samples, n);
  }
  r.partial = r.ungraded > 0;
  r.samples_per_puzzle = std::max(min_samples, 0);

  // Split deltas compare against the untagged puzzles, or everything when all are tagged.
  const bool any_plain = std::any_of(outcomes.begin(), outcomes.end(), [](const PuzzleOutcome& o) {
    return o.graded && !o.samples.empty() && !o.split;
  });

  for (const auto& o : outcomes) {
    if (!o.graded || o.samples.empty()) continue;
    const bool first = o.samples.front().solved;
    ++r.accuracy.den;
    r.accuracy.num += first;
    if (o.level >= 1 && o.level <= 5) {
      auto& l = r.by_level[static_cast<std::size_t>(o.level - 1)];
      ++l.den;
      l.num += first;
    }
    if (o.split) {
      auto& s = r.by_split[*o.split];
      ++s.den;
      s.num += first;
    }
    if (!o.split || !any_plain) {
      ++r.full_set.den;
      r.full_set.num += first;
    }
    for (const auto& s : o.samples) {
      const bool flags[] = {s.structural.invalid_path, s.structural.incorrect_start_end, s.structural.disconnected_line,
                            s.structural.intersecting_line, s.structural.rule_cell_crossing};
      for (std::size_t i = 0; i < std::size(flags); ++i) {
        ++r.violations[i].den;
        r.violations[i].num += flags[i];
      }
      r.extraction_failures += !s.extracted();
    }
    for (int k : kPassAtK) {
      if (k > r.samples_per_puzzle) continue;
      auto& pk = r.pass_at[k];
      ++pk.den;
      pk.num += std::any_of(o.samples.begin(), o.samples.begin() + k, [](const GradeRecord& g) { return g.solved; });
    }
  }
  return r;
}

inline json ratio_json(const Ratio& r) { return {{"solved", r.num}, {"total", r.den}, {"rate", r.value()}, {"exact", r.exact()}}; }

inline json to_json(const EvalReport& r) {
  json j;
  j["puzzles"] = r.puzzles;
  j["graded"] = r.graded;
  j["ungraded"] = r.ungraded;
  j["partial"] = r.partial;
  j["samples_per_puzzle"] = r.samples_per_puzzle;
  j["accuracy"] = ratio_json(r.accuracy);
  json levels = json::object();
  for (int l = 1; l <= 5; ++l) levels[std::to_string(l)] = ratio_json(r.by_level[static_cast<std::size_t>(l - 1)]);
  j["accuracy_by_level"] = levels;
  j["full_set"] = ratio_json(r.full_set);
  json splits = json::object();
  for (const auto& [name, ratio] : r.by_split) {
    auto s = ratio_json(ratio);
    s["delta"] = ratio.value() - r.full_set.value();
    splits[name] = s;
  }
  j["accuracy_by_split"] = splits;
  json viol = json::object();
  for (std::size_t i = 0; i < kViolationNames.size(); ++i) {
    const auto& v = r.violations[i];
    viol[kViolationNames[i]] = {{"count", v.num}, {"generations", v.den}, {"rate", v.value()}, {"exact", v.exact()}};
  }
  j["violations"] = viol;
  // Extraction failures count as invalid paths but in none of the four categories.
  j["extraction_failures"] = r.extraction_failures;
  json pass = json::object();
  for (const auto& [k, ratio] : r.pass_at) pass[std::to_string(k)] = ratio_json(ratio);
  j["pass_at_k"] = pass;
  j["tokens"] = {{"prompt", r.prompt_tokens}, {"completion", r.completion_tokens}};
  return j;
}

namespace detail {

inline std::string fixed6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace detail

inline std::string accuracy_by_level_csv(const EvalReport& r) {
  std::string s = "level,puzzles,solved,accuracy\n";
  for (int l = 1; l <= 5; ++l) {
    const auto& x = r.by_level[static_cast<std::size_t>(l - 1)];
    s += std::to_string(l) + "," + std::to_string(x.den) + "," + std::to_string(x.num) + "," +
         detail::fixed6(x.value()) + "\n";
  }
  s += "all," + std::to_string(r.accuracy.den) + "," + std::to_string(r.accuracy.num) + "," +
       detail::fixed6(r.accuracy.value()) + "\n";
  return s;
}

inline std::string violations_csv(const EvalReport& r) {
  std::string s = "category,count,generations,rate,exact\n";
  for (std::size_t i = 0; i < kViolationNames.size(); ++i) {
    const auto& v = r.violations[i];
    s += std::string(kViolationNames[i]) + "," + std::to_string(v.num) + "," + std::to_string(v.den) + "," +
         detail::fixed6(v.value()) + "," + v.exact() + "\n";
  }
  return s;
}

inline std::string pass_at_k_csv(const EvalReport& r) {
  std::string s = "k,puzzles,solved,rate\n";
  for (const auto& [k, v] : r.pass_at)
    s += std::to_string(k) + "," + std::to_string(v.den) + "," + std::to_string(v.num) + "," +
         detail::fixed6(v.value()) + "\n";
  return s;
}

inline std::string accuracy_by_split_csv(const EvalReport& r) {
  std::string s = "split,puzzles,solved,accuracy,delta\n";
  for (const auto& [name, v] : r.by_split)
    s += name + "," + std::to_string(v.den) + "," + std::to_string(v.num) + "," + detail::fixed6(v.value()) + "," +
         detail::fixed6(v.value() - r.full_set.value()) + "\n";
  return s;
}

inline void write_report(const std::filesystem::path& dir, const EvalReport& r) {
  std::filesystem::create_directories(dir);
  write_file((dir / "report.json").string(), to_json(r).dump(2) + "\n");
  write_file((dir / "accuracy_by_level.csv").string(), accuracy_by_level_csv(r));
  write_file((dir / "violations.csv").string(), violations_csv(r));
  write_file((dir / "pass_at_k.csv").string(), pass_at_k_csv(r));
  write_file((dir / "accuracy_by_split.csv").string(), accuracy_by_split_csv(r));
}

// ---------------------------------------------------------------------------
// Running

struct EvalOptions {
  PromptTemplate prompt;
  int k = 1;
  std::filesystem::path out_dir = "eval_out";
  DifficultyParams difficulty;
};

inline PuzzleOutcome grade_outcome(const Puzzle& p, std::vector<SampleRef> raw, const RawStore& store,
                                   const DifficultyParams& params) {
  PuzzleOutcome o;
  o.puzzle_id = p.id();
  o.level = puzzle_level(p, params);
  o.split = p.split;
  o.graded = true;
  for (const auto& r : raw) o.samples.push_back(grade(p, store.get(r.raw_key)));
  o.raw = std::move(raw);
  return o;
}

// Requests k completions per puzzle and grades them. Raw completions go to
// out_dir/raw, outcomes to out_dir/records.jsonl, reports next to them.
inline EvalReport run_eval(std::span<const Puzzle> dataset, const ModelEndpoint& endpoint, const EvalOptions& opt) {
  if (opt.k < 1) throw Error("k must be at least 1");
  if (dataset.empty()) throw Error("dataset is empty");
  if (endpoint.concurrency < 1) throw Error("concurrency must be at least 1");
  ChatClient client(endpoint);
  client.probe();
  RawStore store(opt.out_dir / "raw");

  std::vector<PuzzleOutcome> outcomes(dataset.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i; (i = next++) < dataset.size();) {
      const Puzzle& p = dataset[i];
      try {
        const auto completions = client.complete(render_prompt(p, opt.prompt), opt.k);
        std::vector<SampleRef> raw;
        for (const auto& c : completions) raw.push_back({store.put(c.text), c.prompt_tokens, c.completion_tokens});
        outcomes[i] = grade_outcome(p, std::move(raw), store, opt.difficulty);
      } catch (const RequestFailed& e) {
        auto& o = outcomes[i];
        o.puzzle_id = p.id();
        o.level = puzzle_level(p, opt.difficulty);
        o.split = p.split;
        o.graded = false;
        o.error = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  const auto n = std::min<std::size_t>(endpoint.concurrency, dataset.size());
  for (std::size_t t = 0; t < n; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  write_file((opt.out_dir / "records.jsonl").string(), save_outcomes(outcomes));
  const auto report = aggregate(outcomes);
  write_report(opt.out_dir, report);
  return report;
}

// Re-grades stored raw completions without contacting any endpoint.
inline std::vector<PuzzleOutcome> regrade(std::span<const Puzzle> dataset, const std::filesystem::path& run_dir,
                                          const DifficultyParams& params = {}) {
  const auto stored = load_outcomes(read_file((run_dir / "records.jsonl").string()));
  std::map<std::string, const Puzzle*> by_id;
  for (const auto& p : dataset) by_id[p.id()] = &p;
  RawStore store(run_dir / "raw");
  std::vector<PuzzleOutcome> out;
  for (const auto& s : stored) {
    const auto it = by_id.find(s.puzzle_id);
    if (it == by_id.end()) throw Error("record for unknown puzzle " + s.puzzle_id);
    if (!s.graded) {
      out.push_back(s);
      continue;
    }
    out.push_back(grade_outcome(*it->second, s.raw, store, params));
  }
  return out;
}

}  // namespace sparc
