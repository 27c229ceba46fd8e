#pragma once

// HTTP+JSON service for the web player: puzzle listing, attempt checking,
// solution reveal and annotation capture.

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "sparc/dataset.hpp"
#include "sparc/difficulty.hpp"
#include "sparc/rules.hpp"
#include "sparc/solver.hpp"

namespace sparc {

struct Annotation {
  std::string puzzle_id;
  std::string annotator_id;
  Path path;
  bool solved = false;
  int attempts = 1;
  std::int64_t solve_time_ms = 0;
  bool used_show_solution = false;
  bool skipped = false;
  std::string timestamp;
};

inline json to_json(const Annotation& a) {
  json path = json::array();
  for (const auto& q : a.path) path.push_back(pos_to_json(q));
  return {{"puzzle_id", a.puzzle_id},
          {"annotator_id", a.annotator_id},
          {"path", path},
          {"solved", a.solved},
          {"attempts", a.attempts},
          {"solve_time_ms", a.solve_time_ms},
          {"used_show_solution", a.used_show_solution},
          {"skipped", a.skipped},
          {"timestamp", a.timestamp}};
}

namespace detail {

inline Path path_from_json(const json& j) {
  if (!j.is_array()) throw Error("path must be a list of coordinates");
  Path path;
  for (const auto& q : j) {
    if (q.is_array() && q.size() == 2 && q[0].is_number_integer() && q[1].is_number_integer()) {
      path.push_back({q[0].get<int>(), q[1].get<int>()});
    } else if (q.is_object() && q.contains("x") && q.contains("y") && q["x"].is_number_integer() &&
               q["y"].is_number_integer()) {
      path.push_back({q["x"].get<int>(), q["y"].get<int>()});
    } else {
      throw Error("path entries must be [x, y]");
    }
  }
  return path;
}

}  // namespace detail

// Throws Error when a field is missing or has the wrong type.
inline Annotation annotation_from_json(const json& j) {
  if (!j.is_object()) throw Error("annotation must be an object");
  const auto field = [&](const char* key) -> const json& {
    if (!j.contains(key)) throw Error(std::string("missing field ") + key);
    return j[key];
  };
  const auto str = [&](const char* key) {
    const auto& v = field(key);
    if (!v.is_string() || v.get<std::string>().empty()) throw Error(std::string(key) + " must be a non-empty string");
    return v.get<std::string>();
  };
  const auto boolean = [&](const char* key) {
    const auto& v = field(key);
    if (!v.is_boolean()) throw Error(std::string(key) + " must be a boolean");
    return v.get<bool>();
  };
  const auto integer = [&](const char* key, std::int64_t min) {
    const auto& v = field(key);
    if (!v.is_number_integer() || v.get<std::int64_t>() < min)
      throw Error(std::string(key) + " must be an integer >= " + std::to_string(min));
    return v.get<std::int64_t>();
  };
  Annotation a;
  a.puzzle_id = str("puzzle_id");
  a.annotator_id = str("annotator_id");
  a.path = detail::path_from_json(field("path"));
  a.solved = boolean("solved");
  a.attempts = static_cast<int>(integer("attempts", 1));
  a.solve_time_ms = integer("solve_time_ms", 0);
  a.used_show_solution = boolean("used_show_solution");
  a.skipped = boolean("skipped");
  a.timestamp = str("timestamp");
  return a;
}

// ---------------------------------------------------------------------------
// Annotation storage

class AnnotationStore {
 public:
  enum class Result { stored, duplicate };
  virtual ~AnnotationStore() = default;
  virtual Result append(const Annotation& a) = 0;
  virtual std::string export_jsonl() const = 0;
};

// Append-only JSON-lines file; a duplicate is the same annotator, puzzle and
// timestamp.
class JsonLinesStore : public AnnotationStore {
 public:
  explicit JsonLinesStore(std::filesystem::path file, bool fsync_writes = true)
      : file_(std::move(file)), fsync_(fsync_writes) {
    if (file_.has_parent_path()) std::filesystem::create_directories(file_.parent_path());
    if (std::filesystem::exists(file_)) {
      std::ifstream in(file_);
      std::string line;
      while (std::getline(in, line)) {
        if (detail::trim(line).empty()) continue;
        const auto a = annotation_from_json(json::parse(line));
        keys_.insert(key(a));
        lines_ += line + "\n";
      }
    }
  }

  Result append(const Annotation& a) override {
    std::lock_guard lock(mutex_);
    if (!keys_.insert(key(a)).second) return Result::duplicate;
    const std::string line = to_json(a).dump() + "\n";
    const int fd = ::open(file_.c_str(), O_WRONLY | O_CREAT | O_APPEND, 0644);
    if (fd < 0) throw IoError("cannot open " + file_.string() + ": " + std::strerror(errno));
    const auto written = ::write(fd, line.data(), line.size());
    if (fsync_) ::fsync(fd);
    ::close(fd);
    if (written != static_cast<ssize_t>(line.size())) throw IoError("short write to " + file_.string());
    lines_ += line;
    return Result::stored;
  }

  std::string export_jsonl() const override {
    std::lock_guard lock(mutex_);
    return lines_;
  }

 private:
  static std::tuple<std::string, std::string, std::string> key(const Annotation& a) {
    return {a.annotator_id, a.puzzle_id, a.timestamp};
  }

  std::filesystem::path file_;
  bool fsync_;
  mutable std::mutex mutex_;
  std::set<std::tuple<std::string, std::string, std::string>> keys_;
  std::string lines_;
};

// ---------------------------------------------------------------------------
// Routes

struct ServiceOptions {
  std::size_t page_size = 50;
  std::optional<std::filesystem::path> static_dir;
  std::string cors_origin = "*";
  SolveConfig solve;
  std::function<void(const std::string&)> log = [](const std::string& line) { std::cerr << line << "\n"; };
};

class PuzzleService {
 public:
  PuzzleService(std::vector<Puzzle> puzzles, std::shared_ptr<AnnotationStore> store, ServiceOptions opt = {})
      : puzzles_(std::move(puzzles)), store_(std::move(store)), opt_(std::move(opt)) {
    std::sort(puzzles_.begin(), puzzles_.end(), [](const Puzzle& a, const Puzzle& b) { return a.id() < b.id(); });
    for (std::size_t i = 0; i < puzzles_.size(); ++i) {
      if (!index_.emplace(puzzles_[i].id(), i).second) throw Error("duplicate puzzle id " + puzzles_[i].id());
      if (puzzles_[i].split) splits_.insert(*puzzles_[i].split);
    }
    opt_.solve.max_solutions = 1;
  }

  void install(httplib::Server& srv) {
    srv.set_default_headers({{"Access-Control-Allow-Origin", opt_.cors_origin},
                             {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                             {"Access-Control-Allow-Headers", "Content-Type"}});
    srv.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
    srv.Get("/api/puzzles", [this](const httplib::Request& req, httplib::Response& res) { list(req, res); });
    srv.Get(R"(/api/puzzles/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      if (const auto* p = find(req, res)) send(res, 200, puzzle_payload(*p));
    });
    srv.Post(R"(/api/puzzles/([^/]+)/attempts)",
             [this](const httplib::Request& req, httplib::Response& res) { attempt(req, res); });
    srv.Get(R"(/api/puzzles/([^/]+)/solution)",
            [this](const httplib::Request& req, httplib::Response& res) { solution(req, res); });
    srv.Post("/api/annotations", [this](const httplib::Request& req, httplib::Response& res) { annotate(req, res); });
    srv.Get("/api/annotations/export", [this](const httplib::Request&, httplib::Response& res) {
      res.set_content(store_->export_jsonl(), "application/x-ndjson");
    });
    if (opt_.static_dir && !srv.set_mount_point("/", opt_.static_dir->string()))
      throw Error("cannot serve static files from " + opt_.static_dir->string());
  }

  // The puzzle record without anything that would give the answer away.
  static json puzzle_payload(const Puzzle& p) {
    auto j = puzzle_to_json(p);
    j.erase("solution_count");
    return j;
  }

  static json verdict_json(const SolutionVerdict& v) {
    json failures = json::array();
    for (const auto& f : v.failures)
      failures.push_back({{"position", pos_to_json(f.position)}, {"rule", to_string(f.rule)}, {"detail", f.detail}});
    return {{"flags",
             {{"incorrect_start_end", v.structural.incorrect_start_end},
              {"disconnected_line", v.structural.disconnected_line},
              {"intersecting_line", v.structural.intersecting_line},
              {"rule_cell_crossing", v.structural.rule_cell_crossing},
              {"invalid_path", v.structural.invalid_path}}},
            {"failures", failures},
            {"solved", v.solved}};
  }

 private:
  static void send(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
  }
  static void fail(httplib::Response& res, int status, const std::string& message) {
    send(res, status, {{"error", message}});
  }

  const Puzzle* find(const httplib::Request& req, httplib::Response& res) const {
    const auto it = index_.find(req.matches[1].str());
    if (it == index_.end()) {
      fail(res, 404, "unknown puzzle id");
      return nullptr;
    }
    return &puzzles_[it->second];
  }

  void list(const httplib::Request& req, httplib::Response& res) const {
    std::optional<std::string> split;
    std::optional<int> level;
    std::size_t page = 1;
    if (req.has_param("split")) {
      split = req.get_param_value("split");
      if (!splits_.count(*split)) return fail(res, 400, "unknown split");
    }
    try {
      if (req.has_param("level")) {
        std::size_t used = 0;
        const auto v = req.get_param_value("level");
        level = std::stoi(v, &used);
        if (used != v.size() || *level < 1 || *level > 5) throw std::invalid_argument("level");
      }
      if (req.has_param("page")) {
        std::size_t used = 0;
        const auto v = req.get_param_value("page");
        const long long n = std::stoll(v, &used);
        if (used != v.size() || n < 1) throw std::invalid_argument("page");
        page = static_cast<std::size_t>(n);
      }
    } catch (const std::exception&) {
      return fail(res, 400, "level must be 1-5 and page a positive integer");
    }
    std::vector<const Puzzle*> hits;
    for (const auto& p : puzzles_) {
      if (split && p.split != split) continue;
      if (level && puzzle_level(p) != *level) continue;
      hits.push_back(&p);
    }
    json items = json::array();
    const std::size_t begin = (page - 1) * opt_.page_size;
    for (std::size_t i = begin; i < hits.size() && i < begin + opt_.page_size; ++i) {
      const auto& p = *hits[i];
      items.push_back({{"id", p.id()},
                       {"width", p.width()},
                       {"height", p.height()},
                       {"split", p.split ? json(*p.split) : json(nullptr)},
                       {"level", puzzle_level(p)}});
    }
    send(res, 200, {{"page", page}, {"page_size", opt_.page_size}, {"total", hits.size()}, {"puzzles", items}});
  }

  static int puzzle_level(const Puzzle& p) { return p.difficulty ? p.difficulty->level : score_puzzle(p).level; }

  void attempt(const httplib::Request& req, httplib::Response& res) const {
    const auto* p = find(req, res);
    if (!p) return;
    Path path;
    try {
      const auto body = json::parse(req.body);
      path = detail::path_from_json(body.is_object() && body.contains("path") ? body["path"] : body);
    } catch (const std::exception& e) {
      return fail(res, 400, std::string("malformed body: ") + e.what());
    }
    if (path.empty()) return fail(res, 400, "path is empty");
    send(res, 200, verdict_json(check_solution(*p, path)));
  }

  void solution(const httplib::Request& req, httplib::Response& res) {
    const auto* p = find(req, res);
    if (!p) return;
    std::optional<Path> path;
    {
      std::lock_guard lock(solutions_mutex_);
      if (auto it = solutions_.find(p->id()); it != solutions_.end()) path = it->second;
    }
    if (!path) {
      try {
        auto r = solve(*p, opt_.solve);
        if (r.solutions.empty()) return fail(res, 404, "puzzle has no solution");
        path = r.solutions.front();
      } catch (const BudgetExceeded&) {
        return fail(res, 503, "solver budget exceeded");
      }
      std::lock_guard lock(solutions_mutex_);
      solutions_.emplace(p->id(), *path);
    }
    if (opt_.log) opt_.log("solution revealed for " + p->id());
    json j = json::array();
    for (const auto& q : *path) j.push_back(pos_to_json(q));
    send(res, 200, {{"puzzle_id", p->id()}, {"path", j}});
  }

  void annotate(const httplib::Request& req, httplib::Response& res) {
    Annotation a;
    try {
      a = annotation_from_json(json::parse(req.body));
    } catch (const std::exception& e) {
      return fail(res, 400, e.what());
    }
    const auto it = index_.find(a.puzzle_id);
    if (it == index_.end()) return fail(res, 400, "unknown puzzle id");
    if (a.solved && !check_solution(puzzles_[it->second], a.path).solved)
      return fail(res, 400, "solved is true but the path does not solve the puzzle");
    if (store_->append(a) == AnnotationStore::Result::duplicate) return fail(res, 409, "duplicate annotation");
    send(res, 201, {{"stored", true}});
  }

  std::vector<Puzzle> puzzles_;
  std::map<std::string, std::size_t> index_;
  std::set<std::string> splits_;
  std::shared_ptr<AnnotationStore> store_;
  ServiceOptions opt_;
  std::mutex solutions_mutex_;
  std::map<std::string, Path> solutions_;
};

}  // namespace sparc
