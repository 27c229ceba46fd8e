#pragma once

// Generation-validation loop: place random symbols, count solutions, and
// nudge the rule density until the puzzle has between 1 and k_max solutions.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <mutex>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "sparc/difficulty.hpp"
#include "sparc/error.hpp"
#include "sparc/model.hpp"
#include "sparc/solver.hpp"

namespace sparc {

inline constexpr RuleSet kAllRules{RuleKind::dot,      RuleKind::gap,  RuleKind::stone, RuleKind::star,
                                   RuleKind::triangle, RuleKind::poly, RuleKind::ylop};

struct GenConfig {
  std::uint64_t seed = 0;
  int size_min = 2;
  int size_max = 6;
  double initial_rule_density = 0.5;
  double density_step = 0.05;
  std::size_t k_max = 50;
  int max_attempts = 100;
  int max_reseeds = 20;  // per batch index, after Exhausted
  RuleSet rule_palette = kAllRules;
  bool require_all_kinds = false;  // every palette kind at least once
  std::vector<Color> color_palette{kAllColors.begin(), kAllColors.end()};
  int colors_per_puzzle = 2;
  double edge_mark_density = 0.1;
  // Relative weights of symbol kinds; ylop is kept rare.
  double w_stone = 1.0, w_star = 1.0, w_triangle = 1.0, w_poly = 1.0, w_ylop = 0.2;
  // Triangle counts 1, 2, 3.
  std::array<double, 3> triangle_weights{50, 35, 15};
  int poly_area_min = 2, poly_area_max = 4;
  int ylop_area_min = 1, ylop_area_max = 2;
  std::uint64_t solve_budget = 2'000'000;
  unsigned jobs = 1;
  // Puzzles each balanced run may draw, as a multiple of total.
  int balance_draw_factor = 40;
  DifficultyParams difficulty;
  std::optional<std::string> split;
  // Called after every solve: attempt, density, solutions (capped at k_max + 1), budget hit.
  std::function<void(int, double, std::size_t, bool)> on_attempt;
};

// ---------------------------------------------------------------------------
// Split descriptions: full kind names or the short codes G D St S T P Y,
// joined by '-', ',' or '+'. "all" names every kind.

inline RuleSet parse_split(std::string_view spec) {
  RuleSet out;
  std::string token;
  const auto flush = [&] {
    if (token.empty()) return;
    std::string lower = token;
    for (auto& ch : lower) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    if (token == "G" || lower == "gaps" || lower == "gap") out.insert(RuleKind::gap);
    else if (token == "D" || lower == "dots" || lower == "dot") out.insert(RuleKind::dot);
    else if (token == "St" || lower == "stones" || lower == "stone") out.insert(RuleKind::stone);
    else if (token == "S" || lower == "stars" || lower == "star") out.insert(RuleKind::star);
    else if (token == "T" || lower == "tri" || lower == "triangles" || lower == "triangle") out.insert(RuleKind::triangle);
    else if (token == "P" || lower == "polys" || lower == "poly") out.insert(RuleKind::poly);
    else if (token == "Y" || lower == "ylops" || lower == "ylop") out.insert(RuleKind::ylop);
    else if (lower == "all") out = kAllRules;
    else throw Error("unknown rule kind in split: " + token);
    token.clear();
  };
  for (char ch : spec) {
    if (ch == '-' || ch == ',' || ch == '+' || std::isspace(static_cast<unsigned char>(ch))) flush();
    else token += ch;
  }
  flush();
  if (out.empty()) throw Error("empty split description");
  return out;
}

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index, std::uint64_t retry) {
  return splitmix64(splitmix64(splitmix64(seed) ^ index) ^ (retry * 0x632be59bd9b4e019ULL));
}

inline std::string hex_id(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%012llx", static_cast<unsigned long long>(v & 0xffffffffffffULL));
  return buf;
}

// Connected mask grown cell by cell inside the window, shifted to the corner.
inline ShapeId random_shape(std::mt19937_64& rng, int area) {
  std::uniform_int_distribution<int> cell(0, kShapeWindow - 1);
  ShapeCells cells{{cell(rng), cell(rng)}};
  while (static_cast<int>(cells.size()) < area) {
    std::vector<ShapeCell> frontier;
    for (const auto& c : cells) {
      const ShapeCell next[] = {{c.col + 1, c.row}, {c.col - 1, c.row}, {c.col, c.row + 1}, {c.col, c.row - 1}};
      for (const auto& n : next) {
        if (n.col < 0 || n.row < 0 || n.col >= kShapeWindow || n.row >= kShapeWindow) continue;
        if (std::find(cells.begin(), cells.end(), n) != cells.end()) continue;
        if (std::find(frontier.begin(), frontier.end(), n) != frontier.end()) continue;
        frontier.push_back(n);
      }
    }
    std::sort(frontier.begin(), frontier.end());
    cells.push_back(frontier[std::uniform_int_distribution<std::size_t>(0, frontier.size() - 1)(rng)]);
  }
  int min_col = kShapeWindow, min_row = kShapeWindow;
  for (const auto& c : cells) {
    min_col = std::min(min_col, c.col);
    min_row = std::min(min_row, c.row);
  }
  for (auto& c : cells) {
    c.col -= min_col;
    c.row -= min_row;
  }
  return encode_shape(cells);
}

class Builder {
 public:
  Builder(const GenConfig& cfg, std::mt19937_64& rng, int w, int h) : cfg_(cfg), rng_(rng), w_(w), h_(h) {
    const int lw = 2 * w + 1, lh = 2 * h + 1;
    lattice_.assign(static_cast<std::size_t>(lw * lh), Token::path());
    for (int y = 0; y < lh; ++y)
      for (int x = 0; x < lw; ++x)
        if (is_rule_cell({x, y})) at({x, y}) = Token::of(TokenKind::empty_rule);
  }

  Puzzle build(double density, LatticePos s, LatticePos e, const std::vector<Color>& colors) {
    at(s) = Token::of(TokenKind::start);
    at(e) = Token::of(TokenKind::end);
    place_symbols(density, colors);
    place_marks(density, s, e);
    return Puzzle("", w_, h_, lattice_);
  }

 private:
  Token& at(LatticePos q) { return lattice_[static_cast<std::size_t>(q.y * (2 * w_ + 1) + q.x)]; }

  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }

  Token symbol(RuleKind k, const std::vector<Color>& colors) {
    const Color c = colors[static_cast<std::size_t>(pick(static_cast<int>(colors.size())))];
    switch (k) {
      case RuleKind::stone: return Token::stone(c);
      case RuleKind::star: return Token::star(c);
      case RuleKind::triangle: {
        std::discrete_distribution<int> d(cfg_.triangle_weights.begin(), cfg_.triangle_weights.end());
        return Token::triangle(c, 1 + d(rng_));
      }
      case RuleKind::poly:
        return Token::poly(c, random_shape(rng_, std::uniform_int_distribution<int>(cfg_.poly_area_min,
                                                                                    cfg_.poly_area_max)(rng_)));
      case RuleKind::ylop:
        return Token::ylop(c, random_shape(rng_, std::uniform_int_distribution<int>(cfg_.ylop_area_min,
                                                                                    cfg_.ylop_area_max)(rng_)));
      default: break;
    }
    return Token::of(TokenKind::empty_rule);
  }

  void place_symbols(double density, const std::vector<Color>& colors) {
    const RuleKind order[] = {RuleKind::stone, RuleKind::star, RuleKind::triangle, RuleKind::poly, RuleKind::ylop};
    const double weights[] = {cfg_.w_stone, cfg_.w_star, cfg_.w_triangle, cfg_.w_poly, cfg_.w_ylop};
    std::vector<RuleKind> kinds;
    std::vector<double> kind_weights;
    for (int i = 0; i < 5; ++i)
      if (cfg_.rule_palette.contains(order[i])) {
        kinds.push_back(order[i]);
        kind_weights.push_back(weights[i]);
      }
    if (kinds.empty()) return;
    symbols_ = true;

    std::vector<LatticePos> cells;
    for (int y = 1; y < 2 * h_ + 1; y += 2)
      for (int x = 1; x < 2 * w_ + 1; x += 2) cells.push_back({x, y});
    std::shuffle(cells.begin(), cells.end(), rng_);
    const int n = std::clamp(static_cast<int>(std::ceil(density * w_ * h_ - 1e-9)), 1, w_ * h_);

    std::vector<RuleKind> drawn;
    if (cfg_.require_all_kinds) {
      drawn.assign(kinds.begin(), kinds.end());
      std::shuffle(drawn.begin(), drawn.end(), rng_);
    }
    std::discrete_distribution<int> d(kind_weights.begin(), kind_weights.end());
    while (static_cast<int>(drawn.size()) < n) drawn.push_back(kinds[static_cast<std::size_t>(d(rng_))]);
    drawn.resize(std::min(drawn.size(), cells.size()));
    // Ylops only appear next to a poly.
    const auto ylop = std::find(drawn.begin(), drawn.end(), RuleKind::ylop);
    if (ylop != drawn.end() && std::find(drawn.begin(), drawn.end(), RuleKind::poly) == drawn.end())
      *ylop = RuleKind::poly;
    for (std::size_t i = 0; i < drawn.size(); ++i) at(cells[i]) = symbol(drawn[i], colors);
  }

  void place_marks(double density, LatticePos s, LatticePos e) {
    const bool dots = cfg_.rule_palette.contains(RuleKind::dot);
    const bool gaps = cfg_.rule_palette.contains(RuleKind::gap);
    if (!dots && !gaps) return;
    std::vector<LatticePos> slots;
    for (int y = 0; y < 2 * h_ + 1; ++y)
      for (int x = 0; x < 2 * w_ + 1; ++x) {
        const LatticePos q{x, y};
        if (is_drawable(q) && !(q == s) && !(q == e)) slots.push_back(q);
      }
    std::shuffle(slots.begin(), slots.end(), rng_);
    // Without rule-cell symbols the density knob drives the marks instead.
    double share = cfg_.edge_mark_density;
    if (!symbols_) share *= density / cfg_.initial_rule_density;
    int n = static_cast<int>(std::lround(share * static_cast<double>(slots.size())));
    if (cfg_.require_all_kinds) n = std::max(n, static_cast<int>(dots) + static_cast<int>(gaps));
    bool have_dot = false, have_gap = false;
    for (const auto& q : slots) {
      if (n == 0) break;
      const bool edge = (q.x + q.y) % 2 == 1;
      // Required kinds first, then a coin flip.
      TokenKind k;
      if (cfg_.require_all_kinds && dots && !have_dot) k = TokenKind::dot;
      else if (cfg_.require_all_kinds && gaps && !have_gap) k = TokenKind::gap;
      else if (dots && gaps) k = pick(2) ? TokenKind::dot : TokenKind::gap;
      else k = dots ? TokenKind::dot : TokenKind::gap;
      if (k == TokenKind::gap && !edge) {
        if (!dots || (cfg_.require_all_kinds && !have_gap)) continue;
        k = TokenKind::dot;
      }
      at(q) = Token::of(k);
      (k == TokenKind::dot ? have_dot : have_gap) = true;
      --n;
    }
  }

  const GenConfig& cfg_;
  std::mt19937_64& rng_;
  int w_, h_;
  std::vector<Token> lattice_;
  bool symbols_ = false;
};

inline std::vector<LatticePos> perimeter(int w, int h) {
  std::vector<LatticePos> out;
  for (int y = 0; y < 2 * h + 1; ++y)
    for (int x = 0; x < 2 * w + 1; ++x)
      if (x == 0 || y == 0 || x == 2 * w || y == 2 * h) out.push_back({x, y});
  return out;
}

}  // namespace detail

inline void validate_config(const GenConfig& cfg) {
  if (cfg.size_min < 2 || cfg.size_max > 6 || cfg.size_min > cfg.size_max)
    throw Error("size bounds must satisfy 2 <= size_min <= size_max <= 6");
  if (!(cfg.initial_rule_density > 0 && cfg.initial_rule_density <= 1)) throw Error("density must be in (0, 1]");
  if (!(cfg.density_step > 0)) throw Error("density step must be positive");
  if (cfg.k_max < 1 || cfg.max_attempts < 1) throw Error("k_max and max_attempts must be positive");
  if (cfg.rule_palette.empty()) throw Error("empty rule palette");
  if (cfg.color_palette.empty() || cfg.colors_per_puzzle < 1) throw Error("empty color palette");
  if (cfg.rule_palette.contains(RuleKind::ylop) && !cfg.rule_palette.contains(RuleKind::poly))
    throw Error("ylops need polys in the palette");
  if (cfg.poly_area_min < 1 || cfg.poly_area_max > 16 || cfg.poly_area_min > cfg.poly_area_max ||
      cfg.ylop_area_min < 1 || cfg.ylop_area_max > 16 || cfg.ylop_area_min > cfg.ylop_area_max)
    throw Error("shape areas must lie in [1, 16]");
}

// Throws Exhausted after max_attempts rejected candidates.
inline Puzzle generate_one(const GenConfig& cfg) {
  validate_config(cfg);
  std::mt19937_64 rng(detail::splitmix64(cfg.seed));
  std::uniform_int_distribution<int> size(cfg.size_min, cfg.size_max);
  const int w = size(rng), h = size(rng);
  const double floor_density = 1.0 / (w * h);
  double density = std::clamp(cfg.initial_rule_density, floor_density, 1.0);

  SolveConfig scfg;
  scfg.budget = cfg.solve_budget;

  for (int attempt = 0; attempt < cfg.max_attempts; ++attempt) {
    auto colors = cfg.color_palette;
    std::shuffle(colors.begin(), colors.end(), rng);
    colors.resize(std::min<std::size_t>(colors.size(), static_cast<std::size_t>(cfg.colors_per_puzzle)));
    const auto rim = detail::perimeter(w, h);
    std::uniform_int_distribution<std::size_t> rim_pick(0, rim.size() - 1);
    const auto s = rim[rim_pick(rng)];
    auto e = s;
    while (e == s) e = rim[rim_pick(rng)];

    auto p = detail::Builder(cfg, rng, w, h).build(density, s, e, colors);
    SolutionCount c;
    bool budget = false;
    try {
      c = count_solutions(p, cfg.k_max, scfg);
    } catch (const BudgetExceeded&) {
      budget = true;
    }
    if (cfg.on_attempt) cfg.on_attempt(attempt, density, c.count + (c.capped ? 1 : 0), budget);
    if (budget || c.count == 0) {
      density = std::clamp(density - cfg.density_step, floor_density, 1.0);
    } else if (c.capped) {
      density = std::clamp(density + cfg.density_step, floor_density, 1.0);
    } else {
      p.set_id(detail::hex_id(detail::splitmix64(cfg.seed ^ 0x5ca1ab1eULL)));
      p.solution_count = static_cast<int>(c.count);
      p.split = cfg.split;
      p.difficulty = difficulty_tag(p, cfg.difficulty);
      return p;
    }
  }
  throw Exhausted("no acceptable puzzle after " + std::to_string(cfg.max_attempts) + " attempts");
}

// Runs fn(i) for i in [0, n) on cfg.jobs threads; results stay in index order.
template <class T, class Fn>
std::vector<T> parallel_map(std::size_t n, unsigned jobs, Fn fn) {
  std::vector<std::optional<T>> slots(n);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < n;) {
      try {
        slots[i] = fn(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = n;
      }
    }
  };
  const unsigned threads = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(n)));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  std::vector<T> out;
  out.reserve(n);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

// Puzzle number `index` of a corpus seeded by cfg.seed, reseeding on Exhausted.
inline Puzzle generate_indexed(const GenConfig& cfg, std::uint64_t index) {
  for (int retry = 0;; ++retry) {
    auto sub = cfg;
    sub.seed = detail::mix_seed(cfg.seed, index, static_cast<std::uint64_t>(retry));
    try {
      return generate_one(sub);
    } catch (const Exhausted&) {
      if (retry + 1 >= cfg.max_reseeds) throw;
    }
  }
}

inline std::vector<Puzzle> generate_batch(const GenConfig& cfg, std::uint64_t first, std::size_t count) {
  validate_config(cfg);
  return parallel_map<Puzzle>(count, cfg.jobs, [&](std::size_t i) { return generate_indexed(cfg, first + i); });
}

inline std::vector<Puzzle> generate_split(GenConfig cfg, std::string_view spec, std::size_t count) {
  cfg.rule_palette = parse_split(spec);
  if (cfg.rule_palette.contains(RuleKind::ylop)) cfg.rule_palette.insert(RuleKind::poly);
  cfg.require_all_kinds = true;
  cfg.split = std::string(spec);
  return generate_batch(cfg, 0, count);
}

// Draws puzzles in index order until the level buckets can be filled: each
// gets between floor(total/5)*0.7 and ceil(total/5)*1.5 puzzles, as close to
// ceil(total/5) as the draws allow. Within a bucket, earlier draws win.
inline std::vector<Puzzle> generate_balanced(const GenConfig& cfg, std::size_t total) {
  validate_config(cfg);
  const std::size_t target = (total + 4) / 5;
  const auto low = static_cast<std::size_t>(std::floor(static_cast<double>(total / 5) * 0.7));
  const auto high = static_cast<std::size_t>(std::floor(static_cast<double>(target) * 1.5));
  const std::size_t max_draws = total * static_cast<std::size_t>(std::max(1, cfg.balance_draw_factor));
  const std::size_t batch = std::max<std::size_t>(std::max(1u, cfg.jobs) * 4, 32);

  std::array<std::vector<Puzzle>, 5> drawn_by_level;
  std::array<std::size_t, 5> take{};
  const auto plan = [&] {
    std::size_t sum = 0;
    for (std::size_t l = 0; l < 5; ++l) {
      if (drawn_by_level[l].size() < low) return false;
      take[l] = std::min(drawn_by_level[l].size(), target);
      sum += take[l];
    }
    for (std::size_t l = 0; l < 5 && sum < total; ++l) {
      const auto extra = std::min(std::min(drawn_by_level[l].size(), high) - take[l], total - sum);
      take[l] += extra;
      sum += extra;
    }
    return sum == total;
  };
  std::size_t drawn = 0;
  while (!plan()) {
    if (drawn >= max_draws)
      throw Exhausted("could not balance difficulty levels within " + std::to_string(max_draws) + " draws");
    const auto n = std::min(batch, max_draws - drawn);
    for (auto& p : generate_batch(cfg, drawn, n)) {
      auto& bucket = drawn_by_level[static_cast<std::size_t>(p.difficulty->level - 1)];
      if (bucket.size() < high) bucket.push_back(std::move(p));
    }
    drawn += n;
  }
  std::vector<Puzzle> out;
  for (std::size_t l = 0; l < 5; ++l)
    for (std::size_t i = 0; i < take[l]; ++i) out.push_back(std::move(drawn_by_level[l][i]));
  return out;
}

}  // namespace sparc
