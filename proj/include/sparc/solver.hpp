#pragma once

// Exhaustive depth-first enumeration of solution paths.
//
// The search walks the node graph (even lattice coordinates) one edge at a
// time, never revisiting a node, and checks every rule when it reaches End.
// Optional prunings only discard branches that provably cannot complete into
// a solution, so they never change the solution set. Node, edge and cell sets
// are kept as fixed-width bitsets laid out with the node row stride, so a
// flood fill is a few word operations per step.

#include <array>
#include <atomic>
#include <bit>
#include <cstdint>
#include <future>
#include <limits>
#include <map>
#include <vector>

#include "sparc/error.hpp"
#include "sparc/model.hpp"
#include "sparc/path.hpp"
#include "sparc/rules.hpp"

namespace sparc {

inline constexpr std::size_t kUnlimited = std::numeric_limits<std::size_t>::max();

struct SolveConfig {
  std::size_t max_solutions = 51;
  bool prune_gaps = true;     // never step on gap cells
  bool prune_dots = true;     // every unvisited dot and End must stay reachable
  bool prune_regions = true;  // sealed regions and settled triangles must already hold
  std::uint64_t budget = 100'000'000;  // lattice cells entered before BudgetExceeded
  unsigned jobs = 1;                   // >1 splits the root branches across threads
  bool keep_paths = true;
};

struct SolveResult {
  std::vector<Path> solutions;
  std::size_t count = 0;  // equals solutions.size() when keep_paths
  bool capped = false;    // stopped because more than max_solutions exist
  std::uint64_t nodes_expanded = 0;
};

namespace detail {

template <int K>
struct Bits {
  std::array<std::uint64_t, K> w{};

  void set(int i) { w[static_cast<std::size_t>(i >> 6)] |= std::uint64_t{1} << (i & 63); }
  void reset(int i) { w[static_cast<std::size_t>(i >> 6)] &= ~(std::uint64_t{1} << (i & 63)); }
  bool test(int i) const { return (w[static_cast<std::size_t>(i >> 6)] >> (i & 63)) & 1u; }
  bool any() const {
    for (auto x : w)
      if (x) return true;
    return false;
  }
  int count() const {
    int n = 0;
    for (auto x : w) n += std::popcount(x);
    return n;
  }
  int lowest() const {
    for (int k = 0; k < K; ++k)
      if (w[static_cast<std::size_t>(k)]) return k * 64 + std::countr_zero(w[static_cast<std::size_t>(k)]);
    return -1;
  }
  template <class F>
  void each(F f) const {
    for (int k = 0; k < K; ++k)
      for (auto x = w[static_cast<std::size_t>(k)]; x; x &= x - 1) f(k * 64 + std::countr_zero(x));
  }
  Bits shl(int n) const {
    Bits r;
    const int ws = n >> 6, bs = n & 63;
    for (int k = K - 1; k >= ws; --k) {
      r.w[static_cast<std::size_t>(k)] = w[static_cast<std::size_t>(k - ws)] << bs;
      if (bs && k - ws - 1 >= 0) r.w[static_cast<std::size_t>(k)] |= w[static_cast<std::size_t>(k - ws - 1)] >> (64 - bs);
    }
    return r;
  }
  Bits shr(int n) const {
    Bits r;
    const int ws = n >> 6, bs = n & 63;
    for (int k = 0; k + ws < K; ++k) {
      r.w[static_cast<std::size_t>(k)] = w[static_cast<std::size_t>(k + ws)] >> bs;
      if (bs && k + ws + 1 < K) r.w[static_cast<std::size_t>(k)] |= w[static_cast<std::size_t>(k + ws + 1)] << (64 - bs);
    }
    return r;
  }
  Bits operator~() const {
    Bits r;
    for (int k = 0; k < K; ++k) r.w[static_cast<std::size_t>(k)] = ~w[static_cast<std::size_t>(k)];
    return r;
  }
  Bits& operator&=(const Bits& o) {
    for (int k = 0; k < K; ++k) w[static_cast<std::size_t>(k)] &= o.w[static_cast<std::size_t>(k)];
    return *this;
  }
  Bits& operator|=(const Bits& o) {
    for (int k = 0; k < K; ++k) w[static_cast<std::size_t>(k)] |= o.w[static_cast<std::size_t>(k)];
    return *this;
  }
  friend Bits operator&(Bits a, const Bits& b) { return a &= b; }
  friend Bits operator|(Bits a, const Bits& b) { return a |= b; }
  friend bool operator==(const Bits&, const Bits&) = default;
  friend auto operator<=>(const Bits&, const Bits&) = default;
};

// Indexing: node (c, r) is bit r * nw + c with nw = width + 1. Horizontal
// edge bit v joins nodes v and v + 1, vertical edge bit v joins v and v + nw.
// Cell (cx, cy) is bit cy * nw + cx; its edges are H[v], H[v + nw], V[v] and
// V[v + 1].
template <int K>
class NodeSearch {
 public:
  using B = Bits<K>;

  NodeSearch(const Puzzle& p, const SolveConfig& cfg, std::atomic<std::uint64_t>& expansions)
      : p_(p), cfg_(cfg), expansions_(expansions), w_(p.width()), h_(p.height()), nw_(p.width() + 1) {
    limit_ = cfg.max_solutions == kUnlimited ? kUnlimited : cfg.max_solutions + 1;
    touched_.assign(static_cast<std::size_t>(nw_ * (h_ + 1)), 0);
    need_.assign(touched_.size(), 0);
    poly_area_.assign(touched_.size(), 0);
    for (int r = 0; r <= h_; ++r)
      for (int c = 0; c <= w_; ++c) {
        const int v = r * nw_ + c;
        all_nodes_.set(v);
        if (c < w_) h_edges_.set(v);
        if (r < h_) v_edges_.set(v);
        if (c < w_ && r < h_) cells_.set(v);
        if (c < w_ - 1 && r < h_) cell_pairs_h_.set(v);
        if (c < w_ && r < h_ - 1) cell_pairs_v_.set(v);
      }
    for (int y = 0; y < p.lattice_height(); ++y)
      for (int x = 0; x < p.lattice_width(); ++x) {
        const LatticePos q{x, y};
        const Token& t = p.at(q);
        if (is_rule_cell(q)) {
          const int cell = (y / 2) * nw_ + x / 2;
          if (t.color) {
            colored_[static_cast<std::size_t>(*t.color)].set(cell);
            region_rules_ = region_rules_ || t.kind != TokenKind::triangle;
          }
          if (t.kind == TokenKind::star) stars_[static_cast<std::size_t>(*t.color)].set(cell);
          if (t.kind == TokenKind::stone) stones_[static_cast<std::size_t>(*t.color)].set(cell);
          if (t.kind == TokenKind::poly) {
            poly_area_[static_cast<std::size_t>(cell)] = shape_area(t.shape);
            polys_.set(cell);
          }
          if (t.kind == TokenKind::ylop) ylops_.set(cell);
          if (t.kind == TokenKind::triangle) {
            need_[static_cast<std::size_t>(cell)] = t.count;
            triangles_.push_back(cell);
          }
          continue;
        }
        const bool node = x % 2 == 0 && y % 2 == 0;
        const int v = (y / 2) * nw_ + x / 2;
        auto& gaps = node ? gap_nodes_ : (x % 2 ? gap_h_ : gap_v_);
        auto& dots = node ? dot_nodes_ : (x % 2 ? dot_h_ : dot_v_);
        if (t.kind == TokenKind::gap) gaps.set(v);
        if (t.kind == TokenKind::dot) dots.set(v);
      }
    start_ = locate(p.start());
    end_ = locate(p.end());
    pass_h_ = h_edges_;
    pass_v_ = v_edges_;
    pass_nodes_ = all_nodes_;
    if (cfg.prune_gaps) {
      pass_h_ = pass_h_ & ~gap_h_;
      pass_v_ = pass_v_ & ~gap_v_;
      pass_nodes_ = pass_nodes_ & ~gap_nodes_;
    }
  }

  // First moves out of Start, in search order.
  std::vector<int> root_moves() const {
    std::vector<int> out;
    for (int d = 0; d < 4; ++d)
      if (start_.kind == Spot::node ? has_edge(start_.index, d) : edge_end(start_, d) >= 0) out.push_back(d);
    return out;
  }

  // Explores all paths from Start, or only those whose first move is `first`.
  void run(int first = -1) {
    path_.push_back(p_.index(p_.start()));
    if (start_.kind == Spot::node) {
      visited_.set(start_.index);
      for (int d = 0; d < 4 && !done(); ++d)
        if (first < 0 || d == first) move(start_.index, d);
      visited_.reset(start_.index);
    } else {
      use_edge(start_, +1);
      for (int d = 0; d < 4 && !done(); ++d) {
        if (first >= 0 && d != first) continue;
        const int v = edge_end(start_, d);
        if (v < 0 || (cfg_.prune_gaps && gap_nodes_.test(v))) continue;
        if (cfg_.prune_regions && overflow(start_)) break;
        expand();
        enter_node(v, -1);
      }
      use_edge(start_, -1);
    }
    path_.pop_back();
  }

  std::vector<Path> solutions;
  std::size_t count = 0;
  std::uint64_t local_expansions = 0;

 private:
  struct Spot {
    enum Kind { node, h_edge, v_edge } kind = node;
    int index = 0;
    friend bool operator==(const Spot&, const Spot&) = default;
  };

  struct Partition {
    std::vector<B> regions;
    std::vector<char> satisfied;
    bool open_ok = true;
  };

  static constexpr int dx[] = {1, 0, -1, 0};  // right, down, left, up
  static constexpr int dy[] = {0, 1, 0, -1};

  Spot locate(LatticePos q) const {
    const int v = (q.y / 2) * nw_ + q.x / 2;
    if (q.x % 2 == 0 && q.y % 2 == 0) return {Spot::node, v};
    return {q.x % 2 ? Spot::h_edge : Spot::v_edge, v};
  }

  int lattice_of(const Spot& s) const {
    const int c = s.index % nw_, r = s.index / nw_;
    const int x = 2 * c + (s.kind == Spot::h_edge), y = 2 * r + (s.kind == Spot::v_edge);
    return y * p_.lattice_width() + x;
  }

  bool has_edge(int v, int d) const {
    const int c = v % nw_, r = v / nw_;
    return c + dx[d] >= 0 && c + dx[d] <= w_ && r + dy[d] >= 0 && r + dy[d] <= h_;
  }

  Spot edge_toward(int v, int d) const {
    switch (d) {
      case 0: return {Spot::h_edge, v};
      case 1: return {Spot::v_edge, v};
      case 2: return {Spot::h_edge, v - 1};
      default: return {Spot::v_edge, v - nw_};
    }
  }

  // Endpoint of an edge in direction d, or -1.
  int edge_end(const Spot& e, int d) const {
    if (e.kind == Spot::h_edge) return d == 0 ? e.index + 1 : d == 2 ? e.index : -1;
    if (e.kind == Spot::v_edge) return d == 1 ? e.index + nw_ : d == 3 ? e.index : -1;
    return -1;
  }

  // The cells on either side of an edge, -1 where the border is.
  std::array<int, 2> edge_cells(const Spot& e) const {
    const int c = e.index % nw_, r = e.index / nw_;
    if (e.kind == Spot::h_edge) return {r > 0 ? e.index - nw_ : -1, r < h_ ? e.index : -1};
    return {c > 0 ? e.index - 1 : -1, c < w_ ? e.index : -1};
  }

  bool edge_on_border(const Spot& e) const {
    const int c = e.index % nw_, r = e.index / nw_;
    return e.kind == Spot::h_edge ? (r == 0 || r == h_) : (c == 0 || c == w_);
  }

  bool node_on_border(int v) const {
    const int c = v % nw_, r = v / nw_;
    return c == 0 || r == 0 || c == w_ || r == h_;
  }

  bool done() const { return count >= limit_; }

  void expand() {
    if (++local_expansions % 1024 == 0) {
      if (expansions_.fetch_add(1024) + 1024 > cfg_.budget) throw BudgetExceeded(expansions_.load());
    }
  }

  void use_edge(const Spot& e, int delta) {
    auto& used = e.kind == Spot::h_edge ? used_h_ : used_v_;
    if (delta > 0) used.set(e.index);
    else used.reset(e.index);
    if (triangles_.empty()) return;
    for (int cell : edge_cells(e))
      if (cell >= 0) touched_[static_cast<std::size_t>(cell)] += delta;
  }

  bool overflow(const Spot& e) const {
    for (int cell : edge_cells(e))
      if (cell >= 0 && need_[static_cast<std::size_t>(cell)] &&
          touched_[static_cast<std::size_t>(cell)] > need_[static_cast<std::size_t>(cell)])
        return true;
    return false;
  }

  void move(int u, int d) {
    if (!has_edge(u, d)) return;
    const Spot e = edge_toward(u, d);
    if ((e.kind == Spot::h_edge ? used_h_ : used_v_).test(e.index)) return;
    if (cfg_.prune_gaps && (e.kind == Spot::h_edge ? gap_h_ : gap_v_).test(e.index)) return;
    expand();
    const int t = u + dx[d] + dy[d] * nw_;
    const bool ends_here = e == end_;
    if (!ends_here && (visited_.test(t) || (cfg_.prune_gaps && gap_nodes_.test(t)))) return;
    use_edge(e, +1);
    path_.push_back(lattice_of(e));
    if (ends_here) {
      finish();
    } else if (!(cfg_.prune_regions && overflow(e))) {
      expand();
      enter_node(t, lattice_of(e));
    }
    path_.pop_back();
    use_edge(e, -1);
  }

  void enter_node(int v, int via) {
    visited_.set(v);
    path_.push_back(lattice_of({Spot::node, v}));
    if (end_.kind == Spot::node && v == end_.index) {
      finish();
    } else {
      const bool pushed = repartition(v, via);
      if (regions_open_ok() && viable(v))
        for (int d = 0; d < 4 && !done(); ++d) move(v, d);
      if (pushed) partitions_.pop_back();
    }
    path_.pop_back();
    visited_.reset(v);
  }

  // ---- regions ----

  B region_links_h() const { return cell_pairs_h_ & ~used_v_.shr(1); }
  B region_links_v() const { return cell_pairs_v_ & ~used_h_.shr(nw_); }

  std::vector<B> partition_cells() const {
    const B lh = region_links_h(), lv = region_links_v();
    std::vector<B> out;
    B rest = cells_;
    while (rest.any()) {
      B r;
      r.set(rest.lowest());
      for (;;) {
        const B next = r | (r & lh).shl(1) | (r.shr(1) & lh) | (r & lv).shl(nw_) | (r.shr(nw_) & lv);
        if (next == r) break;
        r = next;
      }
      out.push_back(r);
      rest = rest & ~r;
    }
    return out;
  }

  // The path can only cut a region off when it reaches the border through an
  // interior edge, so the partition is recomputed there and reused elsewhere.
  bool repartition(int v, int via) {
    if (!cfg_.prune_regions || !region_rules_) return false;
    if (!partitions_.empty()) {
      if (via < 0 || !node_on_border(v)) return false;
      const auto q = p_.pos(via);
      if (p_.on_perimeter(q)) return false;
    }
    Partition part;
    part.regions = partition_cells();
    part.satisfied.assign(part.regions.size(), 0);
    for (const auto& r : part.regions) part.open_ok = part.open_ok && open_region_ok(r);
    partitions_.push_back(std::move(part));
    return true;
  }

  bool regions_open_ok() const { return partitions_.empty() || partitions_.back().open_ok; }

  // Conditions that no further cut inside the region can repair.
  bool open_region_ok(const B& region) const {
    for (std::size_t c = 0; c < kAllColors.size(); ++c)
      if ((region & stars_[c]).any() && (region & colored_[c]).count() < 2) return false;
    // Without ylops every piece of the region that holds polys is exactly
    // covered by them.
    if ((region & ylops_).any()) return true;
    int area = 0;
    region.each([&](int cell) { area += poly_area_[static_cast<std::size_t>(cell)]; });
    return area <= region.count();
  }

  bool satisfied(const B& region) {
    const auto [it, fresh] = memo_.try_emplace(region, false);
    if (fresh) {
      std::vector<LatticePos> cells;
      region.each([&](int cell) { cells.push_back({2 * (cell % nw_) + 1, 2 * (cell / nw_) + 1}); });
      it->second = region_satisfied(p_, cells);
    }
    return it->second;
  }

  // ---- reachability ----

  B flood(int head) const {
    const B free = pass_nodes_ & ~visited_;
    const B ph = pass_h_ & ~used_h_, pv = pass_v_ & ~used_v_;
    B r;
    r.set(head);
    B reach = ((r & ph).shl(1) | (r.shr(1) & ph) | (r & pv).shl(nw_) | (r.shr(nw_) & pv)) & free;
    for (;;) {
      const B next =
          (reach | (reach & ph).shl(1) | (reach.shr(1) & ph) | (reach & pv).shl(nw_) | (reach.shr(nw_) & pv)) & free;
      if (next == reach) return reach;
      reach = next;
    }
  }

  bool viable(int head) {
    if (!cfg_.prune_dots && !cfg_.prune_regions) return true;
    const B reach = flood(head);
    B near = reach;
    near.set(head);
    const B ph = pass_h_ & ~used_h_, pv = pass_v_ & ~used_v_;
    // Edges the rest of the path could still draw.
    const B open_h = ph & (near | near.shr(1));
    const B open_v = pv & (near | near.shr(nw_));

    if (cfg_.prune_dots) {
      if (end_.kind == Spot::node ? !reach.test(end_.index)
                                  : !(end_.kind == Spot::h_edge ? open_h : open_v).test(end_.index))
        return false;
      if ((dot_nodes_ & ~visited_ & ~reach).any()) return false;
      // An undrawn dot edge needs both of its nodes.
      if ((dot_h_ & ~used_h_ & ~(ph & near & near.shr(1))).any()) return false;
      if ((dot_v_ & ~used_v_ & ~(pv & near & near.shr(nw_))).any()) return false;
      // A dot node still ahead is passed through, so it needs two usable edges.
      B a = ph & near & near.shr(1), c = pv & near & near.shr(nw_);
      if (end_.kind == Spot::h_edge) a.set(end_.index);  // entered from either side
      if (end_.kind == Spot::v_edge) c.set(end_.index);
      const B b = a.shl(1), d = c.shl(nw_);
      const B two = (a & b) | (a & c) | (a & d) | (b & c) | (b & d) | (c & d);
      B must = dot_nodes_ | (dot_h_ & ~used_h_) | (dot_h_ & ~used_h_).shl(1) | (dot_v_ & ~used_v_) |
               (dot_v_ & ~used_v_).shl(nw_);
      must = must & reach;
      if (end_.kind == Spot::node) must.reset(end_.index);
      if ((must & ~two).any()) return false;
    }
    if (!cfg_.prune_regions) return true;

    for (int cell : triangles_) {
      const int have = touched_[static_cast<std::size_t>(cell)];
      const int need = need_[static_cast<std::size_t>(cell)];
      const int open = open_h.test(cell) + open_h.test(cell + nw_) + open_v.test(cell) + open_v.test(cell + 1);
      if (have > need || have + open < need) return false;
    }

    if (!region_rules_) return true;
    // A region is sealed when none of its internal edges can still be drawn.
    const B cut_h = cell_pairs_h_ & open_v.shr(1);
    const B cut_v = cell_pairs_v_ & open_h.shr(nw_);
    auto& part = partitions_.back();
    for (std::size_t i = 0; i < part.regions.size(); ++i) {
      if (part.satisfied[i]) continue;
      const B& r = part.regions[i];
      if ((r & r.shr(1) & cut_h).any() || (r & r.shr(nw_) & cut_v).any()) continue;
      if (!satisfied(r)) return false;
      part.satisfied[i] = 1;
    }
    return fixed_groups_ok(part, open_h, open_v);
  }

  // Cells joined by an edge that can no longer be drawn end up in the same
  // region; such a group already rules out mixed stones, a star with more
  // than one partner, or polys in a group larger than the polys can cover.
  bool fixed_groups_ok(const Partition& part, const B& open_h, const B& open_v) const {
    const B lh = cell_pairs_h_ & ~(used_v_ | open_v).shr(1);
    const B lv = cell_pairs_v_ & ~(used_h_ | open_h).shr(nw_);
    B rest = lh | lh.shl(1) | lv | lv.shl(nw_);
    while (rest.any()) {
      B g;
      g.set(rest.lowest());
      for (;;) {
        const B next = g | (g & lh).shl(1) | (g.shr(1) & lh) | (g & lv).shl(nw_) | (g.shr(nw_) & lv);
        if (next == g) break;
        g = next;
      }
      rest = rest & ~g;
      int stone_colors = 0;
      for (std::size_t c = 0; c < kAllColors.size(); ++c) {
        stone_colors += (g & stones_[c]).any();
        if ((g & stars_[c]).any() && (g & colored_[c]).count() > 2) return false;
      }
      if (stone_colors > 1) return false;
      if (!(g & polys_).any()) continue;
      for (const auto& r : part.regions) {
        if (!(r & g).any()) continue;
        if ((r & ylops_).any()) break;
        int area = 0;
        (r & polys_).each([&](int cell) { area += poly_area_[static_cast<std::size_t>(cell)]; });
        if (g.count() > area) return false;
        break;
      }
    }
    return true;
  }

  // ---- completion ----

  void finish() {
    if (!complete()) return;
    ++count;
    if (!cfg_.keep_paths) return;
    Path path;
    path.reserve(path_.size());
    for (int i : path_) path.push_back(p_.pos(i));
    solutions.push_back(std::move(path));
  }

  // Every rule, on the finished path.
  bool complete() {
    if ((dot_nodes_ & ~visited_).any() || (dot_h_ & ~used_h_).any() || (dot_v_ & ~used_v_).any()) return false;
    if ((gap_nodes_ & visited_).any() || (gap_h_ & used_h_).any() || (gap_v_ & used_v_).any()) return false;
    for (int cell : triangles_)
      if (touched_[static_cast<std::size_t>(cell)] != need_[static_cast<std::size_t>(cell)]) return false;
    if (!region_rules_) return true;
    for (const auto& r : partition_cells())
      if (!satisfied(r)) return false;
    return true;
  }

  const Puzzle& p_;
  const SolveConfig& cfg_;
  std::atomic<std::uint64_t>& expansions_;
  int w_, h_, nw_;
  std::size_t limit_ = 0;
  Spot start_, end_;
  B all_nodes_, h_edges_, v_edges_, cells_, cell_pairs_h_, cell_pairs_v_;
  B pass_nodes_, pass_h_, pass_v_;
  B gap_nodes_, gap_h_, gap_v_, dot_nodes_, dot_h_, dot_v_;
  std::array<B, kAllColors.size()> colored_{}, stars_{}, stones_{};
  B polys_, ylops_;
  std::vector<int> poly_area_;
  std::vector<int> need_;
  std::vector<int> touched_;
  std::vector<int> triangles_;
  bool region_rules_ = false;
  B visited_, used_h_, used_v_;
  std::vector<int> path_;
  std::vector<Partition> partitions_;
  std::map<B, bool> memo_;
};

// A star needs a same-colored partner somewhere in the puzzle.
inline bool lone_star(const Puzzle& p) {
  std::array<int, kAllColors.size()> colored{}, stars{};
  for (const auto& t : p.lattice()) {
    if (!t.color) continue;
    ++colored[static_cast<std::size_t>(*t.color)];
    if (t.kind == TokenKind::star) ++stars[static_cast<std::size_t>(*t.color)];
  }
  for (std::size_t c = 0; c < colored.size(); ++c)
    if (stars[c] > 0 && colored[c] < 2) return true;
  return false;
}

template <int K>
SolveResult solve_with(const Puzzle& p, const SolveConfig& cfg) {
  SolveResult result;
  std::atomic<std::uint64_t> expansions{0};
  const std::size_t limit = cfg.max_solutions == kUnlimited ? kUnlimited : cfg.max_solutions + 1;
  if (cfg.prune_regions && lone_star(p)) return result;

  std::vector<NodeSearch<K>> parts;
  if (cfg.jobs <= 1) {
    NodeSearch<K> s(p, cfg, expansions);
    s.run();
    parts.push_back(std::move(s));
  } else {
    // Each root branch runs independently; merging in branch order
    // reproduces the sequential enumeration order.
    const auto moves = NodeSearch<K>(p, cfg, expansions).root_moves();
    std::vector<std::future<NodeSearch<K>>> futures;
    for (int m : moves) {
      futures.push_back(std::async(std::launch::async, [&p, &cfg, &expansions, m] {
        NodeSearch<K> s(p, cfg, expansions);
        s.run(m);
        return s;
      }));
    }
    for (auto& f : futures) parts.push_back(f.get());
  }

  std::size_t total = 0;
  for (auto& part : parts) {
    result.nodes_expanded += part.local_expansions;
    for (auto& path : part.solutions) {
      if (result.solutions.size() >= cfg.max_solutions) break;
      result.solutions.push_back(std::move(path));
    }
    total += part.count;
    if (total >= limit) break;
  }
  result.capped = cfg.max_solutions != kUnlimited && total > cfg.max_solutions;
  result.count = std::min(total, cfg.max_solutions);
  return result;
}

}  // namespace detail

// Throws BudgetExceeded when cfg.budget expansions are used up.
inline SolveResult solve(const Puzzle& p, const SolveConfig& cfg = {}) {
  const int bits = (p.width() + 1) * (p.height() + 1);
  if (bits <= 64) return detail::solve_with<1>(p, cfg);
  if (bits <= 128) return detail::solve_with<2>(p, cfg);
  if (bits <= 256) return detail::solve_with<4>(p, cfg);
  if (bits <= 1024) return detail::solve_with<16>(p, cfg);
  if (bits <= 4096) return detail::solve_with<64>(p, cfg);
  throw Error("grid too large to solve");
}

struct SolutionCount {
  std::size_t count = 0;
  bool capped = false;
};

inline SolutionCount count_solutions(const Puzzle& p, std::size_t limit, SolveConfig cfg = {}) {
  cfg.max_solutions = limit;
  cfg.keep_paths = false;
  const auto r = solve(p, cfg);
  return {r.count, r.capped};
}

}  // namespace sparc
