#pragma once

// Independent brute-force reference implementations. Nothing here calls the
// search or region code under test.

#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <vector>

#include "sparc/model.hpp"
#include "sparc/path.hpp"

namespace sparc::oracle {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(static_cast<std::size_t>(n)) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int a) {
    while (parent[static_cast<std::size_t>(a)] != a) a = parent[static_cast<std::size_t>(a)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(a)])];
    return a;
  }
  void unite(int a, int b) { parent[static_cast<std::size_t>(find(a))] = find(b); }
};

// Regions as sets of rule-cell lattice positions, sorted by smallest member.
inline std::vector<std::set<LatticePos>> regions(const Puzzle& p, const Path& path) {
  std::set<LatticePos> on(path.begin(), path.end());
  const int w = p.width(), h = p.height();
  UnionFind uf(w * h);
  for (int cy = 0; cy < h; ++cy)
    for (int cx = 0; cx < w; ++cx) {
      if (cx + 1 < w && !on.count({2 * cx + 2, 2 * cy + 1})) uf.unite(cy * w + cx, cy * w + cx + 1);
      if (cy + 1 < h && !on.count({2 * cx + 1, 2 * cy + 2})) uf.unite(cy * w + cx, (cy + 1) * w + cx);
    }
  std::map<int, std::set<LatticePos>> by_root;
  for (int c = 0; c < w * h; ++c) by_root[uf.find(c)].insert({2 * (c % w) + 1, 2 * (c / w) + 1});
  std::vector<std::set<LatticePos>> out;
  for (auto& [root, cells] : by_root) out.push_back(cells);
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return *a.begin() < *b.begin(); });
  return out;
}

// Every translation of every shape, tried as a full cartesian product.
inline bool polys_ok(const Puzzle& p, const std::set<LatticePos>& region) {
  std::vector<std::pair<ShapeId, int>> shapes;  // id, sign
  for (auto q : region) {
    const auto& t = p.at(q);
    if (t.kind == TokenKind::poly) shapes.push_back({t.shape, +1});
    if (t.kind == TokenKind::ylop) shapes.push_back({t.shape, -1});
  }
  if (shapes.empty()) return true;
  bool any_pos = false;
  for (auto& s : shapes) any_pos |= s.second > 0;
  if (!any_pos) return false;
  const int w = p.width(), h = p.height();
  std::vector<int> want(static_cast<std::size_t>(w * h), 0);
  int net = 0;
  for (auto& [id, sign] : shapes) net += sign * std::popcount(static_cast<unsigned>(id.value));
  if (net == static_cast<int>(region.size())) {
    for (auto q : region) want[static_cast<std::size_t>(((q.y - 1) / 2) * w + (q.x - 1) / 2)] = 1;
  } else if (net != 0) {
    return false;
  }
  std::vector<int> cov(static_cast<std::size_t>(w * h), 0);
  std::function<bool(std::size_t)> rec = [&](std::size_t i) -> bool {
    if (i == shapes.size()) return cov == want;
    const auto [id, sign] = shapes[i];
    // Offsets of the raw 4x4 window; cells must land inside the grid.
    for (int oy = -3; oy < h; ++oy)
      for (int ox = -3; ox < w; ++ox) {
        bool inside = true;
        for (int col = 0; col < 4 && inside; ++col)
          for (int row = 0; row < 4; ++row)
            if ((id.value >> (4 * col + row)) & 1u) {
              const int x = ox + col, y = oy + row;
              if (x < 0 || y < 0 || x >= w || y >= h) {
                inside = false;
                break;
              }
            }
        if (!inside) continue;
        for (int col = 0; col < 4; ++col)
          for (int row = 0; row < 4; ++row)
            if ((id.value >> (4 * col + row)) & 1u) cov[static_cast<std::size_t>((oy + row) * w + ox + col)] += sign;
        const bool ok = rec(i + 1);
        for (int col = 0; col < 4; ++col)
          for (int row = 0; row < 4; ++row)
            if ((id.value >> (4 * col + row)) & 1u) cov[static_cast<std::size_t>((oy + row) * w + ox + col)] -= sign;
        if (ok) return true;
      }
    return false;
  };
  return rec(0);
}

// Direct reading of every rule; assumes nothing about the library's checker.
inline bool solved(const Puzzle& p, const Path& path) {
  if (path.empty() || path.front() != p.start() || path.back() != p.end()) return false;
  std::set<LatticePos> on;
  for (std::size_t i = 0; i < path.size(); ++i) {
    const auto q = path[i];
    if (!p.in_bounds(q) || (q.x % 2 == 1 && q.y % 2 == 1)) return false;
    if (!on.insert(q).second) return false;
    if (i && std::abs(q.x - path[i - 1].x) + std::abs(q.y - path[i - 1].y) != 1) return false;
    if (p.at(q).kind == TokenKind::gap) return false;
  }
  for (int y = 0; y < p.lattice_height(); ++y)
    for (int x = 0; x < p.lattice_width(); ++x) {
      const auto& t = p.at({x, y});
      if (t.kind == TokenKind::dot && !on.count({x, y})) return false;
      if (t.kind == TokenKind::triangle) {
        const int n = static_cast<int>(on.count({x - 1, y}) + on.count({x + 1, y}) + on.count({x, y - 1}) +
                                       on.count({x, y + 1}));
        if (n != t.count) return false;
      }
    }
  for (const auto& region : regions(p, path)) {
    std::set<Color> stone_colors;
    std::map<Color, int> colored;
    for (auto q : region) {
      const auto& t = p.at(q);
      if (t.kind == TokenKind::stone) stone_colors.insert(*t.color);
      if (t.color) ++colored[*t.color];
    }
    if (stone_colors.size() > 1) return false;
    for (auto q : region) {
      const auto& t = p.at(q);
      if (t.kind == TokenKind::star && colored[*t.color] != 2) return false;
    }
    if (!polys_ok(p, region)) return false;
  }
  return true;
}

// Every self-avoiding walk over drawable cells from S that ends at E.
inline std::set<Path> all_walks(const Puzzle& p) {
  std::set<Path> out;
  Path cur{p.start()};
  std::set<LatticePos> used{p.start()};
  std::function<void()> rec = [&] {
    const auto head = cur.back();
    if (head == p.end()) {
      out.insert(cur);
      return;
    }
    const LatticePos nbrs[] = {{head.x + 1, head.y}, {head.x - 1, head.y}, {head.x, head.y + 1}, {head.x, head.y - 1}};
    for (auto n : nbrs) {
      if (!p.in_bounds(n) || (n.x % 2 == 1 && n.y % 2 == 1) || used.count(n)) continue;
      used.insert(n);
      cur.push_back(n);
      rec();
      cur.pop_back();
      used.erase(n);
    }
  };
  rec();
  return out;
}

inline std::set<Path> all_solutions(const Puzzle& p) {
  std::set<Path> out;
  for (const auto& w : all_walks(p))
    if (solved(p, w)) out.insert(w);
  return out;
}

}  // namespace sparc::oracle
