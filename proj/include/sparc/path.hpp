#pragma once

// Structural path checks and the region partition a path induces.

#include <algorithm>
#include <cstdlib>
#include <string>
#include <vector>

#include "sparc/model.hpp"

namespace sparc {

using Path = std::vector<LatticePos>;

inline std::string format_path(const Path& path) {
  std::string out;
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (i) out += ',';
    out += format_pos(path[i]);
  }
  return out;
}

struct StructuralVerdict {
  bool incorrect_start_end = false;
  bool disconnected_line = false;
  bool intersecting_line = false;
  bool rule_cell_crossing = false;  // includes points outside the lattice
  bool invalid_path = false;        // OR of the four flags

  friend bool operator==(const StructuralVerdict&, const StructuralVerdict&) = default;
};

// Total: classifies arbitrary input. All four flags are computed
// independently.
inline StructuralVerdict validate_structure(const Puzzle& p, const Path& path) {
  StructuralVerdict v;
  if (path.empty()) {
    v.incorrect_start_end = true;
  } else {
    v.incorrect_start_end = path.front() != p.start() || path.back() != p.end();
  }
  std::vector<char> seen(static_cast<std::size_t>(p.lattice_width() * p.lattice_height()), 0);
  std::vector<LatticePos> outside;
  for (std::size_t i = 0; i < path.size(); ++i) {
    const auto q = path[i];
    if (i > 0) {
      const auto prev = path[i - 1];
      const long dist = std::labs(static_cast<long>(q.x) - prev.x) + std::labs(static_cast<long>(q.y) - prev.y);
      if (dist != 1) v.disconnected_line = true;
    }
    if (!p.in_bounds(q)) {
      v.rule_cell_crossing = true;
      if (std::find(outside.begin(), outside.end(), q) != outside.end())
        v.intersecting_line = true;
      else
        outside.push_back(q);
      continue;
    }
    if (is_rule_cell(q)) v.rule_cell_crossing = true;
    auto& s = seen[static_cast<std::size_t>(p.index(q))];
    if (s) v.intersecting_line = true;
    s = 1;
  }
  v.invalid_path = v.incorrect_start_end || v.disconnected_line || v.intersecting_line || v.rule_cell_crossing;
  return v;
}

// Regions of rule cells, each sorted row-major; regions ordered by their
// smallest member.
struct RegionPartition {
  std::vector<std::vector<LatticePos>> regions;
  // Region index per rule cell, indexed [cy * width + cx] in cell coordinates.
  std::vector<int> region_of;

  int region_at(const Puzzle& p, LatticePos rule_cell) const {
    return region_of[static_cast<std::size_t>((rule_cell.y / 2) * p.width() + rule_cell.x / 2)];
  }
};

// occupied is indexed by Puzzle::index and marks lattice cells that cut.
inline RegionPartition regions_from_occupancy(const Puzzle& p, const std::vector<char>& occupied) {
  const int w = p.width();
  const int h = p.height();
  RegionPartition out;
  out.region_of.assign(static_cast<std::size_t>(w * h), -1);
  std::vector<int> stack;
  // Row-major seeding makes regions come out ordered by smallest member.
  for (int seed = 0; seed < w * h; ++seed) {
    if (out.region_of[static_cast<std::size_t>(seed)] != -1) continue;
    const int rid = static_cast<int>(out.regions.size());
    out.regions.emplace_back();
    out.region_of[static_cast<std::size_t>(seed)] = rid;
    stack.push_back(seed);
    while (!stack.empty()) {
      const int c = stack.back();
      stack.pop_back();
      const int cx = c % w, cy = c / w;
      out.regions.back().push_back({2 * cx + 1, 2 * cy + 1});
      constexpr int dx[] = {1, 0, -1, 0};
      constexpr int dy[] = {0, 1, 0, -1};
      for (int d = 0; d < 4; ++d) {
        const int nx = cx + dx[d], ny = cy + dy[d];
        if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
        const int n = ny * w + nx;
        if (out.region_of[static_cast<std::size_t>(n)] != -1) continue;
        const LatticePos between{2 * cx + 1 + dx[d], 2 * cy + 1 + dy[d]};
        if (occupied[static_cast<std::size_t>(p.index(between))]) continue;
        out.region_of[static_cast<std::size_t>(n)] = rid;
        stack.push_back(n);
      }
    }
    std::sort(out.regions.back().begin(), out.regions.back().end());
  }
  return out;
}

inline std::vector<char> occupancy(const Puzzle& p, const Path& path) {
  std::vector<char> occ(static_cast<std::size_t>(p.lattice_width() * p.lattice_height()), 0);
  for (const auto q : path)
    if (p.in_bounds(q)) occ[static_cast<std::size_t>(p.index(q))] = 1;
  return occ;
}

inline RegionPartition decompose_regions(const Puzzle& p, const Path& path) {
  if (validate_structure(p, path).invalid_path) throw StructurallyInvalidPath();
  return regions_from_occupancy(p, occupancy(p, path));
}

}  // namespace sparc
