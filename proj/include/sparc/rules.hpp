#pragma once

// Rule semantics: dots, gaps, stones, stars, triangles, polys and ylops.

#include <algorithm>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "sparc/model.hpp"
#include "sparc/path.hpp"

namespace sparc {

struct RuleFailure {
  LatticePos position;
  RuleKind rule = RuleKind::dot;
  std::string detail;

  friend bool operator==(const RuleFailure&, const RuleFailure&) = default;
};

struct SolutionVerdict {
  StructuralVerdict structural;
  std::vector<RuleFailure> failures;
  bool solved = false;
};

// ---------------------------------------------------------------------------
// Poly/ylop placement search.
//
// Shapes are translated (never rotated or mirrored) within a width x height
// cell grid. Satisfied when some placement makes
//   (#positives covering c) - (#negatives covering c)
// equal 1 on every region cell and 0 elsewhere, or 0 everywhere when the
// areas cancel.

namespace detail {

struct NormalizedShape {
  std::vector<ShapeCell> cells;  // row-major, min row/col are 0
  int span_cols = 0;
  int span_rows = 0;
};

inline NormalizedShape normalize(ShapeId id) {
  auto cells = decode_shape(id);
  int min_c = kShapeWindow, min_r = kShapeWindow, max_c = 0, max_r = 0;
  for (const auto& c : cells) {
    min_c = std::min(min_c, c.col);
    min_r = std::min(min_r, c.row);
    max_c = std::max(max_c, c.col);
    max_r = std::max(max_r, c.row);
  }
  for (auto& c : cells) {
    c.col -= min_c;
    c.row -= min_r;
  }
  std::sort(cells.begin(), cells.end());
  return {std::move(cells), max_c - min_c + 1, max_r - min_r + 1};
}

class PolySearch {
 public:
  PolySearch(int width, int height, std::vector<int> target, std::span<const ShapeId> positives,
             std::span<const ShapeId> negatives)
      : w_(width), h_(height), demand_(std::move(target)) {
    for (const auto id : positives) add(pos_, id);
    for (const auto id : negatives) {
      neg_list_.push_back(normalize(id));
      neg_ids_.push_back(id);
    }
    // Identical negatives are placed in non-decreasing placement order.
    std::vector<std::size_t> order(neg_ids_.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      const int aa = static_cast<int>(neg_list_[a].cells.size());
      const int ab = static_cast<int>(neg_list_[b].cells.size());
      if (aa != ab) return aa > ab;
      return neg_ids_[a] < neg_ids_[b];
    });
    std::vector<NormalizedShape> sorted;
    std::vector<ShapeId> sorted_ids;
    for (auto i : order) {
      sorted.push_back(neg_list_[i]);
      sorted_ids.push_back(neg_ids_[i]);
    }
    neg_list_ = std::move(sorted);
    neg_ids_ = std::move(sorted_ids);
  }

  bool run() { return place_negative(0, 0); }

 private:
  struct Group {
    ShapeId id;
    NormalizedShape shape;
    int remaining = 0;
  };

  static void add(std::vector<Group>& groups, ShapeId id) {
    for (auto& g : groups)
      if (g.id == id) {
        ++g.remaining;
        return;
      }
    groups.push_back({id, normalize(id), 1});
    std::stable_sort(groups.begin(), groups.end(), [](const Group& a, const Group& b) {
      if (a.shape.cells.size() != b.shape.cells.size()) return a.shape.cells.size() > b.shape.cells.size();
      return a.id < b.id;
    });
  }

  bool place_negative(std::size_t i, int min_placement) {
    if (i == neg_list_.size()) return tile_positives();
    const auto& s = neg_list_[i];
    const int cols = w_ - s.span_cols + 1;
    const int rows = h_ - s.span_rows + 1;
    if (cols <= 0 || rows <= 0) return false;
    const bool same_as_next = i + 1 < neg_list_.size() && neg_ids_[i + 1] == neg_ids_[i];
    for (int k = min_placement; k < cols * rows; ++k) {
      const int ox = k % cols, oy = k / cols;
      for (const auto& c : s.cells) ++demand_[static_cast<std::size_t>((oy + c.row) * w_ + ox + c.col)];
      const bool ok = place_negative(i + 1, same_as_next ? k : 0);
      for (const auto& c : s.cells) --demand_[static_cast<std::size_t>((oy + c.row) * w_ + ox + c.col)];
      if (ok) return true;
    }
    return false;
  }

  // The first cell (row-major) with outstanding demand must be covered by a
  // shape whose own first cell lands on it: every earlier cell is already
  // exhausted and coverage only adds.
  bool tile_positives() {
    std::size_t first = 0;
    while (first < demand_.size() && demand_[first] == 0) ++first;
    const bool any_left = std::any_of(pos_.begin(), pos_.end(), [](const Group& g) { return g.remaining > 0; });
    if (first == demand_.size()) return !any_left;
    if (!any_left) return false;
    const int fx = static_cast<int>(first) % w_, fy = static_cast<int>(first) / w_;
    for (auto& g : pos_) {
      if (g.remaining == 0) continue;
      const auto& anchor = g.shape.cells.front();
      const int ox = fx - anchor.col, oy = fy - anchor.row;
      if (ox < 0 || oy < 0 || ox + g.shape.span_cols > w_ || oy + g.shape.span_rows > h_) continue;
      bool fits = true;
      for (const auto& c : g.shape.cells) {
        if (demand_[static_cast<std::size_t>((oy + c.row) * w_ + ox + c.col)] <= 0) {
          fits = false;
          break;
        }
      }
      if (!fits) continue;
      for (const auto& c : g.shape.cells) --demand_[static_cast<std::size_t>((oy + c.row) * w_ + ox + c.col)];
      --g.remaining;
      const bool ok = tile_positives();
      ++g.remaining;
      for (const auto& c : g.shape.cells) ++demand_[static_cast<std::size_t>((oy + c.row) * w_ + ox + c.col)];
      if (ok) return true;
    }
    return false;
  }

  int w_, h_;
  std::vector<int> demand_;
  std::vector<Group> pos_;
  std::vector<NormalizedShape> neg_list_;
  std::vector<ShapeId> neg_ids_;
};

}  // namespace detail

enum class PolyOutcome { ok, ylop_without_poly, area_mismatch, no_placement };

// region_cells are (col,row) cell coordinates inside a width x height grid.
inline PolyOutcome poly_region_satisfiable(int width, int height, std::span<const ShapeCell> region_cells,
                                           std::span<const ShapeId> positives,
                                           std::span<const ShapeId> negatives) {
  if (positives.empty() && negatives.empty()) return PolyOutcome::ok;
  if (positives.empty()) return PolyOutcome::ylop_without_poly;
  int net = 0;
  for (auto id : positives) net += shape_area(id);
  for (auto id : negatives) net -= shape_area(id);
  const int region_size = static_cast<int>(region_cells.size());
  std::vector<int> target(static_cast<std::size_t>(width * height), 0);
  if (net == region_size) {
    for (const auto& c : region_cells) target[static_cast<std::size_t>(c.row * width + c.col)] = 1;
  } else if (net != 0) {
    return PolyOutcome::area_mismatch;
  }
  detail::PolySearch search(width, height, std::move(target), positives, negatives);
  return search.run() ? PolyOutcome::ok : PolyOutcome::no_placement;
}

// ---------------------------------------------------------------------------
// Individual rule checks. Failures come out row-major within each check.

inline std::vector<RuleFailure> check_dots(const Puzzle& p, const Path& path) {
  const auto occ = occupancy(p, path);
  std::vector<RuleFailure> out;
  for (int i = 0; i < static_cast<int>(p.lattice().size()); ++i)
    if (p.lattice()[static_cast<std::size_t>(i)].kind == TokenKind::dot && !occ[static_cast<std::size_t>(i)])
      out.push_back({p.pos(i), RuleKind::dot, "dot not visited"});
  return out;
}

inline std::vector<RuleFailure> check_gaps(const Puzzle& p, const Path& path) {
  std::vector<LatticePos> hits;
  for (const auto q : path)
    if (p.in_bounds(q) && p.at(q).kind == TokenKind::gap) hits.push_back(q);
  std::sort(hits.begin(), hits.end());
  hits.erase(std::unique(hits.begin(), hits.end()), hits.end());
  std::vector<RuleFailure> out;
  for (const auto q : hits) out.push_back({q, RuleKind::gap, "path crosses gap"});
  return out;
}

inline std::vector<RuleFailure> check_triangles(const Puzzle& p, const Path& path) {
  const auto occ = occupancy(p, path);
  std::vector<RuleFailure> out;
  for (int y = 1; y < p.lattice_height(); y += 2) {
    for (int x = 1; x < p.lattice_width(); x += 2) {
      const Token& t = p.at({x, y});
      if (t.kind != TokenKind::triangle) continue;
      const int touched = occ[static_cast<std::size_t>(p.index({x + 1, y}))] +
                          occ[static_cast<std::size_t>(p.index({x - 1, y}))] +
                          occ[static_cast<std::size_t>(p.index({x, y + 1}))] +
                          occ[static_cast<std::size_t>(p.index({x, y - 1}))];
      if (touched != t.count)
        out.push_back({{x, y},
                       RuleKind::triangle,
                       "touches " + std::to_string(touched) + " edges, needs " + std::to_string(t.count)});
    }
  }
  return out;
}

// Region-scoped checks; region is a row-major list of rule cells.

inline void check_region_stones(const Puzzle& p, std::span<const LatticePos> region, std::vector<RuleFailure>& out) {
  std::optional<Color> first;
  for (const auto q : region) {
    const Token& t = p.at(q);
    if (t.kind != TokenKind::stone) continue;
    if (!first) {
      first = t.color;
    } else if (*t.color != *first) {
      // Representative: first stone whose color differs from the region's first stone.
      out.push_back({q, RuleKind::stone, "stones of different colors share a region"});
      return;
    }
  }
}

inline void check_region_stars(const Puzzle& p, std::span<const LatticePos> region, std::vector<RuleFailure>& out) {
  std::array<int, kAllColors.size()> per_color{};
  for (const auto q : region) {
    const Token& t = p.at(q);
    if (is_colored_kind(t.kind)) ++per_color[static_cast<std::size_t>(*t.color)];
  }
  for (const auto q : region) {
    const Token& t = p.at(q);
    if (t.kind != TokenKind::star) continue;
    const int same = per_color[static_cast<std::size_t>(*t.color)];
    if (same != 2)
      out.push_back({q, RuleKind::star, std::to_string(same) + " same-colored symbols in region, needs 2"});
  }
}

inline void check_region_polys(const Puzzle& p, std::span<const LatticePos> region, std::vector<RuleFailure>& out) {
  std::vector<ShapeId> positives, negatives;
  std::optional<LatticePos> rep;
  std::vector<ShapeCell> cells;
  cells.reserve(region.size());
  for (const auto q : region) {
    cells.push_back({(q.x - 1) / 2, (q.y - 1) / 2});
    const Token& t = p.at(q);
    if (t.kind == TokenKind::poly || t.kind == TokenKind::ylop) {
      (t.kind == TokenKind::poly ? positives : negatives).push_back(t.shape);
      if (!rep) rep = q;
    }
  }
  if (!rep) return;
  const auto outcome = poly_region_satisfiable(p.width(), p.height(), cells, positives, negatives);
  const RuleKind kind = positives.empty() ? RuleKind::ylop : RuleKind::poly;
  switch (outcome) {
    case PolyOutcome::ok: return;
    case PolyOutcome::ylop_without_poly:
      out.push_back({*rep, kind, "ylop without a poly in its region"});
      return;
    case PolyOutcome::area_mismatch:
      out.push_back({*rep, kind, "shape area does not match region"});
      return;
    case PolyOutcome::no_placement:
      out.push_back({*rep, kind, "no placement fits the region"});
      return;
  }
}

inline std::vector<RuleFailure> check_stones(const Puzzle& p, const RegionPartition& regions) {
  std::vector<RuleFailure> out;
  for (const auto& r : regions.regions) check_region_stones(p, r, out);
  return out;
}

inline std::vector<RuleFailure> check_stars(const Puzzle& p, const RegionPartition& regions) {
  std::vector<RuleFailure> out;
  for (const auto& r : regions.regions) check_region_stars(p, r, out);
  return out;
}

inline std::vector<RuleFailure> check_polys(const Puzzle& p, const RegionPartition& regions) {
  std::vector<RuleFailure> out;
  for (const auto& r : regions.regions) check_region_polys(p, r, out);
  return out;
}

// True when every region-scoped rule holds inside this one region.
inline bool region_satisfied(const Puzzle& p, std::span<const LatticePos> region) {
  std::vector<RuleFailure> f;
  check_region_stones(p, region, f);
  if (!f.empty()) return false;
  check_region_stars(p, region, f);
  if (!f.empty()) return false;
  check_region_polys(p, region, f);
  return f.empty();
}

inline SolutionVerdict check_solution(const Puzzle& p, const Path& path) {
  SolutionVerdict v;
  v.structural = validate_structure(p, path);
  if (v.structural.invalid_path) return v;
  const auto append = [&](std::vector<RuleFailure> f) {
    v.failures.insert(v.failures.end(), std::make_move_iterator(f.begin()), std::make_move_iterator(f.end()));
  };
  append(check_dots(p, path));
  append(check_gaps(p, path));
  const auto regions = regions_from_occupancy(p, occupancy(p, path));
  append(check_stones(p, regions));
  append(check_stars(p, regions));
  append(check_triangles(p, path));
  append(check_polys(p, regions));
  v.solved = v.failures.empty();
  return v;
}

}  // namespace sparc
