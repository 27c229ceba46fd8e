#pragma once

// Difficulty score: five component scores, a weighted raw sum, then a
// Z-score pushed through the standard normal CDF and scaled onto [0, 5].

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <vector>

#include "sparc/error.hpp"
#include "sparc/model.hpp"

namespace sparc {

struct DifficultyParams {
  // Component weights.
  double w_mech = 1.2;
  double w_interact = 1.2;
  double w_grid = 2.5;
  double w_density = 1.0;
  double w_count = 1.2;
  // Proportionality constants of each component.
  double c_mech = 1.0;
  double c_interact = 1.0;
  double c_grid = 0.25;
  double c_density = 1.0;
  double c_count = 0.25;
  // Normalization, fitted to data/calibration_corpus.jsonl (default generator, seed 5000).
  double mu = 19.690570944444652;
  double sigma = 6.1992507613657066;
  // Count dots and gaps as rule instances.
  bool count_edge_marks = true;

  // The published normalization (mu = 12.06, sigma = 5.27).
  static DifficultyParams published() {
    DifficultyParams p;
    p.mu = 12.06;
    p.sigma = 5.27;
    return p;
  }
};

struct DifficultyScore {
  // mech, interact, grid, density, count
  std::array<double, 5> components{};
  double raw = 0;
  double score = 0;
  int level = 1;
};

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

inline double score_from_raw(double raw, const DifficultyParams& params) {
  const double z = (raw - params.mu) / params.sigma;
  return std::clamp(normal_cdf(z) * 5.0, 0.0, 5.0);
}

// (k-1, k] maps to level k; 0 maps to level 1.
inline int level_from_score(double score) {
  return std::clamp(static_cast<int>(std::ceil(score)), 1, 5);
}

struct RuleCounts {
  int mechanics = 0;  // distinct rule kinds
  int instances = 0;  // symbols, plus dots and gaps when counted
  int area = 0;
};

inline RuleCounts rule_counts(const Puzzle& p, bool count_edge_marks = true) {
  RuleCounts c;
  RuleSet kinds;
  for (const auto& t : p.lattice()) {
    const auto k = rule_kind_of(t.kind);
    if (!k) continue;
    const bool mark = *k == RuleKind::dot || *k == RuleKind::gap;
    if (mark && !count_edge_marks) continue;
    kinds.insert(*k);
    ++c.instances;
  }
  c.mechanics = kinds.size();
  c.area = p.area();
  return c;
}

inline DifficultyScore score_counts(const RuleCounts& c, const DifficultyParams& params) {
  DifficultyScore s;
  const double density = c.area > 0 ? static_cast<double>(c.instances) / c.area : 0.0;
  s.components[0] = params.c_mech * c.mechanics;
  s.components[1] = c.mechanics > 1 ? params.c_interact * (c.mechanics - 1) * density : 0.0;
  s.components[2] = params.c_grid * c.area;
  s.components[3] = params.c_density * density;
  s.components[4] = params.c_count * c.instances;
  s.raw = params.w_mech * s.components[0] + params.w_interact * s.components[1] + params.w_grid * s.components[2] +
          params.w_density * s.components[3] + params.w_count * s.components[4];
  s.score = score_from_raw(s.raw, params);
  s.level = level_from_score(s.score);
  return s;
}

inline DifficultyScore score_puzzle(const Puzzle& p, const DifficultyParams& params = {}) {
  return score_counts(rule_counts(p, params.count_edge_marks), params);
}

inline DifficultyTag difficulty_tag(const Puzzle& p, const DifficultyParams& params = {}) {
  const auto s = score_puzzle(p, params);
  return {s.raw, s.score, s.level};
}

// Refits mu and sigma (population standard deviation) to the corpus.
inline DifficultyParams calibrate(std::span<const Puzzle> corpus, DifficultyParams params = {}) {
  if (corpus.size() < 100) throw DegenerateCorpus("calibration needs at least 100 puzzles");
  double sum = 0;
  std::vector<double> raws;
  raws.reserve(corpus.size());
  for (const auto& p : corpus) {
    raws.push_back(score_puzzle(p, params).raw);
    sum += raws.back();
  }
  const double mean = sum / static_cast<double>(raws.size());
  double var = 0;
  for (double r : raws) var += (r - mean) * (r - mean);
  var /= static_cast<double>(raws.size());
  const double sd = std::sqrt(var);
  if (!(sd > 1e-12)) throw DegenerateCorpus("raw scores have zero spread");
  params.mu = mean;
  params.sigma = sd;
  return params;
}

}  // namespace sparc
