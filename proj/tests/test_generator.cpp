#include <gtest/gtest.h>

#include <array>

#include "oracle.hpp"
#include "sparc/dataset.hpp"
#include "sparc/generator.hpp"

using namespace sparc;

namespace {

GenConfig small_config(std::uint64_t seed, int size_max = 4) {
  GenConfig cfg;
  cfg.seed = seed;
  cfg.size_max = size_max;
  return cfg;
}

}  // namespace

TEST(Generate, CountsAndSizesWithinBounds) {
  const auto cfg = small_config(11, 6);
  const auto batch = generate_batch(cfg, 0, 12);
  ASSERT_EQ(batch.size(), 12u);
  for (const auto& p : batch) {
    ASSERT_TRUE(p.solution_count);
    EXPECT_GE(*p.solution_count, 1);
    EXPECT_LE(*p.solution_count, 50);
    EXPECT_GE(p.width(), 2);
    EXPECT_LE(p.width(), 6);
    EXPECT_GE(p.height(), 2);
    EXPECT_LE(p.height(), 6);
    EXPECT_TRUE(p.on_perimeter(p.start()));
    EXPECT_TRUE(p.on_perimeter(p.end()));
    const auto r = solve(p, SolveConfig{.max_solutions = 51, .keep_paths = false});
    EXPECT_FALSE(r.capped);
    EXPECT_EQ(static_cast<int>(r.count), *p.solution_count) << p.id();
  }
}

TEST(Generate, SameSeedSameBytes) {
  const auto cfg = small_config(99);
  const auto a = save_dataset(generate_batch(cfg, 0, 6));
  const auto b = save_dataset(generate_batch(cfg, 0, 6));
  EXPECT_EQ(a, b);
  auto threaded = cfg;
  threaded.jobs = 3;
  EXPECT_EQ(save_dataset(generate_batch(threaded, 0, 6)), a);
  EXPECT_NE(save_dataset(generate_batch(small_config(100), 0, 6)), a);
}

TEST(Generate, CountsMatchNaiveEnumeration) {
  const auto batch = generate_batch(small_config(5, 2), 0, 25);
  for (const auto& p : batch) {
    const auto sols = oracle::all_solutions(p);
    EXPECT_EQ(static_cast<int>(sols.size()), *p.solution_count) << serialize_grid(p);
  }
}

TEST(Generate, DensityStaysInRange) {
  auto cfg = small_config(3);
  std::vector<double> seen;
  cfg.on_attempt = [&](int, double d, std::size_t, bool) { seen.push_back(d); };
  generate_one(cfg);
  ASSERT_FALSE(seen.empty());
  EXPECT_DOUBLE_EQ(seen.front(), 0.5);
  for (double d : seen) {
    EXPECT_GT(d, 0.0);
    EXPECT_LE(d, 1.0);
  }
}

TEST(Generate, RejectsBadConfig) {
  GenConfig cfg;
  cfg.size_min = 1;
  EXPECT_THROW(generate_one(cfg), Error);
  cfg = {};
  cfg.size_max = 7;
  EXPECT_THROW(generate_one(cfg), Error);
  cfg = {};
  cfg.initial_rule_density = 0;
  EXPECT_THROW(generate_one(cfg), Error);
  cfg = {};
  cfg.rule_palette = {};
  EXPECT_THROW(generate_one(cfg), Error);
}

TEST(Generate, ExhaustedWhenNothingFits) {
  auto cfg = small_config(1, 2);
  cfg.max_attempts = 1;
  cfg.k_max = 1;
  cfg.rule_palette = {RuleKind::gap};
  cfg.edge_mark_density = 0.01;
  // A 2x2 grid with few gaps has many paths, so k_max = 1 always overflows.
  EXPECT_THROW(generate_one(cfg), Exhausted);
}

TEST(Split, ParsesNamesAndCodes) {
  EXPECT_EQ(parse_split("G"), (RuleSet{RuleKind::gap}));
  EXPECT_EQ(parse_split("gaps"), (RuleSet{RuleKind::gap}));
  EXPECT_EQ(parse_split("St-S"), (RuleSet{RuleKind::stone, RuleKind::star}));
  EXPECT_EQ(parse_split("G-D-T"), (RuleSet{RuleKind::gap, RuleKind::dot, RuleKind::triangle}));
  EXPECT_EQ(parse_split("P-Y"), (RuleSet{RuleKind::poly, RuleKind::ylop}));
  EXPECT_EQ(parse_split("all"), kAllRules);
  EXPECT_THROW(parse_split(""), Error);
  EXPECT_THROW(parse_split("--"), Error);
  EXPECT_THROW(parse_split("Q"), Error);
}

TEST(Split, GapsOnlyIsPure) {
  const auto batch = generate_split(small_config(21, 6), "G", 50);
  ASSERT_EQ(batch.size(), 50u);
  for (const auto& p : batch) {
    EXPECT_EQ(p.rule_kinds(), RuleSet{RuleKind::gap}) << serialize_grid(p);
    EXPECT_EQ(p.split, std::optional<std::string>("G"));
  }
}

TEST(Split, PolyYlopHasBoth) {
  const auto batch = generate_split(small_config(22), "P-Y", 8);
  for (const auto& p : batch) {
    const auto kinds = p.rule_kinds();
    EXPECT_TRUE(kinds.contains(RuleKind::poly));
    EXPECT_TRUE(kinds.contains(RuleKind::ylop));
    EXPECT_TRUE(kinds.subset_of(RuleSet{RuleKind::poly, RuleKind::ylop}));
  }
}

TEST(Split, YlopAloneBringsPolys) {
  const auto batch = generate_split(small_config(23), "Y", 4);
  for (const auto& p : batch) {
    EXPECT_TRUE(p.rule_kinds().contains(RuleKind::poly));
    EXPECT_TRUE(p.rule_kinds().contains(RuleKind::ylop));
  }
}

TEST(Split, StoneStarIsPure) {
  const auto batch = generate_split(small_config(24), "St-S", 8);
  for (const auto& p : batch) EXPECT_EQ(p.rule_kinds(), (RuleSet{RuleKind::stone, RuleKind::star}));
}

TEST(Balanced, FiveGivesOnePerLevel) {
  GenConfig cfg;
  cfg.seed = 8;
  const auto batch = generate_balanced(cfg, 5);
  ASSERT_EQ(batch.size(), 5u);
  for (int level = 1; level <= 5; ++level) {
    ASSERT_TRUE(batch[level - 1].difficulty);
    EXPECT_EQ(batch[level - 1].difficulty->level, level);
  }
}

TEST(Balanced, LevelsMatchDifficultyModule) {
  GenConfig cfg;
  cfg.seed = 9;
  cfg.size_max = 4;
  cfg.difficulty.mu = 15.3;
  cfg.difficulty.sigma = 3.8;
  const auto batch = generate_balanced(cfg, 20);
  ASSERT_EQ(batch.size(), 20u);
  std::array<int, 5> counts{};
  for (const auto& p : batch) {
    const auto s = score_puzzle(p, cfg.difficulty);
    ASSERT_TRUE(p.difficulty);
    EXPECT_EQ(p.difficulty->level, s.level);
    EXPECT_DOUBLE_EQ(p.difficulty->raw, s.raw);
    ++counts[s.level - 1];
  }
  for (int c : counts) {
    EXPECT_GE(c, 2);  // floor(4 * 0.7)
    EXPECT_LE(c, 6);  // floor(4 * 1.5)
  }
}
