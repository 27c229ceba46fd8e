#include <gtest/gtest.h>

#include <random>

#include "fixtures.hpp"
#include "oracle.hpp"
#include "random_puzzles.hpp"
#include "sparc/rules.hpp"

namespace sparc {
namespace {

using fixtures::with_token;

TEST(CheckSolution, GoldPathsSolve) {
  const auto one = check_solution(fixtures::one_shot(), fixtures::kOneShotSolution);
  EXPECT_TRUE(one.solved);
  EXPECT_TRUE(one.failures.empty());
  const auto two = check_solution(fixtures::two_shot(), fixtures::kTwoShotSolution);
  EXPECT_TRUE(two.solved);
}

TEST(CheckSolution, BorderPathMissesDot) {
  const auto v = check_solution(fixtures::one_shot(), fixtures::one_shot_border_path());
  EXPECT_FALSE(v.solved);
  EXPECT_FALSE(v.structural.invalid_path);
  const auto it = std::find_if(v.failures.begin(), v.failures.end(),
                               [](const RuleFailure& f) { return f.rule == RuleKind::dot; });
  ASSERT_NE(it, v.failures.end());
  EXPECT_EQ(it->position, (LatticePos{3, 6}));
}

TEST(CheckSolution, StructuralFailureSkipsRules) {
  const auto v = check_solution(fixtures::one_shot(), {{0, 2}, {0, 0}});
  EXPECT_TRUE(v.structural.invalid_path);
  EXPECT_TRUE(v.failures.empty());
  EXPECT_FALSE(v.solved);
}

TEST(CheckDots, MembershipAndVacuity) {
  const auto p = fixtures::one_shot();
  EXPECT_TRUE(check_dots(p, fixtures::kOneShotSolution).empty());
  const auto f = check_dots(p, fixtures::one_shot_border_path());
  ASSERT_EQ(f.size(), 1u);
  EXPECT_EQ(f[0].position, (LatticePos{3, 6}));
  const auto blank = fixtures::blank(2, 2, {0, 0}, {4, 4});
  EXPECT_TRUE(check_dots(blank, {{0, 0}, {1, 0}, {2, 0}}).empty());
}

TEST(CheckGaps, PathThroughGap) {
  auto p = fixtures::blank(2, 2, {0, 0}, {4, 4});
  p = with_token(p, {2, 3}, Token::of(TokenKind::gap));
  const Path through{{0, 0}, {1, 0}, {2, 0}, {2, 1}, {2, 2}, {2, 3}, {2, 4}, {3, 4}, {4, 4}};
  const auto f = check_gaps(p, through);
  ASSERT_EQ(f.size(), 1u);
  EXPECT_EQ(f[0].position, (LatticePos{2, 3}));
  const Path around{{0, 0}, {1, 0}, {2, 0}, {3, 0}, {4, 0}, {4, 1}, {4, 2}, {4, 3}, {4, 4}};
  EXPECT_TRUE(check_gaps(p, around).empty());
}

TEST(CheckStones, MixedColorsInOneRegion) {
  auto p = fixtures::blank(2, 1, {0, 0}, {4, 0});
  p = with_token(p, {1, 1}, Token::stone(Color::K));
  p = with_token(p, {3, 1}, Token::stone(Color::B));
  const Path top{{0, 0}, {1, 0}, {2, 0}, {3, 0}, {4, 0}};
  const auto regions = decompose_regions(p, top);
  const auto f = check_stones(p, regions);
  ASSERT_EQ(f.size(), 1u);
  EXPECT_EQ(f[0].position, (LatticePos{3, 1}));

  // Splitting them apart fixes it.
  const Path split{{0, 0}, {1, 0}, {2, 0}, {2, 1}, {2, 2}, {3, 2}, {4, 2}, {4, 1}, {4, 0}};
  EXPECT_TRUE(check_stones(p, decompose_regions(p, split)).empty());

  const auto blank = fixtures::blank(2, 1, {0, 0}, {4, 0});
  EXPECT_TRUE(check_stones(blank, decompose_regions(blank, top)).empty());
}

TEST(CheckStones, TwoShotBlueStoneRegion) {
  const auto p = fixtures::two_shot();
  EXPECT_TRUE(check_stones(p, decompose_regions(p, fixtures::kTwoShotSolution)).empty());
}

TEST(CheckStars, PairingCounts) {
  auto base = fixtures::blank(3, 1, {0, 0}, {6, 0});
  const Path top{{0, 0}, {1, 0}, {2, 0}, {3, 0}, {4, 0}, {5, 0}, {6, 0}};

  auto lone = with_token(base, {1, 1}, Token::star(Color::G));
  auto f = check_stars(lone, decompose_regions(lone, top));
  ASSERT_EQ(f.size(), 1u);
  EXPECT_EQ(f[0].position, (LatticePos{1, 1}));

  auto paired = with_token(lone, {3, 1}, Token::star(Color::G));
  EXPECT_TRUE(check_stars(paired, decompose_regions(paired, top)).empty());

  // Any colored symbol counts as a partner, other colors are ignored.
  auto with_poly = with_token(lone, {3, 1}, Token::poly(Color::G, ShapeId{1}));
  with_poly = with_token(with_poly, {5, 1}, Token::stone(Color::R));
  EXPECT_TRUE(check_stars(with_poly, decompose_regions(with_poly, top)).empty());

  auto three = with_token(paired, {5, 1}, Token::triangle(Color::G, 1));
  f = check_stars(three, decompose_regions(three, top));
  EXPECT_EQ(f.size(), 2u);
}

TEST(CheckStars, OneShotGreenStars) {
  const auto p = fixtures::one_shot();
  EXPECT_TRUE(check_stars(p, decompose_regions(p, fixtures::kOneShotSolution)).empty());
}

TEST(CheckTriangles, EdgeCounts) {
  const auto p = fixtures::one_shot();
  EXPECT_TRUE(check_triangles(p, fixtures::kOneShotSolution).empty());

  auto a = with_token(fixtures::blank(2, 2, {0, 0}, {4, 4}), {1, 3}, Token::triangle(Color::R, 1));
  const Path far{{0, 0}, {1, 0}, {2, 0}, {3, 0}, {4, 0}, {4, 1}, {4, 2}, {4, 3}, {4, 4}};
  ASSERT_EQ(check_triangles(a, far).size(), 1u);
  EXPECT_EQ(check_triangles(a, far)[0].position, (LatticePos{1, 3}));

  // A walk that wraps all four edges of cell (3,3).
  const auto around = fixtures::blank(2, 2, {0, 0}, {3, 2});
  const Path wrap{{0, 0}, {1, 0}, {2, 0}, {2, 1}, {2, 2}, {2, 3}, {2, 4}, {3, 4}, {4, 4}, {4, 3}, {4, 2}, {3, 2}};
  EXPECT_TRUE(check_triangles(with_token(around, {3, 3}, Token::triangle(Color::B, 4)), wrap).empty());
  EXPECT_EQ(check_triangles(with_token(around, {3, 3}, Token::triangle(Color::B, 1)), wrap).size(), 1u);
}

TEST(CheckTriangles, ColorBlind) {
  const auto p = fixtures::one_shot();
  for (auto c : kAllColors) {
    const auto q = with_token(p, {1, 1}, Token::triangle(c, 3));
    EXPECT_EQ(check_triangles(q, fixtures::kOneShotSolution).size(), 0u);
    EXPECT_EQ(check_triangles(q, fixtures::one_shot_border_path()).size(), 1u);
  }
}

TEST(CheckPolys, OneShotAndTwoShot) {
  const auto one = fixtures::one_shot();
  EXPECT_TRUE(check_polys(one, decompose_regions(one, fixtures::kOneShotSolution)).empty());
  const auto two = fixtures::two_shot();
  EXPECT_TRUE(check_polys(two, decompose_regions(two, fixtures::kTwoShotSolution)).empty());
}

TEST(PolyEngine, AreaPruning) {
  // Three-cell region, four-cell poly.
  const std::vector<ShapeCell> region{{0, 0}, {1, 0}, {2, 0}};
  const std::vector<ShapeId> tetromino{ShapeId{0x1111}};  // horizontal I4
  EXPECT_EQ(poly_region_satisfiable(4, 1, region, tetromino, {}), PolyOutcome::area_mismatch);
  const std::vector<ShapeId> tromino{ShapeId{0x111}};
  EXPECT_EQ(poly_region_satisfiable(4, 1, region, tromino, {}), PolyOutcome::ok);
}

TEST(PolyEngine, NoRotation) {
  const std::vector<ShapeCell> row{{0, 0}, {1, 0}, {2, 0}};
  const std::vector<ShapeId> vertical{ShapeId{112}};
  EXPECT_EQ(poly_region_satisfiable(3, 3, row, vertical, {}), PolyOutcome::no_placement);
}

TEST(PolyEngine, CancellationImposesNoConstraint) {
  const std::vector<ShapeId> one{ShapeId{624}};
  for (const auto& region : {std::vector<ShapeCell>{{0, 0}}, std::vector<ShapeCell>{{0, 0}, {1, 0}, {2, 2}},
                             std::vector<ShapeCell>{{0, 0}, {1, 0}, {2, 0}, {0, 1}, {1, 1}, {2, 1}}}) {
    EXPECT_EQ(poly_region_satisfiable(3, 3, region, one, one), PolyOutcome::ok);
  }
  // Equal areas but shapes that cannot cancel.
  EXPECT_EQ(poly_region_satisfiable(3, 3, std::vector<ShapeCell>{{0, 0}}, std::vector<ShapeId>{ShapeId{48}},
                                    std::vector<ShapeId>{ShapeId{18}}),
            PolyOutcome::no_placement);
}

TEST(PolyEngine, YlopWithoutPoly) {
  EXPECT_EQ(poly_region_satisfiable(2, 2, std::vector<ShapeCell>{{0, 0}}, {}, std::vector<ShapeId>{ShapeId{1}}),
            PolyOutcome::ylop_without_poly);
}

TEST(PolyEngine, OverlappingPositivesCancelledByYlop) {
  // Two horizontal dominoes overlapping in one cell, ylop removes the overlap.
  const std::vector<ShapeCell> region{{0, 0}, {1, 0}, {2, 0}};
  const std::vector<ShapeId> dominoes{ShapeId{17}, ShapeId{17}};
  EXPECT_EQ(poly_region_satisfiable(3, 1, region, dominoes, std::vector<ShapeId>{ShapeId{1}}), PolyOutcome::ok);
}

TEST(PolyEngine, Deterministic) {
  const auto p = fixtures::two_shot();
  const auto a = check_solution(p, fixtures::one_shot_border_path());
  const auto b = check_solution(p, fixtures::one_shot_border_path());
  EXPECT_EQ(a.failures, b.failures);
}

// check_solution against the brute-force reading of every rule, over every
// walk on random puzzles up to 3x2 and a few 3x3.
TEST(CheckSolution, AgreesWithNaiveOracle) {
  std::mt19937_64 rng(2024);
  int solved = 0, total = 0;
  for (int trial = 0; trial < 120; ++trial) {
    const int w = 1 + static_cast<int>(rng() % 3);
    const int h = 1 + static_cast<int>(rng() % (trial < 100 ? 2 : 3));
    const auto p = testing::random_puzzle(rng, w, h, 0.6, 0.1);
    for (const auto& walk : oracle::all_walks(p)) {
      const bool want = oracle::solved(p, walk);
      ASSERT_EQ(check_solution(p, walk).solved, want) << serialize_grid(p) << "\n" << format_path(walk);
      solved += want;
      ++total;
    }
  }
  EXPECT_GT(solved, 20);
  EXPECT_GT(total, 1000);
}

}  // namespace
}  // namespace sparc
