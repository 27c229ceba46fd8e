#pragma once

// Reference puzzles used across the test suites.

#include <string>

#include "sparc/model.hpp"
#include "sparc/path.hpp"

namespace sparc::fixtures {

inline const std::string kOneShotGrid =
    R"(["+",".","+","+","+","E","+"]
["+","C-R","+","o-K","+","o-K","+"]
["S","+","+","+","+","+","+"]
["+","P-G-112","+","*-G","+","P-B-624","+"]
["+","+","+","+","+","+","+"]
["+","*-G","+","*-G","+","o-K","+"]
["+","+","+",".","+","+","+"])";

inline const Path kOneShotSolution = {
    {0, 2}, {0, 1}, {0, 0}, {1, 0}, {2, 0}, {2, 1}, {2, 2}, {2, 3}, {2, 4}, {2, 5}, {2, 6}, {3, 6},
    {4, 6}, {4, 5}, {4, 4}, {5, 4}, {6, 4}, {6, 3}, {6, 2}, {5, 2}, {4, 2}, {4, 1}, {4, 0}, {5, 0}};

inline const std::string kOneShotAnswer =
    "#### (0,2),(0,1),(0,0),(1,0),(2,0),(2,1),(2,2),(2,3),(2,4),(2,5),(2,6),(3,6),(4,6),(4,5),(4,4),"
    "(5,4),(6,4),(6,3),(6,2),(5,2),(4,2),(4,1),(4,0),(5,0)";

inline const std::string kTwoShotGrid =
    R"(["+","E","+","+","+","+","+","+","+"]
["+","N","+","N","+","o-B","+","N","S"]
["+","+","+","+","+","+","+","+","+"]
["+","P-W-8992","G","Y-W-18","+","P-W-48","+","P-W-48","+"]
["+","+","+","G","+","+","+","+","+"])";

inline const Path kTwoShotSolution = {{8, 1}, {8, 2}, {7, 2}, {6, 2}, {5, 2}, {4, 2},
                                      {4, 1}, {4, 0}, {3, 0}, {2, 0}, {1, 0}};

inline Puzzle one_shot() { return parse_grid(kOneShotGrid, "one-shot"); }
inline Puzzle two_shot() { return parse_grid(kTwoShotGrid, "two-shot"); }

// Clockwise walk along the outer border of the one-shot puzzle from S to E.
inline Path one_shot_border_path() {
  return {{0, 2}, {0, 1}, {0, 0}, {1, 0}, {2, 0}, {3, 0}, {4, 0}, {5, 0}};
}

// Rule-free puzzle of the given size with S and E at the given positions.
inline Puzzle blank(int w, int h, LatticePos s, LatticePos e, std::string id = "blank") {
  std::vector<Token> lattice;
  for (int y = 0; y < 2 * h + 1; ++y)
    for (int x = 0; x < 2 * w + 1; ++x) {
      const LatticePos q{x, y};
      if (q == s)
        lattice.push_back(Token::of(TokenKind::start));
      else if (q == e)
        lattice.push_back(Token::of(TokenKind::end));
      else
        lattice.push_back(is_rule_cell(q) ? Token::of(TokenKind::empty_rule) : Token::path());
    }
  return Puzzle(std::move(id), w, h, std::move(lattice));
}

// Copy of p with one lattice token replaced.
inline Puzzle with_token(const Puzzle& p, LatticePos q, Token t) {
  auto lattice = p.lattice();
  lattice[static_cast<std::size_t>(p.index(q))] = t;
  return Puzzle(p.id(), p.width(), p.height(), std::move(lattice));
}

}  // namespace sparc::fixtures
