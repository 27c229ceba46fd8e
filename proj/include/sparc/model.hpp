#pragma once

// Puzzle representation: lattice coordinates, token vocabulary, polyshape
// codec, and the textual grid format used in prompts.
//
// An m x n puzzle is stored as its full (2m+1) x (2n+1) token lattice.
// Positions with both coordinates odd are rule cells; every other position
// is drawable (a node when both are even, an edge otherwise).

#include <algorithm>
#include <array>
#include <bit>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sparc/error.hpp"

namespace sparc {

struct LatticePos {
  int x = 0;
  int y = 0;

  friend bool operator==(const LatticePos&, const LatticePos&) = default;
  // Row-major: y first, then x.
  friend auto operator<=>(const LatticePos& a, const LatticePos& b) {
    if (auto c = a.y <=> b.y; c != 0) return c;
    return a.x <=> b.x;
  }
};

enum class CellClass { node, edge, rule };

constexpr CellClass classify(LatticePos p) {
  const bool ox = (p.x & 1) != 0;
  const bool oy = (p.y & 1) != 0;
  if (ox && oy) return CellClass::rule;
  if (!ox && !oy) return CellClass::node;
  return CellClass::edge;
}

constexpr bool is_rule_cell(LatticePos p) { return classify(p) == CellClass::rule; }
constexpr bool is_drawable(LatticePos p) { return classify(p) != CellClass::rule; }

inline std::string format_pos(LatticePos p) {
  return "(" + std::to_string(p.x) + "," + std::to_string(p.y) + ")";
}

// ---------------------------------------------------------------------------
// Colors

enum class Color : std::uint8_t { R, B, G, Y, W, O, P, K };

inline constexpr std::array<Color, 8> kAllColors = {Color::R, Color::B, Color::G, Color::Y,
                                                    Color::W, Color::O, Color::P, Color::K};

inline char color_code(Color c) { return "RBGYWOPK"[static_cast<int>(c)]; }

inline std::optional<Color> parse_color(char ch) {
  switch (ch) {
    case 'R': return Color::R;
    case 'B': return Color::B;
    case 'G': return Color::G;
    case 'Y': return Color::Y;
    case 'W': return Color::W;
    case 'O': return Color::O;
    case 'P': return Color::P;
    case 'K': return Color::K;
    default: return std::nullopt;
  }
}

// ---------------------------------------------------------------------------
// Polyshapes: a shape lives in a 4x4 window; cell (col,row) is bit 4*col+row.

struct ShapeId {
  std::uint16_t value = 0;

  friend bool operator==(const ShapeId&, const ShapeId&) = default;
  friend auto operator<=>(const ShapeId&, const ShapeId&) = default;
};

struct ShapeCell {
  int col = 0;
  int row = 0;

  friend bool operator==(const ShapeCell&, const ShapeCell&) = default;
  friend auto operator<=>(const ShapeCell& a, const ShapeCell& b) {
    if (auto c = a.row <=> b.row; c != 0) return c;
    return a.col <=> b.col;
  }
};

using ShapeCells = std::vector<ShapeCell>;  // sorted row-major, unique

inline constexpr int kShapeWindow = 4;

inline ShapeCells decode_shape(ShapeId id) {
  if (id.value == 0) throw ShapeError(ShapeErrc::zero_shape, "shape id 0 has no cells");
  ShapeCells cells;
  for (int row = 0; row < kShapeWindow; ++row) {
    for (int col = 0; col < kShapeWindow; ++col) {
      if (id.value & (1u << (kShapeWindow * col + row))) cells.push_back({col, row});
    }
  }
  return cells;
}

inline ShapeId encode_shape(const ShapeCells& cells) {
  if (cells.empty()) throw ShapeError(ShapeErrc::zero_shape, "empty shape");
  unsigned bits = 0;
  for (const auto& c : cells) {
    if (c.col < 0 || c.col >= kShapeWindow || c.row < 0 || c.row >= kShapeWindow) {
      throw ShapeError(ShapeErrc::out_of_window,
                       "cell (" + std::to_string(c.col) + "," + std::to_string(c.row) +
                           ") outside the 4x4 shape window");
    }
    bits |= 1u << (kShapeWindow * c.col + c.row);
  }
  return ShapeId{static_cast<std::uint16_t>(bits)};
}

inline int shape_area(ShapeId id) { return std::popcount(static_cast<unsigned>(id.value)); }

// 4x4 occupancy array, indexed [row][col].
inline std::array<std::array<int, 4>, 4> shape_rows(ShapeId id) {
  std::array<std::array<int, 4>, 4> rows{};
  for (int row = 0; row < kShapeWindow; ++row)
    for (int col = 0; col < kShapeWindow; ++col)
      rows[row][col] = (id.value >> (kShapeWindow * col + row)) & 1u;
  return rows;
}

inline ShapeId shape_from_rows(const std::array<std::array<int, 4>, 4>& rows) {
  ShapeCells cells;
  for (int row = 0; row < kShapeWindow; ++row)
    for (int col = 0; col < kShapeWindow; ++col)
      if (rows[row][col]) cells.push_back({col, row});
  return encode_shape(cells);
}

// ---------------------------------------------------------------------------
// Tokens

enum class TokenKind : std::uint8_t {
  path,        // "+"
  start,       // "S"
  end,         // "E"
  empty_rule,  // "N"
  gap,         // "G"
  dot,         // "."
  stone,       // "o-X"
  star,        // "*-X"
  triangle,    // "A-X" .. "D-X"
  poly,        // "P-X-id"
  ylop,        // "Y-X-id"
};

// True for kinds that live on rule cells.
constexpr bool is_symbol_kind(TokenKind k) {
  switch (k) {
    case TokenKind::empty_rule:
    case TokenKind::stone:
    case TokenKind::star:
    case TokenKind::triangle:
    case TokenKind::poly:
    case TokenKind::ylop:
      return true;
    default:
      return false;
  }
}

constexpr bool is_colored_kind(TokenKind k) {
  return k == TokenKind::stone || k == TokenKind::star || k == TokenKind::triangle ||
         k == TokenKind::poly || k == TokenKind::ylop;
}

struct Token {
  TokenKind kind = TokenKind::path;
  std::optional<Color> color;
  int count = 0;  // triangles only, 1..4
  ShapeId shape;  // polys and ylops only

  static Token path() { return {}; }
  static Token of(TokenKind k) { return Token{k, std::nullopt, 0, {}}; }
  static Token stone(Color c) { return Token{TokenKind::stone, c, 0, {}}; }
  static Token star(Color c) { return Token{TokenKind::star, c, 0, {}}; }
  static Token triangle(Color c, int n) { return Token{TokenKind::triangle, c, n, {}}; }
  static Token poly(Color c, ShapeId s) { return Token{TokenKind::poly, c, 0, s}; }
  static Token ylop(Color c, ShapeId s) { return Token{TokenKind::ylop, c, 0, s}; }

  friend bool operator==(const Token&, const Token&) = default;
};

inline std::string to_string(const Token& t) {
  const auto col = [&] { return std::string(1, color_code(*t.color)); };
  switch (t.kind) {
    case TokenKind::path: return "+";
    case TokenKind::start: return "S";
    case TokenKind::end: return "E";
    case TokenKind::empty_rule: return "N";
    case TokenKind::gap: return "G";
    case TokenKind::dot: return ".";
    case TokenKind::stone: return "o-" + col();
    case TokenKind::star: return "*-" + col();
    case TokenKind::triangle: return std::string(1, static_cast<char>('A' + t.count - 1)) + "-" + col();
    case TokenKind::poly: return "P-" + col() + "-" + std::to_string(t.shape.value);
    case TokenKind::ylop: return "Y-" + col() + "-" + std::to_string(t.shape.value);
  }
  return "?";
}

inline Token parse_token(std::string_view s) {
  const auto fail = [&]() -> Token {
    throw ParseError(ParseErrc::unknown_token, "unknown token \"" + std::string(s) + "\"");
  };
  if (s == "+") return Token::path();
  if (s == "S") return Token::of(TokenKind::start);
  if (s == "E") return Token::of(TokenKind::end);
  if (s == "N") return Token::of(TokenKind::empty_rule);
  if (s == "G") return Token::of(TokenKind::gap);
  if (s == ".") return Token::of(TokenKind::dot);

  if (s.size() == 3 && s[1] == '-') {
    const auto c = parse_color(s[2]);
    if (!c) return fail();
    switch (s[0]) {
      case 'o': return Token::stone(*c);
      case '*': return Token::star(*c);
      case 'A':
      case 'B':
      case 'C':
      case 'D': return Token::triangle(*c, s[0] - 'A' + 1);
      default: return fail();
    }
  }
  if (s.size() >= 5 && (s[0] == 'P' || s[0] == 'Y') && s[1] == '-' && s[3] == '-') {
    const auto c = parse_color(s[2]);
    if (!c) return fail();
    const auto digits = s.substr(4);
    if (digits.empty() || digits.size() > 5 ||
        !std::all_of(digits.begin(), digits.end(), [](char ch) { return ch >= '0' && ch <= '9'; }))
      return fail();
    const long id = std::stol(std::string(digits));
    if (id <= 0 || id >= (1L << 16)) return fail();
    const ShapeId shape{static_cast<std::uint16_t>(id)};
    return s[0] == 'P' ? Token::poly(*c, shape) : Token::ylop(*c, shape);
  }
  return fail();
}

// ---------------------------------------------------------------------------
// Rule kinds, as counted by splits and difficulty.

enum class RuleKind : std::uint8_t { dot, gap, stone, star, triangle, poly, ylop };

inline constexpr std::array<RuleKind, 7> kAllRuleKinds = {
    RuleKind::dot,  RuleKind::gap,  RuleKind::stone, RuleKind::star,
    RuleKind::triangle, RuleKind::poly, RuleKind::ylop};

inline const char* to_string(RuleKind k) {
  switch (k) {
    case RuleKind::dot: return "dots";
    case RuleKind::gap: return "gaps";
    case RuleKind::stone: return "stones";
    case RuleKind::star: return "stars";
    case RuleKind::triangle: return "triangles";
    case RuleKind::poly: return "polys";
    case RuleKind::ylop: return "ylops";
  }
  return "?";
}

inline std::optional<RuleKind> rule_kind_of(TokenKind k) {
  switch (k) {
    case TokenKind::dot: return RuleKind::dot;
    case TokenKind::gap: return RuleKind::gap;
    case TokenKind::stone: return RuleKind::stone;
    case TokenKind::star: return RuleKind::star;
    case TokenKind::triangle: return RuleKind::triangle;
    case TokenKind::poly: return RuleKind::poly;
    case TokenKind::ylop: return RuleKind::ylop;
    default: return std::nullopt;
  }
}

// Small bitset over RuleKind.
class RuleSet {
 public:
  constexpr RuleSet() = default;
  constexpr RuleSet(std::initializer_list<RuleKind> kinds) {
    for (auto k : kinds) insert(k);
  }
  constexpr void insert(RuleKind k) { bits_ |= bit(k); }
  constexpr bool contains(RuleKind k) const { return (bits_ & bit(k)) != 0; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr int size() const { return std::popcount(static_cast<unsigned>(bits_)); }
  constexpr bool subset_of(RuleSet o) const { return (bits_ & ~o.bits_) == 0; }
  std::vector<RuleKind> kinds() const {
    std::vector<RuleKind> out;
    for (auto k : kAllRuleKinds)
      if (contains(k)) out.push_back(k);
    return out;
  }
  friend constexpr bool operator==(RuleSet, RuleSet) = default;

 private:
  static constexpr std::uint8_t bit(RuleKind k) { return static_cast<std::uint8_t>(1u << static_cast<int>(k)); }
  std::uint8_t bits_ = 0;
};

// ---------------------------------------------------------------------------
// Puzzle

struct DifficultyTag {
  double raw = 0;
  double score = 0;
  int level = 0;
  friend bool operator==(const DifficultyTag&, const DifficultyTag&) = default;
};

class Puzzle {
 public:
  Puzzle() = default;

  // Validates the lattice and locates S/E. width/height count rule cells.
  Puzzle(std::string id, int width, int height, std::vector<Token> lattice)
      : id_(std::move(id)), width_(width), height_(height), lattice_(std::move(lattice)) {
    if (width_ < 1 || height_ < 1)
      throw ParseError(ParseErrc::ragged_rows, "puzzle dimensions must be positive");
    if (static_cast<int>(lattice_.size()) != lattice_width() * lattice_height())
      throw ParseError(ParseErrc::ragged_rows, "lattice size does not match dimensions");
    bool have_start = false, have_end = false;
    for (int y = 0; y < lattice_height(); ++y) {
      for (int x = 0; x < lattice_width(); ++x) {
        const LatticePos p{x, y};
        const Token& t = at(p);
        if (is_symbol_kind(t.kind) != is_rule_cell(p)) {
          throw ParseError(ParseErrc::misplaced_token,
                           "token \"" + to_string(t) + "\" not allowed at " + format_pos(p));
        }
        if (t.kind == TokenKind::start) {
          if (have_start) throw ParseError(ParseErrc::duplicate_start_or_end, "more than one S");
          have_start = true;
          start_ = p;
        } else if (t.kind == TokenKind::end) {
          if (have_end) throw ParseError(ParseErrc::duplicate_start_or_end, "more than one E");
          have_end = true;
          end_ = p;
        } else if (t.kind == TokenKind::triangle && (t.count < 1 || t.count > 4)) {
          throw ParseError(ParseErrc::unknown_token, "triangle count out of range");
        }
        if (t.kind == TokenKind::poly || t.kind == TokenKind::ylop)
          polyshapes_.try_emplace(t.shape, decode_shape(t.shape));
      }
    }
    if (!have_start || !have_end)
      throw ParseError(ParseErrc::missing_start_or_end, "grid needs exactly one S and one E");
  }

  const std::string& id() const { return id_; }
  int width() const { return width_; }
  int height() const { return height_; }
  int lattice_width() const { return 2 * width_ + 1; }
  int lattice_height() const { return 2 * height_ + 1; }
  int area() const { return width_ * height_; }
  LatticePos start() const { return start_; }
  LatticePos end() const { return end_; }

  bool in_bounds(LatticePos p) const {
    return p.x >= 0 && p.y >= 0 && p.x < lattice_width() && p.y < lattice_height();
  }
  int index(LatticePos p) const { return p.y * lattice_width() + p.x; }
  LatticePos pos(int index) const { return {index % lattice_width(), index / lattice_width()}; }
  const Token& at(LatticePos p) const { return lattice_[index(p)]; }
  const std::vector<Token>& lattice() const { return lattice_; }

  const std::map<ShapeId, ShapeCells>& polyshapes() const { return polyshapes_; }

  bool on_perimeter(LatticePos p) const {
    return p.x == 0 || p.y == 0 || p.x == lattice_width() - 1 || p.y == lattice_height() - 1;
  }

  // Rule kinds present (symbols, dots, gaps).
  RuleSet rule_kinds() const {
    RuleSet s;
    for (const auto& t : lattice_)
      if (auto k = rule_kind_of(t.kind)) s.insert(*k);
    return s;
  }

  // Metadata; not part of the puzzle's structure.
  std::optional<std::string> split;
  std::optional<DifficultyTag> difficulty;
  std::optional<int> solution_count;

  void set_id(std::string id) { id_ = std::move(id); }

  friend bool operator==(const Puzzle&, const Puzzle&) = default;

 private:
  std::string id_;
  int width_ = 0;
  int height_ = 0;
  std::vector<Token> lattice_;
  LatticePos start_;
  LatticePos end_;
  std::map<ShapeId, ShapeCells> polyshapes_;
};

// ---------------------------------------------------------------------------
// Grid text: one bracketed row of quoted tokens per lattice row.

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_row(std::string_view line, int row) {
  const auto bad = [&](const std::string& why) {
    return ParseError(ParseErrc::malformed_row, "row " + std::to_string(row) + ": " + why);
  };
  line = trim(line);
  if (line.size() < 2 || line.front() != '[' || line.back() != ']') throw bad("expected [ ... ]");
  line = line.substr(1, line.size() - 2);
  std::vector<std::string> out;
  std::size_t i = 0;
  const auto skip_ws = [&] {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
  };
  skip_ws();
  if (i == line.size()) return out;
  while (true) {
    skip_ws();
    if (i >= line.size() || line[i] != '"') throw bad("expected quoted token");
    const auto close = line.find('"', i + 1);
    if (close == std::string_view::npos) throw bad("unterminated token");
    out.emplace_back(line.substr(i + 1, close - i - 1));
    i = close + 1;
    skip_ws();
    if (i == line.size()) break;
    if (line[i] != ',') throw bad("expected ','");
    ++i;
  }
  return out;
}

}  // namespace detail

inline Puzzle parse_grid(std::string_view text, std::string id = "") {
  std::vector<std::vector<std::string>> rows;
  std::size_t pos = 0;
  int row_no = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    const auto line = detail::trim(text.substr(pos, nl - pos));
    if (!line.empty()) rows.push_back(detail::split_row(line, row_no++));
    pos = nl + 1;
  }
  if (rows.empty()) throw ParseError(ParseErrc::ragged_rows, "empty grid");
  const std::size_t cols = rows.front().size();
  for (const auto& r : rows)
    if (r.size() != cols) throw ParseError(ParseErrc::ragged_rows, "rows have different lengths");
  if (cols < 3 || rows.size() < 3 || cols % 2 == 0 || rows.size() % 2 == 0)
    throw ParseError(ParseErrc::ragged_rows, "lattice dimensions must be odd and at least 3");

  std::vector<Token> lattice;
  lattice.reserve(cols * rows.size());
  for (const auto& r : rows)
    for (const auto& s : r) lattice.push_back(parse_token(s));
  return Puzzle(std::move(id), static_cast<int>(cols / 2), static_cast<int>(rows.size() / 2),
                std::move(lattice));
}

inline std::string serialize_grid(const Puzzle& p) {
  std::string out;
  for (int y = 0; y < p.lattice_height(); ++y) {
    if (y) out += '\n';
    out += '[';
    for (int x = 0; x < p.lattice_width(); ++x) {
      if (x) out += ',';
      out += '"';
      out += to_string(p.at({x, y}));
      out += '"';
    }
    out += ']';
  }
  return out;
}

inline std::string format_shape(ShapeId id) {
  std::string out;
  const auto rows = shape_rows(id);
  for (int r = 0; r < kShapeWindow; ++r) {
    if (r) out += '\n';
    out += '[';
    for (int c = 0; c < kShapeWindow; ++c) {
      if (c) out += ',';
      out += static_cast<char>('0' + rows[r][c]);
    }
    out += ']';
  }
  return out;
}

}  // namespace sparc
