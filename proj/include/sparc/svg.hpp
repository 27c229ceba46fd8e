#pragma once

// SVG rendering of a puzzle, optionally with a path drawn over it.

#include <cmath>
#include <cstdio>
#include <optional>
#include <string>

#include "sparc/model.hpp"
#include "sparc/path.hpp"

namespace sparc {

struct SvgOptions {
  int unit = 40;  // pixels per lattice step
  int margin = 30;
  std::optional<Path> path;
};

inline const char* svg_color(Color c) {
  switch (c) {
    case Color::R: return "#e53935";
    case Color::B: return "#1e88e5";
    case Color::G: return "#43a047";
    case Color::Y: return "#fdd835";
    case Color::W: return "#fafafa";
    case Color::O: return "#fb8c00";
    case Color::P: return "#8e24aa";
    case Color::K: return "#212121";
  }
  return "#000";
}

namespace detail {

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  std::string s(buf);
  while (s.back() == '0') s.pop_back();
  if (s.back() == '.') s.pop_back();
  return s;
}

}  // namespace detail

inline std::string render_svg(const Puzzle& p, const SvgOptions& opt = {}) {
  using detail::num;
  const double u = opt.unit;
  const auto X = [&](double x) { return opt.margin + x * u; };
  const auto Y = [&](double y) { return opt.margin + y * u; };
  const double width = 2 * opt.margin + (p.lattice_width() - 1) * u;
  const double height = 2 * opt.margin + (p.lattice_height() - 1) * u;
  const double line = u * 0.35;

  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) + "\" height=\"" + num(height) +
       "\" viewBox=\"0 0 " + num(width) + " " + num(height) + "\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"#3b4a5a\"/>\n";

  // Edges, split into two halves so a gap leaves a hole in the middle.
  s += "<g stroke=\"#9fb3c8\" stroke-width=\"" + num(line) + "\" stroke-linecap=\"round\">\n";
  for (int y = 0; y < p.lattice_height(); ++y)
    for (int x = 0; x < p.lattice_width(); ++x) {
      const LatticePos q{x, y};
      if (classify(q) != CellClass::edge) continue;
      const bool horizontal = x % 2 == 1;
      const double x0 = horizontal ? x - 1 : x, y0 = horizontal ? y : y - 1;
      const double x1 = horizontal ? x + 1 : x, y1 = horizontal ? y : y + 1;
      if (p.at(q).kind == TokenKind::gap) {
        const double gx = horizontal ? 0.35 : 0, gy = horizontal ? 0 : 0.35;
        s += "<line x1=\"" + num(X(x0)) + "\" y1=\"" + num(Y(y0)) + "\" x2=\"" + num(X(x - gx)) + "\" y2=\"" +
             num(Y(y - gy)) + "\"/>\n";
        s += "<line x1=\"" + num(X(x + gx)) + "\" y1=\"" + num(Y(y + gy)) + "\" x2=\"" + num(X(x1)) + "\" y2=\"" +
             num(Y(y1)) + "\"/>\n";
      } else {
        s += "<line x1=\"" + num(X(x0)) + "\" y1=\"" + num(Y(y0)) + "\" x2=\"" + num(X(x1)) + "\" y2=\"" +
             num(Y(y1)) + "\"/>\n";
      }
    }
  s += "</g>\n";

  for (int y = 0; y < p.lattice_height(); ++y)
    for (int x = 0; x < p.lattice_width(); ++x) {
      const LatticePos q{x, y};
      const Token& t = p.at(q);
      const double cx = X(x), cy = Y(y);
      const std::string fill = t.color ? svg_color(*t.color) : "#000";
      switch (t.kind) {
        case TokenKind::start:
          s += "<circle class=\"start\" cx=\"" + num(cx) + "\" cy=\"" + num(cy) + "\" r=\"" + num(u * 0.4) +
               "\" fill=\"#9fb3c8\"/>\n";
          break;
        case TokenKind::end:
          s += "<circle class=\"end\" cx=\"" + num(cx) + "\" cy=\"" + num(cy) + "\" r=\"" + num(line * 0.5) +
               "\" fill=\"#9fb3c8\" stroke=\"#fff\" stroke-width=\"2\"/>\n";
          break;
        case TokenKind::dot:
          s += "<circle class=\"dot\" cx=\"" + num(cx) + "\" cy=\"" + num(cy) + "\" r=\"" + num(line * 0.4) +
               "\" fill=\"#111\"/>\n";
          break;
        case TokenKind::stone:
          s += "<rect class=\"stone\" x=\"" + num(cx - u * 0.35) + "\" y=\"" + num(cy - u * 0.35) + "\" width=\"" +
               num(u * 0.7) + "\" height=\"" + num(u * 0.7) + "\" rx=\"" + num(u * 0.15) + "\" fill=\"" + fill +
               "\"/>\n";
          break;
        case TokenKind::star: {
          std::string pts;
          for (int k = 0; k < 16; ++k) {
            const double a = k * 3.14159265358979 / 8;
            const double r = (k % 2 ? 0.28 : 0.42) * u;
            pts += num(cx + r * std::cos(a)) + "," + num(cy + r * std::sin(a)) + " ";
          }
          pts.pop_back();
          s += "<polygon class=\"star\" points=\"" + pts + "\" fill=\"" + fill + "\"/>\n";
          break;
        }
        case TokenKind::triangle: {
          const double side = u * 0.32;
          const double start = cx - (t.count - 1) * side * 0.6;
          for (int k = 0; k < t.count; ++k) {
            const double tx = start + k * side * 1.2;
            s += "<polygon class=\"triangle\" points=\"" + num(tx) + "," + num(cy - side * 0.5) + " " +
                 num(tx - side * 0.5) + "," + num(cy + side * 0.4) + " " + num(tx + side * 0.5) + "," +
                 num(cy + side * 0.4) + "\" fill=\"" + fill + "\"/>\n";
          }
          break;
        }
        case TokenKind::poly:
        case TokenKind::ylop: {
          const bool neg = t.kind == TokenKind::ylop;
          const double b = u * 0.18;
          const auto rows = shape_rows(t.shape);
          s += std::string("<g class=\"") + (neg ? "ylop" : "poly") + "\">\n";
          for (int r = 0; r < kShapeWindow; ++r)
            for (int c = 0; c < kShapeWindow; ++c) {
              if (!rows[r][c]) continue;
              const double bx = cx - 2 * b + c * b, by = cy - 2 * b + r * b;
              s += "<rect x=\"" + num(bx + 1) + "\" y=\"" + num(by + 1) + "\" width=\"" + num(b - 2) +
                   "\" height=\"" + num(b - 2) + "\" " +
                   (neg ? "fill=\"none\" stroke=\"" + fill + "\" stroke-width=\"1.5\"" : "fill=\"" + fill + "\"") +
                   "/>\n";
            }
          s += "</g>\n";
          break;
        }
        default: break;
      }
    }

  if (opt.path && !opt.path->empty()) {
    std::string pts;
    for (const auto& q : *opt.path) pts += num(X(q.x)) + "," + num(Y(q.y)) + " ";
    pts.pop_back();
    s += "<polyline class=\"path\" points=\"" + pts + "\" fill=\"none\" stroke=\"#ffee58\" stroke-width=\"" +
         num(line * 0.8) + "\" stroke-linecap=\"round\" stroke-linejoin=\"round\"/>\n";
  }
  s += "</svg>\n";
  return s;
}

}  // namespace sparc
