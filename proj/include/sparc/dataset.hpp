#pragma once

// JSON-lines dataset codec. One puzzle object per line:
//   {id, width, height, grid, start, end, polyshapes, split, difficulty,
//    solution_count}

#include <fstream>
#include <iterator>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "sparc/model.hpp"

namespace sparc {

using json = nlohmann::json;

inline json pos_to_json(LatticePos p) { return json::array({p.x, p.y}); }

inline json puzzle_to_json(const Puzzle& p) {
  json grid = json::array();
  for (int y = 0; y < p.lattice_height(); ++y) {
    json row = json::array();
    for (int x = 0; x < p.lattice_width(); ++x) row.push_back(to_string(p.at({x, y})));
    grid.push_back(std::move(row));
  }
  json shapes = json::object();
  for (const auto& [id, cells] : p.polyshapes()) shapes[std::to_string(id.value)] = shape_rows(id);

  json j = {
      {"id", p.id()},
      {"width", p.width()},
      {"height", p.height()},
      {"grid", std::move(grid)},
      {"start", pos_to_json(p.start())},
      {"end", pos_to_json(p.end())},
      {"polyshapes", std::move(shapes)},
  };
  j["split"] = p.split ? json(*p.split) : json(nullptr);
  if (p.difficulty) {
    j["difficulty"] = {{"raw", p.difficulty->raw},
                       {"score", p.difficulty->score},
                       {"level", p.difficulty->level}};
  } else {
    j["difficulty"] = nullptr;
  }
  j["solution_count"] = p.solution_count ? json(*p.solution_count) : json(nullptr);
  return j;
}

namespace detail {

inline const json& require(const json& j, const char* key, std::size_t line) {
  auto it = j.find(key);
  if (it == j.end()) throw SchemaViolation(line, std::string("missing field \"") + key + "\"");
  return *it;
}

inline LatticePos pos_from_json(const json& j, const char* key, std::size_t line) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer())
    throw SchemaViolation(line, std::string("\"") + key + "\" must be [x, y]");
  return {j[0].get<int>(), j[1].get<int>()};
}

}  // namespace detail

// line is reported in SchemaViolation; pass 0 for standalone documents.
inline Puzzle puzzle_from_json(const json& j, std::size_t line = 0) {
  using detail::require;
  if (!j.is_object()) throw SchemaViolation(line, "record is not an object");
  const auto& jid = require(j, "id", line);
  const auto& jw = require(j, "width", line);
  const auto& jh = require(j, "height", line);
  const auto& jgrid = require(j, "grid", line);
  const auto& jstart = require(j, "start", line);
  const auto& jend = require(j, "end", line);
  if (!jid.is_string()) throw SchemaViolation(line, "\"id\" must be a string");
  if (!jw.is_number_integer() || !jh.is_number_integer() || jw.get<int>() < 1 || jh.get<int>() < 1)
    throw SchemaViolation(line, "\"width\"/\"height\" must be positive integers");
  const int w = jw.get<int>();
  const int h = jh.get<int>();
  if (!jgrid.is_array() || static_cast<int>(jgrid.size()) != 2 * h + 1)
    throw SchemaViolation(line, "\"grid\" must have 2*height+1 rows");

  std::vector<Token> lattice;
  lattice.reserve(static_cast<std::size_t>((2 * w + 1) * (2 * h + 1)));
  for (const auto& row : jgrid) {
    if (!row.is_array() || static_cast<int>(row.size()) != 2 * w + 1)
      throw SchemaViolation(line, "\"grid\" rows must have 2*width+1 tokens");
    for (const auto& tok : row) {
      if (!tok.is_string()) throw SchemaViolation(line, "grid tokens must be strings");
      try {
        lattice.push_back(parse_token(tok.get<std::string>()));
      } catch (const ParseError& e) {
        throw SchemaViolation(line, e.what());
      }
    }
  }

  Puzzle p;
  try {
    p = Puzzle(jid.get<std::string>(), w, h, std::move(lattice));
  } catch (const ParseError& e) {
    throw SchemaViolation(line, e.what());
  }
  if (detail::pos_from_json(jstart, "start", line) != p.start())
    throw SchemaViolation(line, "\"start\" does not match the S token");
  if (detail::pos_from_json(jend, "end", line) != p.end())
    throw SchemaViolation(line, "\"end\" does not match the E token");

  if (auto it = j.find("polyshapes"); it != j.end() && !it->is_null()) {
    if (!it->is_object()) throw SchemaViolation(line, "\"polyshapes\" must be an object");
    for (const auto& [key, rows] : it->items()) {
      std::array<std::array<int, 4>, 4> arr{};
      try {
        arr = rows.get<std::array<std::array<int, 4>, 4>>();
      } catch (const json::exception&) {
        throw SchemaViolation(line, "polyshape " + key + " must be a 4x4 array");
      }
      ShapeId decoded;
      try {
        decoded = shape_from_rows(arr);
      } catch (const ShapeError& e) {
        throw SchemaViolation(line, "polyshape " + key + ": " + e.what());
      }
      if (std::to_string(decoded.value) != key)
        throw SchemaViolation(line, "polyshape " + key + " array encodes id " + std::to_string(decoded.value));
    }
    for (const auto& [id, cells] : p.polyshapes())
      if (!it->contains(std::to_string(id.value)))
        throw SchemaViolation(line, "polyshape " + std::to_string(id.value) + " is not defined");
  } else if (!p.polyshapes().empty()) {
    throw SchemaViolation(line, "missing field \"polyshapes\"");
  }

  if (auto it = j.find("split"); it != j.end() && !it->is_null()) {
    if (!it->is_string()) throw SchemaViolation(line, "\"split\" must be a string");
    p.split = it->get<std::string>();
  }
  if (auto it = j.find("difficulty"); it != j.end() && !it->is_null()) {
    try {
      p.difficulty = DifficultyTag{it->at("raw").get<double>(), it->at("score").get<double>(),
                                   it->at("level").get<int>()};
    } catch (const json::exception&) {
      throw SchemaViolation(line, "\"difficulty\" must be {raw, score, level}");
    }
  }
  if (auto it = j.find("solution_count"); it != j.end() && !it->is_null()) {
    if (!it->is_number_integer()) throw SchemaViolation(line, "\"solution_count\" must be an integer");
    p.solution_count = it->get<int>();
  }
  return p;
}

inline std::string save_dataset(std::span<const Puzzle> puzzles) {
  std::string out;
  for (const auto& p : puzzles) {
    out += puzzle_to_json(p).dump();
    out += '\n';
  }
  return out;
}

inline std::vector<Puzzle> load_dataset(std::string_view bytes) {
  std::vector<Puzzle> out;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < bytes.size()) {
    auto nl = bytes.find('\n', pos);
    if (nl == std::string_view::npos) nl = bytes.size();
    ++line_no;
    const auto line = detail::trim(bytes.substr(pos, nl - pos));
    pos = nl + 1;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw SchemaViolation(line_no, std::string("invalid JSON: ") + e.what());
    }
    out.push_back(puzzle_from_json(j, line_no));
  }
  return out;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::string& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

inline std::vector<Puzzle> load_dataset_file(const std::string& path) { return load_dataset(read_file(path)); }

}  // namespace sparc
