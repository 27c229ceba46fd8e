#pragma once

// Prompt rendering, answer extraction and single-response grading.

#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "sparc/error.hpp"
#include "sparc/model.hpp"
#include "sparc/path.hpp"
#include "sparc/rules.hpp"

namespace sparc {

enum class PromptVariant { standard, alternative, vision_text };

inline const char* to_string(PromptVariant v) {
  switch (v) {
    case PromptVariant::standard: return "default";
    case PromptVariant::alternative: return "alternative";
    case PromptVariant::vision_text: return "vision_text";
  }
  return "?";
}

inline PromptVariant parse_prompt_variant(std::string_view s) {
  if (s == "default" || s == "standard") return PromptVariant::standard;
  if (s == "alternative" || s == "alt") return PromptVariant::alternative;
  if (s == "vision_text" || s == "vision") return PromptVariant::vision_text;
  throw Error("unknown prompt variant: " + std::string(s));
}

struct PromptTemplate {
  PromptVariant variant = PromptVariant::standard;
  int shots = 0;  // 0, 1 or 2
};

namespace prompts {

inline constexpr std::string_view kDefault =
    R"(You are an expert spatial reasoning AI specializing in solving puzzles from the game 'The Witness'. Your task is to solve the following puzzle by finding a valid line from the Start Node to the End Node.

GRID DEFINITION:
- The puzzle involves a grid of {grid_size['width']}x{grid_size['height']} cells.
- COORDINATE SYSTEM: Nodes are indexed (x, y). Node (0,0) is the top-left node. x increases to the right, y increases downward.
- Line: The solution line travels along grid edges, connecting adjacent nodes horizontally or vertically. The line cannot visit the same node twice.
- RULE PLACEMENT: Rule symbols (squares, stars, polyshapes, negative polyshapes, triangles) are located at cells with all odd coordinates. The line goes AROUND cells containing rules, forming boundaries.

SOLVING RULES:
1.  Draw a continuous line from the START NODE to the END NODE by connecting adjacent nodes (horizontally or vertically) without visiting the same node twice.
2.  The line can only be placed on (+) and (.) cells. These cells have at least one even coordinate. The line can NEVER be placed on a rule cell (all odd coordinates).
3.  The line acts as a boundary, potentially dividing the grid cells into one or more distinct regions.
4.  All rules associated with symbols on the grid must be satisfied:
    - Gaps ('G'): The line CANNOT traverse a cell marked by a Gap.
    - Dots ('.'): The line MUST pass through a cell marked by a Dot.
    - Squares ('o-X'): All squares within a single region created by the line must be the same color. Different colored squares MUST be separated into different regions by the line.
    - Stars ('*-X'): Each star must be paired with EXACTLY one other element of the same color in a region. Other colors are ignored.
    - Triangles ('A-X (1)', 'B-X (2)', 'C-X (3)', 'D-X (4)'): The line must touch EXACTLY the number of edges specified by the triangle count (edges are top, right, bottom, left of the cell).
    - Polyshapes ('P-X-Y'): The region containing this symbol must be shaped EXACTLY like the defined polyshape Y. The shape must fit entirely within the region's boundaries. If multiple positive polyshapes are in one region, the region's shape must accommodate their combined, non-overlapping forms (like Tetris pieces).
    - Negative Polyshapes ('Y-X-Y'): The negative polyshape can only be placed on top of already placed normal polyshapes. The negative polyshapes must fit on the grid, but can allow overlap between normal polyshapes or placement of polyshapes that extend beyond the area defined by the line. If the negative polyshapes exactly cancel the normal polyshapes, there is no restriction on the grid shape anymore. A negative polyshape only counts as valid if it is used.


START POSITION: {start_pos}
END POSITION: {end_pos}

GRID NOTATION:
- 'S': Start point
- 'E': End point
- '+': Cell on which the line can be drawn
- 'N': Empty rule cell
- 'G': Gap (cannot be crossed)
- '.': Dot line must cross this cell
- 'o-X': Stone of color X
- '*-X': Star of color X
- 'A-X' Triangle with count 1
- 'B-X' Triangle with count 2
- 'C-X' Triangle with count 3
- 'D-X' Triangle with count 4
- 'P-X-Y': Positive polyshape of color X and shape ID Y
- 'Y-X-Y': Negative polyshape (ylop) of color X and shape ID Y

COLOR CODES:
R=red, B=blue, G=green, Y=yellow, W=white, O=orange, P=purple, K=black

{example_section}

PUZZLE GRID:
{grid_str}

POLYSHAPE DEFINITIONS:
Defines the shapes referenced by P-X-Y and Y-X-Y symbols in the grid.
In the 2D array, 1 indicates a cell occupied by the shape, 0 indicates an empty cell.
{polyshapes_str}

Please solve this puzzle.
First, explain your reasoning step-by-step, including key deductions and constraint checks made along the way.
Then, provide the final solution as a sequence of node coordinates in (x, y) format (dont skip any intermediate nodes), starting with the start node and ending with the end node, after this string: "####".
Example coordinate list: [(0,0), (1,0), (2,0), (2,1), ...])";

inline constexpr std::string_view kAlternative =
    R"(## Objective
You are a specialized AI proficient in spatial reasoning and solving puzzles from the game 'The Witness'. Your goal is to find a valid path (a continuous line) from the specified Start Node to the End Node on the provided grid, adhering to all puzzle rules.

## Core Concepts & Grid Basics
*   **Grid Dimensions:** The puzzle grid has {grid_size['width']} columns and {grid_size['height']} rows.
*   **Coordinate System:** Nodes are identified by `(x, y)` coordinates. `(0,0)` is the top-left node. `x` increases to the right, `y` increases downwards.
*   **Path:** The solution is a single, continuous line connecting adjacent nodes either horizontally or vertically.
*   **No Revisits:** The path **CANNOT** visit the same node more than once.
*   **Valid Path Cells:** The path travels along the grid lines (edges between nodes). It can only occupy positions marked `+` or `.` in the grid layout (these correspond to positions with at least one even coordinate).
*   **Rule Cells:** Cells containing rule symbols (squares, stars, etc.) have coordinates where both `x` and `y` are odd. The path goes *around* these rule cells, never *on* them.
*   **Regions:** The drawn path divides the grid cells into one or more distinct enclosed areas (regions). Many rules apply based on the contents of these regions.

## Puzzle Input Data
*   **Start Node:** {start_pos}
*   **End Node:** {end_pos}
*   **Grid Layout:**
    ```
    {grid_str}
    ```
*   **Polyshape Definitions (if applicable):**
    *   Shapes are defined by 2D arrays where '1' indicates an occupied cell and '0' indicates an empty cell.
    ```
    {polyshapes_str}
    ```

## Symbol Legend (Grid Notation)
*   `S`: **Start Node** (Path begins here)
*   `E`: **End Node** (Path ends here)
*   `+`: Valid cell for the path to occupy
*   `N`: Empty rule cell (no rule)
*   `G`: **Gap** (Path **CANNOT** cross this cell)
*   `.`: **Dot** (Path **MUST** pass through this cell)
*   `o-X`: **Square** of color X
*   `*-X`: **Star** of color X
*   `A-X`: **Triangle** (touch 1 edge)
*   `B-X`: **Triangle** (touch 2 edges)
*   `C-X`: **Triangle** (touch 3 edges)
*   `D-X`: **Triangle** (touch 4 edges)
*   `P-X-Y`: **Polyshape** (positive) of color X and shape ID Y
*   `Y-X-Y`: **Negative Polyshape** (ylop) of color X and shape ID Y

**Color Codes:** R=Red, B=Blue, G=Green, Y=Yellow, W=White, O=Orange, P=Purple, K=Black

## Detailed Solving Rules
The drawn path must satisfy **ALL** applicable constraints:

1.  **Path Constraints:**
    *   Path **MUST** start at `S` and end at `E`.
    *   Path connects adjacent nodes (horizontal/vertical moves only).
    *   Nodes **CANNOT** be revisited.
    *   Path **MUST** pass through all Dot (`.`) cells.
    *   Path **CANNOT** pass through any Gap (`G`) cells.

2.  **Region-Based Rules** (Apply to areas enclosed by the path):
    *   **Squares (`o-X`):** All squares within a single region **MUST** be the same color. Squares of different colors **MUST** be separated into different regions by the path.
    *   **Stars (`*-X`):** Within a single region, each star symbol **MUST** be paired with exactly **ONE** other element (star or square) *of the same color*. Other colors within the region are irrelevant to this specific star's rule.
    *   **Polyshapes (`P-X-Y`):** The region containing this symbol **MUST** be able to contain the specified shape (defined in Polyshape Definitions). The shape must fit entirely within the region's boundaries. If multiple positive polyshapes are in one region, the region must accommodate their combined, non-overlapping forms. Rotation of polyshapes is generally allowed unless context implies otherwise.
    *   **Negative Polyshapes (`Y-X-Y`):** These "subtract" shape requirements, typically within the same region as corresponding positive polyshapes. A negative polyshape cancels out a positive polyshape of the exact same shape and color within that region. If all positive shapes are canceled, the region has no shape constraint. A negative shape is only considered 'used' if it cancels a positive one. Negative shapes can sometimes rationalize apparent overlaps or boundary violations of positive shapes if interpreted as cancellations.

3.  **Path-Based Rules (Edge Touching):**
    *   **Triangles (`A-X`, `B-X`, `C-X`, `D-X`):** The path **MUST** touch a specific number of edges of the cell containing the triangle symbol.
        *   `A-X` (1): Path touches **EXACTLY 1** edge of the triangle's cell.
        *   `B-X` (2): Path touches **EXACTLY 2** edges of the triangle's cell.
        *   `C-X` (3): Path touches **EXACTLY 3** edges of the triangle's cell.
        *   `D-X` (4): Path touches **EXACTLY 4** edges (fully surrounds) the triangle's cell.

{example_section}

## Task & Output Format
1.  **Solve the Puzzle:** Determine the valid path from the Start Node to the End Node that satisfies all rules.
2.  **Explain Reasoning:** Provide a step-by-step explanation of your thought process. Detail key deductions, how constraints were applied, and any backtracking or choices made.
3.  **Provide Solution Path:** After the reasoning, output the exact marker string `####` followed immediately by the solution path as a list of node coordinates `(x, y)`. Include all intermediate nodes from start to end.

**Example Solution Path Format:**
####
[(0, 0), (1, 0), (2, 0), (2, 1), ...])";

inline constexpr std::string_view kVision =
    R"(You are an expert spatial reasoning AI specializing in solving puzzles from the game 'The Witness'. 
Your task is to solve the puzzle in the image by finding a valid line from the Start Node to the End Node.

The image shows a Witness puzzle grid of size {grid_size['width']*2}x{grid_size['height']*2}. In this puzzle:
- The solution is a continuous line from the start circle to the end marker
- The line travels along grid edges, connecting adjacent nodes horizontally or vertically
- The line cannot visit the same node twice
- The line must satisfy all constraints represented by the symbols on the grid
- The line can not be placed on rule cells
- The line can only travel 1 cell per step (no diagonal moves and provide each step as a separate coordinate)

COORDINATE SYSTEM: 
- Nodes are indexed (x, y) where (0,0) is the top-left node
- x increases to the right, y increases downward
- The grid cells have rule symbols located at cells with all odd coordinates
- The line goes AROUND cells containing rules, forming boundaries
- Both line and rule cells are on the same grid. Therefore each intersection has a distance of 2 to the next intersection.

SOLVING RULES:
1. Draw a continuous line from the START NODE (big circle on the line) to the END NODE (rounded end) without visiting the same node twice.
2. The line can only be placed on valid path cells.
3. The line acts as a boundary, potentially dividing the grid cells into one or more distinct regions.
4. All rules associated with symbols on the grid must be satisfied:
   - Dots: The line MUST pass through each dot.
   - Colored squares: All squares within a single region created by the line must be the same color. Different colored squares MUST be separated into different regions by the line.
   - Colored stars: Each star must be paired with EXACTLY one other element of the same color in a region. Other colors are ignored.
   - Triangles: The line must touch EXACTLY the number of edges specified by the number of triangles in that cell (edges are top, right, bottom, left of the cell).
   - Tetris-like polyomino shapes: The region containing this symbol must be shaped EXACTLY like the defined polyshape.
   - Negative polyshapes: These cancel out regular polyshapes if they overlap.

Text description of the puzzle:
{puzzle_data.get("text_visualization", "")}
{example_section}
Analyze the puzzle image carefully and determine the solution path.
First, explain your reasoning step-by-step, including key deductions and constraint checks made along the way.
Then, provide the final solution as a sequence of node coordinates in (x, y) format, starting with the start node and ending with the end node, after this string: "####".. DON'T SKIP ANY intermediate nodes (the distance between each node must be 1).
Example coordinate list: [(0,0), (1,0), (2,0), (2,1), ...])";

inline constexpr std::string_view kFirstExample =
    R"(EXAMPLE PUZZLE GRID:

["+",".","+","+","+","E","+"]
["+","C-R","+","o-K","+","o-K","+"]
["S","+","+","+","+","+","+"]
["+","P-G-112","+","*-G","+","P-B-624","+"]
["+","+","+","+","+","+","+"]
["+","*-G","+","*-G","+","o-K","+"]
["+","+","+",".","+","+","+"]

EXAMPLE POLYSHAPE DEFINITIONS:
Shape 112:
[0,1,0,0]
[0,1,0,0]
[0,1,0,0]
[0,0,0,0]

Shape 624:
[0,1,0,0]
[0,1,1,0]
[0,1,0,0]
[0,0,0,0]

EXAMPLE SOLUTION:

We start at (0,2) and draw a line to (0,0).
We then draw a line to (2,0) to reach the dot at (1,0) and surround the 3 count triangle.
We then draw a line to (2,2) here we go down to touch the third side of the triangle cell and therefore validate the 3 count triangle.
We continue down to (2,6) to validate the polyshape 112 and also the green star with the green polyshape
After this we draw a line to (4,6) to start validating the polyshape 624 by surrounding it.
Therefore we have to draw a line to (6,4) over (4,4) which creates a region for the stone at (5,5) which validates the stone.
We continue up to (6,2) for the polyshape 624 and then go to (4,2) and after this to (4,0) to finaly validate the polyshape 624.
This also validates the two green stars at (3,3) and (3,5) with each other and the black stone at (3,1) because its the only stone in its region.
This line also creates a region for the black stone at (5,1) because its the only stone in its region.
Now we can draw a line to (5,0) to reach the end node.

#### (0,2),(0,1),(0,0),(1,0),(2,0),(2,1),(2,2),(2,3),(2,4),(2,5),(2,6),(3,6),(4,6),(4,5),(4,4),(5,4),(6,4),(6,3),(6,2),(5,2),(4,2),(4,1),(4,0),(5,0)
)";

inline constexpr std::string_view kSecondExample =
    R"(SECOND EXAMPLE PUZZLE GRID:
["+","E","+","+","+","+","+","+","+"]
["+","N","+","N","+","o-B","+","N","S"]
["+","+","+","+","+","+","+","+","+"]
["+","P-W-8992","G","Y-W-18","+","P-W-48","+","P-W-48","+"]
["+","+","+","G","+","+","+","+","+"]

SECOND EXAMPLE POLYSHAPE DEFINITIONS:
Shape 18:
[0,1,0,0]
[1,0,0,0]
[0,0,0,0]
[0,0,0,0]

Shape 48:
[0,1,0,0]
[0,1,0,0]
[0,0,0,0]
[0,0,0,0]

Shape 8992:
[0,0,1,0]
[0,1,1,1]
[0,0,0,0]
[0,0,0,0]

SECOND EXAMPLE SOLUTION:

We start at (8,1) and draw a line to (8,2).
Then we draw a straight line to (4,2).
From here we go up to (4,0).
This creates one region with only a blue stone at (5,1) which makes it valid.
The other region contains numerus polyshapes and ylops. But the region already has a valid shape.
The P-W-8992 gets placed on the bottom left and combined with the Y-W-18 to form a 2x1 region.
The other part of the region can exactly be formed by the two P-W-48 polyshapes.
Now we can draw a line to (1,0) to reach the end node.

#### (8,1),(8,2),(7,2),(6,2),(5,2),(4,2),(4,1),(4,0),(3,0),(2,0),(1,0))";

inline std::string substitute(std::string_view text, const std::vector<std::pair<std::string, std::string>>& values) {
  std::string out(text);
  for (const auto& [key, value] : values) {
    for (std::size_t at = out.find(key); at != std::string::npos; at = out.find(key, at + value.size()))
      out.replace(at, key.size(), value);
  }
  return out;
}

}  // namespace prompts

// "Shape <id>:" followed by the 4x4 array, one block per shape, ascending id.
inline std::string polyshapes_text(const Puzzle& p) {
  std::string out;
  for (const auto& [id, cells] : p.polyshapes()) {
    if (!out.empty()) out += "\n\n";
    out += "Shape " + std::to_string(id.value) + ":\n" + format_shape(id);
  }
  return out;
}

inline std::string example_section(int shots) {
  if (shots < 0 || shots > 2) throw Error("shots must be 0, 1 or 2");
  std::string out;
  if (shots >= 1) out += prompts::kFirstExample;
  if (shots >= 2) {
    out += '\n';
    out += prompts::kSecondExample;
  }
  return out;
}

inline std::string render_prompt(const Puzzle& p, const PromptTemplate& tpl = {}) {
  const std::string grid = serialize_grid(p);
  const std::string shapes = polyshapes_text(p);
  std::string text_visualization = "PUZZLE GRID:\n" + grid;
  if (!shapes.empty()) text_visualization += "\n\nPOLYSHAPE DEFINITIONS:\n" + shapes;
  std::string examples = example_section(tpl.shots);
  std::string_view body = prompts::kDefault;
  if (tpl.variant == PromptVariant::alternative) body = prompts::kAlternative;
  if (tpl.variant == PromptVariant::vision_text) {
    body = prompts::kVision;
    if (!examples.empty()) examples = "\n" + examples;
  }
  // Example text goes in last so its contents are never treated as keys.
  auto out = prompts::substitute(body, {
                                           {"{grid_size['width']*2}", std::to_string(p.width() * 2)},
                                           {"{grid_size['height']*2}", std::to_string(p.height() * 2)},
                                           {"{grid_size['width']}", std::to_string(p.width())},
                                           {"{grid_size['height']}", std::to_string(p.height())},
                                           {"{start_pos}", format_pos(p.start())},
                                           {"{end_pos}", format_pos(p.end())},
                                           {"{puzzle_data.get(\"text_visualization\", \"\")}", text_visualization},
                                           {"{grid_str}", grid},
                                           {"{polyshapes_str}", shapes},
                                       });
  return prompts::substitute(out, {{"{example_section}", examples}});
}

// ---------------------------------------------------------------------------
// Answer extraction

enum class ExtractionError { no_delimiter, no_coordinates, malformed_pair };

inline const char* to_string(ExtractionError e) {
  switch (e) {
    case ExtractionError::no_delimiter: return "NoDelimiter";
    case ExtractionError::no_coordinates: return "NoCoordinates";
    case ExtractionError::malformed_pair: return "MalformedPair";
  }
  return "?";
}

struct ExtractionResult {
  std::optional<Path> path;
  std::optional<ExtractionError> error;
};

// Reads every "(x,y)" pair after the last "####". Fewer than two pairs is an
// error: MalformedPair when something pair-like is present, else NoCoordinates.
inline ExtractionResult extract_answer(std::string_view output) {
  const auto at = output.rfind("####");
  if (at == std::string_view::npos) return {std::nullopt, ExtractionError::no_delimiter};
  const std::string tail(output.substr(at + 4));
  static const std::regex pair_re(R"(\(\s*(-?\d{1,9})\s*,\s*(-?\d{1,9})\s*\))");
  Path path;
  for (auto it = std::sregex_iterator(tail.begin(), tail.end(), pair_re); it != std::sregex_iterator(); ++it)
    path.push_back({std::stoi((*it)[1].str()), std::stoi((*it)[2].str())});
  if (path.size() >= 2) return {std::move(path), std::nullopt};
  static const std::regex partial_re(R"(\(\s*-?\d)");
  if (!path.empty() || std::regex_search(tail, partial_re)) return {std::nullopt, ExtractionError::malformed_pair};
  return {std::nullopt, ExtractionError::no_coordinates};
}

// ---------------------------------------------------------------------------
// Grading

struct GradeRecord {
  std::string puzzle_id;
  std::optional<Path> path;
  std::optional<ExtractionError> extraction_error;
  StructuralVerdict structural;
  std::vector<RuleFailure> failures;
  bool solved = false;

  bool extracted() const { return path.has_value(); }
  friend bool operator==(const GradeRecord&, const GradeRecord&) = default;
};

inline GradeRecord grade(const Puzzle& p, std::string_view output) {
  GradeRecord r;
  r.puzzle_id = p.id();
  auto ex = extract_answer(output);
  if (!ex.path) {
    r.extraction_error = ex.error;
    r.structural.invalid_path = true;
    return r;
  }
  auto v = check_solution(p, *ex.path);
  r.path = std::move(ex.path);
  r.structural = v.structural;
  r.failures = std::move(v.failures);
  r.solved = v.solved;
  return r;
}

inline std::optional<RuleKind> parse_rule_kind(std::string_view s) {
  for (auto k : kAllRuleKinds)
    if (s == to_string(k)) return k;
  return std::nullopt;
}

inline nlohmann::json to_json(const GradeRecord& r) {
  using nlohmann::json;
  json j;
  j["puzzle_id"] = r.puzzle_id;
  j["extracted"] = r.extracted();
  j["extraction_error"] = r.extraction_error ? json(to_string(*r.extraction_error)) : json(nullptr);
  if (r.path) {
    json path = json::array();
    for (const auto& q : *r.path) path.push_back(json::array({q.x, q.y}));
    j["path"] = std::move(path);
  } else {
    j["path"] = nullptr;
  }
  j["flags"] = {{"incorrect_start_end", r.structural.incorrect_start_end},
                {"disconnected_line", r.structural.disconnected_line},
                {"intersecting_line", r.structural.intersecting_line},
                {"rule_cell_crossing", r.structural.rule_cell_crossing},
                {"invalid_path", r.structural.invalid_path}};
  json failures = json::array();
  for (const auto& f : r.failures)
    failures.push_back(
        {{"position", json::array({f.position.x, f.position.y})}, {"rule", to_string(f.rule)}, {"detail", f.detail}});
  j["failures"] = std::move(failures);
  j["solved"] = r.solved;
  return j;
}

inline GradeRecord grade_record_from_json(const nlohmann::json& j) {
  try {
    GradeRecord r;
    r.puzzle_id = j.at("puzzle_id").get<std::string>();
    if (j.contains("extraction_error") && !j["extraction_error"].is_null()) {
      const auto e = j["extraction_error"].get<std::string>();
      for (auto k : {ExtractionError::no_delimiter, ExtractionError::no_coordinates, ExtractionError::malformed_pair})
        if (e == to_string(k)) r.extraction_error = k;
      if (!r.extraction_error) throw Error("unknown extraction error: " + e);
    }
    if (j.contains("path") && !j["path"].is_null()) {
      Path path;
      for (const auto& q : j["path"]) path.push_back({q.at(0).get<int>(), q.at(1).get<int>()});
      r.path = std::move(path);
    }
    const auto& f = j.at("flags");
    r.structural.incorrect_start_end = f.at("incorrect_start_end").get<bool>();
    r.structural.disconnected_line = f.at("disconnected_line").get<bool>();
    r.structural.intersecting_line = f.at("intersecting_line").get<bool>();
    r.structural.rule_cell_crossing = f.at("rule_cell_crossing").get<bool>();
    r.structural.invalid_path = f.at("invalid_path").get<bool>();
    for (const auto& x : j.value("failures", nlohmann::json::array())) {
      RuleFailure rf;
      rf.position = {x.at("position").at(0).get<int>(), x.at("position").at(1).get<int>()};
      const auto kind = parse_rule_kind(x.at("rule").get<std::string>());
      if (!kind) throw Error("unknown rule kind in failure record");
      rf.rule = *kind;
      rf.detail = x.value("detail", "");
      r.failures.push_back(std::move(rf));
    }
    r.solved = j.at("solved").get<bool>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed grade record: ") + e.what());
  }
}

}  // namespace sparc
