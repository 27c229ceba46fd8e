#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace sparc {

// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ParseErrc {
  unknown_token,
  ragged_rows,
  misplaced_token,
  missing_start_or_end,
  duplicate_start_or_end,
  malformed_row,
};

inline const char* to_string(ParseErrc c) {
  switch (c) {
    case ParseErrc::unknown_token: return "UnknownToken";
    case ParseErrc::ragged_rows: return "RaggedRows";
    case ParseErrc::misplaced_token: return "MisplacedToken";
    case ParseErrc::missing_start_or_end: return "MissingStartOrEnd";
    case ParseErrc::duplicate_start_or_end: return "DuplicateStartOrEnd";
    case ParseErrc::malformed_row: return "MalformedRow";
  }
  return "?";
}

class ParseError : public Error {
 public:
  ParseError(ParseErrc code, const std::string& what)
      : Error(std::string(to_string(code)) + ": " + what), code_(code) {}
  ParseErrc code() const noexcept { return code_; }

 private:
  ParseErrc code_;
};

enum class ShapeErrc { zero_shape, out_of_window };

class ShapeError : public Error {
 public:
  ShapeError(ShapeErrc code, const std::string& what) : Error(what), code_(code) {}
  ShapeErrc code() const noexcept { return code_; }

 private:
  ShapeErrc code_;
};

// Dataset record failed schema validation; line is 1-based.
class SchemaViolation : public Error {
 public:
  SchemaViolation(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class StructurallyInvalidPath : public Error {
 public:
  StructurallyInvalidPath() : Error("path is structurally invalid") {}
};

// Solver hit its expansion budget before finishing.
class BudgetExceeded : public Error {
 public:
  explicit BudgetExceeded(std::uint64_t expansions)
      : Error("solver budget exceeded after " + std::to_string(expansions) + " expansions"),
        expansions_(expansions) {}
  std::uint64_t expansions() const noexcept { return expansions_; }

 private:
  std::uint64_t expansions_;
};

class Exhausted : public Error {
 public:
  using Error::Error;
};

class DegenerateCorpus : public Error {
 public:
  using Error::Error;
};

class EndpointUnreachable : public Error {
 public:
  using Error::Error;
};

// A file could not be read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace sparc
