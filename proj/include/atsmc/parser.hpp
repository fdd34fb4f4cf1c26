#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "atsmc/model.hpp"

namespace atsmc {

/// 1-indexed position of a diagnostic in the source text.
struct SourceSpan {
  int line = 1;
  int column = 1;
  int length = 0;
};

enum class ParseErrorKind { Lexical, Syntax, Reference, Duplicate };

const char* to_string(ParseErrorKind kind);

struct ParseError {
  SourceSpan span;
  ParseErrorKind kind = ParseErrorKind::Syntax;
  std::string message;
};

/// Result of parsing a model document.  `tree` is set only when the document
/// produced a tree that passes validate_tree().
struct ParseResult {
  std::optional<AttackTree> tree;
  std::vector<ParseError> errors;

  bool ok() const { return tree.has_value() && errors.empty(); }

  /// True when the text itself could not be read (lexical/syntax trouble),
  /// as opposed to a readable document describing an invalid model.
  bool has_syntax_errors() const;
};

// Text DSL, one declaration per statement:
//
//   tree <name> {
//     root <id>
//     gate <id> = OR(<id>, <id>, ...)      # also AND, SAND
//     leaf <id> rate=<decimal float>
//   }
//
// '#' starts a comment that runs to end of line.  Floats are plain decimal
// (no exponent).  References may appear before their declaration; resolution
// is a second pass.  The parser recovers at declaration boundaries and
// reports every error with a source span; it never throws on arbitrary input.
ParseResult parse_model(std::string_view text);

/// JSON document form, see serialize_model(..., ModelFormat::Json).
/// Semantic errors carry a (1,1) span since positions are lost after decode.
ParseResult parse_model_json(std::string_view text);

enum class ModelFormat { Dsl, Json };

/// Deterministic serialization: nodes in topological order from the top
/// event, declaration order breaking ties.  parse(serialize(t)) is
/// structurally equal to t for valid trees (DSL assumes label == id).
std::string serialize_model(const AttackTree& tree, ModelFormat format);

/// Structural tree equality: same name, top, node set with identical kind,
/// label, child order and bit-exact rates.
bool trees_equal(const AttackTree& a, const AttackTree& b);

struct ScenarioParseResult {
  std::vector<ScenarioSpec> scenarios;
  std::vector<ParseError> errors;

  bool ok() const { return errors.empty(); }
};

// Scenario list JSON:
//   {"cold": 0.002, "scenarios": [{"name": "TS7", "hot": ["SyncFlood"]}, ...]}
// "cold" is optional and defaults to 0.002.  Hot ids must name leaves of
// `tree`; the cold rate must be positive.
ScenarioParseResult parse_scenarios(std::string_view json, const AttackTree& tree);

/// Exact decimal rendering of a nonnegative double without an exponent, as
/// required by the DSL grammar.  Round-trips through strtod bit-exactly.
std::string format_rate(double value);

}  // namespace atsmc
