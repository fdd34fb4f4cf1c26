#include <doctest.h>

#include <algorithm>
#include <string>

#include "atsmc/parser.hpp"
#include "atsmc/rng.hpp"
#include "support/random_tree.hpp"

using namespace atsmc;

namespace {

const char* kSample =
    "tree demo {\n"
    "  root G\n"
    "  gate G = OR(A, S)\n"
    "  gate S = SAND(B, C)\n"
    "  leaf A rate=0.01\n"
    "  leaf B rate=0.02\n"
    "  leaf C rate=0.005\n"
    "}\n";

bool has_kind(const ParseResult& r, ParseErrorKind kind) {
  return std::any_of(r.errors.begin(), r.errors.end(),
                     [&](const ParseError& e) { return e.kind == kind; });
}

}  // namespace

TEST_CASE("DSL happy path") {
  ParseResult r = parse_model(kSample);
  REQUIRE(r.ok());
  CHECK(r.tree->name == "demo");
  CHECK(r.tree->top_event == "G");
  CHECK(r.tree->nodes.size() == 5);
  CHECK(r.tree->find("S")->gate()->kind == GateKind::Sand);
  CHECK(r.tree->find("C")->leaf()->rate.lambda == 0.005);
  CHECK(r.tree->find("A")->label == "A");
}

TEST_CASE("comments and blank lines are skipped") {
  ParseResult r = parse_model(
      "# header comment\n"
      "tree t {  # trailing\n"
      "\n"
      "  root X\n"
      "  leaf X rate=0.5   # rate comment\n"
      "}\n");
  REQUIRE(r.ok());
  CHECK(r.tree->nodes.size() == 1);
}

TEST_CASE("syntax errors carry 1-indexed spans") {
  ParseResult r = parse_model("tree t {\n  root X\n  leaf X rate=oops\n}\n");
  REQUIRE_FALSE(r.ok());
  CHECK(r.has_syntax_errors());
  REQUIRE_FALSE(r.errors.empty());
  CHECK(r.errors[0].kind == ParseErrorKind::Syntax);
  CHECK(r.errors[0].span.line == 3);
  CHECK(r.errors[0].span.column == 15);
}

TEST_CASE("undeclared references are reported with kind reference") {
  ParseResult r = parse_model(
      "tree t {\n  root G\n  gate G = OR(A, Ghost)\n  leaf A rate=0.1\n}\n");
  REQUIRE_FALSE(r.ok());
  CHECK_FALSE(r.has_syntax_errors());
  CHECK(has_kind(r, ParseErrorKind::Reference));
  CHECK(r.errors[0].message == "reference to undeclared node 'Ghost'");
  CHECK(r.errors[0].span.line == 3);
}

TEST_CASE("duplicate declarations are reported with kind duplicate") {
  ParseResult r = parse_model(
      "tree t {\n  root X\n  leaf X rate=0.1\n  leaf X rate=0.2\n}\n");
  REQUIRE_FALSE(r.ok());
  CHECK(has_kind(r, ParseErrorKind::Duplicate));
  CHECK(r.errors[0].span.line == 4);
}

TEST_CASE("SAND arity is enforced at parse time") {
  ParseResult r = parse_model(
      "tree t {\n  root G\n  gate G = SAND(A)\n  leaf A rate=0.1\n}\n");
  REQUIRE_FALSE(r.ok());
  CHECK(r.has_syntax_errors());
  CHECK(r.errors[0].message == "SAND gate 'G' needs at least 2 children");
}

TEST_CASE("parser recovers at declaration boundaries") {
  ParseResult r = parse_model(
      "tree t {\n"
      "  root G\n"
      "  gate G = XOR(A, B)\n"
      "  gate H = OR(A B)\n"
      "  leaf A rate=0.1\n"
      "  leaf B rate=0.2\n"
      "}\n");
  REQUIRE_FALSE(r.ok());
  CHECK(r.errors.size() >= 2);
  CHECK(r.errors[0].message == "unknown gate kind 'XOR'");
}

TEST_CASE("error count is capped") {
  std::string text = "tree t {\n  root X\n";
  for (int i = 0; i < 200; ++i) text += "  leaf X rate=\n";
  text += "}\n";
  ParseResult r = parse_model(text);
  REQUIRE_FALSE(r.ok());
  CHECK(r.errors.size() == 64);
}

TEST_CASE("parser never throws on junk") {
  CHECK_FALSE(parse_model("").ok());
  CHECK_FALSE(parse_model("tree").ok());
  CHECK_FALSE(parse_model("{}{}((((").ok());
  CHECK_FALSE(parse_model("tree t { root G }").ok());
  CHECK_FALSE(parse_model(std::string(3, '\0') + "tree").ok());
}

TEST_CASE("to_string names each error kind") {
  CHECK(std::string(to_string(ParseErrorKind::Lexical)) == "lexical");
  CHECK(std::string(to_string(ParseErrorKind::Syntax)) == "syntax");
  CHECK(std::string(to_string(ParseErrorKind::Reference)) == "reference");
  CHECK(std::string(to_string(ParseErrorKind::Duplicate)) == "duplicate");
}

TEST_CASE("DSL serialization round-trips and is idempotent") {
  ParseResult r = parse_model(kSample);
  REQUIRE(r.ok());
  std::string once = serialize_model(*r.tree, ModelFormat::Dsl);
  ParseResult r2 = parse_model(once);
  REQUIRE(r2.ok());
  CHECK(trees_equal(*r.tree, *r2.tree));
  CHECK(serialize_model(*r2.tree, ModelFormat::Dsl) == once);
}

TEST_CASE("JSON serialization round-trips") {
  ParseResult r = parse_model(kSample);
  REQUIRE(r.ok());
  std::string doc = serialize_model(*r.tree, ModelFormat::Json);
  ParseResult r2 = parse_model_json(doc);
  REQUIRE(r2.ok());
  CHECK(trees_equal(*r.tree, *r2.tree));
  CHECK(serialize_model(*r2.tree, ModelFormat::Json) == doc);
}

TEST_CASE("JSON parser flags malformed documents as lexical") {
  ParseResult r = parse_model_json("{\"name\": ");
  REQUIRE_FALSE(r.ok());
  CHECK(has_kind(r, ParseErrorKind::Lexical));
  CHECK(r.has_syntax_errors());
}

TEST_CASE("JSON parser flags schema problems") {
  CHECK_FALSE(parse_model_json("[]").ok());
  CHECK_FALSE(parse_model_json("{\"top_event\": 3, \"nodes\": {}}").ok());
  ParseResult r = parse_model_json(
      "{\"top_event\": \"X\", \"nodes\": {\"X\": {\"leaf\": {\"rate\": 0.1},"
      " \"gate\": {\"kind\": \"OR\", \"children\": []}}}}");
  REQUIRE_FALSE(r.ok());
  CHECK(r.errors[0].message == "node 'X' must have exactly one of 'gate' or 'leaf'");
}

TEST_CASE("JSON parser reports semantic violations as reference errors") {
  ParseResult r = parse_model_json(
      "{\"top_event\": \"G\", \"nodes\": {"
      "\"G\": {\"gate\": {\"kind\": \"OR\", \"children\": [\"A\", \"Z\"]}},"
      "\"A\": {\"leaf\": {\"rate\": 0.1}}}}");
  REQUIRE_FALSE(r.ok());
  CHECK_FALSE(r.has_syntax_errors());
  CHECK(has_kind(r, ParseErrorKind::Reference));
}

TEST_CASE("format_rate renders exact short decimals") {
  CHECK(format_rate(0.0) == "0");
  CHECK(format_rate(0.01) == "0.01");
  CHECK(format_rate(0.002) == "0.002");
  CHECK(format_rate(1.0) == "1");
  CHECK(format_rate(0.1 + 0.2) == "0.30000000000000004");
  CHECK_THROWS_AS(format_rate(-1.0), std::invalid_argument);
  for (double v : {0.006892, 0.000347, 123.456, 1e-9, 0.3}) {
    CHECK(std::strtod(format_rate(v).c_str(), nullptr) == v);
  }
}

TEST_CASE("scenario lists parse against a tree") {
  ParseResult model = parse_model(kSample);
  REQUIRE(model.ok());

  ScenarioParseResult r = parse_scenarios(
      "{\"cold\": 0.001, \"scenarios\": ["
      "{\"name\": \"s1\", \"hot\": [\"A\"]},"
      "{\"name\": \"s2\", \"hot\": [\"B\", \"C\"]}]}",
      *model.tree);
  REQUIRE(r.ok());
  REQUIRE(r.scenarios.size() == 2);
  CHECK(r.scenarios[0].name == "s1");
  CHECK(r.scenarios[0].cold_rate.lambda == 0.001);
  CHECK(r.scenarios[1].hot == std::vector<std::string>{"B", "C"});

  ScenarioParseResult dflt = parse_scenarios(
      "{\"scenarios\": [{\"name\": \"s\", \"hot\": [\"A\"]}]}", *model.tree);
  REQUIRE(dflt.ok());
  CHECK(dflt.scenarios[0].cold_rate.lambda == 0.002);
}

TEST_CASE("scenario lists reject unknown and non-leaf hot ids") {
  ParseResult model = parse_model(kSample);
  REQUIRE(model.ok());

  ScenarioParseResult bad = parse_scenarios(
      "{\"scenarios\": [{\"name\": \"s\", \"hot\": [\"Ghost\"]}]}", *model.tree);
  CHECK_FALSE(bad.ok());
  CHECK(bad.scenarios.empty());
  CHECK(bad.errors[0].kind == ParseErrorKind::Reference);

  ScenarioParseResult gate = parse_scenarios(
      "{\"scenarios\": [{\"name\": \"s\", \"hot\": [\"G\"]}]}", *model.tree);
  CHECK_FALSE(gate.ok());
  CHECK(gate.errors[0].message == "scenario 's': node 'G' is a gate, not a leaf");

  CHECK_FALSE(parse_scenarios("{\"cold\": 0, \"scenarios\": []}", *model.tree).ok());
  CHECK_FALSE(parse_scenarios("not json", *model.tree).ok());
  CHECK_FALSE(parse_scenarios("{\"scenarios\": 7}", *model.tree).ok());
}

TEST_CASE("random trees survive both round-trips") {
  SplitMix64 rng(20260822);
  for (int i = 0; i < 200; ++i) {
    AttackTree t = testgen::random_tree(rng, 24);
    REQUIRE(validate_tree(t).empty());

    ParseResult dsl = parse_model(serialize_model(t, ModelFormat::Dsl));
    REQUIRE(dsl.ok());
    CHECK(trees_equal(t, *dsl.tree));

    ParseResult js = parse_model_json(serialize_model(t, ModelFormat::Json));
    REQUIRE(js.ok());
    CHECK(trees_equal(t, *js.tree));
  }
}

TEST_CASE("mutated documents never crash the parser") {
  SplitMix64 rng(99);
  std::string base = kSample;
  for (int i = 0; i < 500; ++i) {
    std::string text = base;
    int edits = 1 + int(rng.next() % 4);
    for (int e = 0; e < edits; ++e) {
      std::size_t pos = rng.next() % text.size();
      switch (rng.next() % 3) {
        case 0: text[pos] = char(rng.next() % 256); break;
        case 1: text.erase(pos, 1 + rng.next() % 5); break;
        default: text.insert(pos, 1, char('!' + rng.next() % 90)); break;
      }
      if (text.empty()) text = "x";
    }
    ParseResult r = parse_model(text);
    for (const ParseError& err : r.errors) {
      CHECK(err.span.line >= 1);
      CHECK(err.span.column >= 1);
    }
  }
}
