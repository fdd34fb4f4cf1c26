#include "atsmc/parser.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <queue>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "atsmc/errors.hpp"

namespace atsmc {

const char* to_string(ParseErrorKind kind) {
  switch (kind) {
    case ParseErrorKind::Lexical: return "lexical";
    case ParseErrorKind::Syntax: return "syntax";
    case ParseErrorKind::Reference: return "reference";
    case ParseErrorKind::Duplicate: return "duplicate";
  }
  return "?";
}

bool ParseResult::has_syntax_errors() const {
  return std::any_of(errors.begin(), errors.end(), [](const ParseError& e) {
    return e.kind == ParseErrorKind::Lexical || e.kind == ParseErrorKind::Syntax;
  });
}

namespace {

constexpr std::size_t kMaxErrors = 64;

enum class Tok {
  Ident, Float, LBrace, RBrace, LParen, RParen, Comma, Equals, End
};

struct Token {
  Tok kind = Tok::End;
  std::string_view text;
  double number = 0.0;
  SourceSpan span;
};

bool ident_start(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}
bool ident_char(char c) { return ident_start(c) || (c >= '0' && c <= '9'); }
bool digit(char c) { return c >= '0' && c <= '9'; }

class Lexer {
 public:
  Lexer(std::string_view text, std::vector<ParseError>& errors)
      : text_(text), errors_(errors) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_space_and_comments();
      if (pos_ >= text_.size()) break;
      SourceSpan span{line_, col_, 1};
      char c = text_[pos_];
      if (ident_start(c)) {
        std::size_t start = pos_;
        while (pos_ < text_.size() && ident_char(text_[pos_])) advance();
        span.length = static_cast<int>(pos_ - start);
        out.push_back({Tok::Ident, text_.substr(start, pos_ - start), 0.0, span});
      } else if (digit(c)) {
        lex_number(out, span);
      } else {
        switch (c) {
          case '{': push_sym(out, Tok::LBrace, span); break;
          case '}': push_sym(out, Tok::RBrace, span); break;
          case '(': push_sym(out, Tok::LParen, span); break;
          case ')': push_sym(out, Tok::RParen, span); break;
          case ',': push_sym(out, Tok::Comma, span); break;
          case '=': push_sym(out, Tok::Equals, span); break;
          default:
            error(span, "unexpected character");
            advance();
        }
      }
      if (errors_.size() >= kMaxErrors) break;
    }
    out.push_back({Tok::End, {}, 0.0, SourceSpan{line_, col_, 0}});
    return out;
  }

 private:
  void push_sym(std::vector<Token>& out, Tok kind, SourceSpan span) {
    out.push_back({kind, text_.substr(pos_, 1), 0.0, span});
    advance();
  }

  // FLOAT := digits ('.' digits)?   -- plain decimal, no exponent, no sign
  void lex_number(std::vector<Token>& out, SourceSpan span) {
    std::size_t start = pos_;
    while (pos_ < text_.size() && digit(text_[pos_])) advance();
    if (pos_ < text_.size() && text_[pos_] == '.') {
      advance();
      if (pos_ >= text_.size() || !digit(text_[pos_])) {
        span.length = static_cast<int>(pos_ - start);
        error(span, "malformed number: expected digits after '.'");
        return;
      }
      while (pos_ < text_.size() && digit(text_[pos_])) advance();
    }
    span.length = static_cast<int>(pos_ - start);
    std::string buf(text_.substr(start, pos_ - start));
    double value = std::strtod(buf.c_str(), nullptr);
    if (!std::isfinite(value)) {
      error(span, "number out of range");
      return;
    }
    out.push_back({Tok::Float, text_.substr(start, pos_ - start), value, span});
  }

  void skip_space_and_comments() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else {
        break;
      }
    }
  }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void error(SourceSpan span, std::string message) {
    if (errors_.size() < kMaxErrors)
      errors_.push_back({span, ParseErrorKind::Lexical, std::move(message)});
  }

  std::string_view text_;
  std::vector<ParseError>& errors_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

// Recursive-descent parser over the token stream.  Declarations are collected
// first; reference resolution and structural validation run as a second pass
// so that forward references parse cleanly.
class DslParser {
 public:
  explicit DslParser(std::string_view text) : text_(text) {}

  ParseResult run() {
    ParseResult result;
    Lexer lexer(text_, result.errors);
    tokens_ = lexer.run();

    parse_tree(result);

    if (result.errors.empty()) resolve(result);
    if (!result.errors.empty()) result.tree.reset();
    return result;
  }

 private:
  const Token& cur() const { return tokens_[idx_]; }
  const Token& take() { return tokens_[idx_ < tokens_.size() - 1 ? idx_++ : idx_]; }
  bool at(Tok kind) const { return cur().kind == kind; }
  bool at_keyword(std::string_view kw) const {
    return cur().kind == Tok::Ident && cur().text == kw;
  }

  void error(ParseResult& r, SourceSpan span, ParseErrorKind kind, std::string msg) {
    if (r.errors.size() < kMaxErrors) r.errors.push_back({span, kind, std::move(msg)});
  }

  // Skip tokens until the next declaration keyword or closing brace.
  void recover() {
    while (!at(Tok::End) && !at(Tok::RBrace) && !at_keyword("root") &&
           !at_keyword("gate") && !at_keyword("leaf"))
      take();
  }

  bool expect_ident(ParseResult& r, Token& out, const char* what) {
    if (!at(Tok::Ident)) {
      error(r, cur().span, ParseErrorKind::Syntax,
            std::string("expected ") + what);
      return false;
    }
    out = take();
    return true;
  }

  bool expect(ParseResult& r, Tok kind, const char* what) {
    if (!at(kind)) {
      error(r, cur().span, ParseErrorKind::Syntax,
            std::string("expected ") + what);
      return false;
    }
    take();
    return true;
  }

  void parse_tree(ParseResult& r) {
    tree_.name.clear();
    if (!at_keyword("tree")) {
      error(r, cur().span, ParseErrorKind::Syntax, "expected 'tree'");
    } else {
      take();
      Token name;
      if (expect_ident(r, name, "tree name")) tree_.name = name.text;
    }
    if (!expect(r, Tok::LBrace, "'{'")) {
      recover();
      if (at(Tok::End)) return;
    }

    while (!at(Tok::RBrace) && !at(Tok::End)) {
      if (at_keyword("root")) {
        parse_root(r);
      } else if (at_keyword("gate")) {
        parse_gate(r);
      } else if (at_keyword("leaf")) {
        parse_leaf(r);
      } else {
        error(r, cur().span, ParseErrorKind::Syntax,
              "expected 'root', 'gate' or 'leaf' declaration");
        take();
        recover();
      }
      if (r.errors.size() >= kMaxErrors) return;
    }
    if (!expect(r, Tok::RBrace, "'}'")) return;
    if (!at(Tok::End))
      error(r, cur().span, ParseErrorKind::Syntax, "unexpected text after tree");
  }

  void parse_root(ParseResult& r) {
    Token kw = take();
    Token id;
    if (!expect_ident(r, id, "root node id")) {
      recover();
      return;
    }
    if (have_root_) {
      error(r, kw.span, ParseErrorKind::Duplicate, "duplicate root declaration");
      return;
    }
    have_root_ = true;
    root_span_ = id.span;
    tree_.top_event = id.text;
  }

  void parse_gate(ParseResult& r) {
    take();  // 'gate'
    Token id, kind_tok;
    if (!expect_ident(r, id, "gate id") || !expect(r, Tok::Equals, "'='") ||
        !expect_ident(r, kind_tok, "gate kind (OR, AND or SAND)")) {
      recover();
      return;
    }
    auto kind = gate_kind_from(kind_tok.text);
    if (!kind) {
      error(r, kind_tok.span, ParseErrorKind::Syntax,
            "unknown gate kind '" + std::string(kind_tok.text) + "'");
      recover();
      return;
    }
    if (!expect(r, Tok::LParen, "'('")) {
      recover();
      return;
    }
    std::vector<Token> children;
    Token child;
    if (!expect_ident(r, child, "child id")) {
      recover();
      return;
    }
    children.push_back(child);
    while (at(Tok::Comma)) {
      take();
      if (!expect_ident(r, child, "child id")) {
        recover();
        return;
      }
      children.push_back(child);
    }
    if (!expect(r, Tok::RParen, "')'")) {
      recover();
      return;
    }
    if (*kind == GateKind::Sand && children.size() < 2) {
      error(r, id.span, ParseErrorKind::Syntax,
            "SAND gate '" + std::string(id.text) + "' needs at least 2 children");
      return;
    }
    if (!declare(r, id)) return;
    Gate gate{*kind, {}};
    for (const Token& c : children) gate.children.emplace_back(c.text);
    tree_.nodes.push_back({std::string(id.text), std::string(id.text), gate});
    child_spans_.push_back({tree_.nodes.size() - 1, std::move(children)});
  }

  void parse_leaf(ParseResult& r) {
    take();  // 'leaf'
    Token id;
    if (!expect_ident(r, id, "leaf id")) {
      recover();
      return;
    }
    if (!at_keyword("rate")) {
      error(r, cur().span, ParseErrorKind::Syntax, "expected 'rate'");
      recover();
      return;
    }
    take();
    if (!expect(r, Tok::Equals, "'='")) {
      recover();
      return;
    }
    if (!at(Tok::Float)) {
      error(r, cur().span, ParseErrorKind::Syntax,
            "expected decimal rate value");
      recover();
      return;
    }
    Token value = take();
    if (!declare(r, id)) return;
    tree_.nodes.push_back(
        {std::string(id.text), std::string(id.text), Leaf{Rate{value.number}}});
  }

  bool declare(ParseResult& r, const Token& id) {
    auto [it, inserted] = decl_spans_.emplace(std::string(id.text), id.span);
    (void)it;
    if (!inserted) {
      error(r, id.span, ParseErrorKind::Duplicate,
            "node id '" + std::string(id.text) + "' declared more than once");
      return false;
    }
    return true;
  }

  // Second pass: reference resolution plus the structural rules from
  // validate_tree(), each mapped back to a source span.
  void resolve(ParseResult& r) {
    if (!have_root_) {
      error(r, SourceSpan{1, 1, 0}, ParseErrorKind::Syntax,
            "missing root declaration");
      return;
    }
    for (const auto& [node_idx, children] : child_spans_) {
      const Node& gate = tree_.nodes[node_idx];
      (void)gate;
      for (const Token& child : children) {
        if (!decl_spans_.count(std::string(child.text)))
          error(r, child.span, ParseErrorKind::Reference,
                "reference to undeclared node '" + std::string(child.text) + "'");
      }
    }
    if (!decl_spans_.count(tree_.top_event))
      error(r, root_span_, ParseErrorKind::Reference,
            "root references undeclared node '" + tree_.top_event + "'");
    if (!r.errors.empty()) return;

    for (const Violation& v : validate_tree(tree_)) {
      SourceSpan span{1, 1, 0};
      auto it = decl_spans_.find(v.node);
      if (it != decl_spans_.end()) span = it->second;
      ParseErrorKind kind = v.rule == "duplicate-id" ? ParseErrorKind::Duplicate
                            : v.rule == "sand-arity" ? ParseErrorKind::Syntax
                                                     : ParseErrorKind::Reference;
      error(r, span, kind, v.message);
    }
    if (r.errors.empty()) r.tree = std::move(tree_);
  }

  std::string_view text_;
  std::vector<Token> tokens_;
  std::size_t idx_ = 0;
  AttackTree tree_;
  bool have_root_ = false;
  SourceSpan root_span_{1, 1, 0};
  std::unordered_map<std::string, SourceSpan> decl_spans_;
  std::vector<std::pair<std::size_t, std::vector<Token>>> child_spans_;
};

SourceSpan span_from_offset(std::string_view text, std::size_t byte) {
  SourceSpan span{1, 1, 0};
  byte = std::min(byte, text.size());
  for (std::size_t i = 0; i < byte; ++i) {
    if (text[i] == '\n') {
      ++span.line;
      span.column = 1;
    } else {
      ++span.column;
    }
  }
  return span;
}

}  // namespace

ParseResult parse_model(std::string_view text) { return DslParser(text).run(); }

ParseResult parse_model_json(std::string_view text) {
  using json = nlohmann::ordered_json;
  ParseResult result;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    result.errors.push_back({span_from_offset(text, e.byte ? e.byte - 1 : 0),
                             ParseErrorKind::Lexical, e.what()});
    return result;
  }

  auto fail = [&](const std::string& msg) {
    result.errors.push_back({SourceSpan{1, 1, 0}, ParseErrorKind::Syntax, msg});
  };

  if (!doc.is_object()) {
    fail("top-level value must be an object");
    return result;
  }
  AttackTree tree;
  tree.name = doc.value("name", std::string{});
  if (!doc.contains("top_event") || !doc["top_event"].is_string()) {
    fail("missing string field 'top_event'");
    return result;
  }
  tree.top_event = doc["top_event"].get<std::string>();
  if (!doc.contains("nodes") || !doc["nodes"].is_object()) {
    fail("missing object field 'nodes'");
    return result;
  }

  for (const auto& [id, body] : doc["nodes"].items()) {
    if (!body.is_object()) {
      fail("node '" + id + "' must be an object");
      continue;
    }
    Node node;
    node.id = id;
    node.label = body.value("label", id);
    const bool has_gate = body.contains("gate");
    const bool has_leaf = body.contains("leaf");
    if (has_gate == has_leaf) {
      fail("node '" + id + "' must have exactly one of 'gate' or 'leaf'");
      continue;
    }
    if (has_gate) {
      const json& g = body["gate"];
      if (!g.is_object() || !g.contains("kind") || !g["kind"].is_string() ||
          !g.contains("children") || !g["children"].is_array()) {
        fail("node '" + id + "': gate needs 'kind' and 'children'");
        continue;
      }
      auto kind = gate_kind_from(g["kind"].get<std::string>());
      if (!kind) {
        fail("node '" + id + "': unknown gate kind '" +
             g["kind"].get<std::string>() + "'");
        continue;
      }
      Gate gate{*kind, {}};
      bool bad_child = false;
      for (const json& c : g["children"]) {
        if (!c.is_string()) {
          fail("node '" + id + "': children must be strings");
          bad_child = true;
          break;
        }
        gate.children.push_back(c.get<std::string>());
      }
      if (bad_child) continue;
      node.body = gate;
    } else {
      const json& l = body["leaf"];
      if (!l.is_object() || !l.contains("rate") || !l["rate"].is_number()) {
        fail("node '" + id + "': leaf needs a numeric 'rate'");
        continue;
      }
      node.body = Leaf{Rate{l["rate"].get<double>()}};
    }
    tree.nodes.push_back(std::move(node));
  }
  if (!result.errors.empty()) return result;

  for (const Violation& v : validate_tree(tree)) {
    ParseErrorKind kind = v.rule == "duplicate-id" ? ParseErrorKind::Duplicate
                                                   : ParseErrorKind::Reference;
    result.errors.push_back({SourceSpan{1, 1, 0}, kind, v.message});
  }
  if (result.errors.empty()) result.tree = std::move(tree);
  return result;
}

std::string format_rate(double value) {
  if (!std::isfinite(value) || value < 0.0)
    throw std::invalid_argument("format_rate: value must be finite and >= 0");
  char buf[400];
  for (int prec = 1; prec <= 340; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*f", prec, value);
    if (std::strtod(buf, nullptr) == value) break;
  }
  std::string s = buf;
  s.erase(s.find_last_not_of('0') + 1);
  if (!s.empty() && s.back() == '.') s.pop_back();
  return s;
}

namespace {

// Topological order from the top event, declaration order breaking ties.
// Nodes not reachable from the top (invalid trees) are appended afterwards in
// declaration order so serialization never drops content.
std::vector<const Node*> serialization_order(const AttackTree& tree) {
  std::unordered_map<std::string_view, std::size_t> index;
  for (std::size_t i = 0; i < tree.nodes.size(); ++i)
    index.emplace(tree.nodes[i].id, i);

  std::unordered_map<std::string_view, int> indegree;
  for (const Node& n : tree.nodes)
    if (const Gate* g = n.gate())
      for (const std::string& c : g->children)
        if (index.count(c)) ++indegree[c];

  std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
  auto top_it = index.find(tree.top_event);
  if (top_it != index.end() && indegree[tree.top_event] == 0)
    ready.push(top_it->second);

  std::vector<const Node*> out;
  std::unordered_set<std::string_view> emitted;
  while (!ready.empty()) {
    const Node& n = tree.nodes[ready.top()];
    ready.pop();
    if (!emitted.insert(n.id).second) continue;
    out.push_back(&n);
    if (const Gate* g = n.gate())
      for (const std::string& c : g->children) {
        auto it = index.find(c);
        if (it == index.end() || emitted.count(c)) continue;
        if (--indegree[c] == 0) ready.push(it->second);
      }
  }
  for (const Node& n : tree.nodes)
    if (!emitted.count(n.id)) out.push_back(&n);
  return out;
}

}  // namespace

std::string serialize_model(const AttackTree& tree, ModelFormat format) {
  std::vector<const Node*> order = serialization_order(tree);

  if (format == ModelFormat::Dsl) {
    std::string out = "tree " + (tree.name.empty() ? "model" : tree.name) + " {\n";
    out += "  root " + tree.top_event + "\n";
    for (const Node* n : order) {
      if (const Gate* g = n->gate()) {
        out += "  gate " + n->id + " = " + to_string(g->kind) + "(";
        for (std::size_t i = 0; i < g->children.size(); ++i) {
          if (i) out += ", ";
          out += g->children[i];
        }
        out += ")\n";
      } else {
        out += "  leaf " + n->id + " rate=" + format_rate(n->leaf()->rate.lambda) + "\n";
      }
    }
    out += "}\n";
    return out;
  }

  nlohmann::ordered_json doc;
  doc["name"] = tree.name;
  doc["top_event"] = tree.top_event;
  auto& nodes = doc["nodes"] = nlohmann::ordered_json::object();
  for (const Node* n : order) {
    nlohmann::ordered_json body;
    body["label"] = n->label;
    if (const Gate* g = n->gate()) {
      body["gate"] = {{"kind", to_string(g->kind)}, {"children", g->children}};
    } else {
      body["leaf"] = {{"rate", n->leaf()->rate.lambda}};
    }
    nodes[n->id] = std::move(body);
  }
  return doc.dump(2) + "\n";
}

bool trees_equal(const AttackTree& a, const AttackTree& b) {
  if (a.name != b.name || a.top_event != b.top_event ||
      a.nodes.size() != b.nodes.size())
    return false;
  for (const Node& na : a.nodes) {
    const Node* nb = b.find(na.id);
    if (!nb || na.label != nb->label || na.is_gate() != nb->is_gate()) return false;
    if (const Gate* ga = na.gate()) {
      const Gate* gb = nb->gate();
      if (ga->kind != gb->kind || ga->children != gb->children) return false;
    } else if (na.leaf()->rate.lambda != nb->leaf()->rate.lambda) {
      return false;
    }
  }
  return true;
}

ScenarioParseResult parse_scenarios(std::string_view text, const AttackTree& tree) {
  using json = nlohmann::ordered_json;
  ScenarioParseResult result;
  auto fail = [&](ParseErrorKind kind, const std::string& msg) {
    result.errors.push_back({SourceSpan{1, 1, 0}, kind, msg});
  };

  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    result.errors.push_back({span_from_offset(text, e.byte ? e.byte - 1 : 0),
                             ParseErrorKind::Lexical, e.what()});
    return result;
  }
  if (!doc.is_object() || !doc.contains("scenarios") || !doc["scenarios"].is_array()) {
    fail(ParseErrorKind::Syntax, "expected object with a 'scenarios' array");
    return result;
  }
  Rate cold{0.002};
  if (doc.contains("cold")) {
    if (!doc["cold"].is_number()) {
      fail(ParseErrorKind::Syntax, "'cold' must be a number");
      return result;
    }
    cold.lambda = doc["cold"].get<double>();
  }
  if (!(cold.lambda > 0.0) || !cold.valid()) {
    fail(ParseErrorKind::Syntax, "cold rate must be positive");
    return result;
  }

  for (const json& s : doc["scenarios"]) {
    if (!s.is_object() || !s.contains("name") || !s["name"].is_string() ||
        !s.contains("hot") || !s["hot"].is_array()) {
      fail(ParseErrorKind::Syntax, "each scenario needs a 'name' and a 'hot' array");
      continue;
    }
    ScenarioSpec spec;
    spec.name = s["name"].get<std::string>();
    spec.cold_rate = cold;
    for (const json& h : s["hot"]) {
      if (!h.is_string()) {
        fail(ParseErrorKind::Syntax, "scenario '" + spec.name + "': hot ids must be strings");
        break;
      }
      std::string id = h.get<std::string>();
      const Node* node = tree.find(id);
      if (!node) {
        fail(ParseErrorKind::Reference,
             "scenario '" + spec.name + "': unknown node '" + id + "'");
      } else if (node->is_gate()) {
        fail(ParseErrorKind::Reference,
             "scenario '" + spec.name + "': node '" + id + "' is a gate, not a leaf");
      }
      spec.hot.push_back(std::move(id));
    }
    result.scenarios.push_back(std::move(spec));
  }
  if (!result.errors.empty()) result.scenarios.clear();
  return result;
}

}  // namespace atsmc
