#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace atsmc {

/// Exponential completion rate of a basic attack step, in 1/seconds.
struct Rate {
  double lambda = 0.0;

  bool valid() const { return std::isfinite(lambda) && lambda >= 0.0; }
};

enum class GateKind { Or, And, Sand };

const char* to_string(GateKind kind);
std::optional<GateKind> gate_kind_from(std::string_view text);

struct Gate {
  GateKind kind = GateKind::Or;
  std::vector<std::string> children;  // ordered; order is semantic for SAND
};

struct Leaf {
  Rate rate;
};

struct Node {
  std::string id;
  std::string label;  // display text; defaults to the id
  std::variant<Gate, Leaf> body;

  bool is_gate() const { return std::holds_alternative<Gate>(body); }
  const Gate* gate() const { return std::get_if<Gate>(&body); }
  Gate* gate() { return std::get_if<Gate>(&body); }
  const Leaf* leaf() const { return std::get_if<Leaf>(&body); }
  Leaf* leaf() { return std::get_if<Leaf>(&body); }
};

/// Attack tree: a DAG of gates over exponential leaves with a unique top
/// event.  Nodes are kept in declaration order; shared subtrees are allowed
/// (a node may be listed as a child of several gates).
struct AttackTree {
  std::string name;
  std::string top_event;
  std::vector<Node> nodes;

  const Node* find(std::string_view id) const;
  Node* find(std::string_view id);

  /// Leaves in declaration order.
  std::vector<const Node*> leaves() const;

  /// True if some node is referenced by more than one parent edge.
  bool has_shared_nodes() const;
};

/// One structural defect found by validate_tree().
struct Violation {
  std::string rule;     // stable machine-readable code, e.g. "dangling-child"
  std::string node;     // offending node id ("" for tree-level rules)
  std::string message;  // human-readable description
};

/// Full structural check; empty result means the tree is well-formed.
///
/// Rules: duplicate-id, missing-top, top-has-parent, empty-gate, sand-arity,
/// duplicate-child, dangling-child, cycle, unreachable, bad-rate.
std::vector<Violation> validate_tree(const AttackTree& tree);

/// P(completion <= t) for an exponential leaf: 1 - exp(-lambda * t).
/// Throws std::invalid_argument for t < 0 or an invalid rate.
double leaf_cdf(Rate rate, double t);

/// Hot/cold attack scenario: listed leaves keep their modelled rate, every
/// other leaf is set to the cold baseline rate.
struct ScenarioSpec {
  std::string name;
  std::vector<std::string> hot;
  Rate cold_rate{0.002};
};

/// Returns a copy of `tree` with the scenario applied.  Throws ScenarioError
/// if a hot id is unknown or not a leaf, or the cold rate is not positive.
AttackTree apply_scenario(const AttackTree& tree, const ScenarioSpec& scenario);

using IdPair = std::pair<std::string, std::string>;

/// One scenario per leaf, in declaration order, named after the leaf.
std::vector<ScenarioSpec> enumerate_scenarios(const AttackTree& tree, Rate cold);

/// One scenario per pair, named "<first>+<second>".  Throws ScenarioError if
/// a pair member is unknown or not a leaf.
std::vector<ScenarioSpec> enumerate_scenarios(const AttackTree& tree,
                                              const std::vector<IdPair>& combos,
                                              Rate cold);

}  // namespace atsmc
