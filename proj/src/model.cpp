#include "atsmc/model.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "atsmc/errors.hpp"

namespace atsmc {

const char* to_string(GateKind kind) {
  switch (kind) {
    case GateKind::Or: return "OR";
    case GateKind::And: return "AND";
    case GateKind::Sand: return "SAND";
  }
  return "?";
}

std::optional<GateKind> gate_kind_from(std::string_view text) {
  if (text == "OR") return GateKind::Or;
  if (text == "AND") return GateKind::And;
  if (text == "SAND") return GateKind::Sand;
  return std::nullopt;
}

const Node* AttackTree::find(std::string_view id) const {
  for (const Node& n : nodes)
    if (n.id == id) return &n;
  return nullptr;
}

Node* AttackTree::find(std::string_view id) {
  for (Node& n : nodes)
    if (n.id == id) return &n;
  return nullptr;
}

std::vector<const Node*> AttackTree::leaves() const {
  std::vector<const Node*> out;
  for (const Node& n : nodes)
    if (!n.is_gate()) out.push_back(&n);
  return out;
}

bool AttackTree::has_shared_nodes() const {
  std::unordered_map<std::string_view, int> parents;
  for (const Node& n : nodes)
    if (const Gate* g = n.gate())
      for (const std::string& c : g->children)
        if (++parents[c] > 1) return true;
  return false;
}

namespace {

// Colors for the iterative cycle DFS.
enum class Mark { White, Gray, Black };

void check_cycles(const AttackTree& tree, std::vector<Violation>& out) {
  std::unordered_map<std::string_view, Mark> mark;
  for (const Node& n : tree.nodes) mark[n.id] = Mark::White;

  for (const Node& start : tree.nodes) {
    if (mark[start.id] != Mark::White) continue;
    // Explicit stack of (node, next child index) to avoid deep recursion.
    std::vector<std::pair<const Node*, std::size_t>> stack{{&start, 0}};
    mark[start.id] = Mark::Gray;
    while (!stack.empty()) {
      auto& [node, next] = stack.back();
      const Gate* g = node->gate();
      if (!g || next >= g->children.size()) {
        mark[node->id] = Mark::Black;
        stack.pop_back();
        continue;
      }
      const std::string& child_id = g->children[next++];
      const Node* child = tree.find(child_id);
      if (!child) continue;  // dangling-child reported elsewhere
      Mark m = mark[child->id];
      if (m == Mark::Gray) {
        out.push_back({"cycle", node->id,
                       "cycle through gate '" + node->id + "' and node '" +
                           child->id + "'"});
      } else if (m == Mark::White) {
        mark[child->id] = Mark::Gray;
        stack.push_back({child, 0});
      }
    }
  }
}

}  // namespace

std::vector<Violation> validate_tree(const AttackTree& tree) {
  std::vector<Violation> out;

  std::unordered_set<std::string_view> seen;
  for (const Node& n : tree.nodes)
    if (!seen.insert(n.id).second)
      out.push_back({"duplicate-id", n.id, "node id '" + n.id + "' declared more than once"});

  if (tree.top_event.empty() || !tree.find(tree.top_event)) {
    out.push_back({"missing-top", tree.top_event,
                   "top event '" + tree.top_event + "' is not declared"});
  }

  for (const Node& n : tree.nodes) {
    if (const Gate* g = n.gate()) {
      if (g->children.empty())
        out.push_back({"empty-gate", n.id, "gate '" + n.id + "' has no children"});
      if (g->kind == GateKind::Sand && g->children.size() < 2)
        out.push_back({"sand-arity", n.id,
                       "SAND gate '" + n.id + "' needs at least 2 children"});
      std::unordered_set<std::string_view> child_seen;
      for (const std::string& c : g->children) {
        if (!child_seen.insert(c).second)
          out.push_back({"duplicate-child", n.id,
                         "gate '" + n.id + "' lists child '" + c + "' twice"});
        if (!tree.find(c))
          out.push_back({"dangling-child", n.id,
                         "gate '" + n.id + "' references undeclared node '" + c + "'"});
        if (c == tree.top_event)
          out.push_back({"top-has-parent", n.id,
                         "top event '" + c + "' appears as a child of gate '" + n.id + "'"});
      }
    } else {
      const Leaf* l = n.leaf();
      if (!l->rate.valid())
        out.push_back({"bad-rate", n.id,
                       "leaf '" + n.id + "' has an invalid rate (must be finite and >= 0)"});
    }
  }

  check_cycles(tree, out);

  // Reachability from the top event.
  if (const Node* top = tree.find(tree.top_event)) {
    std::unordered_set<std::string_view> reach;
    std::vector<const Node*> work{top};
    reach.insert(top->id);
    while (!work.empty()) {
      const Node* n = work.back();
      work.pop_back();
      if (const Gate* g = n->gate())
        for (const std::string& c : g->children)
          if (const Node* child = tree.find(c))
            if (reach.insert(child->id).second) work.push_back(child);
    }
    for (const Node& n : tree.nodes)
      if (!reach.count(n.id))
        out.push_back({"unreachable", n.id,
                       "node '" + n.id + "' is not reachable from the top event"});
  }

  return out;
}

double leaf_cdf(Rate rate, double t) {
  if (!rate.valid())
    throw std::invalid_argument("leaf_cdf: rate must be finite and >= 0");
  if (!(t >= 0.0))
    throw std::invalid_argument("leaf_cdf: time must be >= 0");
  return -std::expm1(-rate.lambda * t);
}

AttackTree apply_scenario(const AttackTree& tree, const ScenarioSpec& scenario) {
  if (!(scenario.cold_rate.lambda > 0.0) || !scenario.cold_rate.valid())
    throw ScenarioError("scenario '" + scenario.name + "': cold rate must be positive");

  std::unordered_set<std::string_view> hot;
  for (const std::string& id : scenario.hot) {
    const Node* n = tree.find(id);
    if (!n)
      throw ScenarioError("scenario '" + scenario.name + "': unknown node '" + id + "'");
    if (n->is_gate())
      throw ScenarioError("scenario '" + scenario.name + "': node '" + id +
                          "' is a gate, hot set must name leaves");
    hot.insert(n->id);
  }

  AttackTree out = tree;
  for (Node& n : out.nodes)
    if (Leaf* l = n.leaf())
      if (!hot.count(n.id)) l->rate = scenario.cold_rate;
  return out;
}

std::vector<ScenarioSpec> enumerate_scenarios(const AttackTree& tree, Rate cold) {
  std::vector<ScenarioSpec> out;
  for (const Node* leaf : tree.leaves())
    out.push_back({leaf->id, {leaf->id}, cold});
  return out;
}

std::vector<ScenarioSpec> enumerate_scenarios(const AttackTree& tree,
                                              const std::vector<IdPair>& combos,
                                              Rate cold) {
  std::vector<ScenarioSpec> out;
  for (const IdPair& pair : combos) {
    for (const std::string& id : {pair.first, pair.second}) {
      const Node* n = tree.find(id);
      if (!n) throw ScenarioError("combination scenario: unknown node '" + id + "'");
      if (n->is_gate())
        throw ScenarioError("combination scenario: node '" + id + "' is a gate");
    }
    out.push_back({pair.first + "+" + pair.second, {pair.first, pair.second}, cold});
  }
  return out;
}

}  // namespace atsmc
