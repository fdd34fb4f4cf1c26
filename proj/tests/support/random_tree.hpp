// Deterministic random model generator for property tests.
#pragma once

#include <string>
#include <vector>

#include "atsmc/model.hpp"
#include "atsmc/rng.hpp"

namespace testgen {

// A valid shared-free tree with at most `max_nodes` nodes.  Nodes appear in
// post order (children before parents); ids are n0, n1, ...
inline atsmc::AttackTree random_tree(atsmc::SplitMix64& rng, int max_nodes) {
  using namespace atsmc;
  AttackTree tree;
  tree.name = "random";
  int next = 0;

  auto fresh = [&] { return "n" + std::to_string(next++); };

  // Returns the id of the built subtree root; consumes up to `budget` nodes.
  auto build = [&](auto&& self, int budget) -> std::string {
    bool want_leaf = budget < 3 || rng.next() % 100 < 30;
    if (want_leaf) {
      std::string id = fresh();
      double lambda = 0.001 + rng.next_unit_open() * 0.049;
      tree.nodes.push_back(Node{id, id, Leaf{Rate{lambda}}});
      return id;
    }
    int arity = 2 + static_cast<int>(rng.next() % 2);
    GateKind kind = static_cast<GateKind>(rng.next() % 3);
    Gate gate{kind, {}};
    int child_budget = (budget - 1) / arity;
    for (int i = 0; i < arity; ++i)
      gate.children.push_back(self(self, child_budget));
    std::string id = fresh();
    tree.nodes.push_back(Node{id, id, std::move(gate)});
    return id;
  };

  tree.top_event = build(build, max_nodes);
  return tree;
}

}  // namespace testgen
