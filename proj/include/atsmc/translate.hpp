#pragma once

#include "atsmc/model.hpp"
#include "atsmc/sta.hpp"

namespace atsmc {

// Compositional attack-tree-to-automata translation.  Every tree element e
// owns two broadcast channels, "initiate_<e>" and "fail_<e>"; a shared
// element instead listens on one "initiate_<e>__<parent>" channel per parent
// so each channel keeps a single sender (the first initiate wins, later ones
// are ignored).  One extra root driver automaton "<top>_root" kicks the top
// element at t=0 and enters its goal location Disrupt on the top fail signal.

/// Leaf template: Idle -initiate?-> Active(exp rate) -fail!-> Done.
STA translate_leaf(const Node& node);

/// Gate templates (single-parent channel naming):
///   OR    activate all children, fail on the first child fail;
///   AND   activate all children, fail once every child has failed;
///   SAND  activate children one at a time, left to right.
/// Gate locations have no stochastic sojourn; gates act instantaneously.
STA translate_gate(const Node& node);

/// Root driver: Initial -initiate_top!, x:=0-> Wait -fail_top?-> Disrupt.
STA translate_root(const std::string& top_id);

/// Whole-tree translation: (#elements + 1) automata, root driver first, then
/// elements in declaration order.  Validates the tree first and throws
/// InvalidTreeError when it is not well-formed.
NSTA translate_tree(const AttackTree& tree);

}  // namespace atsmc
