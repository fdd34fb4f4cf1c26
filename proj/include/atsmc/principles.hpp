// Security-by-design transformations applied to an existing model.
//
// Hardening and diversity both guard a basic step with extra countermeasure
// steps the attacker must also complete: the target leaf is replaced by an
// AND gate over the original leaf and one fresh leaf per countermeasure.
// Hardening models strengthening one mechanism, diversity models adding
// independent alternatives; the structural effect is the same, the gate id
// suffix records the intent.  Least privilege keeps the structure and scales
// the rates of the targeted leaves down.
#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "atsmc/model.hpp"

namespace atsmc {

enum class TransformKind { Hardening, Diversity, LeastPrivilege };

const char* to_string(TransformKind kind);

struct CounterLeaf {
  std::string label;  // becomes the id of the new leaf
  Rate rate;
};

struct TransformSpec {
  TransformKind kind = TransformKind::Hardening;
  // Hardening and diversity:
  std::string target;
  std::vector<CounterLeaf> leaves;
  // Least privilege:
  std::vector<std::string> targets;
  double scale = 1.0;
};

// Replace leaf `target` by an AND gate named `target`_hardening whose
// children are the original leaf and one new leaf per countermeasure.
// Parents of the target (or the top event) now refer to the gate.  Throws
// TransformError when the target is missing or not a leaf, the countermeasure
// list is empty, an id collides, or a rate is invalid.
AttackTree apply_hardening(const AttackTree& tree, const std::string& target,
                           const std::vector<CounterLeaf>& leaves);

// Same construction with gate id `target`_diversity.
AttackTree apply_diversity(const AttackTree& tree, const std::string& target,
                           const std::vector<CounterLeaf>& leaves);

// Multiply the rate of every listed leaf by `scale`, 0 < scale <= 1.  Throws
// TransformError on unknown or repeated targets, gates, or a bad scale.
AttackTree apply_least_privilege(const AttackTree& tree,
                                 const std::vector<std::string>& targets,
                                 double scale);

AttackTree apply_transform(const AttackTree& tree, const TransformSpec& spec);

// Apply the specs left to right.  A failing step aborts the plan; the error
// message names the 1-based step.
AttackTree apply_plan(const AttackTree& tree, const std::vector<TransformSpec>& plan);

// Reads {"plan": [...]} where each entry is
//   {"kind": "hardening" | "diversity", "target": ID,
//    "leaves": [{"label": ID, "rate": NUM}, ...]}
// or
//   {"kind": "least_privilege", "targets": [ID, ...], "scale": NUM}.
// Throws TransformError on malformed input.
std::vector<TransformSpec> parse_plan(std::string_view json_text);

}  // namespace atsmc
