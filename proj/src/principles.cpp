#include "atsmc/principles.hpp"

#include <cmath>
#include <unordered_set>

#include <json.hpp>

#include "atsmc/errors.hpp"

namespace atsmc {

const char* to_string(TransformKind kind) {
  switch (kind) {
    case TransformKind::Hardening: return "hardening";
    case TransformKind::Diversity: return "diversity";
    case TransformKind::LeastPrivilege: return "least_privilege";
  }
  return "?";
}

namespace {

std::size_t leaf_index(const AttackTree& tree, const std::string& id,
                       const char* what) {
  for (std::size_t i = 0; i < tree.nodes.size(); ++i)
    if (tree.nodes[i].id == id) {
      if (tree.nodes[i].is_gate())
        throw TransformError(std::string(what) + ": target '" + id +
                             "' is a gate, not a leaf");
      return i;
    }
  throw TransformError(std::string(what) + ": unknown leaf '" + id + "'");
}

AttackTree guard_leaf(const AttackTree& tree, const std::string& target,
                      const std::vector<CounterLeaf>& leaves, const char* what,
                      const char* suffix) {
  std::size_t at = leaf_index(tree, target, what);
  if (leaves.empty())
    throw TransformError(std::string(what) + ": needs at least one countermeasure");

  std::unordered_set<std::string_view> ids;
  for (const Node& n : tree.nodes) ids.insert(n.id);
  const std::string gate_id = target + suffix;
  if (ids.count(gate_id))
    throw TransformError(std::string(what) + ": id '" + gate_id +
                         "' already exists");
  ids.insert(gate_id);

  Gate gate{GateKind::And, {target}};
  std::vector<Node> fresh;
  for (const CounterLeaf& cl : leaves) {
    if (cl.label.empty())
      throw TransformError(std::string(what) + ": countermeasure label is empty");
    if (!ids.insert(cl.label).second)
      throw TransformError(std::string(what) + ": id '" + cl.label +
                           "' already exists");
    if (!cl.rate.valid())
      throw TransformError(std::string(what) + ": countermeasure '" + cl.label +
                           "' has an invalid rate");
    gate.children.push_back(cl.label);
    fresh.push_back(Node{cl.label, cl.label, Leaf{cl.rate}});
  }

  AttackTree out = tree;
  for (Node& n : out.nodes)
    if (n.is_gate())
      for (std::string& child : n.gate()->children)
        if (child == target) child = gate_id;
  if (out.top_event == target) out.top_event = gate_id;

  Node gate_node{gate_id, gate_id, std::move(gate)};
  out.nodes.insert(out.nodes.begin() + static_cast<std::ptrdiff_t>(at),
                   std::move(gate_node));
  out.nodes.insert(out.nodes.begin() + static_cast<std::ptrdiff_t>(at + 2),
                   fresh.begin(), fresh.end());
  return out;
}

}  // namespace

AttackTree apply_hardening(const AttackTree& tree, const std::string& target,
                           const std::vector<CounterLeaf>& leaves) {
  return guard_leaf(tree, target, leaves, "hardening", "_hardening");
}

AttackTree apply_diversity(const AttackTree& tree, const std::string& target,
                           const std::vector<CounterLeaf>& leaves) {
  return guard_leaf(tree, target, leaves, "diversity", "_diversity");
}

AttackTree apply_least_privilege(const AttackTree& tree,
                                 const std::vector<std::string>& targets,
                                 double scale) {
  if (!(scale > 0.0) || !(scale <= 1.0))
    throw TransformError("least_privilege: scale must be in (0,1]");
  if (targets.empty())
    throw TransformError("least_privilege: needs at least one target");

  AttackTree out = tree;
  std::unordered_set<std::string_view> seen;
  for (const std::string& id : targets) {
    if (!seen.insert(id).second)
      throw TransformError("least_privilege: target '" + id + "' listed twice");
    std::size_t at = leaf_index(out, id, "least_privilege");
    out.nodes[at].leaf()->rate.lambda *= scale;
  }
  return out;
}

AttackTree apply_transform(const AttackTree& tree, const TransformSpec& spec) {
  switch (spec.kind) {
    case TransformKind::Hardening:
      return apply_hardening(tree, spec.target, spec.leaves);
    case TransformKind::Diversity:
      return apply_diversity(tree, spec.target, spec.leaves);
    case TransformKind::LeastPrivilege:
      return apply_least_privilege(tree, spec.targets, spec.scale);
  }
  throw TransformError("apply_transform: unknown kind");
}

AttackTree apply_plan(const AttackTree& tree, const std::vector<TransformSpec>& plan) {
  AttackTree out = tree;
  for (std::size_t i = 0; i < plan.size(); ++i) {
    try {
      out = apply_transform(out, plan[i]);
    } catch (const TransformError& e) {
      throw TransformError("plan step " + std::to_string(i + 1) + ": " + e.what());
    }
  }
  return out;
}

std::vector<TransformSpec> parse_plan(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw TransformError(std::string("plan: ") + e.what());
  }

  auto fail = [](const std::string& msg) -> void {
    throw TransformError("plan: " + msg);
  };

  if (!doc.is_object() || !doc.contains("plan") || !doc["plan"].is_array())
    fail("expected an object with a \"plan\" array");

  std::vector<TransformSpec> plan;
  for (const auto& item : doc["plan"]) {
    const std::string where = "entry " + std::to_string(plan.size() + 1);
    if (!item.is_object()) fail(where + " is not an object");
    if (!item.contains("kind") || !item["kind"].is_string())
      fail(where + " has no \"kind\" string");
    const std::string kind = item["kind"].get<std::string>();

    TransformSpec spec;
    if (kind == "hardening" || kind == "diversity") {
      spec.kind = kind == "hardening" ? TransformKind::Hardening
                                      : TransformKind::Diversity;
      if (!item.contains("target") || !item["target"].is_string())
        fail(where + " has no \"target\" string");
      spec.target = item["target"].get<std::string>();
      if (!item.contains("leaves") || !item["leaves"].is_array())
        fail(where + " has no \"leaves\" array");
      for (const auto& lf : item["leaves"]) {
        if (!lf.is_object() || !lf.contains("label") || !lf["label"].is_string() ||
            !lf.contains("rate") || !lf["rate"].is_number())
          fail(where + " has a countermeasure without label and rate");
        CounterLeaf cl;
        cl.label = lf["label"].get<std::string>();
        cl.rate.lambda = lf["rate"].get<double>();
        spec.leaves.push_back(std::move(cl));
      }
    } else if (kind == "least_privilege") {
      spec.kind = TransformKind::LeastPrivilege;
      if (!item.contains("targets") || !item["targets"].is_array())
        fail(where + " has no \"targets\" array");
      for (const auto& t : item["targets"]) {
        if (!t.is_string()) fail(where + " has a non-string target");
        spec.targets.push_back(t.get<std::string>());
      }
      if (!item.contains("scale") || !item["scale"].is_number())
        fail(where + " has no \"scale\" number");
      spec.scale = item["scale"].get<double>();
    } else {
      fail(where + " has unknown kind '" + kind + "'");
    }
    plan.push_back(std::move(spec));
  }
  return plan;
}

}  // namespace atsmc
