#include <doctest.h>

#include <cmath>

#include "atsmc/errors.hpp"
#include "atsmc/oracle.hpp"
#include "atsmc/parser.hpp"
#include "atsmc/principles.hpp"
#include "atsmc/rng.hpp"
#include "support/random_tree.hpp"

using namespace atsmc;

namespace {

AttackTree base_tree() {
  ParseResult r = parse_model(
      "tree base {\n"
      "  root G\n"
      "  gate G = OR(A, B)\n"
      "  leaf A rate=0.01\n"
      "  leaf B rate=0.0086870\n"
      "}\n");
  REQUIRE(r.ok());
  return *r.tree;
}

}  // namespace

TEST_CASE("hardening wraps the target in an AND gate") {
  AttackTree t = base_tree();
  AttackTree h = apply_hardening(t, "A", {{"Extra", Rate{0.002}}});

  REQUIRE(validate_tree(h).empty());
  const Node* gate = h.find("A_hardening");
  REQUIRE(gate != nullptr);
  CHECK(gate->gate()->kind == GateKind::And);
  CHECK(gate->gate()->children == std::vector<std::string>{"A", "Extra"});
  CHECK(h.find("G")->gate()->children == std::vector<std::string>{"A_hardening", "B"});
  CHECK(h.find("A")->leaf()->rate.lambda == 0.01);
  CHECK(h.find("Extra")->leaf()->rate.lambda == 0.002);
  // The original tree is untouched.
  CHECK(t.find("A_hardening") == nullptr);
}

TEST_CASE("hardening a top-event leaf repoints the top") {
  AttackTree t;
  t.top_event = "X";
  t.nodes.push_back({"X", "X", Leaf{Rate{0.01}}});
  AttackTree h = apply_hardening(t, "X", {{"Extra", Rate{0.002}}});
  CHECK(h.top_event == "X_hardening");
  CHECK(validate_tree(h).empty());
}

TEST_CASE("diversity differs from hardening only in the gate id") {
  AttackTree t = base_tree();
  AttackTree d = apply_diversity(t, "B", {{"Alt1", Rate{0.003}}, {"Alt2", Rate{0.004}}});
  const Node* gate = d.find("B_diversity");
  REQUIRE(gate != nullptr);
  CHECK(gate->gate()->children == std::vector<std::string>{"B", "Alt1", "Alt2"});
  CHECK(validate_tree(d).empty());
}

TEST_CASE("guarding transforms reject bad input") {
  AttackTree t = base_tree();
  CHECK_THROWS_AS(apply_hardening(t, "Nope", {{"E", Rate{0.1}}}), TransformError);
  CHECK_THROWS_AS(apply_hardening(t, "G", {{"E", Rate{0.1}}}), TransformError);
  CHECK_THROWS_AS(apply_hardening(t, "A", {}), TransformError);
  CHECK_THROWS_AS(apply_hardening(t, "A", {{"B", Rate{0.1}}}), TransformError);
  CHECK_THROWS_AS(apply_hardening(t, "A", {{"", Rate{0.1}}}), TransformError);
  CHECK_THROWS_AS(apply_hardening(t, "A", {{"E", Rate{-1.0}}}), TransformError);
  CHECK_THROWS_AS(apply_hardening(t, "A", {{"E", Rate{0.1}}, {"E", Rate{0.2}}}),
                  TransformError);

  AttackTree clash = base_tree();
  clash.nodes.push_back({"A_hardening", "", Leaf{Rate{0.5}}});
  clash.nodes[0].gate()->children.push_back("A_hardening");
  REQUIRE(validate_tree(clash).empty());
  CHECK_THROWS_AS(apply_hardening(clash, "A", {{"E", Rate{0.1}}}), TransformError);
}

TEST_CASE("least privilege scales leaf rates exactly") {
  AttackTree t = base_tree();
  AttackTree lp = apply_least_privilege(t, {"B"}, 0.5);
  CHECK(lp.find("B")->leaf()->rate.lambda == 0.0043435);
  CHECK(lp.find("A")->leaf()->rate.lambda == 0.01);
  CHECK(validate_tree(lp).empty());

  AttackTree id = apply_least_privilege(t, {"A", "B"}, 1.0);
  CHECK(trees_equal(id, t));
}

TEST_CASE("least privilege rejects bad input") {
  AttackTree t = base_tree();
  CHECK_THROWS_AS(apply_least_privilege(t, {}, 0.5), TransformError);
  CHECK_THROWS_AS(apply_least_privilege(t, {"Nope"}, 0.5), TransformError);
  CHECK_THROWS_AS(apply_least_privilege(t, {"G"}, 0.5), TransformError);
  CHECK_THROWS_AS(apply_least_privilege(t, {"A", "A"}, 0.5), TransformError);
  CHECK_THROWS_AS(apply_least_privilege(t, {"A"}, 0.0), TransformError);
  CHECK_THROWS_AS(apply_least_privilege(t, {"A"}, 1.5), TransformError);
  CHECK_THROWS_AS(apply_least_privilege(t, {"A"}, -0.5), TransformError);
}

TEST_CASE("apply_transform dispatches on kind") {
  AttackTree t = base_tree();

  TransformSpec h;
  h.kind = TransformKind::Hardening;
  h.target = "A";
  h.leaves = {{"E", Rate{0.1}}};
  CHECK(apply_transform(t, h).find("A_hardening") != nullptr);

  TransformSpec d;
  d.kind = TransformKind::Diversity;
  d.target = "A";
  d.leaves = {{"E", Rate{0.1}}};
  CHECK(apply_transform(t, d).find("A_diversity") != nullptr);

  TransformSpec lp;
  lp.kind = TransformKind::LeastPrivilege;
  lp.targets = {"A"};
  lp.scale = 0.25;
  CHECK(apply_transform(t, lp).find("A")->leaf()->rate.lambda == 0.0025);

  CHECK(std::string(to_string(TransformKind::Hardening)) == "hardening");
  CHECK(std::string(to_string(TransformKind::Diversity)) == "diversity");
  CHECK(std::string(to_string(TransformKind::LeastPrivilege)) == "least_privilege");
}

TEST_CASE("plans apply left to right and name the failing step") {
  AttackTree t = base_tree();

  TransformSpec h;
  h.kind = TransformKind::Hardening;
  h.target = "A";
  h.leaves = {{"E", Rate{0.001}}};
  TransformSpec lp;
  lp.kind = TransformKind::LeastPrivilege;
  lp.targets = {"B"};
  lp.scale = 0.5;

  AttackTree out = apply_plan(t, {h, lp});
  CHECK(out.find("A_hardening") != nullptr);
  CHECK(out.find("B")->leaf()->rate.lambda == 0.0043435);

  TransformSpec bad = lp;
  bad.targets = {"Nope"};
  CHECK_THROWS_WITH_AS(apply_plan(t, {h, bad}), doctest::Contains("plan step 2"),
                       TransformError);

  CHECK(trees_equal(apply_plan(t, {}), t));
}

TEST_CASE("plan files parse into specs") {
  std::vector<TransformSpec> plan = parse_plan(
      "{\"plan\": ["
      "{\"kind\": \"hardening\", \"target\": \"A\","
      " \"leaves\": [{\"label\": \"E1\", \"rate\": 0.001}]},"
      "{\"kind\": \"diversity\", \"target\": \"B\","
      " \"leaves\": [{\"label\": \"E2\", \"rate\": 0.002}]},"
      "{\"kind\": \"least_privilege\", \"targets\": [\"A\", \"B\"], \"scale\": 0.5}"
      "]}");
  REQUIRE(plan.size() == 3);
  CHECK(plan[0].kind == TransformKind::Hardening);
  CHECK(plan[0].target == "A");
  CHECK(plan[0].leaves[0].label == "E1");
  CHECK(plan[1].kind == TransformKind::Diversity);
  CHECK(plan[2].kind == TransformKind::LeastPrivilege);
  CHECK(plan[2].targets == std::vector<std::string>{"A", "B"});
  CHECK(plan[2].scale == 0.5);
}

TEST_CASE("malformed plan files are rejected") {
  CHECK_THROWS_AS(parse_plan("not json"), TransformError);
  CHECK_THROWS_AS(parse_plan("[]"), TransformError);
  CHECK_THROWS_AS(parse_plan("{\"plan\": 3}"), TransformError);
  CHECK_THROWS_AS(parse_plan("{\"plan\": [{\"kind\": \"sideways\"}]}"), TransformError);
  CHECK_THROWS_WITH_AS(
      parse_plan("{\"plan\": [{\"kind\": \"hardening\", \"target\": \"A\"}]}"),
      doctest::Contains("entry 1"), TransformError);
  CHECK_THROWS_AS(
      parse_plan("{\"plan\": [{\"kind\": \"least_privilege\", \"targets\": []}]}"),
      TransformError);
}

TEST_CASE("transforms never increase the disruption probability") {
  SplitMix64 rng(31);
  int checked = 0;
  while (checked < 40) {
    AttackTree t = testgen::random_tree(rng, 12);
    if (t.has_shared_nodes()) continue;
    std::vector<const Node*> leaves = t.leaves();
    const Node* pick = leaves[rng.next() % leaves.size()];

    AttackTree after;
    if (rng.next() % 2 == 0) {
      after = apply_hardening(t, pick->id, {{"Counter", Rate{0.001}}});
    } else {
      after = apply_least_privilege(t, {pick->id},
                                    0.1 + 0.8 * rng.next_unit_open());
    }

    CdfGrid before_curve = top_curve(t, 300.0, OracleSettings{1.0});
    CdfGrid after_curve = top_curve(after, 300.0, OracleSettings{1.0});
    for (std::size_t k = 0; k < before_curve.values.size(); ++k)
      CHECK(after_curve.values[k] <= before_curve.values[k] + 1e-9);
    ++checked;
  }
}
