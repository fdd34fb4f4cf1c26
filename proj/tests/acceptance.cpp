// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails.  Each criterion is self-contained so a failure in one does
// not hide the others.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "atsmc/engine.hpp"
#include "atsmc/errors.hpp"
#include "atsmc/experiment.hpp"
#include "atsmc/models.hpp"
#include "atsmc/oracle.hpp"
#include "atsmc/parser.hpp"
#include "atsmc/principles.hpp"
#include "atsmc/rng.hpp"
#include "atsmc/translate.hpp"
#include "support/closed_forms.hpp"
#include "support/random_tree.hpp"

using namespace atsmc;

namespace {

int failures = 0;

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

void report(int n, const std::string& label, bool ok, double seconds) {
  std::printf("%s criterion %d: %s [%.1fs]\n", ok ? "PASS" : "FAIL", n,
              label.c_str(), seconds);
  std::fflush(stdout);
  if (!ok) ++failures;
}

Node gate_node(std::string id, GateKind kind, std::vector<std::string> children) {
  return {id, id, Gate{kind, std::move(children)}};
}

Node leaf_node(std::string id, double lambda) {
  return {std::move(id), "", Leaf{Rate{lambda}}};
}

AttackTree two_leaf(GateKind kind, double l1, double l2) {
  AttackTree t;
  t.top_event = "G";
  t.nodes.push_back(gate_node("G", kind, {"A", "B"}));
  t.nodes.push_back(leaf_node("A", l1));
  t.nodes.push_back(leaf_node("B", l2));
  return t;
}

SmcQuery monitor_query(const NSTA& nsta, double bound) {
  SmcQuery q;
  q.time_bound = bound;
  q.automaton = 0;
  q.location = *nsta.automata[0].accepting;
  q.automaton_id = nsta.automata[0].id;
  q.location_id = nsta.automata[0].locations[static_cast<std::size_t>(q.location)].id;
  return q;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool same_set(std::vector<std::string> got, std::vector<std::string> want) {
  std::sort(got.begin(), got.end());
  std::sort(want.begin(), want.end());
  return got == want;
}

// --- criterion bodies -------------------------------------------------------

void criterion1() {
  Stopwatch watch;
  bool ok = true;

  struct Case {
    GateKind kind;
    double l1, l2, expected;
  };
  const Case cases[] = {
      {GateKind::Or, 0.005, 0.005, 0.6321205588285577},
      {GateKind::And, 0.01, 0.01, ref::and2(0.01, 0.01, 100.0)},
      {GateKind::Sand, 0.01, 0.01, 0.26424111765711533},
  };
  for (const Case& c : cases) {
    AttackTree tree = two_leaf(c.kind, c.l1, c.l2);
    ok = ok && std::abs(top_probability(tree, 100.0) - c.expected) <= 1e-3;

    NSTA nsta = translate_tree(tree);
    SmcSettings st;  // epsilon 0.01, alpha 0.05, shipped seed
    Estimate e = estimate(nsta, monitor_query(nsta, 100.0), st);
    ok = ok && e.runs == 18445;
    ok = ok && std::abs(e.p_hat - c.expected) <= 0.011;
  }
  double sec = watch.seconds();
  report(1, "closed-form gate probabilities, oracle and SMC", ok && sec < 5.0, sec);
}

void criterion2() {
  Stopwatch watch;
  bool ok = required_runs(0.01, 0.05) == 18445 && required_runs(0.05, 0.05) == 738 &&
            required_runs(0.1, 0.02) == 231;
  report(2, "Okamoto sample sizes", ok, watch.seconds());
}

void criterion3() {
  Stopwatch watch;
  SplitMix64 rng(20260815);
  const std::vector<double> times{60.0, 120.0, 180.0};
  SmcSettings st;
  st.epsilon = 0.02;

  int checks = 0, within = 0, trees = 0;
  while (trees < 100) {
    AttackTree t = testgen::random_tree(rng, 8);
    if (t.has_shared_nodes()) continue;
    ++trees;

    CdfGrid curve = top_curve(t, times.back());
    NSTA nsta = translate_tree(t);
    std::vector<Estimate> est = estimate_multi(nsta, monitor_query(nsta, 180.0),
                                               times, st);
    for (std::size_t i = 0; i < times.size(); ++i) {
      ++checks;
      if (std::abs(est[i].p_hat - curve.at_time(times[i])) <= 0.021) ++within;
    }
  }
  double sec = watch.seconds();
  bool ok = checks == 300 && within >= 285 && sec < 120.0;
  char label[128];
  std::snprintf(label, sizeof label,
                "oracle vs SMC on 100 random trees (%d/%d within 0.021)", within,
                checks);
  report(3, label, ok, sec);
}

void criterion4() {
  Stopwatch watch;
  bool ok = true;
  for (int n : {2, 3, 4}) {
    for (double lambda : {0.002, 0.01}) {
      AttackTree t;
      t.top_event = "G";
      std::vector<std::string> children;
      for (int i = 0; i < n; ++i) {
        std::string id = "L" + std::to_string(i);
        t.nodes.push_back(leaf_node(id, lambda));
        children.push_back(id);
      }
      t.nodes.insert(t.nodes.begin(), gate_node("G", GateKind::Sand, children));

      CdfGrid g = top_curve(t, 200.0, OracleSettings{0.1});
      for (std::size_t k = 0; k < g.values.size(); ++k) {
        double at = static_cast<double>(k) * g.step;
        if (std::abs(g.values[k] - ref::erlang_cdf(lambda, n, at)) > 1e-3) {
          ok = false;
          break;
        }
      }
    }
  }
  report(4, "SAND chains match Erlang CDFs within 1e-3", ok, watch.seconds());
}

void criterion5() {
  Stopwatch watch;
  const AttackTree security = shipped_security_model();
  const AttackTree privacy = shipped_privacy_model();
  auto parse = [](std::string_view text, const AttackTree& tree) {
    ScenarioParseResult r = parse_scenarios(text, tree);
    return r.scenarios;
  };

  auto sec_top = top_names(
      oracle_scenario_values(security, parse(data::security_individual(), security),
                             180.0),
      4);
  auto sec_argmax = argmax_names(
      oracle_scenario_values(security, parse(data::security_combos(), security), 180.0));
  auto priv_top = top_names(
      oracle_scenario_values(privacy, parse(data::privacy_individual(), privacy), 180.0),
      4);
  auto priv_argmax = argmax_names(
      oracle_scenario_values(privacy, parse(data::privacy_combos(), privacy), 180.0));

  bool ok = same_set(sec_top, {"TS2", "TS3", "TS4", "TS7"});
  ok = ok && !sec_argmax.empty();
  for (const std::string& name : sec_argmax)
    ok = ok && (name == "TS6*" || name == "TS7*");
  ok = ok && same_set(priv_top, {"PTS1", "PTS3", "PTS4", "PTS9"});
  ok = ok && same_set(priv_argmax, {"PTS1*"});

  double sec = watch.seconds();
  report(5, "scenario rankings on the shipped models", ok && sec < 10.0, sec);
}

void criterion6() {
  Stopwatch watch;
  bool ok = true;

  auto dominated = [&](const CdfGrid& after, const CdfGrid& before) {
    if (after.values.size() != before.values.size()) return false;
    for (std::size_t k = 0; k < after.values.size(); ++k)
      if (after.values[k] > before.values[k] + 1e-9) return false;
    return true;
  };

  // Shipped plans on their comparison baselines.
  {
    const AttackTree security = shipped_security_model();
    auto scn = parse_scenarios(data::security_compare(), security).scenarios;
    AttackTree before = apply_scenario(security, scn.front());
    auto plan = parse_plan(data::security_plan());
    AttackTree hardened = apply_transform(before, plan.at(0));
    AttackTree lp = apply_transform(before, plan.at(1));
    AttackTree combined = apply_plan(before, plan);

    CdfGrid b = top_curve(before, 180.0);
    CdfGrid h = top_curve(hardened, 180.0);
    CdfGrid l = top_curve(lp, 180.0);
    CdfGrid c = top_curve(combined, 180.0);
    ok = ok && dominated(h, b) && dominated(l, b) && dominated(c, h) && dominated(c, l);

    double reduction = (b.values.back() - c.values.back()) / b.values.back() * 100.0;
    ok = ok && reduction >= 10.0;
  }
  {
    const AttackTree privacy = shipped_privacy_model();
    auto scn = parse_scenarios(data::privacy_compare(), privacy).scenarios;
    AttackTree before = apply_scenario(privacy, scn.front());
    auto plan = parse_plan(data::privacy_plan());
    AttackTree diverse = apply_transform(before, plan.at(0));
    AttackTree lp = apply_transform(before, plan.at(1));
    AttackTree combined = apply_plan(before, plan);

    CdfGrid b = top_curve(before, 180.0);
    CdfGrid d = top_curve(diverse, 180.0);
    CdfGrid l = top_curve(lp, 180.0);
    CdfGrid c = top_curve(combined, 180.0);
    ok = ok && dominated(d, b) && dominated(l, b) && dominated(c, d) && dominated(c, l);

    double reduction = (b.values.back() - c.values.back()) / b.values.back() * 100.0;
    ok = ok && reduction >= 40.0;
  }

  // Random transforms never increase the curve.
  SplitMix64 rng(4711);
  int pairs = 0;
  while (pairs < 200) {
    AttackTree t = testgen::random_tree(rng, 10);
    if (t.has_shared_nodes()) continue;
    ++pairs;
    std::vector<const Node*> leaves = t.leaves();
    const Node* pick = leaves[rng.next() % leaves.size()];
    AttackTree after;
    switch (rng.next() % 3) {
      case 0:
        after = apply_hardening(t, pick->id, {{"Counter", Rate{0.002}}});
        break;
      case 1:
        after = apply_diversity(t, pick->id, {{"Alt", Rate{0.003}}});
        break;
      default:
        after = apply_least_privilege(t, {pick->id},
                                      0.05 + 0.9 * rng.next_unit_open());
        break;
    }
    if (!dominated(top_curve(after, 240.0, OracleSettings{1.0}),
                   top_curve(t, 240.0, OracleSettings{1.0}))) {
      ok = false;
      break;
    }
  }

  report(6, "transformations only ever lower the disruption curve", ok,
         watch.seconds());
}

void criterion7() {
  Stopwatch watch;
  bool ok = true;

  AttackTree security = shipped_security_model();
  NSTA nsta = translate_tree(security);
  SmcQuery q = monitor_query(nsta, 120.0);
  SmcSettings st;
  st.epsilon = 0.05;

  std::string first;
  for (int workers : {1, 8, 1, 8}) {
    SmcSettings w = st;
    w.workers = workers;
    std::string json = estimate_json(estimate(nsta, q, w));
    if (first.empty())
      first = json;
    else
      ok = ok && json == first;
  }

  AttackTree single;
  single.top_event = "X";
  single.nodes.push_back(leaf_node("X", 0.01));
  NSTA net = translate_tree(single);
  const std::string dir = ATSMC_GOLDEN_DIR;
  for (std::uint64_t seed : {1, 2, 3}) {
    std::string fixture = slurp(dir + "/trace_seed" + std::to_string(seed) + ".txt");
    ok = ok && !fixture.empty();
    ok = ok && render(simulate_trace(net, seed, 100.0), net) == fixture;
  }

  report(7, "worker-count invariance and golden traces", ok, watch.seconds());
}

void criterion8() {
  Stopwatch watch;
  bool ok = true;

  SplitMix64 rng(808);
  for (int i = 0; i < 1000 && ok; ++i) {
    AttackTree t = testgen::random_tree(rng, 20);
    ParseResult dsl = parse_model(serialize_model(t, ModelFormat::Dsl));
    ok = ok && dsl.ok() && trees_equal(t, *dsl.tree);
    ParseResult js = parse_model_json(serialize_model(t, ModelFormat::Json));
    ok = ok && js.ok() && trees_equal(t, *js.tree);
  }

  for (int i = 0; i < 10000 && ok; ++i) {
    std::size_t len = rng.next() % 256;
    std::string text;
    text.reserve(len);
    for (std::size_t b = 0; b < len; ++b)
      text.push_back(static_cast<char>(rng.next() % 256));
    ParseResult r = parse_model(text);  // must not crash or throw
    for (const ParseError& e : r.errors)
      ok = ok && e.span.line >= 1 && e.span.column >= 1;
  }

  report(8, "serialization round-trips and fuzz stability", ok, watch.seconds());
}

void criterion9() {
  Stopwatch watch;
  auto estimate_at = [](double p_hat) {
    Estimate e;
    e.p_hat = p_hat;
    e.epsilon = 0.01;
    return e;
  };
  bool ok = check_threshold(estimate_at(0.53), 0.25) == Verdict::Above &&
            check_threshold(estimate_at(0.10), 0.25) == Verdict::Below &&
            check_threshold(estimate_at(0.25), 0.25) == Verdict::Inconclusive;
  report(9, "threshold verdicts", ok, watch.seconds());
}

void criterion10() {
  Stopwatch watch;
  bool ok = true;

  namespace fs = std::filesystem;
  fs::path outdir = fs::temp_directory_path() / "atsmc_acceptance_results";
  fs::remove_all(outdir);

  Stopwatch suite;
  run_experiments(outdir.string());
  double suite_s = suite.seconds();
  ok = ok && suite_s < 300.0;
  for (const char* name :
       {"security_individual.csv", "security_combos.csv", "privacy_individual.csv",
        "privacy_combos.csv", "security_hardening.csv", "security_plan.csv",
        "privacy_diversity.csv", "privacy_plan.csv", "summary.txt", "summary.json"})
    ok = ok && fs::exists(outdir / name);
  fs::remove_all(outdir);

  AttackTree security = shipped_security_model();
  NSTA nsta = translate_tree(security);
  Stopwatch single;
  Estimate e = estimate(nsta, monitor_query(nsta, 180.0), SmcSettings{});
  double single_s = single.seconds();
  ok = ok && e.runs == 18445 && single_s < 10.0;

  char label[128];
  std::snprintf(label, sizeof label,
                "experiment suite %.1fs, 18445-run estimate %.2fs", suite_s, single_s);
  report(10, label, ok, watch.seconds());
}

}  // namespace

int main() {
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  criterion9();
  criterion10();

  if (failures) {
    std::printf("%d criterion(s) failed\n", failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}
