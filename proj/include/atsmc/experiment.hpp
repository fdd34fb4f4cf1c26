// The bundled experiment suite: per-leaf and combination scenario sweeps on
// the shipped models, cross-checked SMC/oracle tables, and before/after
// comparisons for the bundled transformation plans.  The pieces (scenario
// sweeps, comparisons, rankings) are exposed so tools and tests can run them
// on their own inputs.
#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "atsmc/engine.hpp"
#include "atsmc/model.hpp"
#include "atsmc/oracle.hpp"
#include "atsmc/report.hpp"

namespace atsmc {

enum class Method { Smc, Oracle };

Method method_from(std::string_view name);  // "smc" or "oracle"

struct ScenarioValue {
  std::string name;
  double probability = 0.0;
};

/// Oracle top-event probability of every scenario at one time point.
std::vector<ScenarioValue> oracle_scenario_values(const AttackTree& tree,
                                                  const std::vector<ScenarioSpec>& scenarios,
                                                  double time,
                                                  const OracleSettings& settings = {});

/// Names of the k most probable entries, most probable first; ties keep the
/// input order.
std::vector<std::string> top_names(std::vector<ScenarioValue> values, std::size_t k);

/// Names whose probability is within `slack` of the maximum.
std::vector<std::string> argmax_names(const std::vector<ScenarioValue>& values,
                                      double slack = 1e-12);

/// Evaluate every scenario at every time with the given methods.  Rows are
/// ordered scenario first (list order), then time ascending, then method in
/// the order given.  SMC rows query the top event through the root monitor
/// automaton, one simulation pass per scenario.
std::vector<ReportRow> analysis_rows(const AttackTree& tree,
                                     const std::vector<ScenarioSpec>& scenarios,
                                     std::vector<double> times,
                                     const std::vector<Method>& methods,
                                     const SmcSettings& smc,
                                     const OracleSettings& oracle = {});

/// Oracle top-event rows for named model variants (before/after comparisons).
std::vector<ReportRow> comparison_rows(
    const std::vector<std::pair<std::string, AttackTree>>& variants,
    std::vector<double> times, const OracleSettings& settings = {});

struct ExperimentOptions {
  double epsilon = 0.02;
  double alpha = 0.05;
  std::uint64_t seed = kDefaultSeed;
  int workers = 1;
};

struct ExperimentSummary {
  std::vector<std::string> security_top;           // top 4 individual scenarios
  std::vector<std::string> security_combo_argmax;  // most vulnerable pair(s)
  std::vector<std::string> privacy_top;
  std::vector<std::string> privacy_combo_argmax;
  // Top-event probability reduction at t=180, percent of the baseline.
  double security_reduction_hardening = 0.0;
  double security_reduction_least_privilege = 0.0;
  double security_reduction_combined = 0.0;
  double privacy_reduction_diversity = 0.0;
  double privacy_reduction_least_privilege = 0.0;
  double privacy_reduction_combined = 0.0;
};

/// Run the whole suite on the embedded models and write per-analysis CSV
/// files plus summary.txt and summary.json into `outdir` (created if
/// missing).  Deterministic for a fixed seed and option set.
ExperimentSummary run_experiments(const std::string& outdir,
                                  const ExperimentOptions& options = {});

}  // namespace atsmc
