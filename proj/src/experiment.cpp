#include "atsmc/experiment.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "atsmc/errors.hpp"
#include "atsmc/models.hpp"
#include "atsmc/parser.hpp"
#include "atsmc/principles.hpp"
#include "atsmc/translate.hpp"

namespace atsmc {

Method method_from(std::string_view name) {
  if (name == "smc") return Method::Smc;
  if (name == "oracle") return Method::Oracle;
  throw std::invalid_argument("method must be 'smc' or 'oracle'");
}

std::vector<ScenarioValue> oracle_scenario_values(const AttackTree& tree,
                                                  const std::vector<ScenarioSpec>& scenarios,
                                                  double time,
                                                  const OracleSettings& settings) {
  std::vector<ScenarioValue> out;
  out.reserve(scenarios.size());
  for (const ScenarioSpec& scn : scenarios)
    out.push_back({scn.name, top_probability(apply_scenario(tree, scn), time, settings)});
  return out;
}

std::vector<std::string> top_names(std::vector<ScenarioValue> values, std::size_t k) {
  std::stable_sort(values.begin(), values.end(),
                   [](const ScenarioValue& a, const ScenarioValue& b) {
                     return a.probability > b.probability;
                   });
  if (values.size() > k) values.resize(k);
  std::vector<std::string> names;
  for (ScenarioValue& v : values) names.push_back(std::move(v.name));
  return names;
}

std::vector<std::string> argmax_names(const std::vector<ScenarioValue>& values,
                                      double slack) {
  double best = 0.0;
  for (const ScenarioValue& v : values) best = std::max(best, v.probability);
  std::vector<std::string> names;
  for (const ScenarioValue& v : values)
    if (v.probability >= best - slack) names.push_back(v.name);
  return names;
}

namespace {

// Query the root monitor's goal location; it works for any tree shape,
// including a bare-leaf top event.
SmcQuery top_query(const NSTA& nsta, double bound) {
  SmcQuery q;
  q.time_bound = bound;
  q.automaton = 0;
  q.location = *nsta.automata[0].accepting;
  q.automaton_id = nsta.automata[0].id;
  q.location_id = nsta.automata[0].locations[static_cast<std::size_t>(q.location)].id;
  return q;
}

ReportRow oracle_row(std::string scenario, double t, const CdfGrid& curve) {
  ReportRow row;
  row.scenario = std::move(scenario);
  row.time_s = t;
  row.method = "oracle";
  row.probability = curve.at_time(t);
  row.ci_low = row.probability;
  row.ci_high = row.probability;
  return row;
}

}  // namespace

std::vector<ReportRow> analysis_rows(const AttackTree& tree,
                                     const std::vector<ScenarioSpec>& scenarios,
                                     std::vector<double> times,
                                     const std::vector<Method>& methods,
                                     const SmcSettings& smc,
                                     const OracleSettings& oracle) {
  std::vector<ReportRow> rows;
  if (times.empty() || methods.empty()) return rows;
  std::sort(times.begin(), times.end());
  const bool want_smc =
      std::find(methods.begin(), methods.end(), Method::Smc) != methods.end();
  const bool want_oracle =
      std::find(methods.begin(), methods.end(), Method::Oracle) != methods.end();

  for (const ScenarioSpec& scn : scenarios) {
    AttackTree variant = apply_scenario(tree, scn);
    std::vector<Estimate> estimates;
    if (want_smc) {
      NSTA nsta = translate_tree(variant);
      estimates = estimate_multi(nsta, top_query(nsta, times.back()), times, smc);
    }
    CdfGrid curve;
    if (want_oracle) curve = top_curve(variant, times.back(), oracle);

    for (std::size_t ti = 0; ti < times.size(); ++ti)
      for (Method m : methods) {
        if (m == Method::Smc) {
          const Estimate& e = estimates[ti];
          ReportRow row;
          row.scenario = scn.name;
          row.time_s = times[ti];
          row.method = "smc";
          row.probability = e.p_hat;
          row.ci_low = e.ci_low();
          row.ci_high = e.ci_high();
          row.runs = e.runs;
          row.seed = e.seed;
          rows.push_back(std::move(row));
        } else {
          rows.push_back(oracle_row(scn.name, times[ti], curve));
        }
      }
  }
  return rows;
}

std::vector<ReportRow> comparison_rows(
    const std::vector<std::pair<std::string, AttackTree>>& variants,
    std::vector<double> times, const OracleSettings& settings) {
  std::vector<ReportRow> rows;
  if (times.empty()) return rows;
  std::sort(times.begin(), times.end());
  for (const auto& [label, tree] : variants) {
    CdfGrid curve = top_curve(tree, times.back(), settings);
    for (double t : times) rows.push_back(oracle_row(label, t, curve));
  }
  return rows;
}

namespace {

std::vector<ScenarioSpec> embedded_scenarios(std::string_view text,
                                             const AttackTree& tree) {
  ScenarioParseResult result = parse_scenarios(text, tree);
  if (!result.ok())
    throw Error("embedded scenario list failed to parse: " +
                result.errors.front().message);
  return result.scenarios;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
  if (!out) throw Error("cannot write " + path.string());
}

std::string join(const std::vector<std::string>& names) {
  std::string out;
  for (const std::string& n : names) {
    if (!out.empty()) out += ' ';
    out += n;
  }
  return out;
}

std::string percent(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", value);
  return buf;
}

}  // namespace

ExperimentSummary run_experiments(const std::string& outdir,
                                  const ExperimentOptions& options) {
  namespace fs = std::filesystem;
  fs::create_directories(outdir);
  const fs::path dir(outdir);

  SmcSettings smc;
  smc.epsilon = options.epsilon;
  smc.alpha = options.alpha;
  smc.seed = options.seed;
  smc.workers = options.workers;

  const AttackTree security = shipped_security_model();
  const AttackTree privacy = shipped_privacy_model();
  const auto sec_individual = embedded_scenarios(data::security_individual(), security);
  const auto sec_combos = embedded_scenarios(data::security_combos(), security);
  const auto priv_individual = embedded_scenarios(data::privacy_individual(), privacy);
  const auto priv_combos = embedded_scenarios(data::privacy_combos(), privacy);

  const std::vector<double> sweep_times{60.0, 120.0, 180.0};
  const std::vector<double> curve_times{30.0, 60.0, 90.0, 120.0, 150.0, 180.0};
  const std::vector<Method> both{Method::Smc, Method::Oracle};

  write_file(dir / "security_individual.csv",
             to_csv(analysis_rows(security, sec_individual, sweep_times, both, smc)));
  write_file(dir / "security_combos.csv",
             to_csv(analysis_rows(security, sec_combos, sweep_times, both, smc)));
  write_file(dir / "privacy_individual.csv",
             to_csv(analysis_rows(privacy, priv_individual, sweep_times, both, smc)));
  write_file(dir / "privacy_combos.csv",
             to_csv(analysis_rows(privacy, priv_combos, sweep_times, both, smc)));

  const auto sec_plan = parse_plan(data::security_plan());
  const auto priv_plan = parse_plan(data::privacy_plan());
  const AttackTree sec_before = apply_scenario(
      security, embedded_scenarios(data::security_compare(), security).front());
  const AttackTree priv_before = apply_scenario(
      privacy, embedded_scenarios(data::privacy_compare(), privacy).front());

  const AttackTree sec_hardened = apply_transform(sec_before, sec_plan.at(0));
  const AttackTree sec_lp = apply_transform(sec_before, sec_plan.at(1));
  const AttackTree sec_combined = apply_plan(sec_before, sec_plan);
  const AttackTree priv_diverse = apply_transform(priv_before, priv_plan.at(0));
  const AttackTree priv_lp = apply_transform(priv_before, priv_plan.at(1));
  const AttackTree priv_combined = apply_plan(priv_before, priv_plan);

  write_file(dir / "security_hardening.csv",
             to_csv(comparison_rows(
                 {{"before", sec_before}, {"hardening", sec_hardened}}, curve_times)));
  write_file(dir / "security_plan.csv",
             to_csv(comparison_rows({{"before", sec_before},
                                     {"least_privilege", sec_lp},
                                     {"combined", sec_combined}},
                                    curve_times)));
  write_file(dir / "privacy_diversity.csv",
             to_csv(comparison_rows(
                 {{"before", priv_before}, {"diversity", priv_diverse}}, curve_times)));
  write_file(dir / "privacy_plan.csv",
             to_csv(comparison_rows({{"before", priv_before},
                                     {"least_privilege", priv_lp},
                                     {"combined", priv_combined}},
                                    curve_times)));

  const double t_rank = 180.0;
  ExperimentSummary summary;
  summary.security_top = top_names(oracle_scenario_values(security, sec_individual, t_rank), 4);
  summary.security_combo_argmax =
      argmax_names(oracle_scenario_values(security, sec_combos, t_rank));
  summary.privacy_top = top_names(oracle_scenario_values(privacy, priv_individual, t_rank), 4);
  summary.privacy_combo_argmax =
      argmax_names(oracle_scenario_values(privacy, priv_combos, t_rank));

  auto reduction = [&](const AttackTree& before, const AttackTree& after) {
    double b = top_probability(before, t_rank);
    double a = top_probability(after, t_rank);
    return (b - a) / b * 100.0;
  };
  summary.security_reduction_hardening = reduction(sec_before, sec_hardened);
  summary.security_reduction_least_privilege = reduction(sec_before, sec_lp);
  summary.security_reduction_combined = reduction(sec_before, sec_combined);
  summary.privacy_reduction_diversity = reduction(priv_before, priv_diverse);
  summary.privacy_reduction_least_privilege = reduction(priv_before, priv_lp);
  summary.privacy_reduction_combined = reduction(priv_before, priv_combined);

  std::string txt;
  txt += "security individual top tier (oracle, t=180): " + join(summary.security_top) + "\n";
  txt += "security combo most vulnerable: " + join(summary.security_combo_argmax) + "\n";
  txt += "privacy individual top tier: " + join(summary.privacy_top) + "\n";
  txt += "privacy combo most vulnerable: " + join(summary.privacy_combo_argmax) + "\n";
  txt += "security plan reduction at t=180: hardening " +
         percent(summary.security_reduction_hardening) + "%, least_privilege " +
         percent(summary.security_reduction_least_privilege) + "%, combined " +
         percent(summary.security_reduction_combined) + "%\n";
  txt += "privacy plan reduction at t=180: diversity " +
         percent(summary.privacy_reduction_diversity) + "%, least_privilege " +
         percent(summary.privacy_reduction_least_privilege) + "%, combined " +
         percent(summary.privacy_reduction_combined) + "%\n";
  write_file(dir / "summary.txt", txt);

  nlohmann::ordered_json j;
  j["security"]["top_individual"] = summary.security_top;
  j["security"]["combo_argmax"] = summary.security_combo_argmax;
  j["security"]["reduction_percent"]["hardening"] = summary.security_reduction_hardening;
  j["security"]["reduction_percent"]["least_privilege"] =
      summary.security_reduction_least_privilege;
  j["security"]["reduction_percent"]["combined"] = summary.security_reduction_combined;
  j["privacy"]["top_individual"] = summary.privacy_top;
  j["privacy"]["combo_argmax"] = summary.privacy_combo_argmax;
  j["privacy"]["reduction_percent"]["diversity"] = summary.privacy_reduction_diversity;
  j["privacy"]["reduction_percent"]["least_privilege"] =
      summary.privacy_reduction_least_privilege;
  j["privacy"]["reduction_percent"]["combined"] = summary.privacy_reduction_combined;
  write_file(dir / "summary.json", j.dump(2) + "\n");

  return summary;
}

}  // namespace atsmc
