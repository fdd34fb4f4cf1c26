#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "atsmc/engine.hpp"
#include "atsmc/errors.hpp"
#include "atsmc/experiment.hpp"
#include "atsmc/model.hpp"
#include "atsmc/oracle.hpp"
#include "atsmc/parser.hpp"
#include "atsmc/principles.hpp"
#include "atsmc/report.hpp"
#include "atsmc/sta.hpp"
#include "atsmc/translate.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kInvalidModel = 1;
constexpr int kParseFailure = 2;
constexpr int kAboveThreshold = 3;
constexpr int kUsage = 4;

bool read_file(const std::string& path, std::string& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::ostringstream buf;
  buf << in.rdbuf();
  out = buf.str();
  return true;
}

bool write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
  return static_cast<bool>(out);
}

void print_errors(const std::string& path, const std::vector<atsmc::ParseError>& errors) {
  for (const atsmc::ParseError& e : errors)
    std::cerr << path << ":" << e.span.line << ":" << e.span.column << ": "
              << atsmc::to_string(e.kind) << ": " << e.message << "\n";
}

// Fills `tree` or returns the exit code: unreadable text is a parse failure,
// readable text describing a bad model is a validation failure.
int load_model(const std::string& path, atsmc::AttackTree& tree) {
  std::string text;
  if (!read_file(path, text)) {
    std::cerr << "cannot read " << path << "\n";
    return kUsage;
  }
  const bool json = path.size() >= 5 && path.rfind(".json") == path.size() - 5;
  atsmc::ParseResult result =
      json ? atsmc::parse_model_json(text) : atsmc::parse_model(text);
  if (!result.ok()) {
    print_errors(path, result.errors);
    return result.has_syntax_errors() ? kParseFailure : kInvalidModel;
  }
  tree = *std::move(result.tree);
  return kOk;
}

int load_scenarios(const std::string& path, const atsmc::AttackTree& tree,
                   std::vector<atsmc::ScenarioSpec>& out) {
  std::string text;
  if (!read_file(path, text)) {
    std::cerr << "cannot read " << path << "\n";
    return kUsage;
  }
  atsmc::ScenarioParseResult result = atsmc::parse_scenarios(text, tree);
  if (!result.ok()) {
    print_errors(path, result.errors);
    bool syntax = std::any_of(result.errors.begin(), result.errors.end(),
                              [](const atsmc::ParseError& e) {
                                return e.kind == atsmc::ParseErrorKind::Lexical ||
                                       e.kind == atsmc::ParseErrorKind::Syntax;
                              });
    return syntax ? kParseFailure : kInvalidModel;
  }
  out = std::move(result.scenarios);
  return kOk;
}

struct SmcFlags {
  double epsilon = 0.01;
  double alpha = 0.05;
  std::uint64_t seed = atsmc::kDefaultSeed;
  int workers = 1;

  void attach(CLI::App* cmd) {
    cmd->add_option("--eps", epsilon, "Additive error bound")
        ->check(CLI::Range(1e-6, 0.999));
    cmd->add_option("--alpha", alpha, "Confidence parameter")
        ->check(CLI::Range(1e-9, 0.999));
    cmd->add_option("--seed", seed, "Master seed")->envname("ATSMC_SEED");
    cmd->add_option("--workers", workers, "Worker threads")->check(CLI::Range(1, 1024));
  }
  atsmc::SmcSettings settings() const { return {epsilon, alpha, seed, workers}; }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Attack-tree disruption analysis by simulation and analytic cross-check"};
  app.require_subcommand(1);

  std::string model_path, after_path, out_path, query_text, node_id, mode, method_name,
      pairs_path, plan_path;
  std::string outdir = "results";
  std::vector<double> times;
  double step = 0.1;
  double cold = 0.002;
  double threshold = 0.0;
  bool do_dump = false;
  SmcFlags check_smc, analyze_smc, experiment_smc;
  experiment_smc.epsilon = 0.02;

  CLI::App* validate = app.add_subcommand("validate", "Parse and validate a model file");
  validate->add_option("file", model_path, "Model file (.adt or .json)")->required();

  CLI::App* translate = app.add_subcommand("translate", "Translate a model to its automaton network");
  translate->add_option("file", model_path, "Model file")->required();
  translate->add_flag("--dump", do_dump, "Print the full network");

  CLI::App* check = app.add_subcommand("check", "Estimate a reachability query by simulation");
  check->add_option("file", model_path, "Model file")->required();
  check->add_option("--query", query_text, "Query, e.g. Pr[x<=180](<> LoI.Disrupt)")->required();
  CLI::Option* thr_opt = check->add_option("--threshold", threshold, "Compare the estimate against a bound");
  check_smc.attach(check);

  CLI::App* oracle_cmd = app.add_subcommand("oracle", "Analytic disruption probabilities for one node");
  oracle_cmd->add_option("file", model_path, "Model file")->required();
  oracle_cmd->add_option("--node", node_id, "Node id")->required();
  oracle_cmd->add_option("--times", times, "Time points")->required()->delimiter(',');
  oracle_cmd->add_option("--step", step, "Grid step");

  CLI::App* analyze = app.add_subcommand("analyze", "Scenario sweep to CSV");
  analyze->add_option("file", model_path, "Model file")->required();
  analyze->add_option("--mode", mode, "individual or combo")
      ->required()
      ->check(CLI::IsMember({"individual", "combo"}));
  analyze->add_option("--pairs", pairs_path, "Scenario JSON (combo mode)");
  analyze->add_option("--times", times, "Time points")->required()->delimiter(',');
  CLI::Option* cold_opt = analyze->add_option("--cold", cold, "Background rate for non-hot leaves");
  analyze->add_option("--method", method_name, "smc or oracle")
      ->required()
      ->check(CLI::IsMember({"smc", "oracle"}));
  analyze->add_option("--out", out_path, "Output CSV path")->required();
  analyze_smc.attach(analyze);

  CLI::App* transform = app.add_subcommand("transform", "Apply a transformation plan to a model");
  transform->add_option("file", model_path, "Model file")->required();
  transform->add_option("--plan", plan_path, "Plan JSON file")->required();
  transform->add_option("--out", out_path, "Output model path (.adt or .json)")->required();

  CLI::App* compare = app.add_subcommand("compare", "Before/after analytic comparison to CSV");
  compare->add_option("base", model_path, "Baseline model file")->required();
  compare->add_option("after", after_path, "Transformed model file")->required();
  compare->add_option("--node", node_id, "Node id")->required();
  compare->add_option("--times", times, "Time points")->required()->delimiter(',');
  compare->add_option("--step", step, "Grid step");
  compare->add_option("--out", out_path, "Output CSV path")->required();

  CLI::App* experiment = app.add_subcommand("experiment", "Run the bundled analysis suite");
  experiment->add_option("--outdir", outdir, "Output directory");
  experiment_smc.attach(experiment);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*validate) {
      atsmc::AttackTree tree;
      if (int rc = load_model(model_path, tree)) return rc;
      std::size_t leaves = tree.leaves().size();
      std::cout << "ok name=" << tree.name << " nodes=" << tree.nodes.size()
                << " leaves=" << leaves << " top=" << tree.top_event << "\n";
      return kOk;
    }

    if (*translate) {
      atsmc::AttackTree tree;
      if (int rc = load_model(model_path, tree)) return rc;
      atsmc::NSTA nsta = atsmc::translate_tree(tree);
      if (do_dump)
        std::cout << atsmc::dump(nsta);
      else
        std::cout << "nsta automata=" << nsta.automata.size()
                  << " channels=" << nsta.channels.size() << "\n";
      return kOk;
    }

    if (*check) {
      atsmc::AttackTree tree;
      if (int rc = load_model(model_path, tree)) return rc;
      atsmc::NSTA nsta = atsmc::translate_tree(tree);
      atsmc::SmcQuery query = atsmc::parse_query(query_text, nsta);
      atsmc::Estimate est = atsmc::estimate(nsta, query, check_smc.settings());
      std::cout << atsmc::estimate_json(est) << "\n";
      if (thr_opt->count()) {
        atsmc::Verdict verdict = atsmc::check_threshold(est, threshold);
        std::cout << "verdict=" << atsmc::to_string(verdict) << "\n";
        if (verdict == atsmc::Verdict::Above) return kAboveThreshold;
      }
      return kOk;
    }

    if (*oracle_cmd) {
      atsmc::AttackTree tree;
      if (int rc = load_model(model_path, tree)) return rc;
      std::sort(times.begin(), times.end());
      atsmc::CdfGrid grid = atsmc::node_cdf(tree, node_id, times.back(), {step});
      for (double t : times)
        std::cout << "t=" << atsmc::format_rate(t)
                  << " p=" << atsmc::format_rate(grid.at_time(t)) << "\n";
      return kOk;
    }

    if (*analyze) {
      atsmc::AttackTree tree;
      if (int rc = load_model(model_path, tree)) return rc;
      std::vector<atsmc::ScenarioSpec> scenarios;
      if (mode == "individual") {
        scenarios = atsmc::enumerate_scenarios(tree, atsmc::Rate{cold});
      } else {
        if (pairs_path.empty()) {
          std::cerr << "combo mode needs --pairs\n";
          return kUsage;
        }
        if (int rc = load_scenarios(pairs_path, tree, scenarios)) return rc;
        if (cold_opt->count())
          for (atsmc::ScenarioSpec& s : scenarios) s.cold_rate = atsmc::Rate{cold};
      }
      std::vector<atsmc::ReportRow> rows = atsmc::analysis_rows(
          tree, scenarios, times, {atsmc::method_from(method_name)},
          analyze_smc.settings());
      if (!write_file(out_path, atsmc::to_csv(rows))) {
        std::cerr << "cannot write " << out_path << "\n";
        return kUsage;
      }
      std::cout << "wrote " << out_path << " rows=" << rows.size() << "\n";
      return kOk;
    }

    if (*transform) {
      atsmc::AttackTree tree;
      if (int rc = load_model(model_path, tree)) return rc;
      std::string plan_text;
      if (!read_file(plan_path, plan_text)) {
        std::cerr << "cannot read " << plan_path << "\n";
        return kUsage;
      }
      std::vector<atsmc::TransformSpec> plan;
      try {
        plan = atsmc::parse_plan(plan_text);
      } catch (const atsmc::TransformError& e) {
        std::cerr << plan_path << ": " << e.what() << "\n";
        return kParseFailure;
      }
      atsmc::AttackTree rewritten = atsmc::apply_plan(tree, plan);
      const bool json = out_path.size() >= 5 &&
                        out_path.rfind(".json") == out_path.size() - 5;
      std::string text = atsmc::serialize_model(
          rewritten, json ? atsmc::ModelFormat::Json : atsmc::ModelFormat::Dsl);
      if (!write_file(out_path, text)) {
        std::cerr << "cannot write " << out_path << "\n";
        return kUsage;
      }
      std::cout << "wrote " << out_path << "\n";
      return kOk;
    }

    if (*compare) {
      atsmc::AttackTree base, after;
      if (int rc = load_model(model_path, base)) return rc;
      if (int rc = load_model(after_path, after)) return rc;
      std::sort(times.begin(), times.end());
      atsmc::OracleSettings settings{step};
      atsmc::CdfGrid before_grid = atsmc::node_cdf(base, node_id, times.back(), settings);
      atsmc::CdfGrid after_grid = atsmc::node_cdf(after, node_id, times.back(), settings);
      std::vector<atsmc::ReportRow> rows;
      auto emit = [&](const char* label, const atsmc::CdfGrid& grid) {
        for (double t : times) {
          atsmc::ReportRow row;
          row.scenario = label;
          row.time_s = t;
          row.method = "oracle";
          row.probability = grid.at_time(t);
          row.ci_low = row.probability;
          row.ci_high = row.probability;
          rows.push_back(std::move(row));
        }
      };
      emit("before", before_grid);
      emit("after", after_grid);
      if (!write_file(out_path, atsmc::to_csv(rows))) {
        std::cerr << "cannot write " << out_path << "\n";
        return kUsage;
      }
      std::cout << "wrote " << out_path << " rows=" << rows.size() << "\n";
      return kOk;
    }

    if (*experiment) {
      atsmc::ExperimentOptions options;
      options.epsilon = experiment_smc.epsilon;
      options.alpha = experiment_smc.alpha;
      options.seed = experiment_smc.seed;
      options.workers = experiment_smc.workers;
      atsmc::run_experiments(outdir, options);
      std::cout << "wrote " << outdir << " (8 csv files, summary.txt, summary.json)\n";
      return kOk;
    }
  } catch (const atsmc::QueryError& e) {
    std::cerr << e.what() << "\n";
    return kUsage;
  } catch (const atsmc::Error& e) {
    std::cerr << e.what() << "\n";
    return kInvalidModel;
  } catch (const std::invalid_argument& e) {
    std::cerr << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return kInvalidModel;
  }
  return kUsage;
}
