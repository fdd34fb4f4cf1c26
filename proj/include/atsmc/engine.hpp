#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "atsmc/sta.hpp"

namespace atsmc {

inline constexpr std::uint64_t kDefaultSeed = 1;

/// Time-bounded reachability query "Pr[x<=T](<> NODE.LOCATION)".
struct SmcQuery {
  double time_bound = 0.0;
  int automaton = -1;
  int location = -1;
  std::string automaton_id;
  std::string location_id;
};

/// Parses the query against a network; NODE must resolve to an automaton and
/// LOCATION to one of its locations.  Throws QueryError.
SmcQuery parse_query(std::string_view text, const NSTA& nsta);

std::string to_string(const SmcQuery& query);

/// Okamoto / Chernoff-Hoeffding sample size: ceil(ln(2/alpha) / (2 eps^2)).
/// With this many runs, P(|p_hat - p| > eps) <= alpha.
std::int64_t required_runs(double epsilon, double alpha);

struct SmcSettings {
  double epsilon = 0.01;
  double alpha = 0.05;
  std::uint64_t seed = kDefaultSeed;
  int workers = 1;
};

struct Estimate {
  double p_hat = 0.0;
  double epsilon = 0.0;
  double alpha = 0.0;
  std::int64_t runs = 0;
  std::int64_t successes = 0;
  std::uint64_t seed = 0;
  double wall_time_s = 0.0;

  double ci_low() const;
  double ci_high() const;
};

/// One full execution from the initial configuration up to `horizon`,
/// recording every edge firing.  The stream of random draws is fully
/// determined by `seed` (see rng.hpp).  Stops early once automaton 0 enters
/// its accepting location, if it has one.
Trace simulate_trace(const NSTA& nsta, std::uint64_t seed, double horizon);

/// Monte Carlo estimate of the query probability.  Trace i draws from a
/// SplitMix64 stream seeded by trace_seed(settings.seed, i), so the result is
/// identical for any worker count and scheduling; aggregation is a plain
/// success count.  Runs the trace loop with OpenMP when available.
Estimate estimate(const NSTA& nsta, const SmcQuery& query, const SmcSettings& settings);

/// Reference implementation of estimate(): the same per-trace code on a plain
/// serial loop.  Kept for differential testing of the parallel kernel.
Estimate estimate_serial(const NSTA& nsta, const SmcQuery& query,
                         const SmcSettings& settings);

/// Several time bounds in one pass over the same traces: element j of the
/// result equals estimate() with query.time_bound = bounds[j].
std::vector<Estimate> estimate_multi(const NSTA& nsta, const SmcQuery& query,
                                     const std::vector<double>& bounds,
                                     const SmcSettings& settings);

enum class Verdict { Below, Above, Inconclusive };

const char* to_string(Verdict verdict);

/// Compares the confidence interval [p_hat - eps, p_hat + eps] (clamped to
/// [0,1]) against a threshold: Below if it lies entirely under, Above if
/// entirely over, Inconclusive when the threshold is inside.
Verdict check_threshold(const Estimate& estimate, double threshold);

/// Canonical JSON rendering {p_hat, epsilon, alpha, runs, successes, seed};
/// byte-identical for identical estimates.
std::string estimate_json(const Estimate& estimate);

}  // namespace atsmc
