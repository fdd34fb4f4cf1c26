#include "atsmc/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_map>

#include <json.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "atsmc/errors.hpp"
#include "atsmc/parser.hpp"
#include "atsmc/rng.hpp"

namespace atsmc {

std::int64_t required_runs(double epsilon, double alpha) {
  if (!(epsilon > 0.0) || !(epsilon < 1.0))
    throw std::invalid_argument("required_runs: epsilon must be in (0,1)");
  if (!(alpha > 0.0) || !(alpha < 1.0))
    throw std::invalid_argument("required_runs: alpha must be in (0,1)");
  return static_cast<std::int64_t>(
      std::ceil(std::log(2.0 / alpha) / (2.0 * epsilon * epsilon)));
}

double Estimate::ci_low() const { return std::max(0.0, p_hat - epsilon); }
double Estimate::ci_high() const { return std::min(1.0, p_hat + epsilon); }

const char* to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::Below: return "Below";
    case Verdict::Above: return "Above";
    case Verdict::Inconclusive: return "Inconclusive";
  }
  return "?";
}

Verdict check_threshold(const Estimate& estimate, double threshold) {
  if (estimate.ci_high() < threshold) return Verdict::Below;
  if (estimate.ci_low() > threshold) return Verdict::Above;
  return Verdict::Inconclusive;
}

std::string estimate_json(const Estimate& estimate) {
  nlohmann::ordered_json j;
  j["p_hat"] = estimate.p_hat;
  j["epsilon"] = estimate.epsilon;
  j["alpha"] = estimate.alpha;
  j["runs"] = estimate.runs;
  j["successes"] = estimate.successes;
  j["seed"] = estimate.seed;
  return j.dump();
}

// ---------------------------------------------------------------------------
// Query parsing
// ---------------------------------------------------------------------------

namespace {

struct Cursor {
  std::string_view s;
  std::size_t i = 0;

  void ws() {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
  }
  bool lit(std::string_view w) {
    ws();
    if (s.substr(i).substr(0, w.size()) != w) return false;
    i += w.size();
    return true;
  }
  std::string ident() {
    ws();
    std::size_t b = i;
    auto start = [](char c) {
      return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
    };
    auto cont = [&](char c) { return start(c) || (c >= '0' && c <= '9'); };
    if (i < s.size() && start(s[i])) {
      ++i;
      while (i < s.size() && cont(s[i])) ++i;
    }
    return std::string(s.substr(b, i - b));
  }
  // Plain decimal number, no exponent, no sign.
  double number(bool& ok) {
    ws();
    std::size_t b = i;
    while (i < s.size() && s[i] >= '0' && s[i] <= '9') ++i;
    if (i < s.size() && s[i] == '.') {
      ++i;
      while (i < s.size() && s[i] >= '0' && s[i] <= '9') ++i;
    }
    ok = i > b;
    if (!ok) return 0.0;
    return std::strtod(std::string(s.substr(b, i - b)).c_str(), nullptr);
  }
  bool at_end() {
    ws();
    return i >= s.size();
  }
};

}  // namespace

SmcQuery parse_query(std::string_view text, const NSTA& nsta) {
  Cursor c{text};
  auto fail = [&](const std::string& msg) -> void {
    throw QueryError("query '" + std::string(text) + "': " + msg);
  };

  if (!c.lit("Pr")) fail("expected 'Pr'");
  if (!c.lit("[")) fail("expected '['");
  if (c.ident() != nsta.global_clock)
    fail("expected global clock '" + nsta.global_clock + "'");
  if (!c.lit("<=")) fail("expected '<='");
  bool ok = false;
  double bound = c.number(ok);
  if (!ok) fail("expected a decimal time bound");
  if (!(bound > 0.0) || !std::isfinite(bound)) fail("time bound must be positive");
  if (!c.lit("]")) fail("expected ']'");
  if (!c.lit("(")) fail("expected '('");
  if (!c.lit("<>")) fail("expected '<>'");
  std::string node = c.ident();
  if (node.empty()) fail("expected an automaton name");
  if (!c.lit(".")) fail("expected '.'");
  std::string loc = c.ident();
  if (loc.empty()) fail("expected a location name");
  if (!c.lit(")")) fail("expected ')'");
  if (!c.at_end()) fail("unexpected trailing text");

  SmcQuery query;
  query.time_bound = bound;
  query.automaton = nsta.automaton_index(node);
  if (query.automaton < 0) fail("unknown automaton '" + node + "'");
  query.location = nsta.automata[query.automaton].location_index(loc);
  if (query.location < 0)
    fail("automaton '" + node + "' has no location '" + loc + "'");
  query.automaton_id = node;
  query.location_id = loc;
  return query;
}

std::string to_string(const SmcQuery& query) {
  return "Pr[x<=" + format_rate(query.time_bound) + "](<> " + query.automaton_id +
         "." + query.location_id + ")";
}

// ---------------------------------------------------------------------------
// Compiled simulator
// ---------------------------------------------------------------------------

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct CGuard {
  int clock;
  CmpOp op;
  double bound;
};

struct CEdge {
  int automaton;
  int src;
  int dst;
  int chan = -1;  // -1: silent
  bool recv = false;
  std::vector<CGuard> guard;
  std::vector<int> resets;
};

struct CAutomaton {
  int initial = 0;
  std::vector<double> sojourn;                          // per location; <0: none
  std::vector<std::vector<int>> nonrecv;                // per location: edge ids
  std::vector<std::vector<std::pair<int, int>>> recv;   // per location: (chan, edge)
};

struct CompiledNet {
  int n_automata = 0;
  int n_clocks = 1;  // clock 0 is the global clock
  long livelock_limit = 0;
  std::vector<CAutomaton> automata;
  std::vector<CEdge> edges;
  std::vector<std::string> channel_names;
};

CompiledNet compile(const NSTA& nsta) {
  CompiledNet net;
  net.n_automata = static_cast<int>(nsta.automata.size());
  net.livelock_limit = 10L * net.n_automata;

  std::unordered_map<std::string_view, int> chan_index;
  for (const Channel& c : nsta.channels) {
    chan_index.emplace(c.name, static_cast<int>(net.channel_names.size()));
    net.channel_names.push_back(c.name);
  }

  for (int a = 0; a < net.n_automata; ++a) {
    const STA& sta = nsta.automata[a];
    CAutomaton ca;
    ca.initial = sta.initial;
    const int nloc = static_cast<int>(sta.locations.size());
    if (sta.initial < 0 || sta.initial >= nloc)
      throw SimulationError("automaton '" + sta.id + "' has a bad initial location");
    ca.sojourn.resize(nloc, -1.0);
    for (int l = 0; l < nloc; ++l)
      if (sta.locations[l].sojourn_exp) {
        if (!sta.locations[l].sojourn_exp->valid())
          throw SimulationError("automaton '" + sta.id + "' has an invalid sojourn rate");
        ca.sojourn[l] = sta.locations[l].sojourn_exp->lambda;
      }
    ca.nonrecv.resize(nloc);
    ca.recv.resize(nloc);

    std::unordered_map<std::string_view, int> local_clock;
    for (const std::string& name : sta.clocks)
      if (name != nsta.global_clock && !local_clock.count(name)) {
        local_clock.emplace(name, net.n_clocks);
        ++net.n_clocks;
      }
    auto clock_id = [&](const std::string& name) {
      if (name == nsta.global_clock) return 0;
      auto it = local_clock.find(name);
      if (it == local_clock.end())
        throw SimulationError("automaton '" + sta.id + "' uses undeclared clock '" +
                              name + "'");
      return it->second;
    };

    for (const Edge& e : sta.edges) {
      if (e.source < 0 || e.source >= nloc || e.target < 0 || e.target >= nloc)
        throw SimulationError("automaton '" + sta.id + "' has an out-of-range edge");
      CEdge ce;
      ce.automaton = a;
      ce.src = e.source;
      ce.dst = e.target;
      if (e.channel) {
        auto it = chan_index.find(*e.channel);
        if (it == chan_index.end())
          throw SimulationError("automaton '" + sta.id + "' uses undeclared channel '" +
                                *e.channel + "'");
        ce.chan = it->second;
        ce.recv = e.dir == ActionDir::Receive;
      }
      for (const ClockConstraint& g : e.guard)
        ce.guard.push_back({clock_id(g.clock), g.op, g.bound});
      for (const std::string& r : e.resets) ce.resets.push_back(clock_id(r));

      int edge_id = static_cast<int>(net.edges.size());
      if (ce.recv)
        ca.recv[ce.src].push_back({ce.chan, edge_id});
      else
        ca.nonrecv[ce.src].push_back(edge_id);
      net.edges.push_back(std::move(ce));
    }
    net.automata.push_back(std::move(ca));
  }
  return net;
}

struct RunState {
  std::vector<int> loc;
  std::vector<double> exit_time;
  std::vector<double> reset;
};

struct NoRecord {
  void operator()(double, int, int, int, TraceEvent::Kind, int) const {}
};

// One execution up to `horizon`.  Returns the entry time of the goal
// location, or +inf when it is never reached.  Zero-delay moves are processed
// to a fixpoint in ascending automaton index before time advances; the
// timestamp cascade that reaches the goal is completed before stopping.
template <class Rec>
double run_trace(const CompiledNet& net, SplitMix64& rng, double horizon,
                 int goal_a, int goal_l, RunState& st, Rec&& rec) {
  st.loc.assign(net.n_automata, 0);
  st.exit_time.assign(net.n_automata, kInf);
  st.reset.assign(net.n_clocks, 0.0);

  double goal_time = kInf;
  double now = 0.0;
  long events_at_now = 0;

  auto guards_ok = [&](const CEdge& e) {
    for (const CGuard& g : e.guard) {
      double v = now - st.reset[g.clock];
      bool ok = g.op == CmpOp::Lt   ? v < g.bound
                : g.op == CmpOp::Le ? v <= g.bound
                : g.op == CmpOp::Ge ? v >= g.bound
                                    : v > g.bound;
      if (!ok) return false;
    }
    return true;
  };

  auto enter = [&](int a, int l) {
    st.loc[a] = l;
    double lambda = net.automata[a].sojourn[l];
    st.exit_time[a] = lambda > 0.0 ? now + sample_exponential(rng, lambda) : kInf;
    if (a == goal_a && l == goal_l && goal_time == kInf) goal_time = now;
  };

  auto fire = [&](int edge_id, TraceEvent::Kind kind) {
    const CEdge& e = net.edges[edge_id];
    rec(now, e.automaton, e.src, e.dst, kind, e.chan);
    for (int c : e.resets) st.reset[c] = now;
    enter(e.automaton, e.dst);
    ++events_at_now;
  };

  auto fire_and_broadcast = [&](int edge_id, TraceEvent::Kind kind) {
    const int chan = net.edges[edge_id].chan;
    const int sender = net.edges[edge_id].automaton;
    fire(edge_id, kind);
    if (chan < 0) return;
    // Every listening automaton synchronizes, in ascending index order.
    for (int a = 0; a < net.n_automata; ++a) {
      if (a == sender) continue;
      for (const auto& [c, rx] : net.automata[a].recv[st.loc[a]]) {
        if (c != chan || !guards_ok(net.edges[rx])) continue;
        fire(rx, TraceEvent::Kind::Receive);
        break;
      }
    }
  };

  auto cascade = [&]() {
    bool progress = true;
    while (progress) {
      progress = false;
      for (int a = 0; a < net.n_automata && !progress; ++a) {
        if (net.automata[a].sojourn[st.loc[a]] >= 0.0) continue;
        for (int edge_id : net.automata[a].nonrecv[st.loc[a]]) {
          if (!guards_ok(net.edges[edge_id])) continue;
          fire_and_broadcast(edge_id, TraceEvent::Kind::Send);
          if (events_at_now > net.livelock_limit)
            throw SimulationError(
                "zero-delay livelock: more than " +
                std::to_string(net.livelock_limit) + " events at t=" +
                std::to_string(now));
          progress = true;
          break;
        }
      }
    }
  };

  for (int a = 0; a < net.n_automata; ++a) enter(a, net.automata[a].initial);
  cascade();

  while (goal_time == kInf) {
    int best = -1;
    double tmin = kInf;
    for (int a = 0; a < net.n_automata; ++a)
      if (st.exit_time[a] < tmin) {
        tmin = st.exit_time[a];
        best = a;
      }
    if (best < 0 || tmin > horizon) break;
    now = tmin;
    events_at_now = 0;
    bool fired = false;
    for (int edge_id : net.automata[best].nonrecv[st.loc[best]]) {
      if (!guards_ok(net.edges[edge_id])) continue;
      fire_and_broadcast(edge_id, TraceEvent::Kind::Delay);
      fired = true;
      break;
    }
    if (!fired) {
      // No enabled exit edge at expiry: the automaton stays put.
      st.exit_time[best] = kInf;
      continue;
    }
    cascade();
  }
  return goal_time;
}

void check_settings(const SmcSettings& s) {
  if (!(s.epsilon > 0.0) || !(s.epsilon < 1.0))
    throw std::invalid_argument("estimate: epsilon must be in (0,1)");
  if (!(s.alpha > 0.0) || !(s.alpha < 1.0))
    throw std::invalid_argument("estimate: alpha must be in (0,1)");
  if (s.workers < 1) throw std::invalid_argument("estimate: workers must be >= 1");
}

void check_query(const NSTA& nsta, const SmcQuery& q) {
  if (q.automaton < 0 || q.automaton >= static_cast<int>(nsta.automata.size()))
    throw QueryError("estimate: query automaton index out of range");
  const STA& sta = nsta.automata[q.automaton];
  if (q.location < 0 || q.location >= static_cast<int>(sta.locations.size()))
    throw QueryError("estimate: query location index out of range");
  if (!(q.time_bound > 0.0) || !std::isfinite(q.time_bound))
    throw QueryError("estimate: time bound must be positive and finite");
}

// Success counts for every bound in one pass; bounds must be sorted or not,
// each trace contributes to every bound its goal time does not exceed.
std::vector<std::int64_t> count_successes(const CompiledNet& net, std::int64_t runs,
                                          std::uint64_t seed, int goal_a, int goal_l,
                                          const std::vector<double>& bounds,
                                          int workers, bool parallel) {
  const double horizon = *std::max_element(bounds.begin(), bounds.end());
  const std::size_t nb = bounds.size();
  std::vector<std::int64_t> total(nb, 0);

#ifdef _OPENMP
  if (parallel && workers > 1) {
#pragma omp parallel num_threads(workers)
    {
      RunState st;
      std::vector<std::int64_t> local(nb, 0);
#pragma omp for schedule(static) nowait
      for (std::int64_t i = 0; i < runs; ++i) {
        SplitMix64 rng(trace_seed(seed, static_cast<std::uint64_t>(i)));
        double goal_time = run_trace(net, rng, horizon, goal_a, goal_l, st, NoRecord{});
        for (std::size_t j = 0; j < nb; ++j)
          if (goal_time <= bounds[j]) ++local[j];
      }
#pragma omp critical
      for (std::size_t j = 0; j < nb; ++j) total[j] += local[j];
    }
    return total;
  }
#else
  (void)parallel;
  (void)workers;
#endif

  RunState st;
  for (std::int64_t i = 0; i < runs; ++i) {
    SplitMix64 rng(trace_seed(seed, static_cast<std::uint64_t>(i)));
    double goal_time = run_trace(net, rng, horizon, goal_a, goal_l, st, NoRecord{});
    for (std::size_t j = 0; j < nb; ++j)
      if (goal_time <= bounds[j]) ++total[j];
  }
  return total;
}

std::vector<Estimate> estimate_impl(const NSTA& nsta, const SmcQuery& query,
                                    const std::vector<double>& bounds,
                                    const SmcSettings& settings, bool parallel) {
  check_settings(settings);
  check_query(nsta, query);
  for (double b : bounds)
    if (!(b > 0.0) || !std::isfinite(b))
      throw QueryError("estimate: time bound must be positive and finite");

  const std::int64_t runs = required_runs(settings.epsilon, settings.alpha);
  const auto t0 = std::chrono::steady_clock::now();
  CompiledNet net = compile(nsta);
  std::vector<std::int64_t> succ = count_successes(
      net, runs, settings.seed, query.automaton, query.location, bounds,
      settings.workers, parallel);
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  std::vector<Estimate> out;
  for (std::size_t j = 0; j < bounds.size(); ++j) {
    Estimate e;
    e.p_hat = static_cast<double>(succ[j]) / static_cast<double>(runs);
    e.epsilon = settings.epsilon;
    e.alpha = settings.alpha;
    e.runs = runs;
    e.successes = succ[j];
    e.seed = settings.seed;
    e.wall_time_s = elapsed;
    out.push_back(e);
  }
  return out;
}

}  // namespace

Trace simulate_trace(const NSTA& nsta, std::uint64_t seed, double horizon) {
  if (!(horizon >= 0.0) || !std::isfinite(horizon))
    throw SimulationError("simulate_trace: horizon must be finite and >= 0");
  CompiledNet net = compile(nsta);
  int goal_a = -1, goal_l = -1;
  if (!nsta.automata.empty() && nsta.automata[0].accepting) {
    goal_a = 0;
    goal_l = *nsta.automata[0].accepting;
  }
  Trace trace;
  trace.horizon = horizon;
  SplitMix64 rng(seed);
  RunState st;
  run_trace(net, rng, horizon, goal_a, goal_l, st,
            [&](double t, int a, int from, int to, TraceEvent::Kind kind, int chan) {
              trace.events.push_back(
                  {t, a, from, to, kind, chan >= 0 ? net.channel_names[chan] : ""});
            });
  return trace;
}

Estimate estimate(const NSTA& nsta, const SmcQuery& query, const SmcSettings& settings) {
  return estimate_impl(nsta, query, {query.time_bound}, settings, true).front();
}

Estimate estimate_serial(const NSTA& nsta, const SmcQuery& query,
                         const SmcSettings& settings) {
  return estimate_impl(nsta, query, {query.time_bound}, settings, false).front();
}

std::vector<Estimate> estimate_multi(const NSTA& nsta, const SmcQuery& query,
                                     const std::vector<double>& bounds,
                                     const SmcSettings& settings) {
  if (bounds.empty()) return {};
  return estimate_impl(nsta, query, bounds, settings, true);
}

}  // namespace atsmc
