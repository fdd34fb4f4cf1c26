#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "atsmc/model.hpp"

namespace atsmc {

// Stochastic timed automata with broadcast channel synchronization.  A
// location either has no stochastic sojourn (it is left via received signals
// or satisfied guards, with zero delay) or an exponential sojourn whose
// expiry fires the first enabled non-receiving edge.

enum class ActionDir { Send, Receive };

enum class CmpOp { Lt, Le, Ge, Gt };

const char* to_string(CmpOp op);

struct ClockConstraint {
  std::string clock;
  CmpOp op = CmpOp::Le;
  double bound = 0.0;
};

struct Location {
  std::string id;
  std::optional<Rate> sojourn_exp;  // nullopt: no stochastic sojourn
};

struct Edge {
  int source = -1;  // location indices
  int target = -1;
  std::optional<std::string> channel;
  ActionDir dir = ActionDir::Send;
  std::vector<ClockConstraint> guard;  // conjunction
  std::vector<std::string> resets;
};

struct STA {
  std::string id;
  std::vector<Location> locations;
  int initial = 0;
  std::vector<std::string> clocks;
  std::vector<Edge> edges;
  std::optional<int> accepting;  // goal location, if any

  int location_index(std::string_view name) const;
};

/// Broadcast channel: one sending automaton, any number of receivers.
struct Channel {
  std::string name;
};

struct NSTA {
  std::vector<STA> automata;
  std::vector<Channel> channels;
  std::string global_clock = "x";

  int automaton_index(std::string_view id) const;
  bool has_channel(std::string_view name) const;
};

/// One step of an execution; broadcasts appear as a Send event followed by
/// one Receive event per synchronizing automaton at the same timestamp.
struct TraceEvent {
  enum class Kind { Send, Receive, Delay };
  double time = 0.0;
  int automaton = -1;
  int from_location = -1;
  int to_location = -1;
  Kind kind = Kind::Send;
  std::string channel;  // empty for silent moves
};

struct Trace {
  std::vector<TraceEvent> events;
  double horizon = 0.0;
};

std::string render(const Trace& trace, const NSTA& nsta);

/// Parallel composition.  Checks well-formedness eagerly: nonempty automaton
/// list, unique automaton ids, every referenced channel declared, at most one
/// sending automaton per channel, edge endpoints in range.  Throws
/// CompositionError.  The global clock "x" is available to every automaton.
NSTA compose(std::vector<STA> automata, std::vector<Channel> channels);

/// Merge two networks (channel sets are united; same checks as compose).
/// Composition is associative up to automaton ordering of the flattened list.
NSTA compose(const NSTA& a, const NSTA& b);

/// Non-throwing structural check for hand-built networks.  Rules:
/// duplicate-automaton, undeclared-channel, multi-sender, unknown-clock,
/// bad-edge, unreachable-goal (static over-approximation that ignores guards
/// and signal availability).
std::vector<Violation> validate_nsta(const NSTA& nsta);

/// Deterministic line-oriented debug dump, suitable for golden-file tests.
std::string dump(const NSTA& nsta);

}  // namespace atsmc
