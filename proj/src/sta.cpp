#include "atsmc/sta.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <unordered_map>
#include <unordered_set>

#include "atsmc/errors.hpp"

namespace atsmc {

const char* to_string(CmpOp op) {
  switch (op) {
    case CmpOp::Lt: return "<";
    case CmpOp::Le: return "<=";
    case CmpOp::Ge: return ">=";
    case CmpOp::Gt: return ">";
  }
  return "?";
}

int STA::location_index(std::string_view name) const {
  for (std::size_t i = 0; i < locations.size(); ++i)
    if (locations[i].id == name) return static_cast<int>(i);
  return -1;
}

int NSTA::automaton_index(std::string_view id) const {
  for (std::size_t i = 0; i < automata.size(); ++i)
    if (automata[i].id == id) return static_cast<int>(i);
  return -1;
}

bool NSTA::has_channel(std::string_view name) const {
  for (const Channel& c : channels)
    if (c.name == name) return true;
  return false;
}

namespace {

void structural_check(const NSTA& nsta, std::vector<Violation>& out) {
  std::unordered_set<std::string_view> ids;
  for (const STA& sta : nsta.automata)
    if (!ids.insert(sta.id).second)
      out.push_back({"duplicate-automaton", sta.id,
                     "automaton id '" + sta.id + "' used more than once"});

  std::unordered_set<std::string_view> declared;
  for (const Channel& c : nsta.channels)
    if (!declared.insert(c.name).second)
      out.push_back({"duplicate-channel", c.name,
                     "channel '" + c.name + "' declared more than once"});

  std::unordered_map<std::string_view, std::string_view> sender;
  for (const STA& sta : nsta.automata) {
    const int nloc = static_cast<int>(sta.locations.size());
    if (sta.initial < 0 || sta.initial >= nloc)
      out.push_back({"bad-edge", sta.id,
                     "automaton '" + sta.id + "' has an out-of-range initial location"});
    if (sta.accepting && (*sta.accepting < 0 || *sta.accepting >= nloc))
      out.push_back({"bad-edge", sta.id,
                     "automaton '" + sta.id + "' has an out-of-range accepting location"});

    std::unordered_set<std::string_view> clocks(sta.clocks.begin(), sta.clocks.end());
    clocks.insert(nsta.global_clock);

    for (const Edge& e : sta.edges) {
      if (e.source < 0 || e.source >= nloc || e.target < 0 || e.target >= nloc) {
        out.push_back({"bad-edge", sta.id,
                       "automaton '" + sta.id + "' has an edge with out-of-range locations"});
        continue;
      }
      if (e.channel) {
        if (!declared.count(*e.channel))
          out.push_back({"undeclared-channel", sta.id,
                         "automaton '" + sta.id + "' uses undeclared channel '" +
                             *e.channel + "'"});
        else if (e.dir == ActionDir::Send) {
          auto [it, inserted] = sender.emplace(*e.channel, sta.id);
          if (!inserted && it->second != sta.id)
            out.push_back({"multi-sender", *e.channel,
                           "channel '" + *e.channel + "' has senders '" +
                               std::string(it->second) + "' and '" + sta.id + "'"});
        }
      }
      for (const ClockConstraint& g : e.guard)
        if (!clocks.count(g.clock))
          out.push_back({"unknown-clock", sta.id,
                         "automaton '" + sta.id + "' guards on undeclared clock '" +
                             g.clock + "'"});
      for (const std::string& rst : e.resets)
        if (!clocks.count(rst))
          out.push_back({"unknown-clock", sta.id,
                         "automaton '" + sta.id + "' resets undeclared clock '" +
                             rst + "'"});
    }
  }
}

}  // namespace

std::vector<Violation> validate_nsta(const NSTA& nsta) {
  std::vector<Violation> out;
  structural_check(nsta, out);

  // Goal reachability, over-approximated: treat every edge as available.
  for (const STA& sta : nsta.automata) {
    if (!sta.accepting) continue;
    const int nloc = static_cast<int>(sta.locations.size());
    if (sta.initial < 0 || sta.initial >= nloc || *sta.accepting >= nloc) continue;
    std::vector<char> seen(nloc, 0);
    std::vector<int> work{sta.initial};
    seen[sta.initial] = 1;
    while (!work.empty()) {
      int loc = work.back();
      work.pop_back();
      for (const Edge& e : sta.edges)
        if (e.source == loc && e.target >= 0 && e.target < nloc && !seen[e.target]) {
          seen[e.target] = 1;
          work.push_back(e.target);
        }
    }
    if (!seen[*sta.accepting])
      out.push_back({"unreachable-goal", sta.id,
                     "accepting location '" + sta.locations[*sta.accepting].id +
                         "' of automaton '" + sta.id + "' is unreachable"});
  }
  return out;
}

NSTA compose(std::vector<STA> automata, std::vector<Channel> channels) {
  if (automata.empty()) throw CompositionError("compose: no automata");
  NSTA nsta;
  nsta.automata = std::move(automata);
  nsta.channels = std::move(channels);

  std::vector<Violation> problems;
  structural_check(nsta, problems);
  if (!problems.empty())
    throw CompositionError("compose: " + problems.front().message);
  return nsta;
}

NSTA compose(const NSTA& a, const NSTA& b) {
  std::vector<STA> automata = a.automata;
  automata.insert(automata.end(), b.automata.begin(), b.automata.end());
  std::vector<Channel> channels = a.channels;
  for (const Channel& c : b.channels)
    if (!a.has_channel(c.name)) channels.push_back(c);
  return compose(std::move(automata), std::move(channels));
}

namespace {

std::string format_time(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

}  // namespace

std::string dump(const NSTA& nsta) {
  std::string out = "nsta automata=" + std::to_string(nsta.automata.size()) +
                    " channels=" + std::to_string(nsta.channels.size()) +
                    " global_clock=" + nsta.global_clock + "\n";

  std::map<std::string_view, std::string_view> senders;
  for (const STA& sta : nsta.automata)
    for (const Edge& e : sta.edges)
      if (e.channel && e.dir == ActionDir::Send) senders.emplace(*e.channel, sta.id);

  std::vector<std::string_view> names;
  for (const Channel& c : nsta.channels) names.push_back(c.name);
  std::sort(names.begin(), names.end());
  for (std::string_view name : names) {
    out += "channel " + std::string(name);
    auto it = senders.find(name);
    if (it != senders.end()) out += " sender=" + std::string(it->second);
    out += "\n";
  }

  for (std::size_t a = 0; a < nsta.automata.size(); ++a) {
    const STA& sta = nsta.automata[a];
    out += "automaton " + std::to_string(a) + " id=" + sta.id +
           " initial=" + sta.locations[sta.initial].id + "\n";
    for (std::size_t i = 0; i < sta.locations.size(); ++i) {
      const Location& loc = sta.locations[i];
      out += "  location " + loc.id;
      if (loc.sojourn_exp)
        out += " sojourn=exp(" + format_time(loc.sojourn_exp->lambda) + ")";
      if (sta.accepting && *sta.accepting == static_cast<int>(i)) out += " goal";
      out += "\n";
    }
    for (const Edge& e : sta.edges) {
      out += "  edge " + sta.locations[e.source].id + " -> " +
             sta.locations[e.target].id;
      if (e.channel)
        out += (e.dir == ActionDir::Send ? " send " : " recv ") + *e.channel;
      if (!e.guard.empty()) {
        out += " guard ";
        for (std::size_t g = 0; g < e.guard.size(); ++g) {
          if (g) out += ",";
          out += e.guard[g].clock + to_string(e.guard[g].op) +
                 format_time(e.guard[g].bound);
        }
      }
      if (!e.resets.empty()) {
        out += " reset ";
        for (std::size_t rst = 0; rst < e.resets.size(); ++rst) {
          if (rst) out += ",";
          out += e.resets[rst];
        }
      }
      out += "\n";
    }
  }
  return out;
}

std::string render(const Trace& trace, const NSTA& nsta) {
  std::string out = "horizon " + format_time(trace.horizon) + "\n";
  for (const TraceEvent& ev : trace.events) {
    const STA& sta = nsta.automata[ev.automaton];
    const char* kind = ev.kind == TraceEvent::Kind::Send      ? "send"
                       : ev.kind == TraceEvent::Kind::Receive ? "recv"
                                                              : "delay-send";
    out += "t=" + format_time(ev.time) + " " + sta.id + " " +
           sta.locations[ev.from_location].id + " -> " +
           sta.locations[ev.to_location].id + " " + kind;
    if (!ev.channel.empty()) out += " " + ev.channel;
    out += "\n";
  }
  return out;
}

}  // namespace atsmc
