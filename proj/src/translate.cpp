#include "atsmc/translate.hpp"

#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "atsmc/errors.hpp"

namespace atsmc {

namespace {

std::string initiate_channel(const std::string& id) { return "initiate_" + id; }
std::string fail_channel(const std::string& id) { return "fail_" + id; }

// Gate STA over explicit channel names.  `listen` are the activation channels
// (several for shared gates), `child_sends[i]` is the initiate channel of
// child i, `child_fails[i]` its fail channel.
STA build_gate(const std::string& id, GateKind kind,
               const std::vector<std::string>& listen,
               const std::vector<std::string>& child_sends,
               const std::vector<std::string>& child_fails) {
  const int k = static_cast<int>(child_sends.size());
  STA sta;
  sta.id = id;
  sta.locations.push_back({"Idle", std::nullopt});

  auto add_edge = [&sta](int from, int to, const std::string& chan, ActionDir dir) {
    Edge e;
    e.source = from;
    e.target = to;
    e.channel = chan;
    e.dir = dir;
    sta.edges.push_back(std::move(e));
  };
  auto add_location = [&sta](const std::string& name) {
    sta.locations.push_back({name, std::nullopt});
    return static_cast<int>(sta.locations.size()) - 1;
  };

  if (kind == GateKind::Sand) {
    // Idle -> Act1 -> Await1 -> Act2 -> ... -> Awaitk -> Failing -> Disrupt
    int prev = add_location("Act1");
    for (const std::string& chan : listen) add_edge(0, prev, chan, ActionDir::Receive);
    for (int i = 0; i < k; ++i) {
      int await = add_location("Await" + std::to_string(i + 1));
      add_edge(prev, await, child_sends[i], ActionDir::Send);
      int next = i + 1 < k ? add_location("Act" + std::to_string(i + 2))
                           : add_location("Failing");
      add_edge(await, next, child_fails[i], ActionDir::Receive);
      prev = next;
    }
    int disrupt = add_location("Disrupt");
    add_edge(prev, disrupt, fail_channel(id), ActionDir::Send);
    sta.accepting = disrupt;
    return sta;
  }

  // OR and AND broadcast all child initiates up front.
  int prev = add_location("Act1");
  for (const std::string& chan : listen) add_edge(0, prev, chan, ActionDir::Receive);
  for (int i = 0; i < k; ++i) {
    int next = i + 1 < k ? add_location("Act" + std::to_string(i + 2))
                         : add_location("Wait0");
    add_edge(prev, next, child_sends[i], ActionDir::Send);
    prev = next;
  }

  int failing;
  if (kind == GateKind::Or) {
    failing = add_location("Failing");
    for (int i = 0; i < k; ++i) add_edge(prev, failing, child_fails[i], ActionDir::Receive);
  } else {
    // Each child fails at most once, so counting locations Wait0..Wait(k-1)
    // track the number of distinct child fails seen so far.
    for (int j = 1; j < k; ++j) {
      int next = add_location("Wait" + std::to_string(j));
      for (int i = 0; i < k; ++i) add_edge(prev, next, child_fails[i], ActionDir::Receive);
      prev = next;
    }
    failing = add_location("Failing");
    for (int i = 0; i < k; ++i) add_edge(prev, failing, child_fails[i], ActionDir::Receive);
  }
  int disrupt = add_location("Disrupt");
  add_edge(failing, disrupt, fail_channel(id), ActionDir::Send);
  sta.accepting = disrupt;
  return sta;
}

STA build_leaf(const std::string& id, Rate rate,
               const std::vector<std::string>& listen) {
  STA sta;
  sta.id = id;
  sta.locations.push_back({"Idle", std::nullopt});
  sta.locations.push_back({"Active", rate});
  sta.locations.push_back({"Done", std::nullopt});
  for (const std::string& chan : listen) {
    Edge activate;
    activate.source = 0;
    activate.target = 1;
    activate.channel = chan;
    activate.dir = ActionDir::Receive;
    sta.edges.push_back(std::move(activate));
  }
  Edge fail;
  fail.source = 1;
  fail.target = 2;
  fail.channel = fail_channel(id);
  fail.dir = ActionDir::Send;
  sta.edges.push_back(std::move(fail));
  sta.accepting = 2;
  return sta;
}

}  // namespace

STA translate_leaf(const Node& node) {
  const Leaf* leaf = node.leaf();
  if (!leaf) throw InvalidTreeError("translate_leaf: node '" + node.id + "' is a gate");
  return build_leaf(node.id, leaf->rate, {initiate_channel(node.id)});
}

STA translate_gate(const Node& node) {
  const Gate* gate = node.gate();
  if (!gate) throw InvalidTreeError("translate_gate: node '" + node.id + "' is a leaf");
  std::vector<std::string> sends, fails;
  for (const std::string& c : gate->children) {
    sends.push_back(initiate_channel(c));
    fails.push_back(fail_channel(c));
  }
  return build_gate(node.id, gate->kind, {initiate_channel(node.id)}, sends, fails);
}

STA translate_root(const std::string& top_id) {
  STA sta;
  sta.id = top_id + "_root";
  sta.locations.push_back({"Initial", std::nullopt});
  sta.locations.push_back({"Wait", std::nullopt});
  sta.locations.push_back({"Disrupt", std::nullopt});
  Edge kick;
  kick.source = 0;
  kick.target = 1;
  kick.channel = initiate_channel(top_id);
  kick.dir = ActionDir::Send;
  kick.resets = {"x"};
  sta.edges.push_back(std::move(kick));
  Edge done;
  done.source = 1;
  done.target = 2;
  done.channel = fail_channel(top_id);
  done.dir = ActionDir::Receive;
  sta.edges.push_back(std::move(done));
  sta.accepting = 2;
  return sta;
}

NSTA translate_tree(const AttackTree& tree) {
  std::vector<Violation> problems = validate_tree(tree);
  if (!problems.empty())
    throw InvalidTreeError("translate_tree: invalid tree: " + problems.front().message);

  // Parents per element, in declaration order of the parents.
  std::unordered_map<std::string_view, std::vector<const Node*>> parents;
  for (const Node& n : tree.nodes)
    if (const Gate* g = n.gate())
      for (const std::string& c : g->children) parents[c].push_back(&n);

  // A shared element listens on one channel per parent so every channel has
  // a single sender.
  auto listen_channels = [&](const Node& n) {
    std::vector<std::string> out;
    auto it = parents.find(n.id);
    if (it == parents.end() || it->second.size() <= 1) {
      out.push_back(initiate_channel(n.id));
    } else {
      for (const Node* p : it->second)
        out.push_back(initiate_channel(n.id) + "__" + p->id);
    }
    return out;
  };
  auto send_channel = [&](const Node& parent, const std::string& child) {
    auto it = parents.find(child);
    if (it != parents.end() && it->second.size() > 1)
      return initiate_channel(child) + "__" + parent.id;
    return initiate_channel(child);
  };

  std::vector<STA> automata;
  std::vector<Channel> channels;
  automata.push_back(translate_root(tree.top_event));
  channels.push_back({initiate_channel(tree.top_event)});

  for (const Node& n : tree.nodes) {
    std::vector<std::string> listen = listen_channels(n);
    if (&n != tree.find(tree.top_event))
      for (const std::string& chan : listen) channels.push_back({chan});
    channels.push_back({fail_channel(n.id)});

    if (const Gate* g = n.gate()) {
      std::vector<std::string> sends, fails;
      for (const std::string& c : g->children) {
        sends.push_back(send_channel(n, c));
        fails.push_back(fail_channel(c));
      }
      automata.push_back(build_gate(n.id, g->kind, listen, sends, fails));
    } else {
      automata.push_back(build_leaf(n.id, n.leaf()->rate, listen));
    }
  }
  return compose(std::move(automata), std::move(channels));
}

}  // namespace atsmc
