#include "bee/assembler.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <tuple>
#include <unordered_map>

namespace bee {

std::vector<Mention> decode_bio(const std::vector<std::string>& tags, const TypeInventory& inv) {
  std::vector<Mention> out;
  std::string open_type;
  int open_start = -1;

  auto kind_of = [&](const std::string& t) {
    if (inv.is_entity_type(t)) return MentionKind::entity;
    if (inv.is_trigger_type(t)) return MentionKind::trigger;
    throw DecodeError("tag type '" + t + "' not in the inventory");
  };
  auto close = [&](int end) {
    if (open_start < 0) return;
    Mention m;
    m.id = "M" + std::to_string(out.size());
    m.kind = kind_of(open_type);
    m.label = open_type;
    m.token_start = open_start;
    m.token_end = end;
    out.push_back(std::move(m));
    open_start = -1;
  };

  for (size_t i = 0; i < tags.size(); ++i) {
    const std::string& tag = tags[i];
    if (tag == "O") {
      close(static_cast<int>(i) - 1);
      continue;
    }
    if (tag.size() < 3 || (tag[0] != 'B' && tag[0] != 'I') || tag[1] != '-')
      throw DecodeError("unknown tag '" + tag + "' at position " + std::to_string(i));
    const std::string type = tag.substr(2);
    kind_of(type);  // validate even when extending
    if (tag[0] == 'I' && open_start >= 0 && open_type == type) continue;
    // B-, or orphan I- repaired to B-
    close(static_cast<int>(i) - 1);
    open_type = type;
    open_start = static_cast<int>(i);
  }
  close(static_cast<int>(tags.size()) - 1);
  return out;
}

std::vector<Mention> decode_bio(const Matrix& tag_probs,
                                const std::vector<std::string>& tag_vocab,
                                const TypeInventory& inv) {
  if (tag_probs.cols != static_cast<int>(tag_vocab.size()))
    throw ShapeError("decode_bio: distribution width != tag vocabulary size");
  std::vector<std::string> tags(tag_probs.rows);
  for (int i = 0; i < tag_probs.rows; ++i) {
    int best = 0;
    for (int j = 1; j < tag_probs.cols; ++j)
      if (tag_probs(i, j) > tag_probs(i, best)) best = j;
    tags[i] = tag_vocab[best];
  }
  return decode_bio(tags, inv);
}

namespace {

// Finds one directed cycle (as edge indices into `edges`) among surviving
// trigger->trigger edges, exploring in deterministic order. Empty if acyclic.
std::vector<int> find_cycle(const std::vector<PredictedEdge>& edges,
                            const std::vector<bool>& alive,
                            const std::set<std::string>& trigger_ids) {
  std::unordered_map<std::string, std::vector<int>> adj;
  for (int e = 0; e < static_cast<int>(edges.size()); ++e)
    if (alive[e] && trigger_ids.count(edges[e].dep_mention))
      adj[edges[e].head_mention].push_back(e);

  enum { unvisited, in_stack, done };
  std::unordered_map<std::string, int> state;
  std::vector<int> path;  // edge indices of the current DFS path

  std::function<std::vector<int>(const std::string&)> dfs =
      [&](const std::string& u) -> std::vector<int> {
    state[u] = in_stack;
    for (int e : adj[u]) {
      const std::string& v = edges[e].dep_mention;
      const int sv = state.count(v) ? state[v] : unvisited;
      if (sv == in_stack) {
        // walk back along the path to where v was entered
        std::vector<int> cycle{e};
        if (v != u) {
          for (auto it = path.rbegin(); it != path.rend(); ++it) {
            cycle.push_back(*it);
            if (edges[*it].head_mention == v) break;
          }
        }
        return cycle;
      }
      if (sv == unvisited) {
        path.push_back(e);
        auto cycle = dfs(v);
        path.pop_back();
        if (!cycle.empty()) return cycle;
      }
    }
    state[u] = done;
    return {};
  };

  for (const std::string& t : trigger_ids) {
    if (state.count(t)) continue;
    auto cycle = dfs(t);
    if (!cycle.empty()) return cycle;
  }
  return {};
}

}  // namespace

std::vector<EventStructure> assemble_events(const std::vector<Mention>& triggers,
                                            const std::vector<PredictedEdge>& edges) {
  std::set<std::string> trigger_ids;
  for (const Mention& t : triggers) trigger_ids.insert(t.id);
  for (const PredictedEdge& e : edges)
    if (!trigger_ids.count(e.head_mention))
      throw ContractViolation("edge head '" + e.head_mention + "' is not a trigger");

  std::vector<bool> alive(edges.size(), true);
  for (;;) {
    auto cycle = find_cycle(edges, alive, trigger_ids);
    if (cycle.empty()) break;
    int victim = cycle.front();
    for (int e : cycle) {
      const auto& a = edges[e];
      const auto& b = edges[victim];
      if (a.confidence < b.confidence ||
          (a.confidence == b.confidence &&
           std::tie(a.head_mention, a.dep_mention, a.role) <
               std::tie(b.head_mention, b.dep_mention, b.role)))
        victim = e;
    }
    alive[victim] = false;
  }

  std::vector<EventStructure> out;
  for (const Mention& t : triggers) {
    EventStructure ev;
    ev.trigger_id = t.id;
    for (size_t e = 0; e < edges.size(); ++e)
      if (alive[e] && edges[e].head_mention == t.id)
        ev.args.push_back({edges[e].role, edges[e].dep_mention});
    if (!ev.args.empty()) out.push_back(std::move(ev));
  }
  return out;
}

}  // namespace bee
