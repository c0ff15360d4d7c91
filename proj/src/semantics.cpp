#include "rdv/semantics.hpp"

#include <algorithm>
#include <deque>
#include <queue>
#include <unordered_map>

namespace rdv {

uint32_t Config::at(StateIdx q) const {
  for (const auto& [s, k] : counts)
    if (s == q) return k;
  return 0;
}

uint64_t Config::total() const {
  uint64_t t = 0;
  for (const auto& [s, k] : counts) t += k;
  return t;
}

void Config::add(StateIdx q, int64_t delta) {
  if (delta == 0) return;
  auto it = std::lower_bound(counts.begin(), counts.end(), q,
                             [](const auto& e, StateIdx v) { return e.first < v; });
  if (it != counts.end() && it->first == q) {
    int64_t next = static_cast<int64_t>(it->second) + delta;
    if (next < 0) throw std::logic_error("configuration count went negative");
    if (next == 0)
      counts.erase(it);
    else
      it->second = static_cast<uint32_t>(next);
  } else {
    if (delta < 0) throw std::logic_error("configuration count went negative");
    counts.insert(it, {q, static_cast<uint32_t>(delta)});
  }
}

size_t ConfigHash::operator()(const Config& c) const {
  uint64_t h = 1469598103934665603ull;
  for (const auto& [s, k] : c.counts) {
    h ^= s;
    h *= 1099511628211ull;
    h ^= k;
    h *= 1099511628211ull;
  }
  return static_cast<size_t>(h);
}

Config initial_config(const Protocol& p, uint64_t n) {
  Config c;
  if (n > 0) c.add(p.q_init, static_cast<int64_t>(n));
  if (!p.leaderless()) c.add(*p.leader_init, 1);
  return c;
}

Config final_config(const Protocol& p, uint64_t n) {
  Config c;
  if (n > 0) c.add(p.q_final, static_cast<int64_t>(n));
  if (!p.leaderless()) c.add(*p.leader_final, 1);
  return c;
}

std::optional<Config> apply_step(const Protocol& p, const Config& c, Step s) {
  if (s.send_edge >= p.edges.size() || s.recv_edge >= p.edges.size()) return std::nullopt;
  const Edge& snd = p.edges[s.send_edge];
  const Edge& rcv = p.edges[s.recv_edge];
  if (snd.kind != ActionKind::Send || rcv.kind != ActionKind::Receive) return std::nullopt;
  if (snd.letter != rcv.letter) return std::nullopt;
  uint32_t need_snd = snd.src == rcv.src ? 2 : 1;
  if (c.at(snd.src) < need_snd || c.at(rcv.src) < 1) return std::nullopt;
  Config out = c;
  out.add(snd.src, -1);
  out.add(rcv.src, -1);
  out.add(snd.dst, 1);
  out.add(rcv.dst, 1);
  return out;
}

std::vector<std::pair<Step, Config>> enabled_steps(const Protocol& p, const Config& c) {
  std::vector<std::pair<Step, Config>> out;
  // Edges are sorted by (src, kind, letter, dst); enumerate send/receive
  // pairs in index order so exploration is deterministic.
  for (uint32_t i = 0; i < p.edges.size(); ++i) {
    if (p.edges[i].kind != ActionKind::Send) continue;
    for (uint32_t j = 0; j < p.edges.size(); ++j) {
      if (p.edges[j].kind != ActionKind::Receive) continue;
      if (p.edges[j].letter != p.edges[i].letter) continue;
      Step s{i, j};
      if (auto next = apply_step(p, c, s)) out.emplace_back(s, std::move(*next));
    }
  }
  return out;
}

std::optional<Config> replay(const Protocol& p, const Config& start,
                             const std::vector<Step>& steps) {
  Config c = start;
  for (Step s : steps) {
    auto next = apply_step(p, c, s);
    if (!next) return std::nullopt;
    c = std::move(*next);
  }
  return c;
}

ReachResult reachable_final(const Protocol& p, uint64_t n, const SearchBudget& budget) {
  const Config start = initial_config(p, n);
  const Config goal = final_config(p, n);

  std::vector<Config> arena;
  std::unordered_map<Config, uint32_t, ConfigHash> index;
  struct Parent {
    uint32_t parent;
    Step step;
  };
  std::vector<Parent> parents;

  auto build_trace = [&](uint32_t at) {
    Trace t;
    t.start = start;
    std::vector<Step> rev;
    while (at != 0) {
      rev.push_back(parents[at].step);
      at = parents[at].parent;
    }
    t.steps.assign(rev.rbegin(), rev.rend());
    return t;
  };

  arena.push_back(start);
  index.emplace(start, 0);
  parents.push_back({0, Step{}});
  if (start == goal) return {ReachKind::Witness, build_trace(0)};

  std::deque<uint32_t> frontier{0};
  while (!frontier.empty()) {
    if (budget.deadline && std::chrono::steady_clock::now() > *budget.deadline)
      return {ReachKind::BudgetExceeded, std::nullopt};
    uint32_t cur = frontier.front();
    frontier.pop_front();
    Config c = arena[cur];
    for (auto& [step, next] : enabled_steps(p, c)) {
      auto [it, inserted] = index.emplace(next, static_cast<uint32_t>(arena.size()));
      if (!inserted) continue;
      arena.push_back(next);
      parents.push_back({cur, step});
      if (next == goal) return {ReachKind::Witness, build_trace(it->second)};
      if (arena.size() > budget.node_cap) return {ReachKind::BudgetExceeded, std::nullopt};
      frontier.push_back(it->second);
    }
  }
  return {ReachKind::NotReachable, std::nullopt};
}

std::vector<TableEntry> witness_table(const Protocol& p, uint64_t n_max,
                                      const SearchBudget& budget) {
  std::vector<TableEntry> table(n_max + 1, TableEntry::Unknown);
  for (uint64_t n = 0; n <= n_max; ++n) {
    ReachResult r = reachable_final(p, n, budget);
    table[n] = r.kind == ReachKind::Witness      ? TableEntry::Yes
               : r.kind == ReachKind::NotReachable ? TableEntry::No
                                                   : TableEntry::Unknown;
  }
  return table;
}

namespace {

// BFS over the directed graph of symmetric edges; predecessor sym-edge per
// state, scanning edges in canonical order for reproducible ties.
std::optional<std::vector<uint32_t>> sym_path(const Protocol& p, StateIdx from, StateIdx to,
                                              bool reversed) {
  std::vector<SymEdge> sym = symmetric_edges(p);
  std::vector<int64_t> pred_edge(p.num_states(), -1);
  std::vector<int64_t> pred_state(p.num_states(), -1);
  std::vector<bool> seen(p.num_states(), false);
  std::queue<StateIdx> q;
  seen[from] = true;
  q.push(from);
  while (!q.empty() && !seen[to]) {
    StateIdx u = q.front();
    q.pop();
    for (uint32_t i = 0; i < sym.size(); ++i) {
      StateIdx s = reversed ? sym[i].dst : sym[i].src;
      StateIdx d = reversed ? sym[i].src : sym[i].dst;
      if (s != u || seen[d]) continue;
      seen[d] = true;
      pred_edge[d] = i;
      pred_state[d] = u;
      q.push(d);
    }
  }
  if (!seen[to]) return std::nullopt;
  std::vector<uint32_t> path;
  for (StateIdx at = to; at != from; at = static_cast<StateIdx>(pred_state[at]))
    path.push_back(static_cast<uint32_t>(pred_edge[at]));
  std::reverse(path.begin(), path.end());
  return path;
}

PumpResult move_pairs(const Protocol& p, const Config& c, StateIdx from, StateIdx to,
                      uint32_t pairs) {
  Classification cls = classify(p);
  if (!cls.symmetric) throw ProtocolError("pairwise movement requires a symmetric protocol");
  auto path = sym_path(p, from, to, false);
  if (!path) throw ProtocolError("no symmetric path from " + p.state_name(from) + " to " +
                                 p.state_name(to));
  std::vector<SymEdge> sym = symmetric_edges(p);
  PumpResult r;
  r.result = c;
  if (c.at(from) < 2 * static_cast<uint64_t>(pairs))
    throw ProtocolError("not enough entities at " + p.state_name(from) + " to move pairwise");
  for (uint32_t k = 0; k < pairs; ++k) {
    // One pair travels the whole path; each hop is one symmetric rendez-vous
    // moving both entities.
    for (uint32_t ei : *path) {
      Step s{sym[ei].send_edge, sym[ei].recv_edge};
      auto next = apply_step(p, r.result, s);
      if (!next) throw std::logic_error("pairwise move step unexpectedly disabled");
      r.result = std::move(*next);
      r.steps.push_back(s);
    }
  }
  return r;
}

}  // namespace

std::optional<std::vector<uint32_t>> sym_path_from_init(const Protocol& p, StateIdx q) {
  return sym_path(p, p.q_init, q, false);
}

std::optional<std::vector<uint32_t>> sym_path_to_final(const Protocol& p, StateIdx q) {
  return sym_path(p, q, p.q_final, false);
}

PumpResult pump_pairs(const Protocol& p, const Config& c, StateIdx target, uint32_t pairs) {
  return move_pairs(p, c, p.q_init, target, pairs);
}

PumpResult drain_pairs(const Protocol& p, const Config& c, StateIdx source, uint32_t pairs) {
  return move_pairs(p, c, source, p.q_final, pairs);
}

nlohmann::json config_to_json(const Protocol& p, const Config& c) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [s, k] : c.counts) j[p.state_name(s)] = k;
  return j;
}

Config config_from_json(const Protocol& p, const nlohmann::json& j) {
  Config c;
  for (auto it = j.begin(); it != j.end(); ++it) {
    auto s = p.state_index(it.key());
    if (!s) throw ProtocolError("unknown state in configuration: " + it.key());
    c.add(*s, it.value().get<int64_t>());
  }
  return c;
}

nlohmann::json trace_to_json(const Protocol& p, const Trace& t) {
  nlohmann::json steps = nlohmann::json::array();
  for (Step s : t.steps) {
    const Edge& snd = p.edges.at(s.send_edge);
    const Edge& rcv = p.edges.at(s.recv_edge);
    steps.push_back({{"letter", p.letter_name(snd.letter)},
                     {"send", {p.state_name(snd.src), p.state_name(snd.dst)}},
                     {"recv", {p.state_name(rcv.src), p.state_name(rcv.dst)}}});
  }
  return {{"start", config_to_json(p, t.start)}, {"steps", steps}};
}

Trace trace_from_json(const Protocol& p, const nlohmann::json& j) {
  Trace t;
  t.start = config_from_json(p, j.at("start"));
  for (const auto& js : j.at("steps")) {
    auto letter = p.letter_index(js.at("letter").get<std::string>());
    auto ssrc = p.state_index(js.at("send").at(0).get<std::string>());
    auto sdst = p.state_index(js.at("send").at(1).get<std::string>());
    auto rsrc = p.state_index(js.at("recv").at(0).get<std::string>());
    auto rdst = p.state_index(js.at("recv").at(1).get<std::string>());
    if (!letter || !ssrc || !sdst || !rsrc || !rdst)
      throw ProtocolError("trace step references unknown state or letter");
    Step s;
    bool found_send = false, found_recv = false;
    for (uint32_t i = 0; i < p.edges.size(); ++i) {
      const Edge& e = p.edges[i];
      if (e.letter != *letter) continue;
      if (!found_send && e.kind == ActionKind::Send && e.src == *ssrc && e.dst == *sdst) {
        s.send_edge = i;
        found_send = true;
      }
      if (!found_recv && e.kind == ActionKind::Receive && e.src == *rsrc && e.dst == *rdst) {
        s.recv_edge = i;
        found_recv = true;
      }
    }
    if (!found_send || !found_recv) throw ProtocolError("trace step does not match any edge");
    t.steps.push_back(s);
  }
  return t;
}

}  // namespace rdv
