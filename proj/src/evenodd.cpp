#include "rdv/evenodd.hpp"

#include <algorithm>
#include <deque>
#include <unordered_map>

namespace rdv {

namespace {

constexpr uint32_t kMaxAbstractStates = 24;  // parity masks fit in 32 bits

struct SymView {
  std::vector<SymEdge> edges;
  std::vector<uint32_t> leader_edges, process_edges;
};

SymView sym_view(const Protocol& p) {
  SymView v;
  v.edges = symmetric_edges(p);
  for (uint32_t i = 0; i < v.edges.size(); ++i)
    (v.edges[i].leader ? v.leader_edges : v.process_edges).push_back(i);
  return v;
}

uint64_t pack(const Protocol& p, const EOConfig& g) {
  uint32_t mask = 0;
  for (uint32_t q = 0; q < p.num_process_states; ++q)
    if (g.parity[q] == Parity::Odd) mask |= 1u << q;
  uint64_t leader = g.leader ? static_cast<uint64_t>(*g.leader) + 1 : 0;
  return (leader << 32) | mask;
}

EOConfig unpack(const Protocol& p, uint64_t key) {
  EOConfig g;
  uint32_t mask = static_cast<uint32_t>(key & 0xffffffffu);
  uint64_t leader = key >> 32;
  if (leader > 0) g.leader = static_cast<StateIdx>(leader - 1);
  g.parity.assign(p.num_process_states, Parity::Even);
  for (uint32_t q = 0; q < p.num_process_states; ++q)
    if (mask & (1u << q)) g.parity[q] = Parity::Odd;
  return g;
}

std::optional<EOConfig> eo_step_impl(const SymView& v, const EOConfig& g, uint32_t ei,
                                     uint32_t ei2) {
  if (ei >= v.edges.size() || ei2 >= v.edges.size()) return std::nullopt;
  const SymEdge& e = v.edges[ei];
  const SymEdge& e2 = v.edges[ei2];
  if (e.letter != e2.letter) return std::nullopt;

  if (e.leader) {
    // Case 1: leader rendez-vous with one process. Two leader edges can
    // never fire together (there is a single leader entity).
    if (e2.leader) return std::nullopt;
    if (!g.leader || *g.leader != e.src) return std::nullopt;
    EOConfig out = g;
    out.leader = e.dst;
    if (e2.src != e2.dst) {
      out.parity[e2.src] = flip(out.parity[e2.src]);
      out.parity[e2.dst] = flip(out.parity[e2.dst]);
    }
    return out;
  }
  if (e2.leader) return std::nullopt;

  // Case 2: two process edges; the flips go through the intermediate stage
  // so shared endpoints cancel correctly.
  EOConfig out = g;
  if (e.src != e.dst) {
    out.parity[e.src] = flip(out.parity[e.src]);
    out.parity[e.dst] = flip(out.parity[e.dst]);
  }
  if (e2.src != e2.dst) {
    out.parity[e2.src] = flip(out.parity[e2.src]);
    out.parity[e2.dst] = flip(out.parity[e2.dst]);
  }
  return out;
}

void require_symmetric(const Protocol& p) {
  if (!classify(p).symmetric)
    throw ProtocolError("the even-odd abstraction requires a symmetric protocol");
  if (p.num_process_states > kMaxAbstractStates)
    throw ProtocolError("too many process states for the abstract search");
}

}  // namespace

EOConfig parity_of(const Protocol& p, const Config& c) {
  EOConfig g;
  g.parity.assign(p.num_process_states, Parity::Even);
  for (const auto& [q, k] : c.counts) {
    if (q < p.num_process_states) {
      if (k % 2 == 1) g.parity[q] = Parity::Odd;
    } else if (k == 1) {
      g.leader = q;
    }
  }
  return g;
}

std::optional<EOConfig> eo_step(const Protocol& p, const EOConfig& g, uint32_t e, uint32_t e2) {
  require_symmetric(p);
  return eo_step_impl(sym_view(p), g, e, e2);
}

std::optional<AbstractPath> eo_reach(const Protocol& p, const EOConfig& from, const EOConfig& to) {
  require_symmetric(p);
  SymView v = sym_view(p);

  const uint64_t start = pack(p, from);
  const uint64_t goal = pack(p, to);
  struct Parent {
    uint64_t prev;
    AbstractStep step;
  };
  std::unordered_map<uint64_t, Parent> parents;
  parents.emplace(start, Parent{start, {}});
  std::deque<uint64_t> frontier{start};

  auto build = [&](uint64_t at) {
    AbstractPath path;
    while (at != start) {
      const Parent& pa = parents.at(at);
      path.steps.push_back(pa.step);
      at = pa.prev;
    }
    std::reverse(path.steps.begin(), path.steps.end());
    return path;
  };

  if (start == goal) return build(start);

  const uint64_t state_bound =
      static_cast<uint64_t>(std::max<uint32_t>(1, p.num_leader_states()))
      << p.num_process_states;

  while (!frontier.empty()) {
    uint64_t cur = frontier.front();
    frontier.pop_front();
    EOConfig g = unpack(p, cur);

    auto visit = [&](uint32_t ei, uint32_t ei2) -> std::optional<AbstractPath> {
      auto next = eo_step_impl(v, g, ei, ei2);
      if (!next) return std::nullopt;
      uint64_t key = pack(p, *next);
      if (parents.count(key)) return std::nullopt;
      parents.emplace(key, Parent{cur, AbstractStep{ei, ei2}});
      if (parents.size() > state_bound)
        throw std::logic_error("abstract state space exceeded its bound");
      if (key == goal) return build(key);
      frontier.push_back(key);
      return std::nullopt;
    };

    for (uint32_t ei : v.leader_edges)
      for (uint32_t ei2 : v.process_edges)
        if (auto path = visit(ei, ei2)) return path;
    for (uint32_t ei : v.process_edges)
      for (uint32_t ei2 : v.process_edges)
        if (auto path = visit(ei, ei2)) return path;
  }
  return std::nullopt;
}

Endpoints abstract_endpoints(const Protocol& p) {
  require_symmetric(p);
  Endpoints ep;
  EOConfig all_even;
  all_even.parity.assign(p.num_process_states, Parity::Even);
  ep.init_even = all_even;
  ep.final_even = all_even;
  ep.init_odd = all_even;
  ep.init_odd.parity[p.q_init] = Parity::Odd;
  ep.final_odd = all_even;
  ep.final_odd.parity[p.q_final] = Parity::Odd;
  if (!p.leaderless()) {
    ep.init_even.leader = *p.leader_init;
    ep.init_odd.leader = *p.leader_init;
    ep.final_even.leader = *p.leader_final;
    ep.final_odd.leader = *p.leader_final;
  }
  return ep;
}

SymmetricDecision decide_symmetric_cop(const Protocol& p) {
  Classification cls = classify(p);
  if (!cls.symmetric)
    throw ProtocolError("the symmetric cut-off procedure requires a symmetric protocol");
  if (!cls.connectivity_ok)
    throw ProtocolError(
        "the symmetric cut-off procedure requires every process state on an initial-to-final "
        "path");

  Endpoints ep = abstract_endpoints(p);
  SymmetricDecision d;
  if (p.leaderless()) {
    d.even_path = AbstractPath{};  // initial and final even abstractions coincide
  } else {
    d.even_path = eo_reach(p, ep.init_even, ep.final_even);
  }
  d.odd_path = eo_reach(p, ep.init_odd, ep.final_odd);

  if (d.even_path && d.odd_path) {
    d.has_cutoff = true;
  } else {
    d.failed = !d.even_path ? Parity::Even : Parity::Odd;
  }
  return d;
}

AbstractPath short_witness(const Protocol& p) {
  Classification cls = classify(p);
  if (!cls.symmetric || !p.leaderless())
    throw ProtocolError("short witnesses apply to leaderless symmetric protocols");
  if (!cls.connectivity_ok)
    throw ProtocolError("short witnesses require the connectivity assumption");
  Endpoints ep = abstract_endpoints(p);
  auto path = eo_reach(p, ep.init_odd, ep.final_odd);
  if (!path) throw ProtocolError("no abstract odd witness exists");
  size_t edges = symmetric_edges(p).size();
  if (path->steps.size() > edges * edges)
    throw std::logic_error("abstract witness exceeds the quadratic length bound");
  return *path;
}

Concretization concretize(const Protocol& p, const AbstractPath& path, Parity parity) {
  Classification cls = classify(p);
  if (!cls.symmetric) throw ProtocolError("concretization requires a symmetric protocol");
  if (!cls.connectivity_ok)
    throw ProtocolError("concretization requires the connectivity assumption (pumping paths)");
  SymView v = sym_view(p);

  Concretization out;
  out.n = parity == Parity::Even ? 2 : 1;
  Config cur = initial_config(p, out.n);
  std::vector<Step>& steps = out.trace.steps;

  // Abstract bookkeeping: the walked path must start at the requested
  // initial abstraction and is validated step by step.
  Endpoints ep = abstract_endpoints(p);
  EOConfig g = parity == Parity::Even ? ep.init_even : ep.init_odd;

  // Extra pairs parked at the initial state keep every already-emitted step
  // enabled, so growing n never invalidates the prefix.
  auto ensure = [&](StateIdx q, uint32_t need) {
    while (cur.at(q) < need) {
      out.n += 2;
      cur.add(p.q_init, 2);
      if (q != p.q_init) {
        PumpResult pr = pump_pairs(p, cur, q, 1);
        steps.insert(steps.end(), pr.steps.begin(), pr.steps.end());
        cur = std::move(pr.result);
      }
    }
  };

  for (const AbstractStep& st : path.steps) {
    auto next_g = eo_step_impl(v, g, st.e, st.e2);
    if (!next_g) throw ProtocolError("abstract path step is not valid");
    const SymEdge& e = v.edges[st.e];
    const SymEdge& e2 = v.edges[st.e2];
    if (e.leader) {
      if (cur.at(e.src) != 1) throw std::logic_error("leader is not where the path expects");
      ensure(e2.src, 1);
    } else if (e.src == e2.src) {
      ensure(e.src, 2);
    } else {
      ensure(e.src, 1);
      ensure(e2.src, 1);
    }
    Step s{e.send_edge, e2.recv_edge};
    auto next = apply_step(p, cur, s);
    if (!next) throw std::logic_error("concretized step unexpectedly disabled");
    cur = std::move(*next);
    steps.push_back(s);
    g = std::move(*next_g);
  }

  EOConfig target = parity == Parity::Even ? ep.final_even : ep.final_odd;
  if (!(g == target)) throw ProtocolError("abstract path does not end at the final abstraction");

  // Drain every populated non-final process state pairwise into the final
  // state; counts there are even by the final abstraction.
  for (bool moved = true; moved;) {
    moved = false;
    for (StateIdx q = 0; q < p.num_process_states; ++q) {
      if (q == p.q_final || cur.at(q) == 0) continue;
      if (cur.at(q) % 2 != 0) throw std::logic_error("non-final state holds an odd count");
      PumpResult pr = drain_pairs(p, cur, q, cur.at(q) / 2);
      steps.insert(steps.end(), pr.steps.begin(), pr.steps.end());
      cur = std::move(pr.result);
      moved = true;
    }
  }

  if (!(cur == final_config(p, out.n)))
    throw std::logic_error("concretization did not end in the final configuration");
  out.trace.start = initial_config(p, out.n);
  return out;
}

nlohmann::json abstract_path_to_json(const Protocol& p, const EOConfig& from,
                                     const AbstractPath& path) {
  SymView v = sym_view(p);
  auto edge_json = [&](const SymEdge& e) {
    return nlohmann::json{
        {"src", p.state_name(e.src)}, {"letter", p.letter_name(e.letter)},
        {"dst", p.state_name(e.dst)}};
  };
  auto config_json = [&](const EOConfig& g) {
    nlohmann::json j = nlohmann::json::object();
    if (g.leader) j["leader"] = p.state_name(*g.leader);
    nlohmann::json par = nlohmann::json::object();
    for (uint32_t q = 0; q < p.num_process_states; ++q)
      par[p.state_name(q)] = g.parity[q] == Parity::Even ? "E" : "O";
    j["parity"] = par;
    return j;
  };
  nlohmann::json steps = nlohmann::json::array();
  EOConfig g = from;
  for (const AbstractStep& st : path.steps) {
    auto next = eo_step_impl(v, g, st.e, st.e2);
    if (!next) throw ProtocolError("abstract path step is not valid");
    g = std::move(*next);
    steps.push_back({{"edge", edge_json(v.edges[st.e])},
                     {"edge2", edge_json(v.edges[st.e2])},
                     {"config", config_json(g)}});
  }
  return {{"start", config_json(from)}, {"steps", steps}};
}

}  // namespace rdv
