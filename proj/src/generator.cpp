#include "rdv/generator.hpp"

#include <algorithm>
#include <queue>
#include <random>

namespace rdv {

namespace {

// Forward (or backward) reachability over the process-only underlying graph.
std::vector<bool> underlying_reach(const Protocol& p, StateIdx start, bool forward) {
  std::vector<bool> seen(p.num_process_states, false);
  std::queue<StateIdx> q;
  seen[start] = true;
  q.push(start);
  while (!q.empty()) {
    StateIdx u = q.front();
    q.pop();
    for (const Edge& e : p.edges) {
      if (e.src >= p.num_process_states) continue;
      StateIdx from = forward ? e.src : e.dst;
      StateIdx to = forward ? e.dst : e.src;
      if (from == u && !seen[to]) {
        seen[to] = true;
        q.push(to);
      }
    }
  }
  return seen;
}

}  // namespace

Protocol gen_random(const RandomSpec& spec) {
  if (spec.num_process_states == 0) throw ProtocolError("at least one process state required");
  if (!spec.leaderless && spec.num_leader_states == 0)
    throw ProtocolError("leader requested but zero leader states");

  std::mt19937_64 rng(spec.seed);
  auto coin = [&](double prob) {
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < prob;
  };
  auto pick = [&](uint32_t n) {
    return std::uniform_int_distribution<uint32_t>(0, n - 1)(rng);
  };

  Protocol p;
  for (uint32_t i = 0; i < spec.num_process_states; ++i)
    p.states.push_back("s" + std::to_string(i));
  p.num_process_states = spec.num_process_states;
  p.q_init = 0;
  p.q_final = spec.num_process_states - 1;
  if (!spec.leaderless) {
    for (uint32_t i = 0; i < spec.num_leader_states; ++i)
      p.states.push_back("L" + std::to_string(i));
    p.leader_init = spec.num_process_states;
    p.leader_final = spec.num_process_states + spec.num_leader_states - 1;
  }
  for (uint32_t i = 0; i < std::max<uint32_t>(1, spec.num_letters); ++i)
    p.letters.push_back(std::string(1, static_cast<char>('a' + i % 26)) +
                        (i >= 26 ? std::to_string(i / 26) : ""));

  auto add_edge = [&](StateIdx s, StateIdx d, LetterIdx l, bool sym_pair) {
    if (sym_pair || spec.symmetric) {
      p.edges.push_back({s, ActionKind::Send, l, d});
      p.edges.push_back({s, ActionKind::Receive, l, d});
    } else {
      p.edges.push_back({s, coin(0.5) ? ActionKind::Send : ActionKind::Receive, l, d});
    }
  };

  auto sample_block = [&](StateIdx lo, StateIdx hi) {
    for (StateIdx s = lo; s < hi; ++s) {
      for (StateIdx d = lo; d < hi; ++d) {
        for (LetterIdx l = 0; l < p.letters.size(); ++l) {
          if (!coin(spec.edge_density)) continue;
          if (spec.symmetric) {
            add_edge(s, d, l, true);
          } else {
            if (coin(0.5)) p.edges.push_back({s, ActionKind::Send, l, d});
            else p.edges.push_back({s, ActionKind::Receive, l, d});
          }
        }
      }
    }
  };
  sample_block(0, p.num_process_states);
  if (!spec.leaderless) sample_block(p.num_process_states, p.num_states());

  // Connectivity repair: every process state must sit on an init -> final
  // path in the underlying graph. Scanning in index order keeps the draw
  // sequence reproducible.
  for (bool changed = true; changed;) {
    changed = false;
    std::vector<bool> fwd = underlying_reach(p, p.q_init, true);
    for (StateIdx q = 0; q < p.num_process_states; ++q) {
      if (fwd[q]) continue;
      std::vector<StateIdx> sources;
      for (StateIdx s = 0; s < p.num_process_states; ++s)
        if (fwd[s]) sources.push_back(s);
      add_edge(sources[pick(static_cast<uint32_t>(sources.size()))], q,
               pick(static_cast<uint32_t>(p.letters.size())), false);
      changed = true;
      break;
    }
  }
  for (bool changed = true; changed;) {
    changed = false;
    std::vector<bool> bwd = underlying_reach(p, p.q_final, false);
    for (StateIdx q = 0; q < p.num_process_states; ++q) {
      if (bwd[q]) continue;
      std::vector<StateIdx> sinks;
      for (StateIdx s = 0; s < p.num_process_states; ++s)
        if (bwd[s]) sinks.push_back(s);
      add_edge(q, sinks[pick(static_cast<uint32_t>(sinks.size()))],
               pick(static_cast<uint32_t>(p.letters.size())), false);
      changed = true;
      break;
    }
  }

  std::sort(p.edges.begin(), p.edges.end());
  p.edges.erase(std::unique(p.edges.begin(), p.edges.end()), p.edges.end());
  return p;
}

}  // namespace rdv
