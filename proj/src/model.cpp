#include "rdv/model.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <set>
#include <sstream>

namespace rdv {

namespace {

bool valid_token(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  }
  return true;
}

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

void sort_and_dedup(std::vector<Edge>& edges) {
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
}

// Shared post-construction checks for parsed and generated protocols.
void check_invariants(const Protocol& p) {
  if (p.num_process_states == 0) throw ProtocolError("protocol has no process states");
  if (p.q_init >= p.num_process_states || p.q_final >= p.num_process_states)
    throw ProtocolError("initial/final process state is not a process state");
  if (p.leader_init.has_value() != p.leader_final.has_value())
    throw ProtocolError("leader initial/final must both be present or both absent");
  if (p.leader_init) {
    if (*p.leader_init < p.num_process_states || *p.leader_init >= p.num_states() ||
        *p.leader_final < p.num_process_states || *p.leader_final >= p.num_states())
      throw ProtocolError("leader initial/final is not a leader state");
  } else if (p.num_leader_states() != 0) {
    throw ProtocolError("leader states declared but no leader init/final");
  }
  for (const Edge& e : p.edges) {
    if (e.src >= p.num_states() || e.dst >= p.num_states() || e.letter >= p.letters.size())
      throw ProtocolError("edge references an undeclared state or letter");
    if (p.role(e.src) != p.role(e.dst))
      throw ProtocolError("edge crosses the process/leader partition");
  }
}

}  // namespace

std::optional<StateIdx> Protocol::state_index(const std::string& name) const {
  for (StateIdx i = 0; i < states.size(); ++i)
    if (states[i] == name) return i;
  return std::nullopt;
}

std::optional<LetterIdx> Protocol::letter_index(const std::string& name) const {
  for (LetterIdx i = 0; i < letters.size(); ++i)
    if (letters[i] == name) return i;
  return std::nullopt;
}

bool Protocol::has_edge(StateIdx src, ActionKind kind, LetterIdx letter, StateIdx dst) const {
  Edge e{src, kind, letter, dst};
  return std::binary_search(edges.begin(), edges.end(), e);
}

Protocol parse_protocol(const std::string& text) {
  Protocol p;
  std::set<std::string> seen_names;

  enum Section { Alphabet, Process, Leader, Init, Final, Edges };
  Section expect = Alphabet;

  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  std::vector<std::string> process_names, leader_names;
  std::string init_p, init_l, final_p, final_l;
  struct RawEdge { std::string src, act, dst; int line; bool sym; };
  std::vector<RawEdge> raw_edges;

  while (std::getline(in, raw)) {
    ++lineno;
    if (auto pos = raw.find('#'); pos != std::string::npos) raw.erase(pos);
    std::vector<std::string> toks = split_ws(raw);
    if (toks.empty()) continue;
    const std::string& key = toks[0];
    std::vector<std::string> args(toks.begin() + 1, toks.end());

    auto want_tokens = [&](size_t lo, size_t hi, const char* what) {
      if (args.size() < lo || args.size() > hi)
        throw ProtocolError(std::string("malformed ") + what + " line", lineno);
      for (const auto& a : args)
        if (!valid_token(a)) throw ProtocolError("invalid token '" + a + "'", lineno);
    };

    if (key == "alphabet:") {
      if (expect != Alphabet) throw ProtocolError("alphabet: out of order", lineno);
      want_tokens(0, 10000, "alphabet");
      for (const auto& a : args) {
        if (!seen_names.insert("L:" + a).second)
          throw ProtocolError("duplicate letter '" + a + "'", lineno);
        p.letters.push_back(a);
      }
      expect = Process;
    } else if (key == "process:") {
      if (expect != Process) throw ProtocolError("process: out of order", lineno);
      want_tokens(1, 10000, "process");
      for (const auto& a : args) {
        if (!seen_names.insert("S:" + a).second)
          throw ProtocolError("duplicate state '" + a + "'", lineno);
        process_names.push_back(a);
      }
      expect = Leader;
    } else if (key == "leader:") {
      if (expect != Leader) throw ProtocolError("leader: out of order", lineno);
      want_tokens(1, 10000, "leader");
      for (const auto& a : args) {
        if (!seen_names.insert("S:" + a).second)
          throw ProtocolError("duplicate state '" + a + "'", lineno);
        leader_names.push_back(a);
      }
      expect = Init;
    } else if (key == "init:") {
      if (expect != Init && expect != Leader) throw ProtocolError("init: out of order", lineno);
      want_tokens(1, 2, "init");
      init_p = args[0];
      if (args.size() == 2) init_l = args[1];
      expect = Final;
    } else if (key == "final:") {
      if (expect != Final) throw ProtocolError("final: out of order", lineno);
      want_tokens(1, 2, "final");
      final_p = args[0];
      if (args.size() == 2) final_l = args[1];
      expect = Edges;
    } else if (key == "edge:" || key == "sym:") {
      if (expect != Edges) throw ProtocolError(key + " before declarations", lineno);
      if (args.size() != 3) throw ProtocolError("malformed " + key + " line", lineno);
      raw_edges.push_back({args[0], args[1], args[2], lineno, key == "sym:"});
    } else {
      throw ProtocolError("unknown directive '" + key + "'", lineno);
    }
  }

  if (expect != Edges) throw ProtocolError("incomplete protocol: missing sections");

  p.states = process_names;
  p.num_process_states = static_cast<uint32_t>(process_names.size());
  p.states.insert(p.states.end(), leader_names.begin(), leader_names.end());

  auto state_of = [&](const std::string& name, int line) {
    auto i = p.state_index(name);
    if (!i) throw ProtocolError("undeclared state '" + name + "'", line);
    return *i;
  };
  auto letter_of = [&](const std::string& name, int line) {
    auto i = p.letter_index(name);
    if (!i) throw ProtocolError("undeclared letter '" + name + "'", line);
    return *i;
  };

  p.q_init = state_of(init_p, 0);
  p.q_final = state_of(final_p, 0);
  if (p.q_init >= p.num_process_states || p.q_final >= p.num_process_states)
    throw ProtocolError("init/final must name process states first");

  const bool has_leader = !leader_names.empty();
  if (has_leader != !init_l.empty() || has_leader != !final_l.empty())
    throw ProtocolError(has_leader ? "leader declared but init/final omit the leader state"
                                   : "init/final name a leader state but none declared");
  if (has_leader) {
    p.leader_init = state_of(init_l, 0);
    p.leader_final = state_of(final_l, 0);
  }

  for (const RawEdge& re : raw_edges) {
    StateIdx src = state_of(re.src, re.line);
    StateIdx dst = state_of(re.dst, re.line);
    if (p.role(src) != p.role(dst))
      throw ProtocolError("edge crosses the process/leader partition", re.line);
    if (re.sym) {
      if (!valid_token(re.act)) throw ProtocolError("invalid letter token", re.line);
      LetterIdx a = letter_of(re.act, re.line);
      p.edges.push_back({src, ActionKind::Send, a, dst});
      p.edges.push_back({src, ActionKind::Receive, a, dst});
    } else {
      if (re.act.size() < 2 || (re.act[0] != '!' && re.act[0] != '?'))
        throw ProtocolError("action must be !<letter> or ?<letter>", re.line);
      std::string lname = re.act.substr(1);
      if (!valid_token(lname)) throw ProtocolError("invalid letter token", re.line);
      LetterIdx a = letter_of(lname, re.line);
      ActionKind k = re.act[0] == '!' ? ActionKind::Send : ActionKind::Receive;
      p.edges.push_back({src, k, a, dst});
    }
  }

  sort_and_dedup(p.edges);
  check_invariants(p);
  return p;
}

std::string print_protocol(const Protocol& p) {
  std::ostringstream out;
  out << "alphabet:";
  for (const auto& a : p.letters) out << ' ' << a;
  out << '\n' << "process:";
  for (uint32_t i = 0; i < p.num_process_states; ++i) out << ' ' << p.states[i];
  out << '\n';
  if (!p.leaderless()) {
    out << "leader:";
    for (uint32_t i = p.num_process_states; i < p.num_states(); ++i) out << ' ' << p.states[i];
    out << '\n';
    out << "init: " << p.state_name(p.q_init) << ' ' << p.state_name(*p.leader_init) << '\n';
    out << "final: " << p.state_name(p.q_final) << ' ' << p.state_name(*p.leader_final) << '\n';
  } else {
    out << "init: " << p.state_name(p.q_init) << '\n';
    out << "final: " << p.state_name(p.q_final) << '\n';
  }
  for (const Edge& e : p.edges) {
    out << "edge: " << p.state_name(e.src) << ' '
        << (e.kind == ActionKind::Send ? '!' : '?') << p.letter_name(e.letter) << ' '
        << p.state_name(e.dst) << '\n';
  }
  return out.str();
}

Classification classify(const Protocol& p) {
  Classification c;
  c.leaderless = p.leaderless();

  c.symmetric = true;
  for (const Edge& e : p.edges) {
    ActionKind other = e.kind == ActionKind::Send ? ActionKind::Receive : ActionKind::Send;
    if (!p.has_edge(e.src, other, e.letter, e.dst)) {
      c.symmetric = false;
      break;
    }
  }

  // Connectivity over process states only, directions kept, actions ignored.
  auto reach = [&](StateIdx start, bool forward) {
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
  };
  std::vector<bool> fwd = reach(p.q_init, true);
  std::vector<bool> bwd = reach(p.q_final, false);
  c.connectivity_ok = true;
  for (uint32_t q = 0; q < p.num_process_states; ++q) {
    if (!fwd[q] || !bwd[q]) {
      c.connectivity_ok = false;
      break;
    }
  }
  return c;
}

std::vector<std::string> validate_warnings(const Protocol& p) {
  std::vector<std::string> w;
  if (!p.leaderless() && *p.leader_init == *p.leader_final &&
      (p.num_leader_states() > 1 ||
       std::any_of(p.edges.begin(), p.edges.end(),
                   [&](const Edge& e) { return p.role(e.src) == Role::Leader; }))) {
    w.push_back("leader initial state equals leader final state on a nontrivial leader");
  }
  Classification c = classify(p);
  if (!c.connectivity_ok) {
    w.push_back(
        "some process state is not on a path from the initial to the final state; "
        "symmetric and leaderless exact procedures will refuse to run");
  }
  return w;
}

std::vector<SymEdge> symmetric_edges(const Protocol& p) {
  std::vector<SymEdge> out;
  for (uint32_t i = 0; i < p.edges.size(); ++i) {
    const Edge& e = p.edges[i];
    if (e.kind != ActionKind::Send) continue;
    Edge recv{e.src, ActionKind::Receive, e.letter, e.dst};
    auto it = std::lower_bound(p.edges.begin(), p.edges.end(), recv);
    if (it == p.edges.end() || *it != recv) continue;
    SymEdge se;
    se.src = e.src;
    se.letter = e.letter;
    se.dst = e.dst;
    se.send_edge = i;
    se.recv_edge = static_cast<uint32_t>(it - p.edges.begin());
    se.leader = p.role(e.src) == Role::Leader;
    out.push_back(se);
  }
  std::sort(out.begin(), out.end());
  return out;
}

Protocol eliminate_final_outgoing(const Protocol& p) {
  if (!p.leaderless()) throw ProtocolError("final-state duplication requires a leaderless protocol");
  bool has_out = std::any_of(p.edges.begin(), p.edges.end(),
                             [&](const Edge& e) { return e.src == p.q_final; });
  if (!has_out) return p;

  Protocol out = p;
  std::string base = p.state_name(p.q_final) + "_dup";
  std::string name = base;
  for (int i = 1; out.state_index(name).has_value(); ++i) name = base + std::to_string(i);
  StateIdx fresh = out.num_process_states;
  out.states.insert(out.states.begin() + fresh, name);
  out.num_process_states += 1;
  // Leaderless, so no leader indices to shift.
  for (const Edge& e : p.edges) {
    if (e.dst == p.q_final) out.edges.push_back({e.src, e.kind, e.letter, fresh});
  }
  out.q_final = fresh;
  sort_and_dedup(out.edges);
  check_invariants(out);
  return out;
}

Protocol gen_exp_family(uint32_t k) {
  if (k == 0) throw ProtocolError("family parameter must be at least 1");
  Protocol p;
  p.states.push_back("q_i");
  for (uint32_t j = 1; j <= k; ++j) p.states.push_back("q_" + std::to_string(j));
  p.states.push_back("q_f");
  p.num_process_states = k + 2;
  p.q_init = 0;
  p.q_final = k + 1;
  for (uint32_t j = 1; j <= k; ++j) p.letters.push_back(std::to_string(j));
  p.letters.push_back("a");
  const LetterIdx a = k;

  auto q = [](uint32_t j) { return static_cast<StateIdx>(j); };  // q_j at index j
  p.edges.push_back({q(0), ActionKind::Send, 0, q(1)});
  p.edges.push_back({q(0), ActionKind::Receive, 0, q(1)});
  for (uint32_t j = 2; j <= k; ++j) {
    p.edges.push_back({q(j - 1), ActionKind::Send, j - 1, q(j)});
    p.edges.push_back({q(0), ActionKind::Receive, j - 1, q(j)});
  }
  p.edges.push_back({q(k), ActionKind::Send, a, q(k)});
  p.edges.push_back({q(k), ActionKind::Send, a, q(k + 1)});
  p.edges.push_back({q(0), ActionKind::Receive, a, q(k + 1)});

  sort_and_dedup(p.edges);
  check_invariants(p);
  return p;
}

uint64_t protocol_hash(const Protocol& p) {
  std::string s = print_protocol(p);
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace rdv
