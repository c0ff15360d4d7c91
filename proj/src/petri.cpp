#include "rdv/petri.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <set>
#include <sstream>
#include <unordered_map>

namespace rdv {

uint64_t Marking::total() const {
  uint64_t t = 0;
  for (uint32_t k : v) t += k;
  return t;
}

bool Marking::covers(const Marking& other) const {
  if (v.size() != other.v.size()) return false;
  for (size_t i = 0; i < v.size(); ++i)
    if (v[i] < other.v[i]) return false;
  return true;
}

Marking Marking::plus(const Marking& other) const {
  Marking out = *this;
  for (size_t i = 0; i < v.size(); ++i) out.v[i] += other.v[i];
  return out;
}

Marking Marking::minus(const Marking& other) const {
  Marking out = *this;
  for (size_t i = 0; i < v.size(); ++i) {
    if (out.v[i] < other.v[i]) throw std::logic_error("marking subtraction went negative");
    out.v[i] -= other.v[i];
  }
  return out;
}

size_t MarkingHash::operator()(const Marking& m) const {
  uint64_t h = 1469598103934665603ull;
  for (uint32_t k : m.v) {
    h ^= k;
    h *= 1099511628211ull;
  }
  return static_cast<size_t>(h);
}

std::optional<PlaceIdx> PetriNet::place_index(const std::string& name) const {
  for (PlaceIdx i = 0; i < places.size(); ++i)
    if (places[i] == name) return i;
  return std::nullopt;
}

std::optional<TransIdx> PetriNet::transition_index(const std::string& name) const {
  for (TransIdx i = 0; i < transitions.size(); ++i)
    if (transitions[i].name == name) return i;
  return std::nullopt;
}

Marking PetriNet::unit(PlaceIdx p, uint32_t k) const {
  Marking m(places.size());
  m.v.at(p) = k;
  return m;
}

std::optional<Marking> fire(const PetriNet& net, const Marking& m, TransIdx t) {
  if (t >= net.transitions.size()) throw std::out_of_range("unknown transition");
  const Transition& tr = net.transitions[t];
  if (!m.covers(tr.pre)) return std::nullopt;
  return m.minus(tr.pre).plus(tr.post);
}

ProtocolNet protocol_to_net(const Protocol& p) {
  ProtocolNet out;
  PetriNet& net = out.net;
  for (const std::string& s : p.states) net.places.push_back("p_" + s);

  Transition ti;
  ti.name = "t_i";
  ti.pre = net.zero();
  ti.post = net.unit(p.q_init);
  net.transitions.push_back(std::move(ti));

  for (uint32_t i = 0; i < p.edges.size(); ++i) {
    const Edge& snd = p.edges[i];
    if (snd.kind != ActionKind::Send) continue;
    for (uint32_t j = 0; j < p.edges.size(); ++j) {
      const Edge& rcv = p.edges[j];
      if (rcv.kind != ActionKind::Receive || rcv.letter != snd.letter) continue;
      Transition t;
      t.name = "rdv:" + p.letter_name(snd.letter) + ":" + p.state_name(snd.src) + ">" +
               p.state_name(snd.dst) + ":" + p.state_name(rcv.src) + ">" + p.state_name(rcv.dst);
      t.pre = net.zero();
      t.pre.v[snd.src] += 1;
      t.pre.v[rcv.src] += 1;
      t.post = net.zero();
      t.post.v[snd.dst] += 1;
      t.post.v[rcv.dst] += 1;
      net.transitions.push_back(std::move(t));
    }
  }

  if (!p.leaderless()) {
    Transition tf;
    tf.name = "t_Lf";
    tf.pre = net.unit(*p.leader_final);
    tf.post = net.zero();
    net.transitions.push_back(std::move(tf));
  }

  out.m0 = net.zero();
  if (!p.leaderless()) out.m0.v[*p.leader_init] = 1;
  out.final_place = p.q_final;
  return out;
}

Marking single_place_marking(const PetriNet& net, PlaceIdx p, uint64_t n) {
  if (p >= net.places.size()) throw std::out_of_range("unknown place");
  Marking m = net.zero();
  m.v[p] = static_cast<uint32_t>(n);
  return m;
}

namespace {

std::string sanitize_token(const std::string& s) {
  std::string out;
  for (char c : s)
    out += (std::isalnum(static_cast<unsigned char>(c)) || c == '_') ? c : '_';
  if (out.empty()) out = "x";
  return out;
}

std::string unique_name(std::set<std::string>& used, const std::string& base) {
  std::string name = base;
  for (int i = 1; used.count(name); ++i) name = base + "_" + std::to_string(i);
  used.insert(name);
  return name;
}

}  // namespace

Protocol net_to_protocol(const PetriNet& net, PlaceIdx p_i, PlaceIdx p_f) {
  if (p_i >= net.places.size() || p_f >= net.places.size())
    throw std::out_of_range("unknown place");
  if (p_i == p_f)
    throw ProtocolError("initial and final place must differ; normalize the markings first");

  Protocol p;
  std::set<std::string> used;
  std::string q_i = unique_name(used, "q_i");
  std::string q_f = unique_name(used, "q_f");
  std::string reserve = unique_name(used, "R");
  std::vector<std::string> place_state(net.num_places());
  for (PlaceIdx j = 0; j < net.num_places(); ++j)
    place_state[j] = unique_name(used, sanitize_token(net.places[j]));

  p.states = {q_i, q_f, reserve};
  p.states.insert(p.states.end(), place_state.begin(), place_state.end());
  p.num_process_states = static_cast<uint32_t>(p.states.size());
  p.q_init = 0;
  p.q_final = 1;
  const StateIdx R = 2;
  auto pstate = [&](PlaceIdx j) { return static_cast<StateIdx>(3 + j); };

  std::string qL_i = unique_name(used, "qL_i");
  std::string qL_s = unique_name(used, "qL_s");
  std::string qL_f = unique_name(used, "qL_f");
  p.states.push_back(qL_i);
  StateIdx Li = p.num_states() - 1;
  p.states.push_back(qL_s);
  StateIdx Ls = p.num_states() - 1;
  p.states.push_back(qL_f);
  StateIdx Lf = p.num_states() - 1;
  p.leader_init = Li;
  p.leader_final = Lf;

  p.letters.push_back("a");
  p.letters.push_back("b");
  const LetterIdx a = 0, b = 1;
  std::vector<LetterIdx> co(net.num_places()), pr(net.num_places());
  for (PlaceIdx j = 0; j < net.num_places(); ++j) {
    p.letters.push_back("co_" + place_state[j]);
    co[j] = static_cast<LetterIdx>(p.letters.size() - 1);
    p.letters.push_back("pr_" + place_state[j]);
    pr[j] = static_cast<LetterIdx>(p.letters.size() - 1);
  }

  auto edge = [&](StateIdx s, ActionKind k, LetterIdx l, StateIdx d) {
    p.edges.push_back({s, k, l, d});
  };

  // The leader banks processes in the reserve; leftovers drain via b.
  edge(p.q_init, ActionKind::Receive, a, R);
  edge(Li, ActionKind::Send, a, Li);
  for (PlaceIdx j = 0; j < net.num_places(); ++j) {
    edge(R, ActionKind::Receive, pr[j], pstate(j));
    edge(pstate(j), ActionKind::Receive, co[j], p.q_final);
  }
  edge(Li, ActionKind::Send, pr[p_i], Ls);
  edge(p.q_init, ActionKind::Receive, b, p.q_final);
  edge(Ls, ActionKind::Send, b, Ls);
  edge(Ls, ActionKind::Send, co[p_f], Lf);

  // One send chain per transition: consume tokens (place -> q_f), then
  // produce them (R -> place). A transition with empty pre and post would be
  // a no-op loop and is skipped.
  for (TransIdx t = 0; t < net.transitions.size(); ++t) {
    const Transition& tr = net.transitions[t];
    std::vector<LetterIdx> sends;
    for (PlaceIdx j = 0; j < net.num_places(); ++j)
      for (uint32_t k = 0; k < tr.pre.v[j]; ++k) sends.push_back(co[j]);
    for (PlaceIdx j = 0; j < net.num_places(); ++j)
      for (uint32_t k = 0; k < tr.post.v[j]; ++k) sends.push_back(pr[j]);
    if (sends.empty()) continue;
    StateIdx cur = Ls;
    for (size_t s = 0; s + 1 < sends.size(); ++s) {
      p.states.push_back(unique_name(used, "qL_" + sanitize_token(tr.name) + "_" +
                                               std::to_string(s + 1)));
      StateIdx next = p.num_states() - 1;
      edge(cur, ActionKind::Send, sends[s], next);
      cur = next;
    }
    edge(cur, ActionKind::Send, sends.back(), Ls);
  }

  std::sort(p.edges.begin(), p.edges.end());
  p.edges.erase(std::unique(p.edges.begin(), p.edges.end()), p.edges.end());
  return p;
}

NormalizedNet normalize_markings(const PetriNet& net, const Marking& from, const Marking& to) {
  NormalizedNet out;
  out.net = net;
  std::set<std::string> used(net.places.begin(), net.places.end());
  out.net.places.push_back(unique_name(used, "p_init"));
  out.net.places.push_back(unique_name(used, "p_fin"));
  out.p_init = out.net.num_places() - 2;
  out.p_final = out.net.num_places() - 1;

  auto widen = [&](const Marking& m) {
    Marking w = m;
    w.v.resize(out.net.num_places(), 0);
    return w;
  };
  for (Transition& t : out.net.transitions) {
    t.pre = widen(t.pre);
    t.post = widen(t.post);
  }
  Transition tinit;
  tinit.name = "t_init";
  tinit.pre = out.net.unit(out.p_init);
  tinit.post = widen(from);
  Transition tfin;
  tfin.name = "t_fin";
  tfin.pre = widen(to);
  tfin.post = out.net.unit(out.p_final);
  out.net.transitions.push_back(std::move(tinit));
  out.net.transitions.push_back(std::move(tfin));
  return out;
}

PetriNet reverse_net(const PetriNet& net) {
  PetriNet out;
  std::set<std::string> used;
  for (const std::string& pn : net.places) out.places.push_back(unique_name(used, pn + "_R"));
  for (const Transition& t : net.transitions) {
    Transition r;
    r.name = t.name + "_R";
    r.pre = t.post;
    r.post = t.pre;
    out.transitions.push_back(std::move(r));
  }
  return out;
}

PetriNet merge_final(const PetriNet& fwd, const PetriNet& rev, PlaceIdx final_place) {
  if (fwd.places.size() != rev.places.size())
    throw std::invalid_argument("forward and reverse nets must have matching places");
  if (final_place >= fwd.places.size()) throw std::out_of_range("unknown place");
  for (const Transition& t : fwd.transitions)
    if (t.pre.v[final_place] > 0)
      throw ProtocolError(
          "final place has a consuming forward transition; eliminate outgoing final edges first");

  PetriNet out;
  out.places = fwd.places;
  // Reverse places keep their order minus the merged one.
  std::vector<PlaceIdx> rev_map(rev.places.size());
  for (PlaceIdx j = 0; j < rev.places.size(); ++j) {
    if (j == final_place) {
      rev_map[j] = final_place;
    } else {
      out.places.push_back(rev.places[j]);
      rev_map[j] = out.num_places() - 1;
    }
  }

  auto widen = [&](const Marking& m) {
    Marking w = m;
    w.v.resize(out.places.size(), 0);
    return w;
  };
  for (const Transition& t : fwd.transitions) {
    Transition c;
    c.name = t.name;
    c.pre = widen(t.pre);
    c.post = widen(t.post);
    out.transitions.push_back(std::move(c));
  }
  for (const Transition& t : rev.transitions) {
    Transition c;
    c.name = t.name;
    c.pre = Marking(out.places.size());
    c.post = Marking(out.places.size());
    for (PlaceIdx j = 0; j < rev.places.size(); ++j) {
      c.pre.v[rev_map[j]] += t.pre.v[j];
      c.post.v[rev_map[j]] += t.post.v[j];
    }
    out.transitions.push_back(std::move(c));
  }
  return out;
}

std::optional<uint64_t> certified_token_cap(const PetriNet& net, const Marking& from,
                                            const Marking& to) {
  const size_t T = net.transitions.size();
  std::vector<int64_t> delta(T);
  bool has_pos = false, has_neg = false;
  for (size_t t = 0; t < T; ++t) {
    delta[t] = static_cast<int64_t>(net.transitions[t].post.total()) -
               static_cast<int64_t>(net.transitions[t].pre.total());
    has_pos |= delta[t] > 0;
    has_neg |= delta[t] < 0;
  }
  if (!has_pos) return from.total();
  if (!has_neg) return std::max(from.total(), to.total());

  // Look for a place set S whose token sum never grows and which pays for
  // every token-destroying firing; then at most sum_S(from) tokens can ever
  // be destroyed, which bounds the number of creations along from->to.
  const uint32_t P = net.num_places();
  if (P > 16) return std::nullopt;
  std::optional<uint64_t> best;
  for (uint32_t mask = 1; mask < (1u << P); ++mask) {
    bool ok = true;
    for (size_t t = 0; t < T && ok; ++t) {
      int64_t sd = 0;
      for (uint32_t j = 0; j < P; ++j)
        if (mask & (1u << j))
          sd += static_cast<int64_t>(net.transitions[t].post.v[j]) -
                static_cast<int64_t>(net.transitions[t].pre.v[j]);
      if (sd > 0) ok = false;
      if (ok && delta[t] < 0 && -delta[t] > -sd) ok = false;
    }
    if (!ok) continue;
    uint64_t weight = 0;
    for (uint32_t j = 0; j < P; ++j)
      if (mask & (1u << j)) weight += from.v[j];
    if (!best || weight < *best) best = weight;
  }
  if (!best) return std::nullopt;
  return std::max(from.total(), to.total() + *best);
}

NetReachResult bounded_reach(const PetriNet& net, const Marking& from, const Marking& to,
                             const NetBudget& budget) {
  NetReachResult res;
  if (from == to) {
    res.kind = NetReachKind::Reachable;
    res.explored = 1;
    return res;
  }

  std::optional<uint64_t> cert = certified_token_cap(net, from, to);
  uint64_t cap = budget.token_cap;
  bool exact = false;
  if (cert && *cert <= budget.token_cap) {
    cap = *cert;
    exact = true;
  }

  std::vector<Marking> arena;
  std::unordered_map<Marking, uint32_t, MarkingHash> index;
  struct Parent {
    uint32_t parent;
    TransIdx t;
  };
  std::vector<Parent> parents;
  arena.push_back(from);
  index.emplace(from, 0);
  parents.push_back({0, 0});
  std::deque<uint32_t> frontier{0};

  while (!frontier.empty()) {
    uint32_t cur = frontier.front();
    frontier.pop_front();
    Marking m = arena[cur];
    for (TransIdx t = 0; t < net.transitions.size(); ++t) {
      auto next = fire(net, m, t);
      if (!next || next->total() > cap) continue;
      auto [it, inserted] = index.emplace(*next, static_cast<uint32_t>(arena.size()));
      if (!inserted) continue;
      arena.push_back(*next);
      parents.push_back({cur, t});
      if (*next == to) {
        res.kind = NetReachKind::Reachable;
        res.explored = arena.size();
        std::vector<TransIdx> rev;
        for (uint32_t at = it->second; at != 0; at = parents[at].parent)
          rev.push_back(parents[at].t);
        res.firing.assign(rev.rbegin(), rev.rend());
        return res;
      }
      if (arena.size() > budget.node_cap) {
        res.kind = NetReachKind::Unknown;
        res.explored = arena.size();
        return res;
      }
      frontier.push_back(it->second);
    }
  }
  res.kind = exact ? NetReachKind::NotReachableExact : NetReachKind::Unknown;
  res.explored = arena.size();
  return res;
}

MemberResult member_flat(const PetriNet& net, const Marking& m, const FlatExpression& fe,
                         const Marking& target, uint64_t loop_budget) {
  for (const FlatSegment& seg : fe.segments)
    for (TransIdx t : seg.word)
      if (t >= net.transitions.size()) throw std::out_of_range("unknown transition");

  std::vector<size_t> star_ordinal(fe.segments.size(), 0);
  size_t stars = 0;
  for (size_t i = 0; i < fe.segments.size(); ++i)
    if (fe.segments[i].starred) star_ordinal[i] = stars++;

  MemberResult res;
  res.star_counts.assign(stars, 0);

  std::function<bool(size_t, Marking)> rec = [&](size_t i, Marking cur) -> bool {
    if (i == fe.segments.size()) return cur == target;
    const FlatSegment& seg = fe.segments[i];
    if (!seg.starred) {
      for (TransIdx t : seg.word) {
        auto next = fire(net, cur, t);
        if (!next) return false;
        cur = std::move(*next);
      }
      return rec(i + 1, cur);
    }
    for (uint64_t lam = 0; lam <= loop_budget; ++lam) {
      if (rec(i + 1, cur)) {
        res.star_counts[star_ordinal[i]] = lam;
        return true;
      }
      bool fired = true;
      for (TransIdx t : seg.word) {
        auto next = fire(net, cur, t);
        if (!next) {
          fired = false;
          break;
        }
        cur = std::move(*next);
      }
      if (!fired) break;  // further iterations are prefixed by this word too
    }
    return false;
  };

  res.member = rec(0, m);
  return res;
}

std::vector<std::string> linear_set_warnings(const LinearSet& s) {
  std::vector<std::string> w;
  for (size_t i = 0; i < s.periods.size(); ++i)
    if (s.periods[i].total() == 0)
      w.push_back("period vector " + std::to_string(i) + " is zero");
  return w;
}

GadgetNet intersect_gadget(const PetriNet& net, const Marking& m0, const LinearSet& s) {
  GadgetNet out;
  out.net.places = net.places;
  std::set<std::string> used(net.places.begin(), net.places.end());
  out.net.places.push_back(unique_name(used, "p_sim"));
  out.net.places.push_back(unique_name(used, "p_lin"));
  const PlaceIdx sim = out.net.num_places() - 2;
  const PlaceIdx lin = out.net.num_places() - 1;

  auto widen = [&](const Marking& m) {
    Marking w = m;
    w.v.resize(out.net.places.size(), 0);
    return w;
  };

  for (const Transition& t : net.transitions) {
    Transition c;
    c.name = t.name;
    c.pre = widen(t.pre);
    c.pre.v[sim] = 1;
    c.post = widen(t.post);
    c.post.v[sim] = 1;
    out.net.transitions.push_back(std::move(c));
  }
  Transition tlin;
  tlin.name = "t_lin";
  tlin.pre = widen(s.base);
  tlin.pre.v[sim] = 1;
  tlin.post = out.net.unit(lin);
  out.net.transitions.push_back(std::move(tlin));
  for (size_t i = 0; i < s.periods.size(); ++i) {
    Transition tc;
    tc.name = "t_cons_" + std::to_string(i + 1);
    tc.pre = widen(s.periods[i]);
    tc.pre.v[lin] = 1;
    tc.post = out.net.unit(lin);
    out.net.transitions.push_back(std::move(tc));
  }
  Transition tend;
  tend.name = "t_end";
  tend.pre = out.net.unit(lin);
  tend.post = out.net.zero();
  out.net.transitions.push_back(std::move(tend));

  out.m0 = widen(m0);
  out.m0.v[sim] = 1;
  return out;
}

SinglePlaceResult single_place_cutoff_budgeted(const PetriNet& net, const Marking& m0,
                                               PlaceIdx p_f, const SinglePlaceBudget& budget) {
  if (p_f >= net.places.size()) throw std::out_of_range("unknown place");
  SinglePlaceResult r;
  const uint64_t N = budget.n_max;
  r.table.assign(N + 1, TableEntry::Unknown);
  r.exact.assign(N + 1, false);

  NetBudget nb{budget.token_cap, budget.node_cap};
  for (uint64_t n = 0; n <= N; ++n) {
    NetReachResult res = bounded_reach(net, m0, single_place_marking(net, p_f, n), nb);
    switch (res.kind) {
      case NetReachKind::Reachable:
        r.table[n] = TableEntry::Yes;
        r.exact[n] = true;
        break;
      case NetReachKind::NotReachableExact:
        r.table[n] = TableEntry::No;
        r.exact[n] = true;
        break;
      case NetReachKind::Unknown:
        break;
    }
  }

  // Candidate bounds, smallest first, each confirmed on a full window.
  if (N >= budget.window) {
    for (uint64_t B = budget.n_min; B + budget.window <= N; ++B) {
      bool all = true;
      for (uint64_t n = B; n <= B + budget.window && all; ++n)
        all = r.table[n] == TableEntry::Yes;
      if (all) {
        r.kind = SinglePlaceResult::Kind::CutoffFound;
        r.bound = B;
        r.window = budget.window;
        return r;
      }
    }
  }

  // Arithmetic families of final-place markings that are exactly
  // unreachable across the whole horizon, cross-checked with the
  // intersection gadget. A gadget search that exhausts under a certified
  // cap proves the intersection empty for every member; otherwise the
  // window alone is accepted only when exact witnesses interleave with the
  // family (an all-dead horizon says nothing about larger populations).
  uint64_t exact_yes = 0;
  for (uint64_t n = budget.n_min; n <= N; ++n)
    if (r.table[n] == TableEntry::Yes) ++exact_yes;
  for (uint64_t d = 1; d <= budget.max_period; ++d) {
    for (uint64_t b0 = budget.n_min; b0 <= N; ++b0) {
      uint64_t members = 0;
      bool all_no = true;
      for (uint64_t n = b0; n <= N; n += d) {
        ++members;
        if (r.table[n] != TableEntry::No || !r.exact[n]) {
          all_no = false;
          break;
        }
      }
      if (!all_no || members < 3) continue;
      LinearSet fam;
      fam.base = single_place_marking(net, p_f, b0);
      fam.periods.push_back(single_place_marking(net, p_f, d));
      GadgetNet g = intersect_gadget(net, m0, fam);
      NetBudget gb{std::max<uint64_t>(budget.token_cap, N + 2), budget.node_cap};
      NetReachResult gres = bounded_reach(g.net, g.m0, g.net.zero(), gb);
      if (gres.kind == NetReachKind::Reachable) continue;  // family member above horizon
      bool exact = gres.kind == NetReachKind::NotReachableExact;
      if (!exact && exact_yes < 2) continue;
      r.kind = SinglePlaceResult::Kind::NoCutoffEvidence;
      r.family_base_n = b0;
      r.family_period = d;
      r.family_checked_to = N;
      r.gadget_confirmed = true;
      r.family_exact = exact;
      return r;
    }
  }

  r.kind = SinglePlaceResult::Kind::Unknown;
  return r;
}

namespace {

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

std::pair<std::string, uint32_t> parse_place_count(const std::string& tok, int line) {
  auto pos = tok.rfind(':');
  if (pos == std::string::npos || pos == 0 || pos + 1 >= tok.size())
    throw ProtocolError("expected <place>:<count>, got '" + tok + "'", line);
  std::string name = tok.substr(0, pos);
  std::string num = tok.substr(pos + 1);
  for (char c : num)
    if (!std::isdigit(static_cast<unsigned char>(c)))
      throw ProtocolError("bad count in '" + tok + "'", line);
  return {name, static_cast<uint32_t>(std::stoul(num))};
}

}  // namespace

NetFile parse_net_file(const std::string& text) {
  NetFile out;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  bool have_places = false;

  while (std::getline(in, raw)) {
    ++lineno;
    if (auto pos = raw.find('#'); pos != std::string::npos) raw.erase(pos);
    std::vector<std::string> toks = split_ws(raw);
    if (toks.empty()) continue;

    if (toks[0] == "places:") {
      if (have_places) throw ProtocolError("duplicate places: line", lineno);
      std::set<std::string> seen;
      for (size_t i = 1; i < toks.size(); ++i) {
        if (!seen.insert(toks[i]).second)
          throw ProtocolError("duplicate place '" + toks[i] + "'", lineno);
        out.net.places.push_back(toks[i]);
      }
      have_places = true;
    } else if (toks[0] == "transition:") {
      if (!have_places) throw ProtocolError("transition: before places:", lineno);
      if (toks.size() < 3) throw ProtocolError("malformed transition line", lineno);
      Transition t;
      t.name = toks[1];
      if (out.net.transition_index(t.name))
        throw ProtocolError("duplicate transition '" + t.name + "'", lineno);
      t.pre = out.net.zero();
      t.post = out.net.zero();
      size_t i = 2;
      if (i >= toks.size() || toks[i] != "pre")
        throw ProtocolError("transition line missing 'pre'", lineno);
      ++i;
      Marking* cur = &t.pre;
      for (; i < toks.size(); ++i) {
        if (toks[i] == "post") {
          cur = &t.post;
          continue;
        }
        auto [name, count] = parse_place_count(toks[i], lineno);
        auto pidx = out.net.place_index(name);
        if (!pidx) throw ProtocolError("undeclared place '" + name + "'", lineno);
        cur->v[*pidx] += count;
      }
      if (cur == &t.pre) throw ProtocolError("transition line missing 'post'", lineno);
      out.net.transitions.push_back(std::move(t));
    } else if (toks[0] == "marking") {
      if (!have_places) throw ProtocolError("marking before places:", lineno);
      if (toks.size() < 2 || toks[1].back() != ':')
        throw ProtocolError("malformed marking line", lineno);
      std::string label = toks[1].substr(0, toks[1].size() - 1);
      Marking m = out.net.zero();
      for (size_t i = 2; i < toks.size(); ++i) {
        auto [name, count] = parse_place_count(toks[i], lineno);
        auto pidx = out.net.place_index(name);
        if (!pidx) throw ProtocolError("undeclared place '" + name + "'", lineno);
        m.v[*pidx] += count;
      }
      out.markings.emplace_back(label, std::move(m));
    } else {
      throw ProtocolError("unknown directive '" + toks[0] + "'", lineno);
    }
  }
  if (!have_places) throw ProtocolError("net file has no places: line");
  return out;
}

std::vector<std::string> firing_to_names(const PetriNet& net,
                                         const std::vector<TransIdx>& firing) {
  std::vector<std::string> names;
  for (TransIdx t : firing) {
    if (t >= net.transitions.size()) throw std::out_of_range("unknown transition");
    names.push_back(net.transitions[t].name);
  }
  return names;
}

std::vector<TransIdx> firing_from_names(const PetriNet& net,
                                        const std::vector<std::string>& names) {
  std::vector<TransIdx> firing;
  for (const std::string& n : names) {
    auto t = net.transition_index(n);
    if (!t) throw ProtocolError("unknown transition '" + n + "'");
    firing.push_back(*t);
  }
  return firing;
}

std::string print_net(const PetriNet& net,
                      const std::vector<std::pair<std::string, Marking>>& markings) {
  std::ostringstream out;
  out << "places:";
  for (const std::string& pn : net.places) out << ' ' << pn;
  out << '\n';
  auto put_marking = [&](const Marking& m) {
    for (PlaceIdx j = 0; j < net.num_places(); ++j)
      if (m.v[j] > 0) out << ' ' << net.places[j] << ':' << m.v[j];
  };
  for (const Transition& t : net.transitions) {
    out << "transition: " << t.name << " pre";
    put_marking(t.pre);
    out << " post";
    put_marking(t.post);
    out << '\n';
  }
  for (const auto& [label, m] : markings) {
    out << "marking " << label << ':';
    put_marking(m);
    out << '\n';
  }
  return out.str();
}

}  // namespace rdv
