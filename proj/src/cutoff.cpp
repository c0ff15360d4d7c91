#include "rdv/cutoff.hpp"

#include <algorithm>
#include <sstream>

namespace rdv {

namespace {

SearchBudget search_budget(const Budget& b) {
  SearchBudget s;
  s.node_cap = b.node_cap;
  if (b.wall_time.count() > 0)
    s.deadline = std::chrono::steady_clock::now() + b.wall_time;
  return s;
}

// Exact witness table with traces kept for the yes entries.
struct TableWithTraces {
  std::vector<TableEntry> table;
  std::vector<std::optional<Trace>> traces;
};

TableWithTraces exact_table(const Protocol& p, uint64_t n_max, const SearchBudget& sb) {
  TableWithTraces t;
  t.table.assign(n_max + 1, TableEntry::Unknown);
  t.traces.resize(n_max + 1);
  for (uint64_t n = 0; n <= n_max; ++n) {
    ReachResult r = reachable_final(p, n, sb);
    if (r.kind == ReachKind::Witness) {
      t.table[n] = TableEntry::Yes;
      t.traces[n] = std::move(r.witness);
    } else if (r.kind == ReachKind::NotReachable) {
      t.table[n] = TableEntry::No;
    }
  }
  return t;
}

std::optional<uint64_t> minimal_all_yes_tail(const std::vector<TableEntry>& table,
                                             uint64_t n_start) {
  std::optional<uint64_t> best;
  for (uint64_t b = table.size(); b-- > n_start;) {
    if (table[b] != TableEntry::Yes) break;
    best = b;
  }
  return best;
}

Certificate decide_symmetric(const Protocol& p, const Budget& budget, Certificate cert) {
  SymmetricDecision d = decide_symmetric_cop(p);
  if (!d.has_cutoff) {
    cert.verdict = Verdict::NoCutoff;
    cert.exact = true;
    cert.just = AbstractObstructionJust{*d.failed};
    return cert;
  }
  Concretization even = concretize(p, *d.even_path, Parity::Even);
  Concretization odd = concretize(p, *d.odd_path, Parity::Odd);
  cert.verdict = Verdict::Cutoff;
  cert.bound = std::max(even.n, odd.n);
  cert.exact = true;
  cert.just = ParityPumpingJust{even.n, odd.n, even.trace, odd.trace};

  // Tighter bound within an exactly verified window, reported separately.
  if (cert.bound + budget.window <= 24) {
    TableWithTraces t = exact_table(p, cert.bound + budget.window, search_budget(budget));
    cert.minimal_within_window =
        minimal_all_yes_tail(t.table, budget.include_zero ? 0 : 1);
  }
  return cert;
}

Certificate decide_leaderless(const Protocol& p, const Budget& budget, Certificate cert) {
  const uint64_t n_start = budget.include_zero ? 0 : 1;
  const SearchBudget sb = search_budget(budget);
  TableWithTraces t = exact_table(p, budget.n_max, sb);

  std::optional<uint64_t> consec;
  for (uint64_t n = n_start; n + 1 <= budget.n_max; ++n) {
    bool n_ok = t.table[n] == TableEntry::Yes || (n == 0);  // n = 0 is trivially a witness
    if (n_ok && t.table[n + 1] == TableEntry::Yes) {
      consec = n;
      break;
    }
  }

  if (consec) {
    const uint64_t N = *consec;
    const uint64_t guaranteed = N * N;
    const uint64_t limit = std::max(guaranteed, N + 1);
    // Composability from the exact witnesses; n = 0 composes for free.
    std::vector<bool> covered(limit + 1, false);
    covered[0] = true;
    for (uint64_t x = 1; x <= limit; ++x) {
      for (uint64_t w = 1; w <= std::min<uint64_t>(x, budget.n_max) && !covered[x]; ++w) {
        if (t.table[w] == TableEntry::Yes && covered[x - w]) covered[x] = true;
      }
    }
    uint64_t B = guaranteed;
    while (B > n_start && covered[B - 1]) --B;
    // Replayable witnesses for the consecutive pair and for every n in
    // [B, guaranteed]: either a searched trace or a composition of smaller
    // ones.
    std::vector<std::pair<uint64_t, Trace>> witnesses;
    std::vector<std::optional<Trace>> built(limit + 1);
    for (uint64_t x = 1; x <= limit; ++x) {
      if (!covered[x]) continue;
      if (x <= budget.n_max && t.traces[x]) {
        built[x] = t.traces[x];
        continue;
      }
      for (uint64_t w = 1; w <= std::min<uint64_t>(x - 1, budget.n_max); ++w) {
        if (t.table[w] != TableEntry::Yes || !covered[x - w] || !built[x - w]) continue;
        built[x] = compose_traces(p, *built[x - w], *t.traces[w]);
        break;
      }
    }
    for (uint64_t x = std::max<uint64_t>(std::min(B, N), 1); x <= limit; ++x) {
      bool wanted = (x >= B && x <= guaranteed) || x == N || x == N + 1;
      if (wanted && built[x]) witnesses.emplace_back(x, *built[x]);
    }

    cert.verdict = Verdict::Cutoff;
    cert.bound = B;
    cert.exact = true;
    cert.minimal_within_window = minimal_all_yes_tail(t.table, n_start);
    cert.just = CompositionJust{N, guaranteed, std::move(witnesses)};
    return cert;
  }

  // No consecutive witnesses inside the horizon: look for an exactly
  // unreachable arithmetic family of final populations.
  ProtocolNet pn = protocol_to_net(p);
  SinglePlaceBudget spb;
  spb.n_max = budget.n_max;
  spb.n_min = n_start;
  spb.window = budget.window;
  spb.node_cap = budget.node_cap;
  spb.token_cap = budget.n_max + 2;
  SinglePlaceResult spc = single_place_cutoff_budgeted(pn.net, pn.m0, pn.final_place, spb);
  if (spc.kind == SinglePlaceResult::Kind::NoCutoffEvidence) {
    cert.verdict = Verdict::NoCutoff;
    cert.exact = spc.family_exact;
    cert.just = UnreachableFamilyJust{spc.family_base_n, spc.family_period,
                                      spc.family_checked_to};
    return cert;
  }
  cert.verdict = Verdict::Unknown;
  cert.just = BudgetExhaustedJust{budget.n_max, budget.node_cap};
  return cert;
}

Certificate decide_general(const Protocol& p, const Budget& budget, Certificate cert) {
  const uint64_t n_start = budget.include_zero ? 0 : 1;
  const SearchBudget sb = search_budget(budget);
  TableWithTraces t = exact_table(p, budget.n_max, sb);

  std::optional<uint64_t> B = minimal_all_yes_tail(t.table, n_start);
  if (B && budget.n_max >= *B + budget.window) {
    ExhaustiveWindowJust just;
    just.lo = *B;
    just.hi = budget.n_max;
    just.table = t.table;
    for (uint64_t n = *B; n <= std::min(budget.n_max, *B + budget.window); ++n)
      if (t.traces[n]) just.witnesses.emplace_back(n, *t.traces[n]);
    cert.verdict = Verdict::Cutoff;
    cert.bound = *B;
    cert.exact = false;  // nothing is known beyond the horizon
    cert.minimal_within_window = *B;
    cert.just = std::move(just);
    return cert;
  }

  ProtocolNet pn = protocol_to_net(p);
  SinglePlaceBudget spb;
  spb.n_max = budget.n_max;
  spb.n_min = n_start;
  spb.window = budget.window;
  spb.node_cap = budget.node_cap;
  spb.token_cap = budget.n_max + 2;
  SinglePlaceResult spc = single_place_cutoff_budgeted(pn.net, pn.m0, pn.final_place, spb);
  if (spc.kind == SinglePlaceResult::Kind::NoCutoffEvidence) {
    cert.verdict = Verdict::NoCutoff;
    cert.exact = spc.family_exact;
    cert.just = UnreachableFamilyJust{spc.family_base_n, spc.family_period,
                                      spc.family_checked_to};
    return cert;
  }
  cert.verdict = Verdict::Unknown;
  cert.just = BudgetExhaustedJust{budget.n_max, budget.node_cap};
  return cert;
}

}  // namespace

Certificate decide(const Protocol& p, const Budget& budget) {
  Certificate cert;
  cert.protocol_hash = protocol_hash(p);
  cert.notes = validate_warnings(p);

  Classification cls = classify(p);
  if (cls.symmetric && cls.connectivity_ok) return decide_symmetric(p, budget, std::move(cert));
  if (cls.symmetric && !cls.connectivity_ok)
    cert.notes.push_back(
        "symmetric exact procedure skipped: connectivity assumption violated");
  if (cls.leaderless) return decide_leaderless(p, budget, std::move(cert));
  return decide_general(p, budget, std::move(cert));
}

ReversibleReduction reduce_reversible(const Protocol& p) {
  if (!p.leaderless())
    throw ProtocolError("the reversible reduction requires a leaderless protocol");
  Protocol q = eliminate_final_outgoing(p);
  ProtocolNet fwd = protocol_to_net(q);
  PetriNet rev = reverse_net(fwd.net);
  PetriNet merged = merge_final(fwd.net, rev, fwd.final_place);
  ReversibleReduction out;
  out.m0 = Marking(merged.places.size());
  out.m1 = single_place_marking(merged, fwd.final_place, 1);
  out.net = std::move(merged);
  return out;
}

ReversibleCheck reversible_check(const Protocol& p, uint64_t token_cap, uint64_t node_cap) {
  ReversibleReduction r = reduce_reversible(p);
  NetBudget nb{token_cap, node_cap};
  ReversibleCheck out;
  out.forward = bounded_reach(r.net, r.m0, r.m1, nb);
  out.backward = bounded_reach(r.net, r.m1, r.m0, nb);
  return out;
}

Trace compose_traces(const Protocol& p, const Trace& a, const Trace& b) {
  if (!p.leaderless()) throw ProtocolError("witness composition requires a leaderless protocol");
  Trace out;
  out.start = initial_config(p, a.start.total() + b.start.total());
  out.steps = a.steps;
  out.steps.insert(out.steps.end(), b.steps.begin(), b.steps.end());
  return out;
}

bool composition_check(const Protocol& p, uint64_t n, uint64_t m, const SearchBudget& budget) {
  if (!p.leaderless()) throw ProtocolError("witness composition requires a leaderless protocol");
  ReachResult rn = reachable_final(p, n, budget);
  ReachResult rm = reachable_final(p, m, budget);
  if (rn.kind != ReachKind::Witness || rm.kind != ReachKind::Witness)
    throw ProtocolError("composition requires witnesses at both sizes");
  Trace comp = compose_traces(p, *rn.witness, *rm.witness);
  auto end = replay(p, comp.start, comp.steps);
  return end && *end == final_config(p, n + m);
}

namespace {

bool replays_to_final(const Protocol& p, uint64_t n, const Trace& t) {
  if (!(t.start == initial_config(p, n))) return false;
  auto end = replay(p, t.start, t.steps);
  return end && *end == final_config(p, n);
}

VerifyResult invalid(const std::string& reason) { return {false, reason}; }

}  // namespace

VerifyResult verify_certificate(const Protocol& p, const Certificate& cert,
                                const Budget& budget) {
  if (cert.protocol_hash != protocol_hash(p)) return invalid("protocol hash mismatch");
  const uint64_t n_start = budget.include_zero ? 0 : 1;
  Classification cls = classify(p);

  if (const auto* j = std::get_if<ParityPumpingJust>(&cert.just)) {
    if (cert.verdict != Verdict::Cutoff) return invalid("parity evidence without a cutoff verdict");
    if (!cls.symmetric || !cls.connectivity_ok)
      return invalid("parity argument needs a symmetric connected protocol");
    if (j->n_even % 2 != 0 || j->n_even < 2) return invalid("even witness size is not even");
    if (j->n_odd % 2 != 1) return invalid("odd witness size is not odd");
    if (!replays_to_final(p, j->n_even, j->trace_even))
      return invalid("even witness trace does not replay");
    if (!replays_to_final(p, j->n_odd, j->trace_odd))
      return invalid("odd witness trace does not replay");
    if (cert.bound != std::max(j->n_even, j->n_odd))
      return invalid("bound does not match max of the parity witnesses");
    return {true, {}};
  }

  if (const auto* j = std::get_if<CompositionJust>(&cert.just)) {
    if (cert.verdict != Verdict::Cutoff)
      return invalid("composition evidence without a cutoff verdict");
    if (!cls.leaderless) return invalid("composition argument needs a leaderless protocol");
    std::vector<uint64_t> sizes;
    for (const auto& [n, tr] : j->witnesses) {
      if (!replays_to_final(p, n, tr))
        return invalid("witness at n=" + std::to_string(n) + " does not replay");
      sizes.push_back(n);
    }
    auto have = [&](uint64_t n) {
      return n == 0 || std::find(sizes.begin(), sizes.end(), n) != sizes.end();
    };
    const uint64_t N = j->n_consecutive;
    if (j->guaranteed_bound != N * N) return invalid("guaranteed bound is not N*N");
    // The embedded witnesses must cover [bound, N*N] themselves and contain
    // the consecutive pair (n = 0 holds vacuously for leaderless protocols).
    if (!have(N) || !have(N + 1)) return invalid("consecutive witnesses missing");
    for (uint64_t x = std::max<uint64_t>(cert.bound, 1); x <= j->guaranteed_bound; ++x)
      if (!have(x)) return invalid("gap at n=" + std::to_string(x) + " below the guaranteed bound");
    if (cert.bound < n_start) return invalid("bound below the smallest counted population");
    return {true, {}};
  }

  if (const auto* j = std::get_if<AbstractObstructionJust>(&cert.just)) {
    if (cert.verdict != Verdict::NoCutoff)
      return invalid("abstract obstruction without a no-cutoff verdict");
    if (!cls.symmetric || !cls.connectivity_ok)
      return invalid("abstract obstruction needs a symmetric connected protocol");
    Endpoints ep = abstract_endpoints(p);
    const EOConfig& from = j->failed == Parity::Even ? ep.init_even : ep.init_odd;
    const EOConfig& to = j->failed == Parity::Even ? ep.final_even : ep.final_odd;
    if (eo_reach(p, from, to)) return invalid("claimed parity class is abstractly reachable");
    return {true, {}};
  }

  if (const auto* j = std::get_if<ExhaustiveWindowJust>(&cert.just)) {
    if (cert.verdict != Verdict::Cutoff) return invalid("window evidence without a cutoff verdict");
    if (j->table.size() != j->hi + 1 || j->lo > j->hi) return invalid("malformed window");
    if (cert.bound != j->lo) return invalid("bound does not match the window start");
    for (uint64_t n = j->lo; n <= j->hi; ++n)
      if (j->table[n] != TableEntry::Yes)
        return invalid("window entry at n=" + std::to_string(n) + " is not a witness");
    uint64_t need_hi = std::min(j->hi, j->lo + budget.window);
    for (uint64_t n = j->lo; n <= need_hi; ++n) {
      auto it = std::find_if(j->witnesses.begin(), j->witnesses.end(),
                             [n](const auto& w) { return w.first == n; });
      if (it == j->witnesses.end())
        return invalid("no embedded witness at n=" + std::to_string(n));
    }
    for (const auto& [n, tr] : j->witnesses)
      if (!replays_to_final(p, n, tr))
        return invalid("witness at n=" + std::to_string(n) + " does not replay");
    if (j->lo > n_start) {
      ReachResult below = reachable_final(p, j->lo - 1, search_budget(budget));
      if (below.kind == ReachKind::Witness)
        return invalid("window start is not minimal: n=" + std::to_string(j->lo - 1) +
                       " is reachable");
    }
    return {true, {}};
  }

  if (const auto* j = std::get_if<UnreachableFamilyJust>(&cert.just)) {
    if (cert.verdict != Verdict::NoCutoff)
      return invalid("family evidence without a no-cutoff verdict");
    if (j->period == 0) return invalid("family period must be positive");
    ProtocolNet pn = protocol_to_net(p);
    NetBudget nb{j->checked_to + 2, budget.node_cap};
    for (uint64_t n = j->base_n; n <= j->checked_to; n += j->period) {
      NetReachResult r =
          bounded_reach(pn.net, pn.m0, single_place_marking(pn.net, pn.final_place, n), nb);
      if (r.kind != NetReachKind::NotReachableExact)
        return invalid("family member n=" + std::to_string(n) +
                       " is not exactly unreachable");
    }
    return {true, {}};
  }

  if (std::get_if<BudgetExhaustedJust>(&cert.just)) {
    if (cert.verdict != Verdict::Unknown)
      return invalid("budget-exhausted justification with a definite verdict");
    return {true, {}};
  }
  return invalid("unrecognized justification");
}

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Cutoff: return "cutoff";
    case Verdict::NoCutoff: return "no_cutoff";
    case Verdict::Unknown: return "unknown";
  }
  return "unknown";
}

const char* justification_name(const Justification& j) {
  if (std::holds_alternative<ParityPumpingJust>(j)) return "parity_pumping";
  if (std::holds_alternative<CompositionJust>(j)) return "composition";
  if (std::holds_alternative<AbstractObstructionJust>(j)) return "abstract_obstruction";
  if (std::holds_alternative<ExhaustiveWindowJust>(j)) return "exhaustive_window";
  if (std::holds_alternative<UnreachableFamilyJust>(j)) return "unreachable_family";
  return "budget_exhausted";
}

namespace {

const char* table_entry_name(TableEntry e) {
  switch (e) {
    case TableEntry::Yes: return "yes";
    case TableEntry::No: return "no";
    case TableEntry::Unknown: return "unknown";
  }
  return "unknown";
}

TableEntry table_entry_from(const std::string& s) {
  if (s == "yes") return TableEntry::Yes;
  if (s == "no") return TableEntry::No;
  return TableEntry::Unknown;
}

std::string hash_hex(uint64_t h) {
  std::ostringstream out;
  out << std::hex << h;
  return out.str();
}

nlohmann::json witness_list_to_json(const Protocol& p,
                                    const std::vector<std::pair<uint64_t, Trace>>& ws) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& [n, tr] : ws) arr.push_back({{"n", n}, {"trace", trace_to_json(p, tr)}});
  return arr;
}

std::vector<std::pair<uint64_t, Trace>> witness_list_from_json(const Protocol& p,
                                                               const nlohmann::json& arr) {
  std::vector<std::pair<uint64_t, Trace>> ws;
  for (const auto& w : arr)
    ws.emplace_back(w.at("n").get<uint64_t>(), trace_from_json(p, w.at("trace")));
  return ws;
}

}  // namespace

nlohmann::json certificate_to_json(const Protocol& p, const Certificate& cert) {
  nlohmann::json j;
  j["schema"] = 1;
  j["protocol_hash"] = hash_hex(cert.protocol_hash);
  j["verdict"] = verdict_name(cert.verdict);
  if (cert.verdict == Verdict::Cutoff) j["bound"] = cert.bound;
  j["exact"] = cert.exact;
  if (cert.minimal_within_window) j["minimal_within_window"] = *cert.minimal_within_window;
  if (!cert.notes.empty()) j["notes"] = cert.notes;

  nlohmann::json just;
  just["kind"] = justification_name(cert.just);
  if (const auto* pp = std::get_if<ParityPumpingJust>(&cert.just)) {
    just["n_even"] = pp->n_even;
    just["n_odd"] = pp->n_odd;
    just["trace_even"] = trace_to_json(p, pp->trace_even);
    just["trace_odd"] = trace_to_json(p, pp->trace_odd);
  } else if (const auto* c = std::get_if<CompositionJust>(&cert.just)) {
    just["n_consecutive"] = c->n_consecutive;
    just["guaranteed_bound"] = c->guaranteed_bound;
    just["witnesses"] = witness_list_to_json(p, c->witnesses);
  } else if (const auto* a = std::get_if<AbstractObstructionJust>(&cert.just)) {
    just["failed_parity"] = a->failed == Parity::Even ? "even" : "odd";
  } else if (const auto* w = std::get_if<ExhaustiveWindowJust>(&cert.just)) {
    just["lo"] = w->lo;
    just["hi"] = w->hi;
    nlohmann::json table = nlohmann::json::array();
    for (TableEntry e : w->table) table.push_back(table_entry_name(e));
    just["table"] = table;
    just["witnesses"] = witness_list_to_json(p, w->witnesses);
  } else if (const auto* f = std::get_if<UnreachableFamilyJust>(&cert.just)) {
    just["base_n"] = f->base_n;
    just["period"] = f->period;
    just["checked_to"] = f->checked_to;
  } else if (const auto* b = std::get_if<BudgetExhaustedJust>(&cert.just)) {
    just["n_max"] = b->n_max;
    just["node_cap"] = b->node_cap;
  }
  j["justification"] = std::move(just);
  return j;
}

Certificate certificate_from_json(const Protocol& p, const nlohmann::json& j) {
  Certificate cert;
  if (j.at("schema").get<int>() != 1) throw ProtocolError("unsupported certificate schema");
  cert.protocol_hash = std::stoull(j.at("protocol_hash").get<std::string>(), nullptr, 16);
  std::string v = j.at("verdict").get<std::string>();
  cert.verdict = v == "cutoff" ? Verdict::Cutoff
                : v == "no_cutoff" ? Verdict::NoCutoff
                                   : Verdict::Unknown;
  if (j.contains("bound")) cert.bound = j.at("bound").get<uint64_t>();
  cert.exact = j.value("exact", false);
  if (j.contains("minimal_within_window"))
    cert.minimal_within_window = j.at("minimal_within_window").get<uint64_t>();
  if (j.contains("notes"))
    cert.notes = j.at("notes").get<std::vector<std::string>>();

  const nlohmann::json& just = j.at("justification");
  std::string kind = just.at("kind").get<std::string>();
  if (kind == "parity_pumping") {
    ParityPumpingJust pp;
    pp.n_even = just.at("n_even").get<uint64_t>();
    pp.n_odd = just.at("n_odd").get<uint64_t>();
    pp.trace_even = trace_from_json(p, just.at("trace_even"));
    pp.trace_odd = trace_from_json(p, just.at("trace_odd"));
    cert.just = std::move(pp);
  } else if (kind == "composition") {
    CompositionJust c;
    c.n_consecutive = just.at("n_consecutive").get<uint64_t>();
    c.guaranteed_bound = just.at("guaranteed_bound").get<uint64_t>();
    c.witnesses = witness_list_from_json(p, just.at("witnesses"));
    cert.just = std::move(c);
  } else if (kind == "abstract_obstruction") {
    AbstractObstructionJust a;
    a.failed = just.at("failed_parity").get<std::string>() == "even" ? Parity::Even : Parity::Odd;
    cert.just = a;
  } else if (kind == "exhaustive_window") {
    ExhaustiveWindowJust w;
    w.lo = just.at("lo").get<uint64_t>();
    w.hi = just.at("hi").get<uint64_t>();
    for (const auto& e : just.at("table"))
      w.table.push_back(table_entry_from(e.get<std::string>()));
    w.witnesses = witness_list_from_json(p, just.at("witnesses"));
    cert.just = std::move(w);
  } else if (kind == "unreachable_family") {
    UnreachableFamilyJust f;
    f.base_n = just.at("base_n").get<uint64_t>();
    f.period = just.at("period").get<uint64_t>();
    f.checked_to = just.at("checked_to").get<uint64_t>();
    cert.just = f;
  } else if (kind == "budget_exhausted") {
    BudgetExhaustedJust b;
    b.n_max = just.at("n_max").get<uint64_t>();
    b.node_cap = just.at("node_cap").get<uint64_t>();
    cert.just = b;
  } else {
    throw ProtocolError("unknown justification kind '" + kind + "'");
  }
  return cert;
}

}  // namespace rdv
