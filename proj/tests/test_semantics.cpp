#include "doctest.h"

#include "helpers.hpp"

using namespace rdv;
namespace tu = testutil;

namespace {

Config make_config(const Protocol& p, std::initializer_list<std::pair<const char*, uint32_t>> kv) {
  Config c;
  for (const auto& [name, count] : kv) c.add(*p.state_index(name), count);
  return c;
}

}  // namespace

TEST_CASE("initial and final configurations") {
  Protocol f1 = tu::fig1();
  CHECK(initial_config(f1, 3) == make_config(f1, {{"q_i", 3}, {"qL_i", 1}}));
  CHECK(final_config(f1, 3) == make_config(f1, {{"q_f", 3}, {"qL_f", 1}}));
  CHECK(final_config(f1, 0) == make_config(f1, {{"qL_f", 1}}));

  Protocol f6 = tu::fig6();
  CHECK(initial_config(f6, 0).counts.empty());
  CHECK(final_config(f6, 2) == make_config(f6, {{"q_f", 2}}));

  Protocol k1 = tu::fig7(1);
  CHECK(initial_config(k1, 2) == make_config(k1, {{"q_i", 2}}));
}

TEST_CASE("enabled steps follow the pairwise count conditions") {
  Protocol f1 = tu::fig1();
  Config c = make_config(f1, {{"q_i", 2}, {"qL_i", 1}});
  auto steps = enabled_steps(f1, c);
  // The d rendez-vous between two q_i processes must be present, with the
  // expected successor.
  Config d_succ = make_config(f1, {{"q", 1}, {"q_f", 1}, {"qL_i", 1}});
  bool found_d = false;
  for (const auto& [s, next] : steps) {
    CHECK(next.total() == c.total());
    if (next == d_succ) found_d = true;
  }
  CHECK(found_d);

  // A lone process has no partner.
  Protocol f6 = tu::fig6();
  CHECK(enabled_steps(f6, make_config(f6, {{"q_i", 1}})).empty());

  // Terminal configuration: everyone in states without usable edges.
  CHECK(enabled_steps(f1, final_config(f1, 3)).empty());
}

TEST_CASE("same-source rendez-vous needs two entities") {
  // Both roles of letter a start in q_i.
  Protocol p = parse_protocol(
      "alphabet: a\nprocess: q_i q_f\ninit: q_i\nfinal: q_f\nsym: q_i a q_f\n");
  CHECK(enabled_steps(p, initial_config(p, 1)).empty());
  CHECK(enabled_steps(p, initial_config(p, 2)).size() == 1);
}

TEST_CASE("fig1 reachability: witness at 3, exact failure at 2") {
  Protocol f1 = tu::fig1();
  ReachResult r3 = reachable_final(f1, 3);
  REQUIRE(r3.kind == ReachKind::Witness);
  auto end = replay(f1, r3.witness->start, r3.witness->steps);
  REQUIRE(end.has_value());
  CHECK(*end == final_config(f1, 3));
  // The documented 4-step witness (d, a, b, c) is the shortest.
  CHECK(r3.witness->steps.size() == 4);

  CHECK(reachable_final(f1, 2).kind == ReachKind::NotReachable);
}

TEST_CASE("fig1 variant flips to odd-only") {
  Protocol v = tu::fig1_variant();
  CHECK(reachable_final(v, 5).kind == ReachKind::Witness);
  CHECK(reachable_final(v, 4).kind == ReachKind::NotReachable);
}

TEST_CASE("witness tables freeze the expected values") {
  auto t1 = witness_table(tu::fig1(), 6);
  std::vector<TableEntry> want1{TableEntry::No,  TableEntry::Yes, TableEntry::No,
                                TableEntry::Yes, TableEntry::Yes, TableEntry::Yes,
                                TableEntry::Yes};
  CHECK(t1 == want1);

  auto t6 = witness_table(tu::fig6(), 4);
  std::vector<TableEntry> want6{TableEntry::Yes, TableEntry::No, TableEntry::Yes,
                                TableEntry::Yes, TableEntry::Yes};
  CHECK(t6 == want6);

  Protocol degenerate = parse_protocol("alphabet: a\nprocess: q\ninit: q\nfinal: q\n");
  auto td = witness_table(degenerate, 2);
  CHECK(td == std::vector<TableEntry>{TableEntry::Yes, TableEntry::Yes, TableEntry::Yes});
}

TEST_CASE("exp family k=1 completes first at 4") {
  auto t = witness_table(tu::fig7(1), 6);
  std::vector<TableEntry> want{TableEntry::Yes, TableEntry::No, TableEntry::No,
                               TableEntry::No,  TableEntry::Yes, TableEntry::Yes,
                               TableEntry::Yes};
  CHECK(t == want);
}

TEST_CASE("budget exhaustion reports BudgetExceeded, never a wrong exact answer") {
  SearchBudget tiny;
  tiny.node_cap = 3;
  CHECK(reachable_final(tu::fig1(), 4, tiny).kind == ReachKind::BudgetExceeded);
}

TEST_CASE("verdicts are independent of source edge order") {
  std::string fwd = tu::read_file(tu::proto_path("fig1.rdv"));
  // Reverse the edge lines.
  std::istringstream in(fwd);
  std::vector<std::string> head, edges;
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("edge:", 0) == 0)
      edges.insert(edges.begin(), line);
    else
      head.push_back(line);
  }
  std::ostringstream out;
  for (const auto& l : head) out << l << '\n';
  for (const auto& l : edges) out << l << '\n';
  Protocol a = parse_protocol(fwd);
  Protocol b = parse_protocol(out.str());
  CHECK(a == b);
  for (uint64_t n = 0; n <= 5; ++n)
    CHECK(reachable_final(a, n).kind == reachable_final(b, n).kind);
}

TEST_CASE("search agrees with the saturation oracle on small instances") {
  std::vector<Protocol> cases{tu::fig1(), tu::fig1_variant(), tu::fig6(), tu::fig7(1)};
  for (uint64_t seed = 40; seed < 50; ++seed) {
    RandomSpec spec;
    spec.seed = seed;
    spec.num_process_states = 1 + seed % 4;
    spec.symmetric = seed % 2 == 0;
    spec.leaderless = seed % 3 != 0;
    spec.edge_density = 0.3;
    cases.push_back(gen_random(spec));
  }
  for (const Protocol& p : cases) {
    for (uint64_t n = 0; n <= 5; ++n) {
      ReachResult r = reachable_final(p, n);
      REQUIRE(r.kind != ReachKind::BudgetExceeded);
      CHECK((r.kind == ReachKind::Witness) == tu::oracle::reachable_final(p, n));
      if (r.kind == ReachKind::Witness) {
        auto end = replay(p, r.witness->start, r.witness->steps);
        REQUIRE(end.has_value());
        CHECK(*end == final_config(p, n));
      }
    }
  }
}

TEST_CASE("steps preserve size and leader count along random walks") {
  Protocol f1 = tu::fig1();
  Config c = initial_config(f1, 5);
  for (int depth = 0; depth < 6; ++depth) {
    auto steps = enabled_steps(f1, c);
    if (steps.empty()) break;
    for (const auto& [s, next] : steps) {
      CHECK(next.total() == c.total());
      uint64_t leaders = 0;
      for (const auto& [q, k] : next.counts)
        if (f1.role(q) == Role::Leader) leaders += k;
      CHECK(leaders == 1);
    }
    c = steps[depth % steps.size()].second;
  }
}

TEST_CASE("pump_pairs moves entities pairwise along symmetric paths") {
  Protocol chain = parse_protocol(
      "alphabet: a b\nprocess: q_i q1 q_f\ninit: q_i\nfinal: q_f\n"
      "sym: q_i a q1\nsym: q1 b q_f\n");
  Config c = initial_config(chain, 4);
  StateIdx q1 = *chain.state_index("q1");

  PumpResult none = pump_pairs(chain, c, chain.q_init, 2);
  CHECK(none.steps.empty());
  CHECK(none.result == c);

  PumpResult one = pump_pairs(chain, c, q1, 1);
  CHECK(one.steps.size() == 1);
  CHECK(one.result == make_config(chain, {{"q_i", 2}, {"q1", 2}}));

  PumpResult two = pump_pairs(chain, c, q1, 2);
  CHECK(two.result == make_config(chain, {{"q1", 4}}));
  CHECK(replay(chain, c, two.steps) == two.result);

  PumpResult drain = drain_pairs(chain, two.result, q1, 2);
  CHECK(drain.result == final_config(chain, 4));

  CHECK_THROWS_AS(pump_pairs(tu::fig1(), initial_config(tu::fig1(), 4), 1, 1), ProtocolError);
}

TEST_CASE("trace serialization round-trips and matches the step schema") {
  Protocol f1 = tu::fig1();
  ReachResult r = reachable_final(f1, 3);
  REQUIRE(r.kind == ReachKind::Witness);
  nlohmann::json j = trace_to_json(f1, *r.witness);
  CHECK(j.at("steps").size() == r.witness->steps.size());
  for (const auto& step : j.at("steps")) {
    CHECK(step.contains("letter"));
    CHECK(step.at("send").size() == 2);
    CHECK(step.at("recv").size() == 2);
  }
  Trace back = trace_from_json(f1, j);
  CHECK(back == *r.witness);
}
