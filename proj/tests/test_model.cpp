#include "doctest.h"

#include "helpers.hpp"

using namespace rdv;
namespace tu = testutil;

TEST_CASE("fig1 parses to the expected shape") {
  Protocol p = tu::fig1();
  CHECK(p.num_process_states == 3);
  CHECK(p.num_leader_states() == 3);
  CHECK(p.letters.size() == 4);
  // The reference figure carries 9 edges: 6 process edges and 3 leader
  // edges.
  CHECK(p.edges.size() == 9);
  CHECK(p.state_name(p.q_init) == "q_i");
  CHECK(p.state_name(*p.leader_final) == "qL_f");
  CHECK(p.has_edge(*p.state_index("q"), ActionKind::Receive, *p.letter_index("a"),
                   *p.state_index("q_i")));
}

TEST_CASE("degenerate one-state leaderless protocol is valid") {
  Protocol p = parse_protocol("alphabet: a\nprocess: q\ninit: q\nfinal: q\n");
  CHECK(p.leaderless());
  CHECK(p.q_init == p.q_final);
  CHECK(p.edges.empty());
}

TEST_CASE("cross-partition edges are rejected with a line number") {
  std::string src =
      "alphabet: a\nprocess: q_i q_f\nleader: qLi qLf\ninit: q_i qLi\nfinal: q_f qLf\n"
      "edge: q_i !a qLi\n";
  CHECK_THROWS_WITH_AS(parse_protocol(src), "line 6: edge crosses the process/leader partition",
                       ProtocolError);
}

TEST_CASE("parser rejects malformed input") {
  CHECK_THROWS_AS(parse_protocol("process: q\nalphabet: a\ninit: q\nfinal: q\n"), ProtocolError);
  CHECK_THROWS_AS(
      parse_protocol("alphabet: a a\nprocess: q\ninit: q\nfinal: q\n"), ProtocolError);
  CHECK_THROWS_AS(
      parse_protocol("alphabet: a\nprocess: q q\ninit: q\nfinal: q\n"), ProtocolError);
  CHECK_THROWS_AS(
      parse_protocol("alphabet: a\nprocess: q\ninit: q\nfinal: q\nedge: q !b q\n"),
      ProtocolError);
  CHECK_THROWS_AS(
      parse_protocol("alphabet: a\nprocess: q\ninit: q\nfinal: q\nedge: q !a r\n"),
      ProtocolError);
  CHECK_THROWS_AS(parse_protocol("alphabet: a\nprocess: q\ninit: q\n"), ProtocolError);
  CHECK_THROWS_AS(
      parse_protocol("alphabet: a\nprocess: q\ninit: q\nfinal: q\nedge: q *a q\n"),
      ProtocolError);
}

TEST_CASE("sym lines expand to both edge kinds") {
  Protocol p = parse_protocol("alphabet: a\nprocess: x y\ninit: x\nfinal: y\nsym: x a y\n");
  CHECK(p.edges.size() == 2);
  CHECK(p.has_edge(0, ActionKind::Send, 0, 1));
  CHECK(p.has_edge(0, ActionKind::Receive, 0, 1));
  CHECK(classify(p).symmetric);
}

TEST_CASE("classification flags") {
  Classification c1 = classify(tu::fig1());
  CHECK(!c1.symmetric);
  CHECK(!c1.leaderless);
  CHECK(c1.connectivity_ok);

  Classification c6 = classify(tu::fig6());
  CHECK(!c6.symmetric);
  CHECK(c6.leaderless);
  CHECK(c6.connectivity_ok);

  // Unreachable process state breaks connectivity.
  Protocol p = parse_protocol(
      "alphabet: a\nprocess: q_i q q_f\ninit: q_i\nfinal: q_f\nsym: q_i a q_f\n");
  CHECK(!classify(p).connectivity_ok);
  CHECK(!validate_warnings(p).empty());
}

TEST_CASE("symmetric flag is stable under edge reordering in the source") {
  std::string a =
      "alphabet: a b\nprocess: x y\ninit: x\nfinal: y\nsym: x a y\nsym: x b x\n";
  std::string b =
      "alphabet: a b\nprocess: x y\ninit: x\nfinal: y\nsym: x b x\nsym: x a y\n";
  CHECK(parse_protocol(a) == parse_protocol(b));
}

TEST_CASE("print/parse round trip is structural identity") {
  for (const Protocol& p :
       {tu::fig1(), tu::fig6(), tu::fig7(1), tu::fig7(3), gen_random({})}) {
    CHECK(parse_protocol(print_protocol(p)) == p);
  }
  for (uint64_t seed = 1; seed <= 10; ++seed) {
    RandomSpec spec;
    spec.seed = seed;
    spec.symmetric = seed % 2 == 0;
    spec.leaderless = seed % 3 != 0;
    Protocol p = gen_random(spec);
    CHECK(parse_protocol(print_protocol(p)) == p);
  }
}

TEST_CASE("bundled corpus files match their generators") {
  CHECK(tu::load_protocol("fig7_k1.rdv") == gen_exp_family(1));
  CHECK(tu::load_protocol("fig7_k2.rdv") == gen_exp_family(2));
  // fig5.net is the encoded fig1 net, byte for byte (modulo the trailing
  // comment, which the parser strips).
  ProtocolNet pn = protocol_to_net(tu::fig1());
  NetFile nf = parse_net_file(tu::read_file(tu::proto_path("fig5.net")));
  CHECK(nf.net.places == pn.net.places);
  REQUIRE(nf.net.transitions.size() == pn.net.transitions.size());
  for (size_t i = 0; i < nf.net.transitions.size(); ++i) {
    CHECK(nf.net.transitions[i].name == pn.net.transitions[i].name);
    CHECK(nf.net.transitions[i].pre == pn.net.transitions[i].pre);
    CHECK(nf.net.transitions[i].post == pn.net.transitions[i].post);
  }
  REQUIRE(nf.markings.size() == 1);
  CHECK(nf.markings[0].second == pn.m0);
}

TEST_CASE("eliminate_final_outgoing leaves sink finals alone") {
  Protocol p = tu::fig6();
  CHECK(eliminate_final_outgoing(p) == p);
}

TEST_CASE("eliminate_final_outgoing duplicates a busy final state") {
  Protocol p = parse_protocol(
      "alphabet: a\nprocess: q_i q_f\ninit: q_i\nfinal: q_f\n"
      "edge: q_f !a q_i\nedge: q_i ?a q_f\n");
  Protocol q = eliminate_final_outgoing(p);
  CHECK(q.num_process_states == 3);
  StateIdx fresh = q.q_final;
  CHECK(q.state_name(fresh) == "q_f_dup");
  // The sink copy receives a parallel edge for each edge into the old final
  // state and has no outgoing edges.
  CHECK(q.has_edge(*q.state_index("q_i"), ActionKind::Receive, 0, fresh));
  for (const Edge& e : q.edges) CHECK(e.src != fresh);
  // Old final keeps its outgoing edge.
  CHECK(q.has_edge(*q.state_index("q_f"), ActionKind::Send, 0, *q.state_index("q_i")));
}

TEST_CASE("eliminate_final_outgoing preserves per-n reachability") {
  std::vector<Protocol> cases;
  cases.push_back(parse_protocol(
      "alphabet: a\nprocess: q_i q_f\ninit: q_i\nfinal: q_f\n"
      "edge: q_f !a q_i\nedge: q_i ?a q_f\nedge: q_i !a q_f\n"));
  for (uint64_t seed = 21; seed < 27; ++seed) {
    RandomSpec spec;
    spec.seed = seed;
    spec.num_process_states = 3;
    spec.edge_density = 0.35;
    cases.push_back(gen_random(spec));
  }
  for (const Protocol& p : cases) {
    Protocol q = eliminate_final_outgoing(p);
    for (uint64_t n = 0; n <= 6; ++n) {
      CHECK(tu::oracle::reachable_final(p, n) == tu::oracle::reachable_final(q, n));
      ReachResult rp = reachable_final(p, n);
      ReachResult rq = reachable_final(q, n);
      REQUIRE(rp.kind != ReachKind::BudgetExceeded);
      CHECK(rp.kind == rq.kind);
    }
  }
}

TEST_CASE("eliminate_final_outgoing rejects protocols with a leader") {
  CHECK_THROWS_AS(eliminate_final_outgoing(tu::fig1()), ProtocolError);
}

TEST_CASE("gen_exp_family shapes") {
  Protocol k1 = gen_exp_family(1);
  CHECK(k1.num_states() == 3);
  CHECK(k1.letters.size() == 2);
  CHECK(k1.edges.size() == 5);
  Protocol k2 = gen_exp_family(2);
  CHECK(k2.num_states() == 4);
  CHECK(k2.letters.size() == 3);
  CHECK(k2.edges.size() == 7);
  CHECK(classify(k2).leaderless);
  CHECK(classify(k2).connectivity_ok);
  CHECK_THROWS_AS(gen_exp_family(0), ProtocolError);
}

TEST_CASE("leader init equal to final is accepted with a warning") {
  Protocol p = parse_protocol(
      "alphabet: a\nprocess: q_i q_f\nleader: qL qL2\ninit: q_i qL\nfinal: q_f qL\n"
      "edge: q_i !a q_f\nedge: q_i ?a q_f\n");
  CHECK(!p.leaderless());
  auto w = validate_warnings(p);
  REQUIRE(!w.empty());
  CHECK(w[0].find("leader initial state equals leader final state") != std::string::npos);
}

TEST_CASE("protocol_hash is print-stable and input-sensitive") {
  Protocol p = tu::fig1();
  CHECK(protocol_hash(p) == protocol_hash(parse_protocol(print_protocol(p))));
  CHECK(protocol_hash(p) != protocol_hash(tu::fig1_variant()));
}
