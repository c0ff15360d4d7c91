#pragma once

// Shared test utilities: an independent reachability oracle, corpus
// loaders, and a CLI runner.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "rdv/cutoff.hpp"
#include "rdv/evenodd.hpp"
#include "rdv/generator.hpp"
#include "rdv/model.hpp"
#include "rdv/petri.hpp"
#include "rdv/semantics.hpp"

namespace testutil {

// ---------------------------------------------------------------------
// Independent oracle: saturation over dense count vectors, written from
// the step definition directly. Shares no traversal code or data layout
// with the library search.
namespace oracle {

using Dense = std::vector<uint64_t>;

inline Dense dense_initial(const rdv::Protocol& p, uint64_t n) {
  Dense c(p.num_states(), 0);
  c[p.q_init] = n;
  if (!p.leaderless()) c[*p.leader_init] = 1;
  return c;
}

inline Dense dense_final(const rdv::Protocol& p, uint64_t n) {
  Dense c(p.num_states(), 0);
  c[p.q_final] = n;
  if (!p.leaderless()) c[*p.leader_final] = 1;
  return c;
}

inline std::set<Dense> closure(const rdv::Protocol& p, const Dense& start,
                               size_t cap = 1'000'000) {
  std::set<Dense> seen{start};
  std::vector<Dense> work{start};
  while (!work.empty()) {
    Dense c = work.back();
    work.pop_back();
    for (const rdv::Edge& recv : p.edges) {
      if (recv.kind != rdv::ActionKind::Receive) continue;
      for (const rdv::Edge& send : p.edges) {
        if (send.kind != rdv::ActionKind::Send || send.letter != recv.letter) continue;
        // The configuration must cover the multiset {recv.src, send.src}.
        uint64_t need = recv.src == send.src ? 2 : 1;
        if (!(c[recv.src] >= need && c[send.src] >= 1)) continue;
        Dense d = c;
        d[recv.src] -= 1;
        d[send.src] -= 1;
        d[recv.dst] += 1;
        d[send.dst] += 1;
        if (seen.insert(d).second) {
          if (seen.size() > cap) throw std::runtime_error("oracle closure cap exceeded");
          work.push_back(d);
        }
      }
    }
  }
  return seen;
}

inline bool reachable_final(const rdv::Protocol& p, uint64_t n) {
  return closure(p, dense_initial(p, n)).count(dense_final(p, n)) > 0;
}

// All markings reachable within the token cap, by saturation.
inline std::set<std::vector<uint32_t>> marking_closure(const rdv::PetriNet& net,
                                                       const rdv::Marking& m0,
                                                       uint64_t token_cap,
                                                       size_t cap = 1'000'000) {
  std::set<std::vector<uint32_t>> seen{m0.v};
  std::vector<rdv::Marking> work{m0};
  while (!work.empty()) {
    rdv::Marking m = work.back();
    work.pop_back();
    for (rdv::TransIdx t = 0; t < net.transitions.size(); ++t) {
      auto next = fire(net, m, t);
      if (!next || next->total() > token_cap) continue;
      if (seen.insert(next->v).second) {
        if (seen.size() > cap) throw std::runtime_error("oracle marking cap exceeded");
        work.push_back(*next);
      }
    }
  }
  return seen;
}

}  // namespace oracle

// ---------------------------------------------------------------------
// Corpus loaders.

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline std::string proto_path(const std::string& name) {
  return std::string(RDV_PROTO_DIR) + "/" + name;
}

inline rdv::Protocol load_protocol(const std::string& name) {
  return rdv::parse_protocol(read_file(proto_path(name)));
}

inline rdv::Protocol fig1() { return load_protocol("fig1.rdv"); }
inline rdv::Protocol fig6() { return load_protocol("fig6.rdv"); }
inline rdv::Protocol fig7(uint32_t k) { return rdv::gen_exp_family(k); }

// fig1 with the receive edge q --?a--> q_i removed: only odd populations
// complete.
inline rdv::Protocol fig1_variant() {
  rdv::Protocol p = fig1();
  rdv::StateIdx q = *p.state_index("q");
  rdv::StateIdx qi = *p.state_index("q_i");
  rdv::LetterIdx a = *p.letter_index("a");
  std::erase_if(p.edges, [&](const rdv::Edge& e) {
    return e.src == q && e.dst == qi && e.letter == a && e.kind == rdv::ActionKind::Receive;
  });
  return p;
}

inline rdv::NetFile fig4_net() { return rdv::parse_net_file(read_file(proto_path("fig4.net"))); }

// ---------------------------------------------------------------------
// Seeded random nets and linear sets for the gadget cross-checks.

inline rdv::PetriNet gen_random_net(uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto pick = [&](uint32_t lo, uint32_t hi) {
    return std::uniform_int_distribution<uint32_t>(lo, hi)(rng);
  };
  rdv::PetriNet net;
  uint32_t places = pick(2, 4);
  for (uint32_t i = 0; i < places; ++i) net.places.push_back("p" + std::to_string(i));
  uint32_t trans = pick(1, 4);
  for (uint32_t t = 0; t < trans; ++t) {
    rdv::Transition tr;
    tr.name = "t" + std::to_string(t);
    tr.pre = net.zero();
    tr.post = net.zero();
    for (uint32_t j = 0; j < places; ++j) {
      if (pick(0, 2) == 0) tr.pre.v[j] = pick(1, 2);
      if (pick(0, 2) == 0) tr.post.v[j] = pick(1, 2);
    }
    net.transitions.push_back(std::move(tr));
  }
  return net;
}

inline rdv::Marking gen_random_marking(const rdv::PetriNet& net, uint64_t seed,
                                       uint32_t max_tokens) {
  std::mt19937_64 rng(seed * 7919 + 13);
  std::uniform_int_distribution<uint32_t> d(0, max_tokens);
  rdv::Marking m = net.zero();
  uint32_t left = d(rng);
  for (size_t j = 0; j < net.places.size() && left > 0; ++j) {
    uint32_t k = std::uniform_int_distribution<uint32_t>(0, left)(rng);
    m.v[j] = k;
    left -= k;
  }
  return m;
}

inline rdv::LinearSet gen_random_linear_set(const rdv::PetriNet& net, uint64_t seed) {
  std::mt19937_64 rng(seed * 104729 + 7);
  auto pick = [&](uint32_t lo, uint32_t hi) {
    return std::uniform_int_distribution<uint32_t>(lo, hi)(rng);
  };
  rdv::LinearSet s;
  s.base = net.zero();
  for (size_t j = 0; j < net.places.size(); ++j)
    if (pick(0, 2) == 0) s.base.v[j] = pick(0, 2);
  uint32_t periods = pick(0, 2);
  for (uint32_t i = 0; i < periods; ++i) {
    rdv::Marking v = net.zero();
    for (size_t j = 0; j < net.places.size(); ++j)
      if (pick(0, 2) == 0) v.v[j] = pick(1, 2);
    if (v.total() > 0) s.periods.push_back(std::move(v));
  }
  return s;
}

// Brute-force emptiness of Reach(m0) ∩ S restricted to markings of total
// at most token_cap, via the saturation closure.
inline bool brute_intersection_empty(const rdv::PetriNet& net, const rdv::Marking& m0,
                                     const rdv::LinearSet& s, uint64_t token_cap) {
  auto reach = oracle::marking_closure(net, m0, token_cap);
  // Enumerate members of S up to the cap.
  std::vector<rdv::Marking> members{s.base};
  for (size_t i = 0; i < members.size(); ++i) {
    rdv::Marking m = members[i];
    if (m.total() > token_cap) continue;
    if (reach.count(m.v)) return false;
    for (const rdv::Marking& v : s.periods) {
      rdv::Marking next = m.plus(v);
      if (next.total() <= token_cap &&
          std::find(members.begin(), members.end(), next) == members.end())
        members.push_back(std::move(next));
    }
  }
  return true;
}

// ---------------------------------------------------------------------
// CLI runner.

struct CliResult {
  int status = -1;
  std::string out;
};

inline CliResult run_cli(const std::string& args, const std::string& stdin_data = "",
                         const std::string& env = "") {
  static int counter = 0;
  std::string tag = std::to_string(++counter);
  std::string in_file = "/tmp/rdvcut_test_in_" + tag;
  std::string out_file = "/tmp/rdvcut_test_out_" + tag;
  {
    std::ofstream in(in_file);
    in << stdin_data;
  }
  std::string cmd = (env.empty() ? "" : env + " ") + std::string(RDV_CLI_PATH) + " " + args +
                    " < " + in_file + " > " + out_file + " 2>&1";
  int rc = std::system(cmd.c_str());
  CliResult r;
  r.status = WEXITSTATUS(rc);
  r.out = read_file(out_file);
  std::remove(in_file.c_str());
  std::remove(out_file.c_str());
  return r;
}

}  // namespace testutil
