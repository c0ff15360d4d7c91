#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <vector>

#include "rdv/model.hpp"

#include "json.hpp"

namespace rdv {

// Multiset over states, canonicalized as a sorted (state, count) vector with
// zero counts omitted. With a leader exactly one leader-state entity exists.
struct Config {
  std::vector<std::pair<StateIdx, uint32_t>> counts;

  uint32_t at(StateIdx q) const;
  uint64_t total() const;
  void add(StateIdx q, int64_t delta);  // keeps the canonical form

  friend bool operator==(const Config&, const Config&) = default;
  friend auto operator<=>(const Config&, const Config&) = default;
};

struct ConfigHash {
  size_t operator()(const Config& c) const;
};

// One rendez-vous: a !a edge and a ?a edge over the same letter, stored as
// indices into Protocol::edges.
struct Step {
  uint32_t send_edge = 0;
  uint32_t recv_edge = 0;

  friend auto operator<=>(const Step&, const Step&) = default;
};

// Replayable witness: steps applied in order from `start`, each enabled in
// the configuration it is applied to.
struct Trace {
  Config start;
  std::vector<Step> steps;

  friend bool operator==(const Trace&, const Trace&) = default;
};

Config initial_config(const Protocol& p, uint64_t n);
Config final_config(const Protocol& p, uint64_t n);

// All enabled rendez-vous in canonical edge order, with their successors.
// When send and receive share a source state, two entities are required.
std::vector<std::pair<Step, Config>> enabled_steps(const Protocol& p, const Config& c);

// nullopt when the step is not enabled.
std::optional<Config> apply_step(const Protocol& p, const Config& c, Step s);

// Replays a step sequence; nullopt as soon as a step is disabled.
std::optional<Config> replay(const Protocol& p, const Config& start,
                             const std::vector<Step>& steps);

struct SearchBudget {
  uint64_t node_cap = 1'000'000;  // stored configurations per search
  std::optional<std::chrono::steady_clock::time_point> deadline;
};

enum class ReachKind : uint8_t { Witness, NotReachable, BudgetExceeded };

struct ReachResult {
  ReachKind kind = ReachKind::NotReachable;
  std::optional<Trace> witness;  // shortest, ties broken by step encoding
};

// Exhaustive BFS over the finite space of n-process configurations.
// NotReachable means the full space was explored; BudgetExceeded is returned
// only when a limit was hit first, never a wrong exact verdict.
ReachResult reachable_final(const Protocol& p, uint64_t n, const SearchBudget& budget = {});

// reachable_final for each n in 0..n_max; entry index is n.
std::vector<TableEntry> witness_table(const Protocol& p, uint64_t n_max,
                                      const SearchBudget& budget = {});

// Pairwise movement along precomputed shortest symmetric paths (ties broken
// lexicographically). pump_pairs moves 2*pairs entities q_init -> target;
// drain_pairs is the dual, source -> q_final. Both require a symmetric
// protocol with the connectivity assumption and enough entities at the
// path's start.
struct PumpResult {
  std::vector<Step> steps;
  Config result;
};
PumpResult pump_pairs(const Protocol& p, const Config& c, StateIdx target, uint32_t pairs);
PumpResult drain_pairs(const Protocol& p, const Config& c, StateIdx source, uint32_t pairs);

// Shortest path q_init -> q (or q -> q_final) in the directed graph of
// canonical symmetric edges; indices into symmetric_edges(p).
std::optional<std::vector<uint32_t>> sym_path_from_init(const Protocol& p, StateIdx q);
std::optional<std::vector<uint32_t>> sym_path_to_final(const Protocol& p, StateIdx q);

nlohmann::json config_to_json(const Protocol& p, const Config& c);
Config config_from_json(const Protocol& p, const nlohmann::json& j);
// Steps serialize as {letter, send:[src,dst], recv:[src,dst]}.
nlohmann::json trace_to_json(const Protocol& p, const Trace& t);
Trace trace_from_json(const Protocol& p, const nlohmann::json& j);

}  // namespace rdv
