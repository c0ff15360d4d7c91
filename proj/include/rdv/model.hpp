#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace rdv {

// Send = !a (answer a rendez-vous), Receive = ?a (request one).
enum class ActionKind : uint8_t { Send, Receive };
enum class Role : uint8_t { Process, Leader };

// Per-instance verdict in reachability tables. Yes and No are exact;
// Unknown means a budget was hit first.
enum class TableEntry : uint8_t { Yes, No, Unknown };

using StateIdx = uint32_t;
using LetterIdx = uint32_t;

struct Edge {
  StateIdx src = 0;
  ActionKind kind = ActionKind::Send;
  LetterIdx letter = 0;
  StateIdx dst = 0;

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

// Parse/validation failure, carrying the 1-based source line when known.
class ProtocolError : public std::runtime_error {
 public:
  explicit ProtocolError(const std::string& msg, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// A rendez-vous protocol. States are stored process block first, leader
// block second, so a state index < num_process_states is a process state.
// Leaderless protocols have an empty leader block and no leader_init/final.
// Edges are sorted and deduplicated; all referenced states/letters are
// declared. Immutable after construction.
struct Protocol {
  std::vector<std::string> states;
  uint32_t num_process_states = 0;
  std::vector<std::string> letters;
  StateIdx q_init = 0;
  StateIdx q_final = 0;
  std::optional<StateIdx> leader_init;
  std::optional<StateIdx> leader_final;
  std::vector<Edge> edges;

  bool leaderless() const { return !leader_init.has_value(); }
  uint32_t num_states() const { return static_cast<uint32_t>(states.size()); }
  uint32_t num_leader_states() const { return num_states() - num_process_states; }
  Role role(StateIdx q) const {
    return q < num_process_states ? Role::Process : Role::Leader;
  }
  const std::string& state_name(StateIdx q) const { return states.at(q); }
  const std::string& letter_name(LetterIdx a) const { return letters.at(a); }
  std::optional<StateIdx> state_index(const std::string& name) const;
  std::optional<LetterIdx> letter_index(const std::string& name) const;
  bool has_edge(StateIdx src, ActionKind kind, LetterIdx letter, StateIdx dst) const;

  friend bool operator==(const Protocol&, const Protocol&) = default;
};

struct Classification {
  bool symmetric = false;
  bool leaderless = false;
  // Every process state lies on some q_init -> q -> q_final path in the
  // underlying directed graph (actions ignored). A failure is a warning,
  // not an error; the procedures that assume it refuse to run.
  bool connectivity_ok = false;
};

// A symmetric edge (q, a, q'): both (q,!a,q') and (q,?a,q') are present.
// send_edge/recv_edge index into Protocol::edges.
struct SymEdge {
  StateIdx src = 0;
  LetterIdx letter = 0;
  StateIdx dst = 0;
  uint32_t send_edge = 0;
  uint32_t recv_edge = 0;
  bool leader = false;

  friend auto operator<=>(const SymEdge&, const SymEdge&) = default;
};

// Parses the line-based protocol format:
//   alphabet: a b c
//   process: q_i q q_f
//   leader: qL_i qL qL_f         (omitted => leaderless)
//   init: q_i qL_i               (leaderless: one token)
//   final: q_f qL_f
//   edge: <src> (!|?)<letter> <dst>
//   sym: <src> <letter> <dst>    (sugar for both edge directions)
// '#' starts a comment; tokens are case-sensitive words over [A-Za-z0-9_].
Protocol parse_protocol(const std::string& text);

// Prints in the same format; parse(print(p)) is structurally equal to p.
std::string print_protocol(const Protocol& p);

Classification classify(const Protocol& p);

// Non-fatal validation findings (e.g. leader initial == leader final with a
// nontrivial leader, connectivity gaps).
std::vector<std::string> validate_warnings(const Protocol& p);

// Canonical symmetric view: one entry per (q,a,q') with both edge kinds
// present. Only meaningful when classify(p).symmetric holds.
std::vector<SymEdge> symmetric_edges(const Protocol& p);

// Exactness-preserving normal form for the final state of a leaderless
// protocol: if q_final has outgoing edges, duplicates it as a fresh sink
// final state with a parallel copy of every incoming edge. For every n the
// n-process reachability answer is unchanged.
Protocol eliminate_final_outgoing(const Protocol& p);

// The leaderless family with an exponential cut-off: states q_i, q_1..q_k,
// q_f; letters 1..k and a. Rejects k = 0.
Protocol gen_exp_family(uint32_t k);

// FNV-1a over the canonical print; used to bind certificates to inputs.
uint64_t protocol_hash(const Protocol& p);

}  // namespace rdv
