#pragma once

#include <optional>
#include <vector>

#include "rdv/model.hpp"
#include "rdv/semantics.hpp"

namespace rdv {

enum class Parity : uint8_t { Even, Odd };

inline Parity flip(Parity p) { return p == Parity::Even ? Parity::Odd : Parity::Even; }

// Abstraction of a configuration: the leader's state (absent when
// leaderless) and the parity of the process count in every process state.
struct EOConfig {
  std::optional<StateIdx> leader;
  std::vector<Parity> parity;  // indexed by process state

  friend bool operator==(const EOConfig&, const EOConfig&) = default;
};

// One abstract rendez-vous: a pair of symmetric edges with the same letter,
// as indices into symmetric_edges(p). Either e is a leader edge and e2 a
// process edge, or both are process edges.
struct AbstractStep {
  uint32_t e = 0;
  uint32_t e2 = 0;

  friend auto operator<=>(const AbstractStep&, const AbstractStep&) = default;
};

struct AbstractPath {
  std::vector<AbstractStep> steps;
};

EOConfig parity_of(const Protocol& p, const Config& c);

// The two-case abstract step. Case 1: e a leader edge matching g's leader
// component, e2 a process edge; the leader moves and e2's endpoints flip
// unless equal. Case 2: both process edges with the same letter; the two
// endpoint flips are applied in sequence. Absent when letters mismatch, the
// leader does not match, or the pair fits neither case. Requires a
// symmetric protocol.
std::optional<EOConfig> eo_step(const Protocol& p, const EOConfig& g, uint32_t e, uint32_t e2);

// Exact BFS over the finite abstract space (at most |Q_L| * 2^{|Q_P|}
// states); shortest path, or nullopt when unreachable.
std::optional<AbstractPath> eo_reach(const Protocol& p, const EOConfig& from, const EOConfig& to);

// The designated abstract endpoints: all-even initial/final, and the odd
// variants with a single odd parity at the initial/final process state.
struct Endpoints {
  EOConfig init_even, final_even, init_odd, final_odd;
};
Endpoints abstract_endpoints(const Protocol& p);

struct SymmetricDecision {
  bool has_cutoff = false;
  std::optional<Parity> failed;  // parity class with no abstract path
  std::optional<AbstractPath> even_path, odd_path;
};

// Exact cut-off decision for symmetric protocols satisfying the
// connectivity assumption: a cut-off exists iff both parity classes reach
// their abstract final configuration (leaderless: only the odd class, the
// even endpoints coincide). Throws on assumption violations.
SymmetricDecision decide_symmetric_cop(const Protocol& p);

// Shortest abstract odd witness for a leaderless symmetric protocol; its
// length is asserted against the |E|^2 bound over symmetric edges.
AbstractPath short_witness(const Protocol& p);

// Builds a concrete replayable witness from an abstract path: walks the
// path, injecting fresh pairs from the initial state whenever a required
// source is short (each injection adds 2 to n), then drains every
// non-final state pairwise into the final state. n has the requested
// parity; n >= 1 is enforced, so the even minimum is 2.
struct Concretization {
  uint64_t n = 0;
  Trace trace;
};
Concretization concretize(const Protocol& p, const AbstractPath& path, Parity parity);

// Abstract paths serialize as a list of {edge, edge2} pairs with the
// even-odd configuration reached after each step, for auditing.
nlohmann::json abstract_path_to_json(const Protocol& p, const EOConfig& from,
                                     const AbstractPath& path);

}  // namespace rdv
