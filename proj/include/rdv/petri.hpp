#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rdv/model.hpp"

namespace rdv {

using PlaceIdx = uint32_t;
using TransIdx = uint32_t;

// Natural vector indexed by places of a fixed net.
struct Marking {
  std::vector<uint32_t> v;

  explicit Marking(size_t places = 0) : v(places, 0) {}
  uint64_t total() const;
  uint32_t at(PlaceIdx p) const { return v.at(p); }
  bool covers(const Marking& other) const;  // componentwise >=
  Marking plus(const Marking& other) const;
  Marking minus(const Marking& other) const;  // requires covers(other)

  friend bool operator==(const Marking&, const Marking&) = default;
  friend auto operator<=>(const Marking&, const Marking&) = default;
};

struct MarkingHash {
  size_t operator()(const Marking& m) const;
};

struct Transition {
  std::string name;
  Marking pre, post;
};

struct PetriNet {
  std::vector<std::string> places;
  std::vector<Transition> transitions;

  uint32_t num_places() const { return static_cast<uint32_t>(places.size()); }
  std::optional<PlaceIdx> place_index(const std::string& name) const;
  std::optional<TransIdx> transition_index(const std::string& name) const;
  Marking zero() const { return Marking(places.size()); }
  Marking unit(PlaceIdx p, uint32_t k = 1) const;
};

// Successor marking when t is enabled (m >= Pre(t)), absent otherwise.
// Throws on an unknown transition index.
std::optional<Marking> fire(const PetriNet& net, const Marking& m, TransIdx t);

// Protocol encoding: one place per state, t_i producing a token in the
// initial process place, t_Lf consuming the leader-final token (omitted when
// leaderless), one transition per compatible (!a, ?a) edge pair. m0 marks the
// leader-initial place (zero marking when leaderless); along with the family
// n tokens in final_place these mirror per-n protocol reachability.
struct ProtocolNet {
  PetriNet net;
  Marking m0;
  PlaceIdx final_place = 0;
};
ProtocolNet protocol_to_net(const Protocol& p);

Marking single_place_marking(const PetriNet& net, PlaceIdx p, uint64_t n);

// Simulation of a net by a rendez-vous protocol: the leader banks processes
// in a reserve state and walks send chains that consume and produce place
// tokens one process at a time. Queries single-token p_i -> single-token p_f
// reachability; use normalize_markings first for general markings.
Protocol net_to_protocol(const PetriNet& net, PlaceIdx p_i, PlaceIdx p_f);

// Wraps arbitrary from/to markings behind fresh single-token places:
// t_init consumes the fresh initial token and emits `from`, t_fin consumes
// `to` and emits the fresh final token.
struct NormalizedNet {
  PetriNet net;
  PlaceIdx p_init = 0, p_final = 0;
};
NormalizedNet normalize_markings(const PetriNet& net, const Marking& from, const Marking& to);

// Same places (renamed), every transition's pre/post swapped.
PetriNet reverse_net(const PetriNet& net);

// Disjoint union of a forward net and its reverse except for final_place,
// which is shared: forward transitions only produce into it, reverse ones
// only consume from it. Rejects nets where a forward transition consumes
// from final_place (final state still has outgoing edges).
PetriNet merge_final(const PetriNet& fwd, const PetriNet& rev, PlaceIdx final_place);

struct NetBudget {
  uint64_t token_cap = 64;        // max total tokens explored
  uint64_t node_cap = 1'000'000;  // stored markings
};

enum class NetReachKind : uint8_t { Reachable, NotReachableExact, Unknown };

struct NetReachResult {
  NetReachKind kind = NetReachKind::Unknown;
  std::vector<TransIdx> firing;  // set when Reachable
  uint64_t explored = 0;
};

// BFS over markings with bounded total token count. NotReachableExact is
// claimed only when a structurally certified cap proves no from->to firing
// sequence can exceed the explored total; otherwise exhaustion yields
// Unknown.
NetReachResult bounded_reach(const PetriNet& net, const Marking& from, const Marking& to,
                             const NetBudget& budget = {});

// A token total no from->to firing sequence can exceed, when one can be
// certified from the transition deltas and a place-set invariant bounding
// the token-destroying transitions. nullopt when no certificate is found.
std::optional<uint64_t> certified_token_cap(const PetriNet& net, const Marking& from,
                                            const Marking& to);

// Flat expression over transitions: a concatenation of segments, each a
// finite word fired exactly once or a starred word iterated 0..budget times.
struct FlatSegment {
  bool starred = false;
  std::vector<TransIdx> word;
};
struct FlatExpression {
  std::vector<FlatSegment> segments;
};

struct MemberResult {
  bool member = false;
  std::vector<uint64_t> star_counts;  // chosen iteration count per starred segment
};

// Decides target ∈ Reach(m, L(fe)) by enumerating star iteration counts up
// to loop_budget; complete only within that budget.
MemberResult member_flat(const PetriNet& net, const Marking& m, const FlatExpression& fe,
                         const Marking& target, uint64_t loop_budget);

// Linear set of markings b + λ1·v1 + ... + λk·vk.
struct LinearSet {
  Marking base;
  std::vector<Marking> periods;
};

std::vector<std::string> linear_set_warnings(const LinearSet& s);

// Emptiness gadget: Reach(m0) ∩ S = ∅ in `net` iff the zero marking is not
// reachable from the returned marking in the returned net. While p_sim holds
// a token the original net runs; t_lin consumes the base, each t_cons_i one
// period vector under a p_lin test token, and t_end retires the token.
struct GadgetNet {
  PetriNet net;
  Marking m0;
};
GadgetNet intersect_gadget(const PetriNet& net, const Marking& m0, const LinearSet& s);

struct SinglePlaceBudget {
  uint64_t n_max = 12;    // table horizon
  uint64_t n_min = 0;     // smallest n participating in verdicts
  uint64_t window = 5;    // consecutive confirmations required above a bound
  uint64_t max_period = 4;
  uint64_t node_cap = 1'000'000;
  uint64_t token_cap = 64;  // fallback when no cap certificate exists
};

struct SinglePlaceResult {
  enum class Kind : uint8_t { CutoffFound, NoCutoffEvidence, Unknown };
  Kind kind = Kind::Unknown;
  std::vector<TableEntry> table;  // entry n: M^(n) reachable from m0
  std::vector<bool> exact;        // table entry is budget-independent
  uint64_t bound = 0;             // CutoffFound: verified for bound..bound+window
  uint64_t window = 0;
  uint64_t family_base_n = 0;  // NoCutoffEvidence: {base + λ·period} misses Reach(m0)
  uint64_t family_period = 0;
  uint64_t family_checked_to = 0;
  bool gadget_confirmed = false;
  // The gadget search exhausted under a certified cap: the intersection is
  // provably empty for every member, not only across the checked horizon.
  bool family_exact = false;
};

// Budgeted take on the two single-place cut-off semi-procedures: candidate
// bounds checked on a verified window, and small arithmetic families of
// final-place markings checked for exact unreachability (cross-checked via
// the intersection gadget). All evidence is window/budget-qualified.
SinglePlaceResult single_place_cutoff_budgeted(const PetriNet& net, const Marking& m0,
                                               PlaceIdx p_f,
                                               const SinglePlaceBudget& budget = {});

// Line-based net format:
//   places: p1 p2
//   transition: <name> pre p1:2 post p2:1
//   marking <label>: p1:1
struct NetFile {
  PetriNet net;
  std::vector<std::pair<std::string, Marking>> markings;
};
NetFile parse_net_file(const std::string& text);
std::string print_net(const PetriNet& net,
                      const std::vector<std::pair<std::string, Marking>>& markings = {});

// Firing sequences serialize as transition-name lists.
std::vector<std::string> firing_to_names(const PetriNet& net, const std::vector<TransIdx>& firing);
std::vector<TransIdx> firing_from_names(const PetriNet& net,
                                        const std::vector<std::string>& names);

}  // namespace rdv
