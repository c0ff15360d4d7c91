#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "rdv/evenodd.hpp"
#include "rdv/model.hpp"
#include "rdv/petri.hpp"
#include "rdv/semantics.hpp"

#include "json.hpp"

namespace rdv {

struct Budget {
  uint64_t n_max = 12;
  uint64_t node_cap = 1'000'000;
  std::chrono::seconds wall_time{60};
  uint64_t window = 5;
  bool include_zero = false;  // count n = 0 as a population size
};

enum class Verdict : uint8_t { Cutoff, NoCutoff, Unknown };

// Cutoff justified by concrete witnesses of both parities (symmetric
// protocols); the bound is max(n_even, n_odd).
struct ParityPumpingJust {
  uint64_t n_even = 0, n_odd = 0;
  Trace trace_even, trace_odd;
};

// Cutoff justified by consecutive witnesses N, N+1 and witness composition
// (leaderless protocols): every n >= N*N is composable, and the embedded
// witnesses cover [bound, N*N] exactly.
struct CompositionJust {
  uint64_t n_consecutive = 0;
  uint64_t guaranteed_bound = 0;  // N*N
  std::vector<std::pair<uint64_t, Trace>> witnesses;
};

// No cutoff: one parity class has no abstract path (symmetric protocols;
// complete, hence sound as an obstruction).
struct AbstractObstructionJust {
  Parity failed = Parity::Even;
};

// Budget-qualified cutoff: every n in [lo, hi] checked exactly, witnesses
// embedded for the leading window. Says nothing beyond hi.
struct ExhaustiveWindowJust {
  uint64_t lo = 0, hi = 0;
  std::vector<TableEntry> table;  // indexed 0..hi
  std::vector<std::pair<uint64_t, Trace>> witnesses;
};

// No-cutoff evidence: the arithmetic family {base_n + λ·period} of final
// populations is exactly unreachable across the checked horizon.
struct UnreachableFamilyJust {
  uint64_t base_n = 0, period = 0, checked_to = 0;
};

struct BudgetExhaustedJust {
  uint64_t n_max = 0, node_cap = 0;
};

using Justification = std::variant<ParityPumpingJust, CompositionJust, AbstractObstructionJust,
                                   ExhaustiveWindowJust, UnreachableFamilyJust,
                                   BudgetExhaustedJust>;

struct Certificate {
  Verdict verdict = Verdict::Unknown;
  uint64_t bound = 0;  // meaningful for Cutoff
  bool exact = false;  // holds for all n, vs. budget-qualified
  std::optional<uint64_t> minimal_within_window;
  Justification just = BudgetExhaustedJust{};
  uint64_t protocol_hash = 0;
  std::vector<std::string> notes;  // skipped procedures, assumption reports
};

// Dispatches on the protocol class: symmetric protocols get the exact
// abstract decision, leaderless ones the composition argument over an exact
// witness table, and the general class a budget-qualified exhaustive window
// plus the single-place no-cutoff family search.
Certificate decide(const Protocol& p, const Budget& budget = {});

// The merged forward/reverse net for a leaderless protocol (final-state
// duplication applied first), with the empty marking and the single-token
// final marking. Reachability in both directions between them holds iff
// consecutive witnesses exist.
struct ReversibleReduction {
  PetriNet net;
  Marking m0;
  Marking m1;
};
ReversibleReduction reduce_reversible(const Protocol& p);

struct ReversibleCheck {
  NetReachResult forward;   // m1 from m0
  NetReachResult backward;  // m0 from m1
};
ReversibleCheck reversible_check(const Protocol& p, uint64_t token_cap,
                                 uint64_t node_cap = 1'000'000);

struct VerifyResult {
  bool valid = false;
  std::string reason;  // set when invalid
};

// Independent replay of all certificate evidence: traces re-executed,
// bounds re-derived from the justification, obstructions re-searched.
VerifyResult verify_certificate(const Protocol& p, const Certificate& cert,
                                const Budget& budget = {});

// Concatenates witnesses at n and m into a replayable witness at n+m
// (leaderless protocols) and replays it.
bool composition_check(const Protocol& p, uint64_t n, uint64_t m,
                       const SearchBudget& budget = {});
Trace compose_traces(const Protocol& p, const Trace& a, const Trace& b);

nlohmann::json certificate_to_json(const Protocol& p, const Certificate& cert);
Certificate certificate_from_json(const Protocol& p, const nlohmann::json& j);

const char* verdict_name(Verdict v);
const char* justification_name(const Justification& j);

}  // namespace rdv
