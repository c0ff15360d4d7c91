#pragma once

#include <cstdint>

#include "rdv/model.hpp"

namespace rdv {

// Seeded random protocol parameters. Generated protocols always satisfy the
// connectivity assumption (repaired after sampling) and honor the symmetric
// flag through paired-edge generation.
struct RandomSpec {
  uint32_t num_process_states = 4;
  uint32_t num_letters = 3;
  double edge_density = 0.25;
  bool symmetric = false;
  bool leaderless = true;
  uint32_t num_leader_states = 2;
  uint64_t seed = 1;
};

// Deterministic for a fixed spec: the same seed yields the same protocol.
Protocol gen_random(const RandomSpec& spec);

}  // namespace rdv
