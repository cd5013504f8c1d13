#pragma once

#include <cstdint>
#include <string>

#include "fallrec/ppo.hpp"

namespace fallrec {

// Versioned binary checkpoint: header (magic, version, config hash, layer
// shapes, iteration count, RNG state, Adam step) followed by flat
// little-endian float32 parameter and optimizer-moment arrays.
// Save -> load -> save is byte-identical.
struct Checkpoint {
  static constexpr uint32_t kVersion = 1;

  uint64_t config_hash = 0;
  uint64_t iteration = 0;
  uint64_t rng_state[4] = {0, 0, 0, 0};

  std::vector<int> actor_sizes;   // [in, hidden..., out]
  std::vector<int> critic_sizes;

  VecX actor_params;   // includes log_std tail
  VecX critic_params;
  VecX actor_m, actor_v, critic_m, critic_v;
  int64_t adam_t = 0;
};

struct CheckpointError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);

// Throws CheckpointError on corrupt/truncated files; if expected_hash is
// nonzero, a mismatching config hash is an error.
Checkpoint load_checkpoint(const std::string& path, uint64_t expected_hash);

Checkpoint checkpoint_from_learner(const PpoLearner& learner,
                                   uint64_t config_hash, uint64_t iteration,
                                   const Rng& env_rng);
void restore_learner(const Checkpoint& ckpt, PpoLearner* learner,
                     Rng* env_rng);

}  // namespace fallrec
