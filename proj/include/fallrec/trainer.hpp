#pragma once

#include <memory>

#include "fallrec/checkpoint.hpp"
#include "fallrec/config.hpp"
#include "fallrec/env.hpp"
#include "fallrec/ppo.hpp"

namespace fallrec {

struct IterationStats {
  int iteration = 0;
  double mean_step_reward = 0.0;
  double mean_episode_length = 0.0;  // s, over episodes finished this iter
  int episodes_finished = 0;
  int recovered = 0;
  int timeouts = 0;
  int stuck_low = 0;
  int unsafe = 0;
  double approx_kl = 0.0;
  double clip_fraction = 0.0;
  double actor_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double torque_scale = 0.0;
  Stage stage = Stage::Exploration;
};

// Vectorized rollout collection + PPO updates + curriculum schedule. All
// state needed to reproduce a run lives in (config, seed, iteration).
class Trainer {
 public:
  Trainer(const ExperimentConfig& cfg, bool reduced_mode, uint64_t seed);

  IterationStats iterate();  // one rollout + one update
  int iteration() const { return iteration_; }

  PpoLearner& learner() { return *learner_; }
  const PpoLearner& learner() const { return *learner_; }
  bool reduced_mode() const { return reduced_; }
  uint64_t seed() const { return seed_; }

  Checkpoint make_checkpoint(uint64_t cfg_hash) const;
  void restore(const Checkpoint& ckpt);

  // Deterministic evaluation with the current policy: `episodes` per pose
  // family, mean actions, fresh env seeded from `seed`.
  std::vector<EpisodeTrace> evaluate(int episodes_per_family, uint64_t seed);

 private:
  ExperimentConfig cfg_;
  bool reduced_ = false;
  uint64_t seed_ = 0;
  int iteration_ = 0;
  std::unique_ptr<PpoLearner> learner_;
  std::vector<std::unique_ptr<RecoveryEnv>> envs_;
  Rng env_seed_rng_;  // only used to derive env seeds at construction
};

}  // namespace fallrec
