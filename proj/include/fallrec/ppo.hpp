#pragma once

#include "fallrec/policy.hpp"

namespace fallrec {

struct PpoConfig {
  double clip_eps = 0.2;
  double gamma = 0.99;
  double gae_lambda = 0.95;
  double learning_rate = 1e-3;
  double target_kl = 0.01;
  double entropy_coeff = 0.005;
  double value_coeff = 1.0;
  int rollout_steps = 24;
  int num_envs = 64;
  int minibatches = 4;
  int epochs = 5;
  int iterations = 1000;

  void validate() const {
    if (!(gamma > 0.0 && gamma < 1.0)) throw ConfigError("gamma out of range");
    if (gae_lambda < 0.0 || gae_lambda > 1.0)
      throw ConfigError("lambda out of range");
    if (!(clip_eps > 0.0)) throw ConfigError("clip epsilon must be > 0");
  }
};

// Rectangular (steps x envs) on-policy rollout.
struct RolloutBatch {
  int steps = 0;
  int num_envs = 0;
  MatX actor_obs;   // (steps*envs) x actor_dim, index = t*envs + e
  MatX critic_obs;  // (steps*envs) x critic_dim
  MatX actions;     // (steps*envs) x action_dim
  VecX log_probs;
  MatX rewards;  // steps x envs
  MatX values;   // steps x envs
  MatX dones;    // steps x envs, 1.0 where episode ended at this step
  VecX bootstrap_values;  // per env, value of the state after the last step

  int size() const { return steps * num_envs; }
  int flat(int t, int e) const { return t * num_envs + e; }
};

// Standard GAE recursion A_t = delta_t + gamma*lambda*(1-done)*A_{t+1};
// returns = advantages + values. Advantages are raw here; ppo_update
// normalizes per batch.
void gae(const MatX& rewards, const MatX& values, const MatX& dones,
         const VecX& bootstrap_values, double gamma, double lambda,
         MatX* advantages, MatX* returns);

struct UpdateStats {
  double approx_kl = 0.0;
  double clip_fraction = 0.0;
  double actor_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  int epochs_run = 0;
  bool aborted_non_finite = false;
  bool kl_early_stop = false;
};

class PpoLearner {
 public:
  PpoLearner(PolicySpec spec, PpoConfig cfg, uint64_t seed);

  ActorCritic& policy() { return ac_; }
  const ActorCritic& policy() const { return ac_; }
  const PolicySpec& spec() const { return spec_; }
  const PpoConfig& config() const { return cfg_; }
  Rng& rng() { return rng_; }

  // Clipped-surrogate update with entropy bonus and KL-guarded early stop.
  // On a non-finite loss the previous parameters are kept.
  UpdateStats update(const RolloutBatch& batch);

  // Flat parameter vectors (actor includes log_std at the tail).
  VecX actor_params() const;
  VecX critic_params() const;
  void set_actor_params(const VecX& p);
  void set_critic_params(const VecX& p);

  AdamOptimizer& actor_opt() { return actor_opt_; }
  AdamOptimizer& critic_opt() { return critic_opt_; }
  const AdamOptimizer& actor_opt() const { return actor_opt_; }
  const AdamOptimizer& critic_opt() const { return critic_opt_; }

  // Loss + gradient over a set of sample indices; exposed for the
  // finite-difference gradient checks.
  struct LossTerms {
    double actor_loss = 0.0;   // -surrogate - ent_coeff*entropy
    double value_loss = 0.0;
    double entropy = 0.0;
    double approx_kl = 0.0;
    double clip_fraction = 0.0;
  };
  LossTerms losses(const RolloutBatch& batch, const VecX& advantages,
                   const VecX& returns, const std::vector<int>& idx,
                   VecX* actor_grad, VecX* critic_grad) const;

 private:
  PolicySpec spec_;
  PpoConfig cfg_;
  ActorCritic ac_;
  AdamOptimizer actor_opt_;
  AdamOptimizer critic_opt_;
  Rng rng_;
};

}  // namespace fallrec
