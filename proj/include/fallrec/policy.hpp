#pragma once

#include "fallrec/mlp.hpp"

namespace fallrec {

struct PolicySpec {
  std::vector<int> actor_hidden = {256, 128, 64};
  std::vector<int> critic_hidden = {256, 128, 64};
  int actor_input_dim = 0;
  int critic_input_dim = 0;  // actor dim + privileged dim
  int action_dim = 8;
  double init_action_std = 1.0;
  double action_scale = 0.3;

  void validate() const {
    // Equality happens only when the privileged block is disabled.
    if (critic_input_dim < actor_input_dim)
      throw ConfigError("critic input dim must not be below actor input dim");
    if (!(init_action_std > 0.0)) throw ConfigError("sigma must be > 0");
    for (int h : actor_hidden)
      if (h < 1) throw ConfigError("layer sizes must be >= 1");
    for (int h : critic_hidden)
      if (h < 1) throw ConfigError("layer sizes must be >= 1");
  }
};

// Diagonal-Gaussian actor with state-independent learnable log-std, plus a
// scalar critic over the privileged observation.
struct ActorCritic {
  Mlp actor;
  Mlp critic;
  VecX log_std;  // per action dim

  static ActorCritic make(const PolicySpec& spec, Rng& rng);

  VecX action_mean(const VecX& actor_obs) const {
    return actor.forward(actor_obs);
  }
  double value(const VecX& critic_obs) const {
    return critic.forward(critic_obs)(0);
  }

  // Sample a = mean + sigma * n; returns the Gaussian log density of a.
  VecX sample(const VecX& actor_obs, Rng& rng, double* log_prob) const;
  double log_prob(const VecX& mean, const VecX& action) const;
  double entropy() const;  // closed form for a diagonal Gaussian
};

}  // namespace fallrec
