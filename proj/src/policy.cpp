#include "fallrec/policy.hpp"

#include <cmath>
#include <numbers>

namespace fallrec {

ActorCritic ActorCritic::make(const PolicySpec& spec, Rng& rng) {
  spec.validate();
  ActorCritic ac;
  ac.actor = Mlp(spec.actor_input_dim, spec.actor_hidden, spec.action_dim);
  ac.critic = Mlp(spec.critic_input_dim, spec.critic_hidden, 1);
  ac.actor.init_weights(rng);
  ac.critic.init_weights(rng);
  ac.log_std = VecX::Constant(spec.action_dim, std::log(spec.init_action_std));
  return ac;
}

VecX ActorCritic::sample(const VecX& actor_obs, Rng& rng,
                         double* log_prob_out) const {
  const VecX mean = actor.forward(actor_obs);
  VecX action(mean.size());
  for (int i = 0; i < mean.size(); ++i)
    action(i) = mean(i) + std::exp(log_std(i)) * rng.normal();
  if (log_prob_out) *log_prob_out = log_prob(mean, action);
  return action;
}

double ActorCritic::log_prob(const VecX& mean, const VecX& action) const {
  double lp = 0.0;
  for (int i = 0; i < mean.size(); ++i) {
    const double sigma = std::exp(log_std(i));
    const double z = (action(i) - mean(i)) / sigma;
    lp += -0.5 * z * z - log_std(i) -
          0.5 * std::log(2.0 * std::numbers::pi);
  }
  return lp;
}

double ActorCritic::entropy() const {
  double h = 0.0;
  for (int i = 0; i < log_std.size(); ++i)
    h += log_std(i) + 0.5 * std::log(2.0 * std::numbers::pi * std::numbers::e);
  return h;
}

}  // namespace fallrec
