#include "fallrec/trainer.hpp"

#include <cmath>

namespace fallrec {

Trainer::Trainer(const ExperimentConfig& cfg, bool reduced_mode, uint64_t seed)
    : cfg_(cfg), reduced_(reduced_mode), seed_(seed), env_seed_rng_(seed) {
  cfg_.validate();
  const PolicySpec spec = cfg_.resolved_policy(reduced_);
  learner_ = std::make_unique<PpoLearner>(spec, cfg_.ppo,
                                          env_seed_rng_.next_u64());
  const RobotModel model = cfg_.make_model();
  const EnvConfig env_cfg = cfg_.env_config(reduced_);
  for (int e = 0; e < cfg_.ppo.num_envs; ++e)
    envs_.push_back(std::make_unique<RecoveryEnv>(model, env_cfg,
                                                  env_seed_rng_.next_u64()));
}

IterationStats Trainer::iterate() {
  const int envs = static_cast<int>(envs_.size());
  const int steps = cfg_.ppo.rollout_steps;
  const CurriculumState curriculum =
      curriculum_at(cfg_.env_config(reduced_).curriculum, iteration_,
                    cfg_.ppo.iterations);
  for (auto& env : envs_) env->set_curriculum(curriculum);

  const ActorCritic& policy = learner_->policy();
  RolloutBatch batch;
  batch.steps = steps;
  batch.num_envs = envs;
  const int n = steps * envs;
  batch.actor_obs.resize(n, learner_->spec().actor_input_dim);
  batch.critic_obs.resize(n, learner_->spec().critic_input_dim);
  batch.actions.resize(n, learner_->spec().action_dim);
  batch.log_probs.resize(n);
  batch.rewards.resize(steps, envs);
  batch.values.resize(steps, envs);
  batch.dones.resize(steps, envs);
  batch.bootstrap_values.resize(envs);

  IterationStats stats;
  stats.iteration = iteration_;
  stats.torque_scale = curriculum.torque_scale;
  stats.stage = curriculum.stage;
  double reward_sum = 0.0;
  double episode_length_sum = 0.0;

  for (int t = 0; t < steps; ++t) {
    for (int e = 0; e < envs; ++e) {
      RecoveryEnv& env = *envs_[e];
      const int s = batch.flat(t, e);
      const VecX aobs = env.actor_obs();
      const VecX cobs = env.critic_obs();
      double lp = 0.0;
      const VecX action = policy.sample(aobs, learner_->rng(), &lp);
      batch.actor_obs.row(s) = aobs.transpose();
      batch.critic_obs.row(s) = cobs.transpose();
      batch.actions.row(s) = action.transpose();
      batch.log_probs(s) = lp;
      batch.values(t, e) = policy.value(cobs);

      RecoveryEnv::StepResult res;
      try {
        res = env.step(action);
      } catch (const SimFault&) {
        // A blown-up episode contributes a terminal zero-reward step and a
        // fresh reset rather than poisoning the batch with non-finite data.
        res.done = true;
        res.cause = TerminationCause::UnsafeTorsoContact;
        res.reward = {};
        res.reward.total = -cfg_.reward.termination_penalty;
      }
      batch.rewards(t, e) = res.reward.total;
      batch.dones(t, e) = res.done ? 1.0 : 0.0;
      reward_sum += res.reward.total;

      if (res.done) {
        ++stats.episodes_finished;
        episode_length_sum += env.time_in_episode();
        if (env.recovered()) ++stats.recovered;
        switch (res.cause) {
          case TerminationCause::Timeout: ++stats.timeouts; break;
          case TerminationCause::StuckLow: ++stats.stuck_low; break;
          case TerminationCause::UnsafeTorsoContact: ++stats.unsafe; break;
          case TerminationCause::None: break;
        }
        env.reset();
      }
    }
  }
  for (int e = 0; e < envs; ++e)
    batch.bootstrap_values(e) = policy.value(envs_[e]->critic_obs());

  const UpdateStats u = learner_->update(batch);
  stats.approx_kl = u.approx_kl;
  stats.clip_fraction = u.clip_fraction;
  stats.actor_loss = u.actor_loss;
  stats.value_loss = u.value_loss;
  stats.entropy = u.entropy;
  stats.mean_step_reward = reward_sum / n;
  stats.mean_episode_length =
      stats.episodes_finished > 0
          ? episode_length_sum / stats.episodes_finished
          : 0.0;
  ++iteration_;
  return stats;
}

Checkpoint Trainer::make_checkpoint(uint64_t cfg_hash) const {
  return checkpoint_from_learner(*learner_, cfg_hash, iteration_,
                                 env_seed_rng_);
}

void Trainer::restore(const Checkpoint& ckpt) {
  Rng dummy(0);
  restore_learner(ckpt, learner_.get(), &dummy);
  iteration_ = static_cast<int>(ckpt.iteration);
}

std::vector<EpisodeTrace> Trainer::evaluate(int episodes_per_family,
                                            uint64_t seed) {
  if (episodes_per_family <= 0)
    throw ConfigError("evaluate needs at least one episode per family");
  const RobotModel model = cfg_.make_model();
  EnvConfig env_cfg = cfg_.env_config(reduced_);
  // Evaluation always runs at the hardware-safe endpoint with no pushes.
  env_cfg.curriculum.enabled = false;
  RecoveryEnv env(model, env_cfg, seed);
  std::vector<EpisodeTrace> traces;
  for (PoseFamily family : cfg_.families)
    for (int i = 0; i < episodes_per_family; ++i)
      traces.push_back(run_episode(env, learner_->policy(), family));
  return traces;
}

}  // namespace fallrec
