#include "fallrec/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace fallrec {

void gae(const MatX& rewards, const MatX& values, const MatX& dones,
         const VecX& bootstrap_values, double gamma, double lambda,
         MatX* advantages, MatX* returns) {
  const int steps = static_cast<int>(rewards.rows());
  const int envs = static_cast<int>(rewards.cols());
  advantages->resize(steps, envs);
  returns->resize(steps, envs);
  for (int e = 0; e < envs; ++e) {
    double adv = 0.0;
    for (int t = steps - 1; t >= 0; --t) {
      const double not_done = 1.0 - dones(t, e);
      const double next_value =
          (t + 1 < steps) ? values(t + 1, e) : bootstrap_values(e);
      const double delta =
          rewards(t, e) + gamma * not_done * next_value - values(t, e);
      adv = delta + gamma * lambda * not_done * adv;
      (*advantages)(t, e) = adv;
      (*returns)(t, e) = adv + values(t, e);
    }
  }
}

PpoLearner::PpoLearner(PolicySpec spec, PpoConfig cfg, uint64_t seed)
    : spec_(std::move(spec)), cfg_(std::move(cfg)), rng_(seed) {
  cfg_.validate();
  ac_ = ActorCritic::make(spec_, rng_);
  actor_opt_ = AdamOptimizer(
      ac_.actor.num_params() + static_cast<int>(ac_.log_std.size()),
      cfg_.learning_rate);
  critic_opt_ = AdamOptimizer(ac_.critic.num_params(), cfg_.learning_rate);
}

VecX PpoLearner::actor_params() const {
  VecX p(ac_.actor.num_params() + ac_.log_std.size());
  p.head(ac_.actor.num_params()) = ac_.actor.params();
  p.tail(ac_.log_std.size()) = ac_.log_std;
  return p;
}

VecX PpoLearner::critic_params() const { return ac_.critic.params(); }

void PpoLearner::set_actor_params(const VecX& p) {
  ac_.actor.set_params(p.head(ac_.actor.num_params()));
  ac_.log_std = p.tail(ac_.log_std.size());
}

void PpoLearner::set_critic_params(const VecX& p) { ac_.critic.set_params(p); }

PpoLearner::LossTerms PpoLearner::losses(const RolloutBatch& batch,
                                         const VecX& advantages,
                                         const VecX& returns,
                                         const std::vector<int>& idx,
                                         VecX* actor_grad,
                                         VecX* critic_grad) const {
  const int n = static_cast<int>(idx.size());
  const int adim = spec_.action_dim;
  const double inv_n = 1.0 / n;
  LossTerms out;
  if (actor_grad) actor_grad->setZero(ac_.actor.num_params() + adim);
  if (critic_grad) critic_grad->setZero(ac_.critic.num_params());

  VecX actor_net_grad(ac_.actor.num_params());
  VecX critic_net_grad(ac_.critic.num_params());
  double surrogate = 0.0;

  for (int s : idx) {
    Mlp::Cache cache;
    const VecX mean = ac_.actor.forward(batch.actor_obs.row(s).transpose(),
                                        actor_grad ? &cache : nullptr);
    const VecX action = batch.actions.row(s).transpose();
    const double lp_new = ac_.log_prob(mean, action);
    const double lp_old = batch.log_probs(s);
    const double ratio = std::exp(lp_new - lp_old);
    const double adv = advantages(s);

    const double clipped =
        std::clamp(ratio, 1.0 - cfg_.clip_eps, 1.0 + cfg_.clip_eps);
    const double surr1 = ratio * adv;
    const double surr2 = clipped * adv;
    surrogate += std::min(surr1, surr2);
    if (std::abs(clipped - ratio) > 1e-12) out.clip_fraction += 1.0;
    // k3 estimator: E[(ratio - 1) - log ratio] >= 0.
    out.approx_kl += (ratio - 1.0) - (lp_new - lp_old);

    if (actor_grad && surr1 <= surr2) {
      // d surr1 / d logp = ratio * adv; chain into network + log_std.
      const double coeff = -inv_n * ratio * adv;  // loss = -surrogate
      VecX dmean(adim);
      for (int i = 0; i < adim; ++i) {
        const double sigma = std::exp(ac_.log_std(i));
        const double z = (action(i) - mean(i)) / sigma;
        dmean(i) = coeff * (z / sigma);           // dlogp/dmean
        (*actor_grad)(ac_.actor.num_params() + i) += coeff * (z * z - 1.0);
      }
      actor_net_grad.setZero();
      ac_.actor.backward(cache, dmean, &actor_net_grad);
      actor_grad->head(ac_.actor.num_params()) += actor_net_grad;
    }

    Mlp::Cache vcache;
    const double v = ac_.critic.forward(batch.critic_obs.row(s).transpose(),
                                        critic_grad ? &vcache : nullptr)(0);
    const double verr = v - returns(s);
    out.value_loss += 0.5 * verr * verr;
    if (critic_grad) {
      VecX dv(1);
      dv(0) = inv_n * cfg_.value_coeff * verr;
      critic_net_grad.setZero();
      ac_.critic.backward(vcache, dv, &critic_net_grad);
      *critic_grad += critic_net_grad;
    }
  }

  out.entropy = ac_.entropy();
  out.actor_loss = -surrogate * inv_n - cfg_.entropy_coeff * out.entropy;
  out.value_loss *= inv_n;
  out.approx_kl *= inv_n;
  out.clip_fraction *= inv_n;
  if (actor_grad) {
    // Entropy bonus: dH/dlog_std_i = 1.
    for (int i = 0; i < adim; ++i)
      (*actor_grad)(ac_.actor.num_params() + i) -= cfg_.entropy_coeff;
  }
  return out;
}

UpdateStats PpoLearner::update(const RolloutBatch& batch) {
  UpdateStats stats;
  const int n = batch.size();

  MatX adv_mat, ret_mat;
  gae(batch.rewards, batch.values, batch.dones, batch.bootstrap_values,
      cfg_.gamma, cfg_.gae_lambda, &adv_mat, &ret_mat);

  VecX advantages(n), returns(n);
  for (int t = 0; t < batch.steps; ++t)
    for (int e = 0; e < batch.num_envs; ++e) {
      advantages(batch.flat(t, e)) = adv_mat(t, e);
      returns(batch.flat(t, e)) = ret_mat(t, e);
    }
  const double mean = advantages.mean();
  const double sd =
      std::sqrt((advantages.array() - mean).square().sum() / n) + 1e-8;
  advantages = (advantages.array() - mean) / sd;

  std::vector<int> all(n);
  std::iota(all.begin(), all.end(), 0);

  const VecX actor_backup = actor_params();
  const VecX critic_backup = critic_params();

  std::vector<int> order(all);
  const int mb_count = std::max(1, cfg_.minibatches);
  bool stop = false;
  VecX actor_prev, critic_prev;
  for (int epoch = 0; epoch < cfg_.epochs && !stop; ++epoch) {
    for (int i = n - 1; i > 0; --i)
      std::swap(order[i], order[rng_.uniform_int(i + 1)]);
    for (int mb = 0; mb < mb_count && !stop; ++mb) {
      std::vector<int> idx;
      for (int i = mb; i < n; i += mb_count) idx.push_back(order[i]);
      if (idx.empty()) continue;

      VecX agrad, cgrad;
      const LossTerms terms =
          losses(batch, advantages, returns, idx, &agrad, &cgrad);
      if (!std::isfinite(terms.actor_loss) ||
          !std::isfinite(terms.value_loss) || !agrad.allFinite() ||
          !cgrad.allFinite()) {
        set_actor_params(actor_backup);
        set_critic_params(critic_backup);
        stats.aborted_non_finite = true;
        return stats;
      }
      actor_prev = actor_params();
      critic_prev = critic_params();
      set_actor_params(actor_opt_.step(actor_prev, agrad));
      set_critic_params(critic_opt_.step(critic_prev, cgrad));

      // Full-batch KL after the step; revert the step if it overshoots.
      const LossTerms post =
          losses(batch, advantages, returns, all, nullptr, nullptr);
      stats.approx_kl = post.approx_kl;
      stats.clip_fraction = post.clip_fraction;
      stats.actor_loss = post.actor_loss;
      stats.value_loss = post.value_loss;
      stats.entropy = post.entropy;
      if (post.approx_kl > cfg_.target_kl) {
        if (post.approx_kl > 2.0 * cfg_.target_kl) {
          set_actor_params(actor_prev);
          const LossTerms reverted =
              losses(batch, advantages, returns, all, nullptr, nullptr);
          stats.approx_kl = reverted.approx_kl;
        }
        stats.kl_early_stop = true;
        stop = true;
      }
    }
    if (!stop) stats.epochs_run = epoch + 1;
  }
  return stats;
}

}  // namespace fallrec
