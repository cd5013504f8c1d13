#include "fallrec/reward.hpp"

#include <cmath>

namespace fallrec {

void RewardConfig::validate() const {
  if (!(sigma_h > 0.0 && sigma_c > 0.0 && sigma_xi > 0.0))
    throw ConfigError("reward sigmas must be > 0");
  if (!(delta_h > 0.0)) throw ConfigError("delta_h must be > 0");
  if (!(h_star > 0.0)) throw ConfigError("h_star must be > 0");
  for (double w : {w_h, w_r, w_f, w_s, w_c, w_xi, w_m, alpha_r, alpha_f,
                   alpha_s, alpha_v, alpha_l, alpha_L})
    if (!std::isfinite(w)) throw ConfigError("non-finite reward weight");
}

double r_height(double h_c, const RewardConfig& cfg) {
  const double e = h_c - cfg.h_star;
  return std::exp(-e * e / (cfg.sigma_h * cfg.sigma_h));
}

double r_rise(double h_c, double hd_c, const RewardConfig& cfg) {
  if (h_c >= cfg.h_star) return 0.0;
  return cfg.alpha_r * std::max(hd_c, 0.0);
}

double r_fall(double hd_c, const RewardConfig& cfg) {
  const double down = std::max(-hd_c, 0.0);
  return -cfg.alpha_f * down * down;
}

double r_stab(double h_c, double hd_c, const RewardConfig& cfg) {
  const double bonus =
      (std::abs(h_c - cfg.h_star) < cfg.delta_h) ? cfg.alpha_s : 0.0;
  return bonus - cfg.alpha_v * std::abs(hd_c);
}

double r_com(double d_com, const RewardConfig& cfg) {
  if (std::isinf(d_com)) return 0.0;
  return std::exp(-d_com * d_com / (cfg.sigma_c * cfg.sigma_c));
}

double r_cp(double d_cp, const RewardConfig& cfg) {
  if (std::isinf(d_cp)) return 0.0;
  return std::exp(-d_cp * d_cp / (cfg.sigma_xi * cfg.sigma_xi));
}

double r_mom(const Vec2& F_net, double tau_net, const RewardConfig& cfg) {
  return -cfg.alpha_l * F_net.squaredNorm() - cfg.alpha_L * tau_net * tau_net;
}

void r_group3(const Group3Inputs& in, const RewardConfig& cfg,
              RewardBreakdown* out) {
  double torque_term = 0.0;
  for (int i = 0; i < in.torques.size(); ++i) {
    const double r = in.torques(i) / in.torque_limits(i);
    torque_term += r * r;
  }
  const double rate = (in.action - in.prev_action).squaredNorm();
  out->r_torque =
      -cfg.torque_weight * torque_term - cfg.action_rate_weight * rate;
  out->r_orient = -cfg.orient_weight * (1.0 - std::cos(in.torso_pitch));
  out->r_contact = (in.h_c < cfg.contact_gate_height)
                       ? cfg.contact_bonus * in.active_hand_elbow_contacts
                       : 0.0;
  out->r_alive = cfg.alive_bonus -
                 (in.unsafe_termination ? cfg.termination_penalty : 0.0);
}

RewardBreakdown total_reward(const BalanceState& balance,
                             const Group3Inputs& group3,
                             const RewardConfig& cfg,
                             bool disable_capture_terms) {
  RewardBreakdown b;
  b.r_height = r_height(balance.h_c, cfg);
  b.r_rise = r_rise(balance.h_c, balance.hd_c, cfg);
  b.r_fall = r_fall(balance.hd_c, cfg);
  b.r_stab = r_stab(balance.h_c, balance.hd_c, cfg);
  b.group1 = cfg.w_h * b.r_height + cfg.w_r * b.r_rise + cfg.w_f * b.r_fall +
             cfg.w_s * b.r_stab;

  if (!disable_capture_terms) {
    b.r_com = r_com(balance.d_com, cfg);
    b.r_cp = r_cp(balance.d_cp, cfg);
  }
  b.r_mom = r_mom(balance.F_net, balance.tau_net, cfg);
  b.group2 = cfg.w_c * b.r_com + cfg.w_xi * b.r_cp + cfg.w_m * b.r_mom;

  r_group3(group3, cfg, &b);
  b.group3 = b.r_torque + b.r_orient + b.r_contact + b.r_alive;

  b.total = b.group1 + b.group2 + b.group3;
  return b;
}

}  // namespace fallrec
