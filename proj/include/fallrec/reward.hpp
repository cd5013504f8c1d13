#pragma once

#include "fallrec/balance.hpp"
#include "fallrec/types.hpp"

namespace fallrec {

struct RewardConfig {
  // Group I: vertical recovery.
  double h_star = 0.95;   // target upright CoM height
  double sigma_h = 0.3;
  double delta_h = 0.05;  // height deadband
  double alpha_r = 1.0;
  double alpha_f = 1.0;
  double alpha_s = 1.0;
  double alpha_v = 0.1;
  double w_h = 2.0;
  double w_r = 1.0;
  double w_f = 0.5;
  double w_s = 1.0;

  // Group II: balance and capturability.
  double sigma_c = 0.1;
  double sigma_xi = 0.1;
  double alpha_l = 1e-6;  // |F_net|^2 coefficient
  double alpha_L = 1e-6;  // |tau_net|^2 coefficient
  double w_c = 1.0;
  double w_xi = 1.0;
  double w_m = 1.0;

  // Group III: regularization and motion shaping.
  double torque_weight = 0.02;        // sum (tau/limit)^2
  double action_rate_weight = 0.01;   // |a_t - a_{t-1}|^2
  double orient_weight = 0.5;         // 1 - cos(torso pitch)
  double contact_gate_height = 0.6;   // m; hand/elbow bonus active below
  double contact_bonus = 0.25;        // per active hand/elbow contact
  double alive_bonus = 0.1;
  double termination_penalty = 10.0;  // one-time, on unsafe termination

  void validate() const;
};

struct RewardBreakdown {
  double r_height = 0, r_rise = 0, r_fall = 0, r_stab = 0;
  double r_com = 0, r_cp = 0, r_mom = 0;
  double r_torque = 0, r_orient = 0, r_contact = 0, r_alive = 0;
  double group1 = 0, group2 = 0, group3 = 0;
  double total = 0;
};

double r_height(double h_c, const RewardConfig& cfg);
double r_rise(double h_c, double hd_c, const RewardConfig& cfg);
double r_fall(double hd_c, const RewardConfig& cfg);
double r_stab(double h_c, double hd_c, const RewardConfig& cfg);
double r_com(double d_com, const RewardConfig& cfg);
double r_cp(double d_cp, const RewardConfig& cfg);
double r_mom(const Vec2& F_net, double tau_net, const RewardConfig& cfg);

struct Group3Inputs {
  VecX torques;      // per joint, N m
  VecX torque_limits;
  VecX action;
  VecX prev_action;
  double torso_pitch = 0.0;
  int active_hand_elbow_contacts = 0;
  double h_c = 0.0;
  bool unsafe_termination = false;
};

void r_group3(const Group3Inputs& in, const RewardConfig& cfg,
              RewardBreakdown* out);

// Eq.-style weighted sum of the three groups; disable_capture_terms zeroes
// r_com / r_cp (reduced ablation mode).
RewardBreakdown total_reward(const BalanceState& balance,
                             const Group3Inputs& group3,
                             const RewardConfig& cfg,
                             bool disable_capture_terms = false);

}  // namespace fallrec
