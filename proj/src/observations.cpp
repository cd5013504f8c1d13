#include "fallrec/observations.hpp"

#include <algorithm>
#include <cmath>

namespace fallrec {

int actor_obs_dim(const RobotModel& model) {
  return 1 + 2 + 3 * model.num_joints();
}

int privileged_obs_dim() { return 12; }

namespace {

double clamp_distance(double d) {
  if (std::isinf(d)) return 2.0;
  return std::clamp(d, -2.0, 2.0);
}

}  // namespace

VecX assemble_observations(const RobotModel& model, const SimState& state,
                           const BalanceState& balance, const VecX& prev_action,
                           const VecX& default_pose,
                           const ObsNoiseConfig& noise, ObsMode mode,
                           Rng& rng) {
  const int nj = model.num_joints();
  const int da = actor_obs_dim(model);
  const bool add_noise = (mode == ObsMode::Actor) && noise.enabled;
  auto jitter = [&](double bound) {
    return add_noise ? rng.uniform(-bound, bound) : 0.0;
  };

  VecX obs(mode == ObsMode::Actor ? da : da + privileged_obs_dim());
  int k = 0;
  obs(k++) = state.qd(2) + jitter(noise.ang_vel);

  // Gravity direction expressed in the torso frame.
  const double pitch = state.q(2);
  obs(k++) = -std::sin(pitch) + jitter(noise.gravity);
  obs(k++) = -std::cos(pitch) + jitter(noise.gravity);

  for (int j = 0; j < nj; ++j)
    obs(k++) = state.q(3 + j) - default_pose(j) + jitter(noise.joint_pos);
  for (int j = 0; j < nj; ++j)
    obs(k++) = state.qd(3 + j) + jitter(noise.joint_vel);
  for (int j = 0; j < nj; ++j) obs(k++) = prev_action(j);

  if (mode == ObsMode::Critic) {
    // Noiseless privileged block; horizontal positions are taken relative
    // to the base so the input does not grow with traveled distance.
    obs(k++) = balance.p_c_x - state.q(0);
    obs(k++) = balance.h_c;
    obs(k++) = balance.v_c(0);
    obs(k++) = balance.v_c(1);
    obs(k++) = balance.a_c(0);
    obs(k++) = balance.a_c(1);
    obs(k++) = balance.p_l(0);
    obs(k++) = balance.p_l(1);
    obs(k++) = balance.L;
    obs(k++) = balance.xi_defined ? (balance.xi - balance.p_c_x) : 2.0;
    obs(k++) = clamp_distance(balance.d_com);
    obs(k++) = clamp_distance(balance.d_cp);
  }
  return obs;
}

}  // namespace fallrec
