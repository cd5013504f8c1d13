#pragma once

#include "fallrec/balance.hpp"
#include "fallrec/policy.hpp"
#include "fallrec/types.hpp"

namespace fallrec {

// Additive uniform sensor-noise bounds applied to the actor observation.
struct ObsNoiseConfig {
  bool enabled = true;
  double ang_vel = 0.5;    // rad/s
  double gravity = 0.15;
  double joint_pos = 0.1;  // rad
  double joint_vel = 0.5;  // rad/s
};

enum class ObsMode { Actor, Critic };

// [base pitch rate, projected gravity (2), relative joint positions,
//  joint velocities, previous action].
int actor_obs_dim(const RobotModel& model);

// Privileged block appended for the critic: CoM position (base-relative x,
// height), CoM velocity, CoM acceleration, linear momentum, angular
// momentum, capture-point offset, d_CoM, d_CP. Signed distances are clamped
// to +-2 m so the empty-hull sentinel stays finite.
int privileged_obs_dim();

VecX assemble_observations(const RobotModel& model, const SimState& state,
                           const BalanceState& balance, const VecX& prev_action,
                           const VecX& default_pose,
                           const ObsNoiseConfig& noise, ObsMode mode,
                           Rng& rng);

}  // namespace fallrec
