#pragma once

#include <deque>
#include <optional>

#include "fallrec/kinematics.hpp"
#include "fallrec/types.hpp"

namespace fallrec {

// Joint-space inertia matrix, nq x nq, symmetric positive definite.
// Armature enters on the diagonal of the joint rows.
MatX mass_matrix(const RobotModel& model, const SimState& state);

// Generalized Coriolis/centrifugal/gravity forces on the right-hand side:
// M(q) qdd = tau + contact + bias. At qd = 0 this is minus the gradient of
// gravitational potential energy (base z component = -total_mass * g).
VecX bias_forces(const RobotModel& model, const SimState& state, double g);

// Spring-damper normal force with smoothed Coulomb friction, mapped through
// the contact Jacobians. Returns per-point contact state and the nq
// generalized force vector.
ContactState contact_forces(const RobotModel& model, const SimState& state,
                            const WorldConfig& world, VecX* generalized);

// tau_i = kp (q_ref - q) - kd qd, clamped to +- torque_scale * torque_limit.
VecX pd_torques(const ActuatorCommand& command, const SimState& state,
                const RobotModel& model, double torque_scale);

// Holds joint position commands and replays them after a fixed latency.
// Before the first command matures the episode's initial pose is the hold
// target. Delay is constant within an episode.
class DelayBuffer {
 public:
  DelayBuffer() = default;
  DelayBuffer(VecX hold_target, double delay);

  void push(const ActuatorCommand& command);
  ActuatorCommand effective(double now) const;
  double delay() const { return delay_; }

 private:
  std::deque<ActuatorCommand> buffer_;
  VecX hold_target_;
  double delay_ = 0.0;
};

// A torso push: constant force over a time window, applied at a point
// `height` above the torso origin. direction is +1 (forward, +x) or -1.
struct PushSpec {
  double start_time = 0.0;
  double duration = 0.1;   // s
  double force = 0.0;      // N, magnitude
  double height = 0.0;     // m above torso origin, along torso axis
  int direction = 1;
};

// Converts active pushes at time `now` into external forces on the torso.
// Each push acts for the physics steps whose start time falls inside
// [start, start + duration), so the net impulse is within dt*force of
// force*duration.
std::vector<ExternalForce> apply_push(const std::vector<PushSpec>& schedule,
                                      double now);

// Semi-implicit Euler step. joint_torques has one entry per joint.
// Joint dry friction (tanh-smoothed) and joint-limit spring-dampers are
// applied internally. Throws SimFault on non-finite results.
SimState step(const RobotModel& model, const SimState& state,
              const VecX& joint_torques, const WorldConfig& world,
              const std::vector<ExternalForce>& external = {},
              ContactState* contacts_out = nullptr);

// Kinetic plus gravitational potential energy (zero level: world z = 0).
double total_energy(const RobotModel& model, const SimState& state,
                    const WorldConfig& world);

double kinetic_energy(const RobotModel& model, const SimState& state);
double potential_energy(const RobotModel& model, const SimState& state,
                        double g);

}  // namespace fallrec
