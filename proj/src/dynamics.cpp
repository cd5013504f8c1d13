#include "fallrec/dynamics.hpp"

#include <cmath>

namespace fallrec {

MatX mass_matrix(const RobotModel& model, const SimState& state) {
  const Kinematics kin = Kinematics::compute(model, state);
  const int nq = model.nq();
  MatX M = MatX::Zero(nq, nq);
  for (size_t i = 0; i < model.links.size(); ++i) {
    const LinkKin& l = kin.links[i];
    const LinkSpec& spec = model.links[i];
    M.noalias() += spec.mass * (l.jac_com.transpose() * l.jac_com);
    M.noalias() += spec.inertia * (l.jac_theta.transpose() * l.jac_theta);
  }
  for (int j = 0; j < model.num_joints(); ++j)
    M(3 + j, 3 + j) += model.joints[j].armature;
  return M;
}

VecX bias_forces(const RobotModel& model, const SimState& state, double g) {
  const Kinematics kin = Kinematics::compute(model, state);
  const int nq = model.nq();
  VecX bias = VecX::Zero(nq);
  for (size_t i = 0; i < model.links.size(); ++i) {
    const LinkKin& l = kin.links[i];
    const double m = model.links[i].mass;
    // Velocity-product (Coriolis/centrifugal) term plus gravity. Planar
    // links have no gyroscopic angular term.
    Vec2 f = m * l.com_acc_vp;
    f(1) += m * g;
    bias.noalias() -= l.jac_com.transpose() * f;
  }
  return bias;
}

namespace {

double normal_force_law(const WorldConfig& world, double penetration,
                        double pen_rate) {
  if (penetration <= 0.0) return 0.0;
  const double f = world.contact_stiffness * penetration +
                   world.contact_damping * std::max(pen_rate, 0.0);
  return std::max(f, 0.0);
}

double tangent_force_law(const WorldConfig& world, double normal_force,
                         double slip_vel) {
  // Stribeck blend from static to dynamic friction, tanh-regularized near
  // zero slip; magnitude never exceeds mu_s * N.
  const double v = std::abs(slip_vel);
  const double mu = world.mu_d + (world.mu_s - world.mu_d) *
                                     std::exp(-(v / world.stribeck_vel) *
                                              (v / world.stribeck_vel));
  return -mu * normal_force * std::tanh(slip_vel / world.slip_vel);
}

}  // namespace

ContactState contact_forces(const RobotModel& model, const SimState& state,
                            const WorldConfig& world, VecX* generalized) {
  const Kinematics kin = Kinematics::compute(model, state);
  const int nq = model.nq();
  ContactState cs;
  cs.points.resize(model.contact_points.size());
  VecX gen = VecX::Zero(nq);
  for (size_t i = 0; i < model.contact_points.size(); ++i) {
    const ContactPointSpec& cp = model.contact_points[i];
    ContactPointState& out = cs.points[i];
    out.world = kin.point_world(model, cp.link, cp.local);
    const Vec2 vel = kin.point_vel(model, cp.link, cp.local);
    out.penetration = std::max(-out.world(1), 0.0);
    if (out.penetration <= 0.0) continue;
    // Penetration rate = -zdot; damping resists approach only.
    out.normal_force = normal_force_law(world, out.penetration, -vel(1));
    if (out.normal_force <= 0.0) continue;
    out.tangent_force = tangent_force_law(world, out.normal_force, vel(0));
    out.active = true;
    const Vec2 force(out.tangent_force, out.normal_force);
    gen.noalias() +=
        kin.point_jacobian(model, cp.link, cp.local).transpose() * force;
  }
  if (generalized) *generalized = gen;
  return cs;
}

VecX pd_torques(const ActuatorCommand& command, const SimState& state,
                const RobotModel& model, double torque_scale) {
  const int nj = model.num_joints();
  if (command.q_ref.size() != nj) throw SimFault("command dimension mismatch");
  VecX tau(nj);
  for (int j = 0; j < nj; ++j) {
    const JointSpec& spec = model.joints[j];
    const double q = state.q(3 + j);
    const double qd = state.qd(3 + j);
    const double limit = torque_scale * spec.torque_limit;
    const double raw = spec.kp * (command.q_ref(j) - q) - spec.kd * qd;
    tau(j) = std::clamp(raw, -limit, limit);
  }
  return tau;
}

DelayBuffer::DelayBuffer(VecX hold_target, double delay)
    : hold_target_(std::move(hold_target)), delay_(delay) {
  if (delay_ < 0.0 || delay_ > 0.1) throw SimFault("delay out of range");
}

void DelayBuffer::push(const ActuatorCommand& command) {
  buffer_.push_back(command);
  // Only the most recent matured command is ever read again.
  while (buffer_.size() > 64) buffer_.pop_front();
}

ActuatorCommand DelayBuffer::effective(double now) const {
  const double cutoff = now - delay_;
  const ActuatorCommand* best = nullptr;
  for (const auto& cmd : buffer_) {
    if (cmd.issued_at <= cutoff + 1e-12) best = &cmd;
  }
  if (best) return *best;
  ActuatorCommand hold;
  hold.q_ref = hold_target_;
  hold.issued_at = -delay_;
  return hold;
}

std::vector<ExternalForce> apply_push(const std::vector<PushSpec>& schedule,
                                      double now) {
  std::vector<ExternalForce> forces;
  for (const auto& push : schedule) {
    if (now < push.start_time || now >= push.start_time + push.duration)
      continue;
    if (push.force == 0.0) continue;
    ExternalForce f;
    f.link = 0;  // torso
    f.local = Vec2(0.0, push.height);
    f.force = Vec2(push.direction >= 0 ? push.force : -push.force, 0.0);
    forces.push_back(f);
  }
  return forces;
}

SimState step(const RobotModel& model, const SimState& state,
              const VecX& joint_torques, const WorldConfig& world,
              const std::vector<ExternalForce>& external,
              ContactState* contacts_out) {
  const int nq = model.nq();
  const int nj = model.num_joints();
  if (joint_torques.size() != nj) throw SimFault("torque dimension mismatch");
  if (!state.finite()) throw SimFault("non-finite state entering step");

  const Kinematics kin = Kinematics::compute(model, state);
  const MatX M = mass_matrix(model, state);
  VecX rhs = bias_forces(model, state, world.gravity);

  VecX contact_gen;
  const ContactState contacts =
      contact_forces(model, state, world, &contact_gen);
  rhs += contact_gen;

  for (const auto& ext : external)
    rhs.noalias() +=
        kin.point_jacobian(model, ext.link, ext.local).transpose() * ext.force;

  for (int j = 0; j < nj; ++j) {
    const JointSpec& spec = model.joints[j];
    const double q = state.q(3 + j);
    const double qd = state.qd(3 + j);
    double tau = joint_torques(j);
    tau -= spec.dry_friction * std::tanh(qd / 0.05);
    if (q > spec.upper)
      tau -= world.limit_stiffness * (q - spec.upper) + world.limit_damping * qd;
    else if (q < spec.lower)
      tau -= world.limit_stiffness * (q - spec.lower) + world.limit_damping * qd;
    rhs(3 + j) += tau;
  }

  VecX qdd;
  if (model.base_fixed) {
    qdd = VecX::Zero(nq);
    const MatX Mjj = M.bottomRightCorner(nj, nj);
    qdd.tail(nj) = Mjj.ldlt().solve(rhs.tail(nj));
  } else {
    qdd = M.ldlt().solve(rhs);
  }

  SimState next = state;
  next.qd += world.dt_physics * qdd;
  if (model.base_fixed) next.qd.head(3).setZero();
  next.q += world.dt_physics * next.qd;
  next.time += world.dt_physics;
  if (!next.finite())
    throw SimFault("non-finite state produced at t=" + std::to_string(state.time));
  if (contacts_out) *contacts_out = contacts;
  return next;
}

double kinetic_energy(const RobotModel& model, const SimState& state) {
  const Kinematics kin = Kinematics::compute(model, state);
  double ke = 0.0;
  for (size_t i = 0; i < model.links.size(); ++i) {
    const LinkKin& l = kin.links[i];
    ke += 0.5 * model.links[i].mass * l.com_vel.squaredNorm();
    ke += 0.5 * model.links[i].inertia * l.theta_dot * l.theta_dot;
  }
  for (int j = 0; j < model.num_joints(); ++j) {
    const double qd = state.qd(3 + j);
    ke += 0.5 * model.joints[j].armature * qd * qd;
  }
  return ke;
}

double potential_energy(const RobotModel& model, const SimState& state,
                        double g) {
  const Kinematics kin = Kinematics::compute(model, state);
  double pe = 0.0;
  for (size_t i = 0; i < model.links.size(); ++i)
    pe += model.links[i].mass * g * kin.links[i].com(1);
  return pe;
}

double total_energy(const RobotModel& model, const SimState& state,
                    const WorldConfig& world) {
  return kinetic_energy(model, state) +
         potential_energy(model, state, world.gravity);
}

}  // namespace fallrec
