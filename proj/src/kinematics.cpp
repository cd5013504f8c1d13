#include "fallrec/kinematics.hpp"

namespace fallrec {

Kinematics Kinematics::compute(const RobotModel& model, const SimState& state) {
  const int nq = model.nq();
  if (state.q.size() != nq || state.qd.size() != nq)
    throw SimFault("state dimension mismatch");
  if (!state.finite()) throw SimFault("non-finite state");

  Kinematics kin;
  kin.links.resize(model.links.size());

  // Base link: q = [x, z, pitch, ...].
  LinkKin& base = kin.links[0];
  base.theta = state.q(2);
  base.theta_dot = state.qd(2);
  base.origin = {state.q(0), state.q(1)};
  base.origin_vel = {state.qd(0), state.qd(1)};
  base.origin_acc_vp.setZero();
  base.jac_theta = RowX::Zero(nq);
  base.jac_theta(2) = 1.0;
  base.jac_origin = Mat2X::Zero(2, nq);
  base.jac_origin(0, 0) = 1.0;
  base.jac_origin(1, 1) = 1.0;

  // Children in topological order (joints are ordered child-ascending).
  for (int j = 0; j < model.num_joints(); ++j) {
    const JointSpec& spec = model.joints[j];
    const LinkKin& p = kin.links[spec.parent];
    LinkKin& c = kin.links[spec.child];
    const int k = 3 + j;

    c.theta = p.theta + state.q(k);
    c.theta_dot = p.theta_dot + state.qd(k);
    c.jac_theta = p.jac_theta;
    c.jac_theta(k) += 1.0;

    const Eigen::Matrix2d Rp = rot(p.theta);
    const Eigen::Matrix2d dRp = drot(p.theta);
    const Vec2 a = spec.anchor_parent;
    c.origin = p.origin + Rp * a;
    c.origin_vel = p.origin_vel + p.theta_dot * (dRp * a);
    // qdd = 0 acceleration: d/dt[thd * dR(th) a] = thd^2 * R''(th) a, R'' = -R.
    c.origin_acc_vp = p.origin_acc_vp - p.theta_dot * p.theta_dot * (Rp * a);
    c.jac_origin = p.jac_origin + (dRp * a) * p.jac_theta;
  }

  for (size_t i = 0; i < model.links.size(); ++i) {
    LinkKin& l = kin.links[i];
    const Vec2 r = model.links[i].com_local;
    const Eigen::Matrix2d R = rot(l.theta);
    const Eigen::Matrix2d dR = drot(l.theta);
    l.com = l.origin + R * r;
    l.com_vel = l.origin_vel + l.theta_dot * (dR * r);
    l.com_acc_vp = l.origin_acc_vp - l.theta_dot * l.theta_dot * (R * r);
    l.jac_com = l.jac_origin + (dR * r) * l.jac_theta;
  }
  return kin;
}

Vec2 Kinematics::point_world(const RobotModel&, int link, const Vec2& local) const {
  const LinkKin& l = links[link];
  return l.origin + rot(l.theta) * local;
}

Vec2 Kinematics::point_vel(const RobotModel&, int link, const Vec2& local) const {
  const LinkKin& l = links[link];
  return l.origin_vel + l.theta_dot * (drot(l.theta) * local);
}

Mat2X Kinematics::point_jacobian(const RobotModel&, int link,
                                 const Vec2& local) const {
  const LinkKin& l = links[link];
  return l.jac_origin + (drot(l.theta) * local) * l.jac_theta;
}

}  // namespace fallrec
