#pragma once

#include "fallrec/types.hpp"

namespace fallrec {

// Per-link forward kinematics in the sagittal (x, z) plane.
//
// theta_i is the absolute link angle (base pitch plus joint angles along the
// chain); Jacobians are with respect to the full generalized coordinates.
// acc_vp terms are velocity-product accelerations (accelerations with
// qdd = 0), which is all Newton-Euler needs for the bias forces.
struct LinkKin {
  double theta = 0.0;
  double theta_dot = 0.0;
  Vec2 origin = Vec2::Zero();
  Vec2 origin_vel = Vec2::Zero();
  Vec2 origin_acc_vp = Vec2::Zero();
  Vec2 com = Vec2::Zero();
  Vec2 com_vel = Vec2::Zero();
  Vec2 com_acc_vp = Vec2::Zero();
  RowX jac_theta;   // 1 x nq
  Mat2X jac_origin;  // 2 x nq
  Mat2X jac_com;     // 2 x nq
};

struct Kinematics {
  std::vector<LinkKin> links;

  static Kinematics compute(const RobotModel& model, const SimState& state);

  Vec2 point_world(const RobotModel& model, int link, const Vec2& local) const;
  Vec2 point_vel(const RobotModel& model, int link, const Vec2& local) const;
  Mat2X point_jacobian(const RobotModel& model, int link,
                       const Vec2& local) const;
};

}  // namespace fallrec
