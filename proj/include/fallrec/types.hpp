#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

namespace fallrec {

using Vec2 = Eigen::Vector2d;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;
using Mat2X = Eigen::Matrix<double, 2, Eigen::Dynamic>;
using RowX = Eigen::RowVectorXd;

// Internal integrator failures (NaN propagation, singular mass matrix).
struct SimFault : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class ContactLabel { Heel, Toe, Knee, Hand, Elbow, Torso };

const char* to_string(ContactLabel label);
ContactLabel contact_label_from_string(const std::string& s);

// True for heel/toe: these define the foot support hull.
inline bool is_foot_label(ContactLabel l) {
  return l == ContactLabel::Heel || l == ContactLabel::Toe;
}

struct LinkSpec {
  std::string name;
  double mass = 1.0;      // kg
  double inertia = 0.01;  // kg m^2 about link CoM
  double length = 0.1;    // m, reference extent
  Vec2 com_local = Vec2::Zero();
};

// Joint j rotates links[child] relative to links[parent]; its generalized
// coordinate lives at index 3 + j.
struct JointSpec {
  std::string name;
  int parent = 0;
  int child = 0;
  Vec2 anchor_parent = Vec2::Zero();  // child-frame origin, in parent frame
  double lower = -3.14;
  double upper = 3.14;
  double torque_limit = 50.0;  // N m
  double armature = 0.0;       // kg m^2
  double dry_friction = 0.0;   // N m
  double kp = 100.0;           // PD gains used by the low-level controller
  double kd = 2.0;
};

struct ContactPointSpec {
  int link = 0;
  Vec2 local = Vec2::Zero();
  ContactLabel label = ContactLabel::Toe;
};

struct RobotModel {
  std::vector<LinkSpec> links;
  std::vector<JointSpec> joints;
  std::vector<ContactPointSpec> contact_points;
  bool base_fixed = false;  // pin the floating base (pendulum oracles)

  int num_joints() const { return static_cast<int>(joints.size()); }
  int nq() const { return 3 + num_joints(); }
  double total_mass() const;

  // Throws ConfigError on violated invariants (masses/inertias > 0,
  // limit ordering, tree structure, contact label coverage).
  void validate() const;
};

// Generalized coordinates: [base x, base z, base pitch, joint angles...].
struct SimState {
  VecX q;
  VecX qd;
  double time = 0.0;

  static SimState zero(const RobotModel& model);
  bool finite() const;
};

struct WorldConfig {
  double gravity = 9.81;
  double dt_physics = 1e-3;
  int control_decimation = 20;  // physics steps per control tick (50 Hz)

  double contact_stiffness = 3.0e4;  // N/m
  double contact_damping = 800.0;    // N s/m
  double mu_s = 1.0;
  double mu_d = 0.8;
  double restitution = 0.0;  // proxy; maps monotonically to damping

  // Friction regularization: tangent force saturates over ~slip_vel,
  // static->dynamic blend decays over stribeck_vel.
  double slip_vel = 0.05;
  double stribeck_vel = 0.2;

  // Joint-limit spring-damper engaged outside the position limits.
  double limit_stiffness = 400.0;
  double limit_damping = 5.0;

  double control_dt() const { return dt_physics * control_decimation; }
  void validate() const;
};

// e = 0 maps to critical damping of a reference mass against the contact
// spring; larger e reduces damping linearly.
double damping_for_restitution(double e, double stiffness, double ref_mass);

struct ActuatorCommand {
  VecX q_ref;             // one target angle per joint
  double issued_at = 0.0;  // s
};

struct ContactPointState {
  Vec2 world = Vec2::Zero();
  double penetration = 0.0;    // m, >= 0
  double normal_force = 0.0;   // N, >= 0
  double tangent_force = 0.0;  // N
  bool active = false;
};

struct ContactState {
  std::vector<ContactPointState> points;  // parallel to model.contact_points
  int num_active() const;
};

// External force applied at a link-local point, expressed in world frame.
struct ExternalForce {
  int link = 0;
  Vec2 local = Vec2::Zero();
  Vec2 force = Vec2::Zero();
};

inline Eigen::Matrix2d rot(double th) {
  const double c = std::cos(th), s = std::sin(th);
  Eigen::Matrix2d r;
  r << c, -s, s, c;
  return r;
}

inline Eigen::Matrix2d drot(double th) {
  const double c = std::cos(th), s = std::sin(th);
  Eigen::Matrix2d r;
  r << -s, -c, c, -s;
  return r;
}

// Planar biped used throughout: torso, one 2-link arm, two thigh/shin/foot
// legs; ~50 kg total, standing CoM height ~1 m.
RobotModel default_biped();

// Single pendulum about a pinned base; used by tests as an analytic oracle.
RobotModel pendulum_model(double mass, double inertia, double com_distance,
                          double armature = 0.0);

}  // namespace fallrec
