#include "fallrec/types.hpp"

#include <cmath>
#include <set>

namespace fallrec {

const char* to_string(ContactLabel label) {
  switch (label) {
    case ContactLabel::Heel: return "heel";
    case ContactLabel::Toe: return "toe";
    case ContactLabel::Knee: return "knee";
    case ContactLabel::Hand: return "hand";
    case ContactLabel::Elbow: return "elbow";
    case ContactLabel::Torso: return "torso";
  }
  return "?";
}

ContactLabel contact_label_from_string(const std::string& s) {
  if (s == "heel") return ContactLabel::Heel;
  if (s == "toe") return ContactLabel::Toe;
  if (s == "knee") return ContactLabel::Knee;
  if (s == "hand") return ContactLabel::Hand;
  if (s == "elbow") return ContactLabel::Elbow;
  if (s == "torso") return ContactLabel::Torso;
  throw ConfigError("unknown contact label: " + s);
}

double RobotModel::total_mass() const {
  double m = 0.0;
  for (const auto& link : links) m += link.mass;
  return m;
}

void RobotModel::validate() const {
  if (links.empty()) throw ConfigError("model has no links");
  for (const auto& link : links) {
    if (!(link.mass > 0.0)) throw ConfigError("link mass must be > 0: " + link.name);
    if (!(link.inertia > 0.0)) throw ConfigError("link inertia must be > 0: " + link.name);
  }
  for (const auto& j : joints) {
    if (!(j.lower < j.upper)) throw ConfigError("joint limits out of order: " + j.name);
    if (j.parent < 0 || j.parent >= static_cast<int>(links.size()) ||
        j.child <= 0 || j.child >= static_cast<int>(links.size()))
      throw ConfigError("joint parent/child out of range: " + j.name);
    if (j.child <= j.parent)
      throw ConfigError("links must be topologically ordered: " + j.name);
    if (!(j.torque_limit > 0.0)) throw ConfigError("torque limit must be > 0: " + j.name);
    if (j.armature < 0.0 || j.dry_friction < 0.0 || j.kp < 0.0 || j.kd < 0.0)
      throw ConfigError("negative joint parameter: " + j.name);
  }
  // Every non-base link needs exactly one parent joint.
  std::vector<int> parent_count(links.size(), 0);
  for (const auto& j : joints) parent_count[j.child]++;
  for (size_t i = 1; i < links.size(); ++i)
    if (parent_count[i] != 1)
      throw ConfigError("link " + links[i].name + " must have exactly one parent joint");
  for (const auto& c : contact_points)
    if (c.link < 0 || c.link >= static_cast<int>(links.size()))
      throw ConfigError("contact point link out of range");
}

SimState SimState::zero(const RobotModel& model) {
  SimState s;
  s.q = VecX::Zero(model.nq());
  s.qd = VecX::Zero(model.nq());
  return s;
}

bool SimState::finite() const { return q.allFinite() && qd.allFinite(); }

void WorldConfig::validate() const {
  if (!(gravity > 0.0)) throw ConfigError("gravity must be > 0");
  if (!(dt_physics > 0.0)) throw ConfigError("dt_physics must be > 0");
  if (control_decimation < 1) throw ConfigError("control_decimation must be >= 1");
  if (mu_d > mu_s) throw ConfigError("mu_d must be <= mu_s");
  if (contact_stiffness < 0.0 || contact_damping < 0.0)
    throw ConfigError("contact parameters must be >= 0");
}

double damping_for_restitution(double e, double stiffness, double ref_mass) {
  const double critical = 2.0 * std::sqrt(stiffness * ref_mass);
  const double clamped = std::min(std::max(e, 0.0), 1.0);
  return (1.0 - clamped) * critical;
}

int ContactState::num_active() const {
  int n = 0;
  for (const auto& p : points) n += p.active ? 1 : 0;
  return n;
}

RobotModel default_biped() {
  RobotModel m;
  auto link = [&](const std::string& name, double mass, double inertia,
                  double length, Vec2 com) {
    m.links.push_back({name, mass, inertia, length, com});
    return static_cast<int>(m.links.size()) - 1;
  };
  auto joint = [&](const std::string& name, int parent, int child, Vec2 anchor,
                   double lo, double hi, double tau, double kp, double kd) {
    JointSpec j;
    j.name = name;
    j.parent = parent;
    j.child = child;
    j.anchor_parent = anchor;
    j.lower = lo;
    j.upper = hi;
    j.torque_limit = tau;
    j.armature = 0.05;
    j.dry_friction = 0.1;
    j.kp = kp;
    j.kd = kd;
    m.joints.push_back(j);
  };

  // Torso frame origin at the pelvis; +z up, +x forward.
  const int torso = link("torso", 19.0, 0.95, 0.75, {0.0, 0.35});
  const int upper_arm = link("upper_arm", 7.0, 0.055, 0.30, {0.0, -0.15});
  const int forearm = link("forearm", 5.0, 0.055, 0.35, {0.0, -0.175});
  const int thigh_l = link("thigh_l", 5.0, 0.085, 0.45, {0.0, -0.225});
  const int shin_l = link("shin_l", 3.0, 0.055, 0.45, {0.0, -0.22});
  const int foot_l = link("foot_l", 1.5, 0.012, 0.24, {0.0, -0.02});
  const int thigh_r = link("thigh_r", 5.0, 0.085, 0.45, {0.0, -0.225});
  const int shin_r = link("shin_r", 3.0, 0.055, 0.45, {0.0, -0.22});
  const int foot_r = link("foot_r", 1.5, 0.012, 0.24, {0.0, -0.02});

  joint("shoulder", torso, upper_arm, {0.0, 0.70}, -3.0, 3.0, 60.0, 80.0, 4.0);
  joint("elbow", upper_arm, forearm, {0.0, -0.30}, -2.6, 2.6, 50.0, 60.0, 3.0);
  joint("hip_l", torso, thigh_l, {0.0, 0.0}, -2.4, 2.4, 200.0, 400.0, 30.0);
  joint("knee_l", thigh_l, shin_l, {0.0, -0.45}, -2.6, 2.6, 250.0, 500.0, 30.0);
  joint("ankle_l", shin_l, foot_l, {0.0, -0.45}, -1.2, 1.2, 120.0, 500.0, 80.0);
  joint("hip_r", torso, thigh_r, {0.0, 0.0}, -2.4, 2.4, 200.0, 400.0, 30.0);
  joint("knee_r", thigh_r, shin_r, {0.0, -0.45}, -2.6, 2.6, 250.0, 500.0, 30.0);
  joint("ankle_r", shin_r, foot_r, {0.0, -0.45}, -1.2, 1.2, 120.0, 500.0, 80.0);

  auto contact = [&](int l, Vec2 local, ContactLabel label) {
    m.contact_points.push_back({l, local, label});
  };
  contact(foot_l, {-0.12, -0.04}, ContactLabel::Heel);
  contact(foot_l, {0.12, -0.04}, ContactLabel::Toe);
  contact(foot_r, {-0.12, -0.04}, ContactLabel::Heel);
  contact(foot_r, {0.12, -0.04}, ContactLabel::Toe);
  // Knee pads sit just below/front of the knee joint (the shin origin).
  contact(shin_l, {0.03, 0.0}, ContactLabel::Knee);
  contact(shin_r, {0.03, 0.0}, ContactLabel::Knee);
  contact(forearm, {0.0, -0.35}, ContactLabel::Hand);
  contact(forearm, {0.0, 0.0}, ContactLabel::Elbow);
  contact(torso, {0.0, 0.70}, ContactLabel::Torso);
  contact(torso, {0.0, 0.05}, ContactLabel::Torso);
  contact(torso, {0.0, 0.0}, ContactLabel::Torso);  // pelvis underside

  m.validate();
  return m;
}

RobotModel pendulum_model(double mass, double inertia, double com_distance,
                          double armature) {
  RobotModel m;
  m.base_fixed = true;
  m.links.push_back({"base", 1.0, 0.01, 0.0, Vec2::Zero()});
  m.links.push_back({"rod", mass, inertia, com_distance, {0.0, -com_distance}});
  JointSpec j;
  j.name = "pivot";
  j.parent = 0;
  j.child = 1;
  j.lower = -100.0;
  j.upper = 100.0;
  j.torque_limit = 1e6;
  j.armature = armature;
  j.dry_friction = 0.0;
  j.kp = 0.0;
  j.kd = 0.0;
  m.joints.push_back(j);
  m.validate();
  return m;
}

}  // namespace fallrec
