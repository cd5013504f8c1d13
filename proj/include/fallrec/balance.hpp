#pragma once

#include <limits>
#include <optional>

#include "fallrec/dynamics.hpp"
#include "fallrec/types.hpp"

namespace fallrec {

constexpr double kInfiniteDistance = std::numeric_limits<double>::infinity();

// Convex hull of ground-plane points. In the planar simulator contact
// footprints live on a line, so hulls degenerate to a point or segment;
// support queries then use the interval [x_min, x_max].
struct SupportHull {
  enum class Source { AllContacts, FeetOnly };
  std::vector<Vec2> vertices;  // CCW, no three consecutive collinear
  Source source = Source::AllContacts;

  bool empty() const { return vertices.empty(); }
  double x_min() const;
  double x_max() const;
};

// Monotone-chain construction. 1-2 distinct points yield degenerate hulls.
SupportHull convex_hull(const std::vector<Vec2>& points,
                        SupportHull::Source source = SupportHull::Source::AllContacts);

// Signed distance from a point to a hull: negative strictly inside (minus
// the minimum edge distance), positive outside, zero on the boundary.
// Degenerate point/segment hulls give plain (>= 0) distance; an empty hull
// returns +inf.
double signed_distance(const Vec2& point, const SupportHull& hull);

// 1-D support query used in planar mode: negative inside [x_min, x_max].
double signed_distance_interval(double x, const SupportHull& hull);

struct BalanceState {
  Vec2 p_c = Vec2::Zero();     // CoM position (x, z)
  double p_c_x = 0.0;          // ground-plane projection (scalar in 2-D)
  double h_c = 0.0;            // CoM height
  double hd_c = 0.0;           // vertical CoM velocity
  Vec2 v_c = Vec2::Zero();
  Vec2 a_c = Vec2::Zero();     // finite-differenced
  Vec2 p_l = Vec2::Zero();     // linear momentum
  double L = 0.0;              // angular momentum about CoM (scalar)
  Vec2 F_net = Vec2::Zero();
  double tau_net = 0.0;
  double xi = 0.0;             // capture point (ground x)
  bool xi_defined = false;
  double d_com = kInfiniteDistance;
  double d_cp = kInfiniteDistance;
};

// Positions/velocities/acceleration part; acceleration needs prev.
BalanceState com_state(const RobotModel& model, const SimState& state,
                       const BalanceState* prev, double dt);

// (p_l, L): L = sum I_i w_i + m_i (p_i - p_c) x (v_i - v_c), planar cross.
void centroidal_momentum(const RobotModel& model, const SimState& state,
                         Vec2* p_l, double* L);

// Finite-difference net centroidal force/torque over one control step.
void net_centroidal_rates(const BalanceState& curr, const BalanceState& prev,
                          double dt, Vec2* F_net, double* tau_net);

// Eq.-of-motion capture point xi = p_x + v_x / sqrt(g / h_c). Undefined
// (returns nullopt) below h_min, where the LIP model degenerates.
std::optional<double> capture_point(double p_c_x, double v_c_x, double h_c,
                                    double g, double h_min = 0.05);

struct BalanceConfig {
  double active_force_threshold = 1.0;  // N
  double capture_height_floor = 0.05;   // m
};

// Fills every BalanceState field from simulator state plus contacts.
// d_com uses all active contacts; d_cp uses heel/toe contacts only.
BalanceState balance_snapshot(const RobotModel& model, const SimState& state,
                              const ContactState& contacts,
                              const BalanceState* prev,
                              const WorldConfig& world,
                              const BalanceConfig& cfg = {});

// Support hulls of active contact ground positions (x on the ground line).
SupportHull support_hull(const RobotModel& model, const ContactState& contacts,
                         bool feet_only, double force_threshold);

}  // namespace fallrec
