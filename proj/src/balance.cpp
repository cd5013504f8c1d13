#include "fallrec/balance.hpp"

#include <algorithm>
#include <cmath>

#include "fallrec/kinematics.hpp"

namespace fallrec {

double SupportHull::x_min() const {
  double v = kInfiniteDistance;
  for (const auto& p : vertices) v = std::min(v, p(0));
  return v;
}

double SupportHull::x_max() const {
  double v = -kInfiniteDistance;
  for (const auto& p : vertices) v = std::max(v, p(0));
  return v;
}

namespace {

double cross2(const Vec2& o, const Vec2& a, const Vec2& b) {
  return (a(0) - o(0)) * (b(1) - o(1)) - (a(1) - o(1)) * (b(0) - o(0));
}

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 <= 0.0) return (p - a).norm();
  const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

}  // namespace

SupportHull convex_hull(const std::vector<Vec2>& points,
                        SupportHull::Source source) {
  SupportHull hull;
  hull.source = source;
  if (points.empty()) return hull;

  std::vector<Vec2> pts = points;
  std::sort(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) {
    return a(0) < b(0) || (a(0) == b(0) && a(1) < b(1));
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const Vec2& a, const Vec2& b) {
                          return a(0) == b(0) && a(1) == b(1);
                        }),
            pts.end());
  const int n = static_cast<int>(pts.size());
  if (n <= 2) {
    hull.vertices = pts;
    return hull;
  }

  std::vector<Vec2> out(2 * n);
  int k = 0;
  for (int i = 0; i < n; ++i) {  // lower chain
    while (k >= 2 && cross2(out[k - 2], out[k - 1], pts[i]) <= 0.0) --k;
    out[k++] = pts[i];
  }
  for (int i = n - 2, lo = k + 1; i >= 0; --i) {  // upper chain
    while (k >= lo && cross2(out[k - 2], out[k - 1], pts[i]) <= 0.0) --k;
    out[k++] = pts[i];
  }
  out.resize(k - 1);
  if (out.size() <= 2) {
    // All input collinear: keep extreme endpoints only.
    hull.vertices = out;
    return hull;
  }
  hull.vertices = out;
  return hull;
}

double signed_distance(const Vec2& point, const SupportHull& hull) {
  const auto& v = hull.vertices;
  if (v.empty()) return kInfiniteDistance;
  if (v.size() == 1) return (point - v[0]).norm();
  if (v.size() == 2) return point_segment_distance(point, v[0], v[1]);

  const int n = static_cast<int>(v.size());
  bool inside = true;
  double min_edge = kInfiniteDistance;
  for (int i = 0; i < n; ++i) {
    const Vec2& a = v[i];
    const Vec2& b = v[(i + 1) % n];
    if (cross2(a, b, point) < 0.0) inside = false;  // CCW polygon
    min_edge = std::min(min_edge, point_segment_distance(point, a, b));
  }
  return inside ? -min_edge : min_edge;
}

double signed_distance_interval(double x, const SupportHull& hull) {
  if (hull.empty()) return kInfiniteDistance;
  const double lo = hull.x_min(), hi = hull.x_max();
  return std::max(x - hi, lo - x);
}

BalanceState com_state(const RobotModel& model, const SimState& state,
                       const BalanceState* prev, double dt) {
  const Kinematics kin = Kinematics::compute(model, state);
  BalanceState b;
  const double total = model.total_mass();
  Vec2 weighted = Vec2::Zero();
  for (size_t i = 0; i < model.links.size(); ++i)
    weighted += model.links[i].mass * kin.links[i].com;
  b.p_c = weighted / total;
  b.p_c_x = b.p_c(0);
  b.h_c = b.p_c(1);

  centroidal_momentum(model, state, &b.p_l, &b.L);
  b.v_c = b.p_l / total;
  b.hd_c = b.v_c(1);
  if (prev && dt > 0.0) b.a_c = (b.v_c - prev->v_c) / dt;
  return b;
}

void centroidal_momentum(const RobotModel& model, const SimState& state,
                         Vec2* p_l, double* L) {
  const Kinematics kin = Kinematics::compute(model, state);
  const double total = model.total_mass();
  Vec2 mom = Vec2::Zero();
  Vec2 weighted = Vec2::Zero();
  for (size_t i = 0; i < model.links.size(); ++i) {
    mom += model.links[i].mass * kin.links[i].com_vel;
    weighted += model.links[i].mass * kin.links[i].com;
  }
  const Vec2 com = weighted / total;
  const Vec2 v_com = mom / total;
  double ang = 0.0;
  for (size_t i = 0; i < model.links.size(); ++i) {
    const LinkKin& l = kin.links[i];
    const Vec2 r = l.com - com;
    const Vec2 v = l.com_vel - v_com;
    ang += model.links[i].inertia * l.theta_dot;
    ang += model.links[i].mass * (r(0) * v(1) - r(1) * v(0));
  }
  if (p_l) *p_l = mom;
  if (L) *L = ang;
}

void net_centroidal_rates(const BalanceState& curr, const BalanceState& prev,
                          double dt, Vec2* F_net, double* tau_net) {
  if (!(dt > 0.0)) throw SimFault("net_centroidal_rates: dt must be > 0");
  if (F_net) *F_net = (curr.p_l - prev.p_l) / dt;
  if (tau_net) *tau_net = (curr.L - prev.L) / dt;
}

std::optional<double> capture_point(double p_c_x, double v_c_x, double h_c,
                                    double g, double h_min) {
  if (!(g > 0.0)) throw SimFault("capture_point: g must be > 0");
  if (h_c <= h_min) return std::nullopt;
  return p_c_x + v_c_x / std::sqrt(g / h_c);
}

SupportHull support_hull(const RobotModel& model, const ContactState& contacts,
                         bool feet_only, double force_threshold) {
  std::vector<Vec2> pts;
  for (size_t i = 0; i < contacts.points.size(); ++i) {
    const auto& p = contacts.points[i];
    if (!p.active || p.normal_force <= force_threshold) continue;
    if (feet_only && !is_foot_label(model.contact_points[i].label)) continue;
    pts.push_back(Vec2(p.world(0), 0.0));  // projected to the ground line
  }
  return convex_hull(pts, feet_only ? SupportHull::Source::FeetOnly
                                    : SupportHull::Source::AllContacts);
}

BalanceState balance_snapshot(const RobotModel& model, const SimState& state,
                              const ContactState& contacts,
                              const BalanceState* prev,
                              const WorldConfig& world,
                              const BalanceConfig& cfg) {
  BalanceState b = com_state(model, state, prev, world.control_dt());
  if (prev)
    net_centroidal_rates(b, *prev, world.control_dt(), &b.F_net, &b.tau_net);

  const SupportHull hull_all =
      support_hull(model, contacts, false, cfg.active_force_threshold);
  const SupportHull hull_feet =
      support_hull(model, contacts, true, cfg.active_force_threshold);

  b.d_com = signed_distance_interval(b.p_c_x, hull_all);

  const auto xi = capture_point(b.p_c_x, b.v_c(0), b.h_c, world.gravity,
                                cfg.capture_height_floor);
  b.xi_defined = xi.has_value();
  if (xi) {
    b.xi = *xi;
    b.d_cp = signed_distance_interval(b.xi, hull_feet);
  } else {
    b.xi = b.p_c_x;
    b.d_cp = kInfiniteDistance;  // consumers treat this as "outside"
  }
  return b;
}

}  // namespace fallrec
