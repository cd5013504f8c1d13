#include <cmath>

#include "doctest.h"
#include "fallrec/dynamics.hpp"
#include "fallrec/rng.hpp"

using namespace fallrec;

namespace {

SimState standing_state(const RobotModel& model, double base_z = 0.9399) {
  SimState s = SimState::zero(model);
  s.q(1) = base_z;
  return s;
}

SimState random_state(const RobotModel& model, Rng& rng, double vel_scale) {
  SimState s = SimState::zero(model);
  s.q(0) = rng.uniform(-0.5, 0.5);
  s.q(1) = rng.uniform(1.5, 2.5);
  s.q(2) = rng.uniform(-1.5, 1.5);
  for (int j = 0; j < model.num_joints(); ++j)
    s.q(3 + j) = rng.uniform(-1.0, 1.0);
  for (int i = 0; i < s.qd.size(); ++i)
    s.qd(i) = vel_scale * rng.uniform(-1.0, 1.0);
  return s;
}

}  // namespace

TEST_CASE("mass matrix: pendulum joint entry is I + m l^2 + armature") {
  const RobotModel m = pendulum_model(2.0, 0.05, 0.3, 0.01);
  SimState s = SimState::zero(m);
  for (double q : {0.0, 0.7, -2.1}) {
    s.q(3) = q;
    const MatX M = mass_matrix(m, s);
    CHECK(M(3, 3) == doctest::Approx(0.05 + 2.0 * 0.3 * 0.3 + 0.01).epsilon(1e-12));
  }
}

TEST_CASE("mass matrix: symmetric positive definite at random states") {
  const RobotModel m = default_biped();
  Rng rng(12345);
  for (int trial = 0; trial < 20; ++trial) {
    const SimState s = random_state(m, rng, 1.0);
    const MatX M = mass_matrix(m, s);
    CHECK((M - M.transpose()).cwiseAbs().maxCoeff() < 1e-12);
    Eigen::SelfAdjointEigenSolver<MatX> es(M);
    CHECK(es.eigenvalues().minCoeff() > 0.0);
  }
}

TEST_CASE("mass matrix: pure translation kinetic energy is half total mass") {
  const RobotModel m = default_biped();
  Rng rng(7);
  SimState s = random_state(m, rng, 0.0);
  s.qd(0) = 1.0;  // 1 m/s in x, joints locked
  const MatX M = mass_matrix(m, s);
  const double ke = 0.5 * s.qd.dot(M * s.qd);
  CHECK(ke == doctest::Approx(0.5 * m.total_mass()).epsilon(1e-12));
  CHECK(kinetic_energy(m, s) == doctest::Approx(ke).epsilon(1e-12));
}

TEST_CASE("mass matrix rejects non-finite state") {
  const RobotModel m = default_biped();
  SimState s = standing_state(m);
  s.q(4) = std::nan("");
  CHECK_THROWS_AS(mass_matrix(m, s), SimFault);
}

TEST_CASE("bias forces: statics and gravity gradient") {
  const RobotModel m = default_biped();
  const SimState s = standing_state(m);
  const VecX bias = bias_forces(m, s, 9.81);
  CHECK(bias(1) == doctest::Approx(-m.total_mass() * 9.81).epsilon(1e-12));
  CHECK(bias_forces(m, s, 0.0).cwiseAbs().maxCoeff() < 1e-12);

  // Central differences of potential energy reproduce the gravity term.
  Rng rng(99);
  SimState r = random_state(m, rng, 0.0);
  const VecX b = bias_forces(m, r, 9.81);
  const double h = 1e-6;
  for (int i = 0; i < m.nq(); ++i) {
    SimState plus = r, minus = r;
    plus.q(i) += h;
    minus.q(i) -= h;
    const double dV = (potential_energy(m, plus, 9.81) -
                       potential_energy(m, minus, 9.81)) /
                      (2.0 * h);
    CHECK(b(i) == doctest::Approx(-dV).epsilon(1e-6));
  }
}

TEST_CASE("contact forces: separation, linear law, settled stance weight") {
  const RobotModel m = default_biped();
  WorldConfig world;

  SimState airborne = standing_state(m, 2.0);
  VecX gen;
  ContactState cs = contact_forces(m, airborne, world, &gen);
  CHECK(gen.cwiseAbs().maxCoeff() == 0.0);
  CHECK(cs.num_active() == 0);

  // Point-mass check of the linear normal law: 1 mm at 1e5 N/m -> 100 N.
  WorldConfig stiff = world;
  stiff.contact_stiffness = 1e5;
  RobotModel ball = pendulum_model(1.0, 0.01, 0.1);
  ball.base_fixed = false;
  ball.contact_points.push_back({0, Vec2::Zero(), ContactLabel::Torso});
  SimState bs = SimState::zero(ball);
  bs.q(1) = -0.001;
  contact_forces(ball, bs, stiff, &gen);
  ContactState c2 = contact_forces(ball, bs, stiff, nullptr);
  CHECK(c2.points.back().normal_force == doctest::Approx(100.0).epsilon(1e-12));

  // Settle the biped for 1 s and compare summed normals to the weight.
  SimState s = standing_state(m);
  ActuatorCommand hold;
  hold.q_ref = VecX::Zero(m.num_joints());
  for (int i = 0; i < 1000; ++i) {
    const VecX tau = pd_torques(hold, s, m, 1.0);
    s = step(m, s, tau, world);
  }
  ContactState settled;
  step(m, s, pd_torques(hold, s, m, 1.0), world, {}, &settled);
  double normal_sum = 0.0;
  for (const auto& p : settled.points) normal_sum += p.normal_force;
  const double weight = m.total_mass() * world.gravity;
  CHECK(normal_sum == doctest::Approx(weight).epsilon(0.02));

  // Regularized complementarity + friction-cone bound.
  for (const auto& p : settled.points) {
    if (p.normal_force > 0.0) CHECK(p.penetration > 0.0);
    CHECK(std::abs(p.tangent_force) <= world.mu_s * p.normal_force + 1e-9);
  }
}

TEST_CASE("pd torques: zero error, linear law, clamp") {
  const RobotModel m = default_biped();
  SimState s = standing_state(m);
  ActuatorCommand cmd;
  cmd.q_ref = s.q.tail(m.num_joints());
  CHECK(pd_torques(cmd, s, m, 1.0).cwiseAbs().maxCoeff() == 0.0);

  RobotModel one = m;
  one.joints[0].kp = 100.0;
  one.joints[0].kd = 0.0;
  one.joints[0].torque_limit = 50.0;
  cmd.q_ref(0) = s.q(3) + 0.1;
  CHECK(pd_torques(cmd, s, one, 1.0)(0) == doctest::Approx(10.0).epsilon(1e-12));

  cmd.q_ref(0) = s.q(3) + 5.0;  // kp*e = 500 = 10x limit
  CHECK(pd_torques(cmd, s, one, 1.0)(0) == doctest::Approx(50.0).epsilon(1e-12));
  CHECK(pd_torques(cmd, s, one, 2.0)(0) == doctest::Approx(100.0).epsilon(1e-12));
}

TEST_CASE("delay buffer") {
  const VecX hold = VecX::Constant(8, 0.5);
  auto cmd_at = [&](double t, double v) {
    ActuatorCommand c;
    c.q_ref = VecX::Constant(8, v);
    c.issued_at = t;
    return c;
  };

  DelayBuffer zero_delay(hold, 0.0);
  zero_delay.push(cmd_at(0.1, 1.0));
  CHECK(zero_delay.effective(0.1).q_ref(0) == 1.0);

  DelayBuffer buf(hold, 0.03);
  buf.push(cmd_at(0.0, 1.0));
  buf.push(cmd_at(0.02, 2.0));
  buf.push(cmd_at(0.04, 3.0));
  CHECK(buf.effective(0.05).q_ref(0) == 2.0);
  CHECK(buf.effective(0.03).q_ref(0) == 1.0);

  DelayBuffer fresh(hold, 0.03);
  fresh.push(cmd_at(0.0, 1.0));
  CHECK(fresh.effective(0.01).q_ref(0) == 0.5);  // nothing matured yet
}

TEST_CASE("step: free fall, determinism, pendulum energy") {
  const RobotModel m = default_biped();
  WorldConfig world;
  const VecX zero_tau = VecX::Zero(m.num_joints());

  SimState s = standing_state(m, 3.0);
  const SimState next = step(m, s, zero_tau, world);
  CHECK(next.qd(1) / world.dt_physics == doctest::Approx(-world.gravity).epsilon(1e-9));

  // Bit-identical repeat.
  SimState a = standing_state(m, 3.0), b = standing_state(m, 3.0);
  a.qd(2) = b.qd(2) = 0.7;
  for (int i = 0; i < 200; ++i) {
    a = step(m, a, zero_tau, world);
    b = step(m, b, zero_tau, world);
  }
  CHECK(a.q == b.q);
  CHECK(a.qd == b.qd);

  // Undamped pendulum: < 1% energy drift over 1 s at dt = 1e-3.
  const RobotModel pend = pendulum_model(2.0, 0.05, 0.4);
  SimState p = SimState::zero(pend);
  p.q(3) = 1.2;
  const double e0 = total_energy(pend, p, world);
  for (int i = 0; i < 1000; ++i)
    p = step(pend, p, VecX::Zero(1), world);
  const double e1 = total_energy(pend, p, world);
  CHECK(std::abs(e1 - e0) / std::abs(e0) < 0.01);
}

TEST_CASE("apply push: impulse-momentum, inactivity, torque arm") {
  const RobotModel m = default_biped();
  WorldConfig world;
  const VecX zero_tau = VecX::Zero(m.num_joints());

  std::vector<PushSpec> push{{0.0, 0.1, 100.0, 0.0, 1}};
  SimState s = standing_state(m, 3.0);
  for (int i = 0; i < 120; ++i)
    s = step(m, s, zero_tau, world, apply_push(push, s.time));
  Vec2 p_l;
  {
    const Kinematics kin = Kinematics::compute(m, s);
    p_l.setZero();
    for (size_t i = 0; i < m.links.size(); ++i)
      p_l += m.links[i].mass * kin.links[i].com_vel;
  }
  CHECK(p_l(0) == doctest::Approx(100.0 * 0.1).epsilon(0.02));

  // Zero force leaves the trajectory untouched.
  std::vector<PushSpec> none{{0.0, 0.1, 0.0, 0.0, 1}};
  SimState u = standing_state(m, 3.0), v = standing_state(m, 3.0);
  for (int i = 0; i < 100; ++i) {
    u = step(m, u, zero_tau, world, apply_push(none, u.time));
    v = step(m, v, zero_tau, world);
  }
  CHECK(u.q == v.q);

  // Higher application point changes angular momentum more.
  auto ang_mom_after = [&](double height) {
    std::vector<PushSpec> sched{{0.0, 0.1, 150.0, height, 1}};
    SimState w = standing_state(m, 3.0);
    for (int i = 0; i < 110; ++i)
      w = step(m, w, zero_tau, world, apply_push(sched, w.time));
    const Kinematics kin = Kinematics::compute(m, w);
    Vec2 mom = Vec2::Zero(), com = Vec2::Zero();
    for (size_t i = 0; i < m.links.size(); ++i) {
      mom += m.links[i].mass * kin.links[i].com_vel;
      com += m.links[i].mass * kin.links[i].com;
    }
    com /= m.total_mass();
    const Vec2 v_c = mom / m.total_mass();
    double L = 0.0;
    for (size_t i = 0; i < m.links.size(); ++i) {
      const Vec2 r = kin.links[i].com - com;
      const Vec2 dv = kin.links[i].com_vel - v_c;
      L += m.links[i].inertia * kin.links[i].theta_dot +
           m.links[i].mass * (r(0) * dv(1) - r(1) * dv(0));
    }
    return L;
  };
  CHECK(std::abs(ang_mom_after(0.7)) > std::abs(ang_mom_after(0.30)));
}

TEST_CASE("free flight conserves momentum and angular momentum") {
  const RobotModel m = default_biped();
  WorldConfig world;
  world.dt_physics = 2e-6;
  const VecX zero_tau = VecX::Zero(m.num_joints());

  SimState s = standing_state(m, 6.0);
  s.qd(0) = 0.4;
  s.qd(2) = 1.5;
  for (int j = 0; j < m.num_joints(); ++j) s.qd(3 + j) = 0.3 * (j % 3 - 1);

  auto momenta = [&](const SimState& st, double* px, double* L) {
    const Kinematics kin = Kinematics::compute(m, st);
    Vec2 mom = Vec2::Zero(), com = Vec2::Zero();
    for (size_t i = 0; i < m.links.size(); ++i) {
      mom += m.links[i].mass * kin.links[i].com_vel;
      com += m.links[i].mass * kin.links[i].com;
    }
    com /= m.total_mass();
    const Vec2 v_c = mom / m.total_mass();
    double ang = 0.0;
    for (size_t i = 0; i < m.links.size(); ++i) {
      const Vec2 r = kin.links[i].com - com;
      const Vec2 dv = kin.links[i].com_vel - v_c;
      ang += m.links[i].inertia * kin.links[i].theta_dot +
             m.links[i].mass * (r(0) * dv(1) - r(1) * dv(0));
    }
    *px = mom(0);
    *L = ang;
  };

  double px0, L0;
  momenta(s, &px0, &L0);
  const int steps = static_cast<int>(0.5 / world.dt_physics);
  for (int i = 0; i < steps; ++i) s = step(m, s, zero_tau, world);
  double px1, L1;
  momenta(s, &px1, &L1);
  CHECK(std::abs(px1 - px0) / std::abs(px0) < 1e-6);
  CHECK(std::abs(L1 - L0) / std::abs(L0) < 1e-5);
}

TEST_CASE("total energy: rest, free flight, velocity scaling") {
  const RobotModel m = default_biped();
  WorldConfig world;
  const SimState rest = standing_state(m);
  CHECK(kinetic_energy(m, rest) == 0.0);
  CHECK(total_energy(m, rest, world) ==
        doctest::Approx(potential_energy(m, rest, world.gravity)));

  // Free flight for 0.5 s conserves total energy to 0.5%.
  SimState s = standing_state(m, 5.0);
  s.qd(0) = 0.5;
  s.qd(2) = 1.0;
  const double e0 = total_energy(m, s, world);
  const VecX zero_tau = VecX::Zero(m.num_joints());
  for (int i = 0; i < 500; ++i) s = step(m, s, zero_tau, world);
  CHECK(std::abs(total_energy(m, s, world) - e0) / std::abs(e0) < 0.005);

  SimState fast = rest;
  fast.qd = VecX::Constant(m.nq(), 0.3);
  SimState faster = rest;
  faster.qd = 2.0 * fast.qd;
  CHECK(kinetic_energy(m, faster) ==
        doctest::Approx(4.0 * kinetic_energy(m, fast)).epsilon(1e-12));
}
