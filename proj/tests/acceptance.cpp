// Acceptance gate: one self-contained check per criterion, each printing a
// single PASS/FAIL line. --fast runs the sub-minute criteria, --long runs
// the two training-based ones, no flag runs everything.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "fallrec/balance.hpp"
#include "fallrec/config.hpp"
#include "fallrec/env.hpp"
#include "fallrec/reward.hpp"
#include "fallrec/trainer.hpp"

using namespace fallrec;

namespace {

struct Failure {
  std::string detail;
};

void expect(bool ok, const std::string& detail) {
  if (!ok) throw Failure{detail};
}

double now_seconds() {
  using clock = std::chrono::steady_clock;
  static const clock::time_point start = clock::now();
  return std::chrono::duration<double>(clock::now() - start).count();
}

// ---------------------------------------------------------------- criterion 1

double segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  const double t =
      len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
  return (p - (a + t * ab)).norm();
}

double brute_edge_distance(const Vec2& p, const SupportHull& hull) {
  const size_t n = hull.vertices.size();
  if (n == 1) return (p - hull.vertices[0]).norm();
  double best = kInfiniteDistance;
  for (size_t i = 0; i < n; ++i)
    best = std::min(best, segment_distance(p, hull.vertices[i],
                                           hull.vertices[(i + 1) % n]));
  return best;
}

bool ray_cast_inside(const Vec2& p, const SupportHull& hull) {
  const size_t n = hull.vertices.size();
  if (n < 3) return false;
  bool inside = false;
  for (size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2& a = hull.vertices[i];
    const Vec2& b = hull.vertices[j];
    if ((a(1) > p(1)) != (b(1) > p(1)) &&
        p(0) < (b(0) - a(0)) * (p(1) - a(1)) / (b(1) - a(1)) + a(0))
      inside = !inside;
  }
  return inside;
}

void criterion_hull() {
  Rng rng(1001);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 3 + rng.uniform_int(38);
    std::vector<Vec2> pts(n);
    for (auto& p : pts) p = Vec2(rng.uniform(-2, 2), rng.uniform(-2, 2));
    const SupportHull hull = convex_hull(pts);
    expect(!hull.empty(), "hull empty on nondegenerate input");

    // Every input point lies inside or on the hull.
    for (const auto& p : pts)
      expect(signed_distance(p, hull) <= 1e-9, "input point outside hull");
    // Vertices are input points and wind CCW convexly.
    for (const auto& v : hull.vertices) {
      bool found = false;
      for (const auto& p : pts) found = found || (v - p).norm() < 1e-12;
      expect(found, "hull vertex not an input point");
    }
    const size_t m = hull.vertices.size();
    if (m >= 3)
      for (size_t i = 0; i < m; ++i) {
        const Vec2 e1 = hull.vertices[(i + 1) % m] - hull.vertices[i];
        const Vec2 e2 = hull.vertices[(i + 2) % m] - hull.vertices[(i + 1) % m];
        expect(e1(0) * e2(1) - e1(1) * e2(0) > -1e-12, "hull not CCW convex");
      }

    // Signed distance agrees with the brute-force edge distance.
    for (int q = 0; q < 10; ++q) {
      const Vec2 p(rng.uniform(-3, 3), rng.uniform(-3, 3));
      const double sd = signed_distance(p, hull);
      const double brute = brute_edge_distance(p, hull);
      expect(std::abs(std::abs(sd) - brute) < 1e-9,
             "|signed distance| != edge distance");
      if (m >= 3 && brute > 1e-9)
        expect((sd < 0.0) == ray_cast_inside(p, hull),
               "signed-distance sign disagrees with ray casting");
    }
  }
}

// ---------------------------------------------------------------- criterion 2

void criterion_capture_point() {
  const double g = 9.81, h = 1.0;
  const double omega = std::sqrt(g / h);
  const double x0 = 0.0, v0 = 0.5;
  const double xi0 = *capture_point(x0, v0, h, g);

  // x'' = omega^2 (x - xi0), foot pinned at the capture point.
  double x = x0, v = v0, t = 0.0;
  const double dt = 1e-4;
  auto acc = [&](double xx) { return omega * omega * (xx - xi0); };
  double max_err = 0.0;
  while (t < 3.0 - 1e-12) {
    const double k1x = v, k1v = acc(x);
    const double k2x = v + 0.5 * dt * k1v, k2v = acc(x + 0.5 * dt * k1x);
    const double k3x = v + 0.5 * dt * k2v, k3v = acc(x + 0.5 * dt * k2x);
    const double k4x = v + dt * k3v, k4v = acc(x + dt * k3x);
    x += dt / 6.0 * (k1x + 2 * k2x + 2 * k3x + k4x);
    v += dt / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v);
    t += dt;
    const double closed = -(v0 / omega) * std::exp(-omega * t);
    max_err = std::max(max_err, std::abs((x - xi0) - closed));
  }
  expect(max_err < 1e-6, "LIP trajectory deviates from closed form");
  expect(std::abs(v) < 1e-3, "CoM not captured (final speed too high)");
}

// ---------------------------------------------------------------- criterion 3

void criterion_conservation() {
  const RobotModel m = default_biped();
  WorldConfig world;
  Rng rng(77);

  // Free flight at a fine step so integrator truncation stays below the
  // conservation tolerances; start high enough that nothing touches.
  WorldConfig fine = world;
  fine.dt_physics = 1e-4;
  SimState s = SimState::zero(m);
  s.q(1) = 8.0;
  s.q(2) = 0.3;
  for (int j = 0; j < m.num_joints(); ++j) {
    s.q(3 + j) = rng.uniform(-0.5, 0.5);
    s.qd(3 + j) = rng.uniform(-1.0, 1.0);
  }
  s.qd(0) = 0.4;
  s.qd(2) = 0.6;
  Vec2 p0;
  double L0;
  centroidal_momentum(m, s, &p0, &L0);
  for (int i = 0; i < 5000; ++i)
    s = step(m, s, VecX::Zero(m.num_joints()), fine);
  expect(s.q(1) > 2.0, "free-flight test touched the ground");
  Vec2 p1;
  double L1;
  centroidal_momentum(m, s, &p1, &L1);
  expect(std::abs(p1(0) - p0(0)) / std::max(1.0, std::abs(p0(0))) < 1e-6,
         "horizontal momentum drifted in free flight");
  expect(std::abs(L1 - L0) / std::max(1.0, std::abs(L0)) < 1e-5,
         "angular momentum about the CoM drifted in free flight");

  // Undamped pendulum energy drift < 1% over 1 s at dt = 1e-3.
  const RobotModel pend = pendulum_model(2.0, 0.05, 0.4);
  SimState p = SimState::zero(pend);
  p.q(3) = 1.2;
  const double e0 = total_energy(pend, p, world);
  for (int i = 0; i < 1000; ++i) p = step(pend, p, VecX::Zero(1), world);
  const double e1 = total_energy(pend, p, world);
  expect(std::abs(e1 - e0) / std::abs(e0) < 0.01, "pendulum energy drift");
}

// ---------------------------------------------------------------- criterion 4

void criterion_gradients() {
  Rng rng(4242);
  for (int net = 0; net < 100; ++net) {
    PolicySpec spec;
    spec.actor_hidden = {3 + rng.uniform_int(4)};
    spec.critic_hidden = {3 + rng.uniform_int(4)};
    spec.actor_input_dim = 2 + rng.uniform_int(3);
    spec.critic_input_dim = spec.actor_input_dim + rng.uniform_int(3);
    spec.action_dim = 1 + rng.uniform_int(3);

    PpoConfig cfg;
    cfg.entropy_coeff = 0.01;
    PpoLearner learner(spec, cfg, rng.next_u64());

    const int steps = 3, envs = 2, n = steps * envs;
    RolloutBatch b;
    b.steps = steps;
    b.num_envs = envs;
    b.actor_obs.resize(n, spec.actor_input_dim);
    b.critic_obs.resize(n, spec.critic_input_dim);
    b.actions.resize(n, spec.action_dim);
    b.log_probs.resize(n);
    b.rewards.resize(steps, envs);
    b.values.resize(steps, envs);
    b.dones = MatX::Zero(steps, envs);
    b.bootstrap_values = VecX::Zero(envs);
    const ActorCritic& ac = learner.policy();
    for (int s = 0; s < n; ++s) {
      for (int i = 0; i < spec.actor_input_dim; ++i)
        b.actor_obs(s, i) = rng.normal();
      for (int i = 0; i < spec.critic_input_dim; ++i)
        b.critic_obs(s, i) = rng.normal();
      const VecX mean = ac.action_mean(b.actor_obs.row(s).transpose());
      VecX a(spec.action_dim);
      for (int i = 0; i < spec.action_dim; ++i)
        a(i) = mean(i) + std::exp(ac.log_std(i)) * rng.normal();
      b.actions.row(s) = a.transpose();
      // Mildly off-policy but inside the clip band so the loss is smooth.
      b.log_probs(s) = ac.log_prob(mean, a) + rng.uniform(-0.04, 0.04);
    }
    VecX adv(n), ret(n);
    for (int s = 0; s < n; ++s) {
      adv(s) = rng.normal();
      ret(s) = rng.normal();
    }
    std::vector<int> all(n);
    std::iota(all.begin(), all.end(), 0);
    VecX agrad, cgrad;
    learner.losses(b, adv, ret, all, &agrad, &cgrad);

    const double eps = 1e-6;
    const VecX a0 = learner.actor_params();
    for (int i = 0; i < a0.size(); ++i) {
      VecX pp = a0;
      pp(i) += eps;
      learner.set_actor_params(pp);
      const double up =
          learner.losses(b, adv, ret, all, nullptr, nullptr).actor_loss;
      pp(i) = a0(i) - eps;
      learner.set_actor_params(pp);
      const double dn =
          learner.losses(b, adv, ret, all, nullptr, nullptr).actor_loss;
      learner.set_actor_params(a0);
      const double fd = (up - dn) / (2.0 * eps);
      expect(std::abs(agrad(i) - fd) / std::max(1.0, std::abs(fd)) < 1e-4,
             "actor/entropy gradient mismatch vs finite differences");
    }
    const VecX c0 = learner.critic_params();
    for (int i = 0; i < c0.size(); ++i) {
      VecX pp = c0;
      pp(i) += eps;
      learner.set_critic_params(pp);
      const double up =
          learner.losses(b, adv, ret, all, nullptr, nullptr).value_loss;
      pp(i) = c0(i) - eps;
      learner.set_critic_params(pp);
      const double dn =
          learner.losses(b, adv, ret, all, nullptr, nullptr).value_loss;
      learner.set_critic_params(c0);
      const double fd = (up - dn) / (2.0 * eps);
      expect(std::abs(cgrad(i) - fd) / std::max(1.0, std::abs(fd)) < 1e-4,
             "critic gradient mismatch vs finite differences");
    }
  }
}

// ---------------------------------------------------------------- criterion 5

void criterion_reward_identities() {
  RewardConfig cfg;
  auto approx = [](double a, double b, double tol = 1e-12) {
    return std::abs(a - b) <= tol * std::max(1.0, std::abs(b));
  };
  expect(r_height(cfg.h_star, cfg) == 1.0, "height reward peak");
  expect(approx(r_height(cfg.h_star - cfg.sigma_h, cfg), std::exp(-1.0)),
         "height reward at one sigma");
  expect(r_rise(0.5, -0.3, cfg) == 0.0, "rise gating on descent");
  expect(r_rise(0.5, 0.5, cfg) == 0.5, "rise value");
  expect(approx(r_fall(-0.5, cfg), -0.25), "fall penalty value");
  expect(r_stab(cfg.h_star, 0.0, cfg) == cfg.alpha_s, "stabilization peak");
  expect(approx(r_stab(cfg.h_star + 0.01, 0.2, cfg), cfg.alpha_s - 0.02),
         "stabilization speed penalty");
  expect(r_com(0.0, cfg) == 1.0 && r_cp(0.0, cfg) == 1.0, "support peak");
  expect(approx(r_com(cfg.sigma_c, cfg), std::exp(-1.0)), "r_com at sigma");
  expect(approx(r_cp(2.0 * cfg.sigma_xi, cfg), std::exp(-4.0)),
         "r_cp at two sigma");
  expect(r_com(kInfiniteDistance, cfg) == 0.0 &&
             r_cp(kInfiniteDistance, cfg) == 0.0,
         "airborne support rewards are zero");
  {
    RewardConfig mom = cfg;
    mom.alpha_l = 0.01;
    mom.alpha_L = 0.0;
    expect(approx(r_mom({3.0, 4.0}, 0.0, mom), -0.25), "momentum penalty");
  }
  for (double off : {-0.049, -0.02, 0.0, 0.02, 0.049})
    expect(r_rise(cfg.h_star + off, 0.0, cfg) == 0.0 && r_fall(0.0, cfg) == 0.0,
           "quiescence inside the deadband");

  // Breakdown identity: total equals the weighted group sum exactly.
  Rng rng(5005);
  for (int trial = 0; trial < 200; ++trial) {
    BalanceState b;
    b.h_c = rng.uniform(0.02, 1.2);
    b.hd_c = rng.uniform(-2.0, 2.0);
    b.d_com = rng.uniform(-0.2, 0.5);
    b.d_cp = rng.uniform(-0.2, 0.5);
    b.xi_defined = true;
    b.F_net = Vec2(rng.uniform(-100, 100), rng.uniform(-100, 100));
    b.tau_net = rng.uniform(-50, 50);
    Group3Inputs g3;
    g3.torques = VecX::Constant(8, rng.uniform(-50, 50));
    g3.torque_limits = VecX::Constant(8, 100.0);
    g3.action = VecX::Constant(8, rng.uniform(-1, 1));
    g3.prev_action = VecX::Constant(8, rng.uniform(-1, 1));
    g3.torso_pitch = rng.uniform(-1.5, 1.5);
    g3.active_hand_elbow_contacts = rng.uniform_int(3);
    g3.h_c = b.h_c;
    g3.unsafe_termination = rng.uniform() < 0.2;
    const RewardBreakdown out = total_reward(b, g3, cfg);
    expect(std::abs(out.group1 + out.group2 + out.group3 - out.total) <= 1e-12,
           "breakdown does not sum to total");
  }
}

// ---------------------------------------------------------------- criterion 6

void criterion_ppo_sanity() {
  for (uint64_t seed : {1ull, 2ull, 3ull}) {
    PolicySpec spec;
    spec.actor_hidden = {16};
    spec.critic_hidden = {16};
    spec.actor_input_dim = 1;
    spec.critic_input_dim = 1;
    spec.action_dim = 1;
    PpoConfig cfg;
    cfg.rollout_steps = 16;
    cfg.num_envs = 24;
    PpoLearner learner(spec, cfg, seed);
    Rng env_rng(seed * 7919 + 13);

    auto iteration = [&]() {
      RolloutBatch b;
      b.steps = cfg.rollout_steps;
      b.num_envs = cfg.num_envs;
      const int n = b.size();
      b.actor_obs.resize(n, 1);
      b.critic_obs.resize(n, 1);
      b.actions.resize(n, 1);
      b.log_probs.resize(n);
      b.rewards.resize(b.steps, b.num_envs);
      b.values.resize(b.steps, b.num_envs);
      b.dones = MatX::Ones(b.steps, b.num_envs);
      b.bootstrap_values = VecX::Zero(b.num_envs);
      double mean_r = 0.0;
      for (int t = 0; t < b.steps; ++t)
        for (int e = 0; e < b.num_envs; ++e) {
          const int s = b.flat(t, e);
          const double target = env_rng.uniform(-1.0, 1.0);
          VecX obs(1);
          obs << target;
          double lp;
          const VecX a = learner.policy().sample(obs, learner.rng(), &lp);
          b.actor_obs.row(s) = obs.transpose();
          b.critic_obs.row(s) = obs.transpose();
          b.actions.row(s) = a.transpose();
          b.log_probs(s) = lp;
          b.values(t, e) = learner.policy().value(obs);
          b.rewards(t, e) = -(target - a(0)) * (target - a(0));
          mean_r += b.rewards(t, e);
        }
      learner.update(b);
      return mean_r / n;
    };
    const double initial = iteration();
    double final_r = 0.0;
    for (int i = 0; i < 200; ++i) final_r = iteration();
    expect(initial < -0.5, "random policy unexpectedly near optimal");
    expect(final_r > 0.1 * initial,
           "seed " + std::to_string(seed) +
               ": did not close 90% of the optimality gap (final " +
               std::to_string(final_r) + ")");
  }
}

// ---------------------------------------------------------------- criterion 9

void criterion_determinism() {
  ExperimentConfig cfg = default_config();
  cfg.ppo.iterations = 3;
  cfg.ppo.num_envs = 8;
  Trainer a(cfg, false, 123), b(cfg, false, 123);
  for (int i = 0; i < 3; ++i) {
    const IterationStats sa = a.iterate();
    const IterationStats sb = b.iterate();
    expect(sa.mean_step_reward == sb.mean_step_reward &&
               sa.approx_kl == sb.approx_kl &&
               sa.value_loss == sb.value_loss &&
               sa.episodes_finished == sb.episodes_finished,
           "training iteration stats diverged for equal (config, seed)");
  }
  const auto ta = a.evaluate(2, 9);
  const auto tb = b.evaluate(2, 9);
  expect(ta.size() == tb.size(), "evaluation episode counts differ");
  for (size_t i = 0; i < ta.size(); ++i) {
    expect(ta[i].total_reward == tb[i].total_reward &&
               ta[i].duration == tb[i].duration &&
               ta[i].cause == tb[i].cause &&
               ta[i].ticks.size() == tb[i].ticks.size(),
           "evaluation traces diverged for equal (config, seed)");
    for (size_t k = 0; k < ta[i].ticks.size(); ++k)
      expect(ta[i].ticks[k].balance.p_c == tb[i].ticks[k].balance.p_c,
             "per-tick states diverged");
  }
  expect(config_hash(cfg) == config_hash(cfg), "config hash unstable");
}

// ------------------------------------------------------- criteria 7 and 8

constexpr int kAblationIters = 2000;
constexpr int kAblationEnvs = 64;
constexpr int kEvalEpisodesPerFamily = 20;
constexpr int kSweepEpisodesPerCell = 6;

struct AblationOutcome {
  MetricsReport full, reduced;
  Checkpoint full_ckpt;
};

AblationOutcome run_ablation() {
  ExperimentConfig cfg = default_config();
  cfg.ppo.iterations = kAblationIters;
  cfg.ppo.num_envs = kAblationEnvs;

  AblationOutcome out;
  for (int variant = 0; variant < 2; ++variant) {
    const bool reduced = variant == 1;
    Trainer trainer(cfg, reduced, 2024);
    while (trainer.iteration() < cfg.ppo.iterations) {
      const IterationStats s = trainer.iterate();
      if (s.iteration % 200 == 0)
        std::fprintf(stderr, "  [%s] iter %d reward %.3f stuck %d/%d\n",
                     reduced ? "reduced" : "full", s.iteration,
                     s.mean_step_reward, s.stuck_low, s.episodes_finished);
    }
    const auto traces = trainer.evaluate(kEvalEpisodesPerFamily, 555);
    (reduced ? out.reduced : out.full) = aggregate_metrics(traces);
    if (!reduced) out.full_ckpt = trainer.make_checkpoint(config_hash(cfg));
  }
  return out;
}

void criterion_ablation(const AblationOutcome& out) {
  std::fprintf(stderr,
               "  full: stuck %.3f reward %.3f | reduced: stuck %.3f "
               "reward %.3f\n",
               out.full.stuck_low_rate, out.full.mean_reward,
               out.reduced.stuck_low_rate, out.reduced.mean_reward);
  expect(out.reduced.stuck_low_rate - out.full.stuck_low_rate >= 0.3,
         "stuck-low separation below 0.3");
  expect(out.full.mean_reward > out.reduced.mean_reward,
         "full-mode mean reward not above reduced mode");
}

void criterion_push_hierarchy(const AblationOutcome& out) {
  ExperimentConfig cfg = default_config();
  cfg.ppo.iterations = kAblationIters;
  cfg.ppo.num_envs = kAblationEnvs;
  PpoLearner learner(cfg.resolved_policy(false), cfg.ppo, 0);
  Rng dummy(0);
  restore_learner(out.full_ckpt, &learner, &dummy);

  const RobotModel model = cfg.make_model();
  EnvConfig env_cfg = cfg.env_config(false);
  env_cfg.curriculum.enabled = false;
  const double mass_ratio = model.total_mass() / 50.0;

  const std::vector<double> forces = {0, 50, 100, 200, 300, 500};
  const std::vector<double> heights = {-0.2, 0.0, 0.2, 0.6};
  std::map<std::tuple<int, int, int>, std::vector<double>> rates_by_force;
  double low_sum = 0.0, high_sum = 0.0;
  int low_n = 0, high_n = 0;

  int fam_i = 0;
  for (PoseFamily family : cfg.families) {
    int h_i = 0;
    for (double height : heights) {
      for (int dir : {+1, -1}) {
        for (double force : forces) {
          const uint64_t seed =
              fnv1a(std::string(to_string(family)) + std::to_string(dir)) +
              static_cast<uint64_t>(force) + static_cast<uint64_t>(h_i);
          RecoveryEnv env(model, env_cfg, seed);
          std::vector<PushSpec> push;
          if (force > 0.0)
            push.push_back({1.0, 0.1, force * mass_ratio, height, dir});
          int recovered = 0;
          for (int ep = 0; ep < kSweepEpisodesPerCell; ++ep)
            recovered +=
                run_episode(env, learner.policy(), family, false, &push)
                    .recovered;
          const double rate =
              static_cast<double>(recovered) / kSweepEpisodesPerCell;
          rates_by_force[{fam_i, h_i, dir}].push_back(rate);
          if (force > 0.0) {
            if (height == -0.2) {
              low_sum += rate;
              ++low_n;
            } else if (height == 0.6) {
              high_sum += rate;
              ++high_n;
            }
          }
        }
      }
      ++h_i;
    }
    ++fam_i;
  }

  // Non-increasing in force per (pose, height, direction) within the
  // binomial CI of the two cells being compared.
  auto ci = [](double rate) {
    return 1.96 * std::sqrt(std::max(rate * (1.0 - rate), 0.25 / 6) /
                            kSweepEpisodesPerCell);
  };
  for (const auto& [key, rates] : rates_by_force)
    for (size_t i = 1; i < rates.size(); ++i)
      expect(rates[i] <= rates[i - 1] + ci(rates[i]) + ci(rates[i - 1]),
             "recovery rate increased with force beyond sampling CI");

  const double low = low_sum / std::max(1, low_n);
  const double high = high_sum / std::max(1, high_n);
  std::fprintf(stderr, "  low-push rate %.3f, high-push rate %.3f\n", low,
               high);
  expect(high <= low + 1e-12,
         "high pushes recovered more often than low pushes");
}

// ----------------------------------------------------------------- harness

int run(bool fast, bool slow) {
  struct Entry {
    int id;
    const char* name;
    std::function<void()> fn;
    bool long_running;
  };

  AblationOutcome ablation;
  bool ablation_ready = false;
  auto ensure_ablation = [&]() {
    if (!ablation_ready) {
      ablation = run_ablation();
      ablation_ready = true;
    }
  };

  const std::vector<Entry> entries = {
      {1, "hull and signed-distance oracles", criterion_hull, false},
      {2, "capture-point capturability (LIP)", criterion_capture_point, false},
      {3, "momentum and energy conservation", criterion_conservation, false},
      {4, "loss gradients vs finite differences", criterion_gradients, false},
      {5, "reward identities and breakdown", criterion_reward_identities,
       false},
      {6, "ppo sanity on 1-D reaching", criterion_ppo_sanity, false},
      {7, "ablation direction (full vs reduced)",
       [&]() {
         ensure_ablation();
         criterion_ablation(ablation);
       },
       true},
      {8, "push-hierarchy direction in the sweep",
       [&]() {
         ensure_ablation();
         criterion_push_hierarchy(ablation);
       },
       true},
      {9, "bit-exact reproducibility", criterion_determinism, false},
  };

  int failures = 0;
  for (const auto& e : entries) {
    if (e.long_running ? !slow : !fast) continue;
    const double t0 = now_seconds();
    try {
      e.fn();
      std::printf("PASS  criterion %d: %s (%.1fs)\n", e.id, e.name,
                  now_seconds() - t0);
    } catch (const Failure& f) {
      std::printf("FAIL  criterion %d: %s — %s\n", e.id, e.name,
                  f.detail.c_str());
      ++failures;
    } catch (const std::exception& ex) {
      std::printf("FAIL  criterion %d: %s — unexpected error: %s\n", e.id,
                  e.name, ex.what());
      ++failures;
    }
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  bool fast = true, slow = true;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--fast") == 0) slow = false;
    if (std::strcmp(argv[i], "--long") == 0) fast = false;
  }
  return run(fast, slow);
}
