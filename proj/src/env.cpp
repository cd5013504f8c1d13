#include "fallrec/env.hpp"

#include <algorithm>
#include <cmath>

namespace fallrec {

const char* to_string(PoseFamily f) {
  switch (f) {
    case PoseFamily::Standing: return "standing";
    case PoseFamily::Squatting: return "squatting";
    case PoseFamily::Kneeling: return "kneeling";
    case PoseFamily::Sitting: return "sitting";
    case PoseFamily::Supine: return "supine";
  }
  return "?";
}

const char* to_string(Stage s) {
  switch (s) {
    case Stage::Exploration: return "exploration";
    case Stage::Expansion: return "expansion";
    case Stage::Annealing: return "annealing";
  }
  return "?";
}

const char* to_string(TerminationCause c) {
  switch (c) {
    case TerminationCause::None: return "none";
    case TerminationCause::Timeout: return "timeout";
    case TerminationCause::StuckLow: return "stuck_low";
    case TerminationCause::UnsafeTorsoContact: return "unsafe_torso_contact";
  }
  return "?";
}

PoseFamily pose_family_from_string(const std::string& s) {
  if (s == "standing") return PoseFamily::Standing;
  if (s == "squatting") return PoseFamily::Squatting;
  if (s == "kneeling") return PoseFamily::Kneeling;
  if (s == "sitting") return PoseFamily::Sitting;
  if (s == "supine") return PoseFamily::Supine;
  throw ConfigError("unknown pose family: " + s);
}

void CurriculumConfig::validate() const {
  if (exploration_frac < 0.0 || expansion_frac < 0.0 ||
      exploration_frac + expansion_frac > 1.0)
    throw ConfigError("curriculum stage fractions out of range");
  if (torque_scale_start < torque_scale_end)
    throw ConfigError("torque scale must anneal downward");
  if (position_factor_start < position_factor_end)
    throw ConfigError("position factor must anneal downward");
  if (push_min > push_max) throw ConfigError("push range inverted");
  if (fall_induction_prob < 0.0 || fall_induction_prob > 1.0)
    throw ConfigError("fall induction probability out of [0, 1]");
}

void EpisodeSettings::validate() const {
  if (!(max_duration > 0.0)) throw ConfigError("max_duration must be > 0");
  if (settle_time < 0.0) throw ConfigError("settle_time must be >= 0");
  if (!(stuck_window > 0.0) || stuck_epsilon < 0.0)
    throw ConfigError("stuck-detection parameters out of range");
  if (!(recovery_window > 0.0)) throw ConfigError("recovery window must be > 0");
}

CurriculumState curriculum_at(const CurriculumConfig& cfg, int iteration,
                              int total_iterations) {
  cfg.validate();
  CurriculumState out;
  out.iteration = iteration;
  if (!cfg.enabled) {
    out.stage = Stage::Annealing;
    out.torque_scale = cfg.torque_scale_end;
    out.position_factor = cfg.position_factor_end;
    out.push_min = out.push_max = 0.0;
    return out;
  }
  const double f =
      total_iterations > 0
          ? std::clamp(static_cast<double>(iteration) / total_iterations, 0.0,
                       1.0)
          : 1.0;
  if (f < cfg.exploration_frac) {
    out.stage = Stage::Exploration;
    out.torque_scale = cfg.torque_scale_start;
    out.position_factor = cfg.position_factor_start;
    out.push_min = out.push_max = 0.0;
  } else if (f < cfg.exploration_frac + cfg.expansion_frac) {
    out.stage = Stage::Expansion;
    out.torque_scale = cfg.torque_scale_start;
    out.position_factor = cfg.position_factor_start;
    out.push_min = cfg.push_min;
    out.push_max = cfg.push_max;
  } else {
    out.stage = Stage::Annealing;
    const double start = cfg.exploration_frac + cfg.expansion_frac;
    const double span = 1.0 - start;
    const double a = span > 0.0 ? std::clamp((f - start) / span, 0.0, 1.0) : 1.0;
    out.torque_scale =
        cfg.torque_scale_start + a * (cfg.torque_scale_end - cfg.torque_scale_start);
    out.position_factor = cfg.position_factor_start +
                          a * (cfg.position_factor_end - cfg.position_factor_start);
    out.push_min = cfg.push_min;
    out.push_max = cfg.push_max;
  }
  return out;
}

RandomizationSample sample_randomization(const RandomizationConfig& cfg,
                                         int num_joints, Rng& rng) {
  RandomizationSample s;
  s.joint_offsets = VecX::Zero(num_joints);
  if (!cfg.enabled) {
    s.delay = cfg.delay_min;
    return s;
  }
  s.kp_scale = rng.uniform(cfg.gain_scale_min, cfg.gain_scale_max);
  s.kd_scale = rng.uniform(cfg.gain_scale_min, cfg.gain_scale_max);
  s.friction_scale = rng.uniform(cfg.friction_min, cfg.friction_max);
  s.armature_scale = rng.uniform(cfg.armature_min, cfg.armature_max);
  do {
    s.mu_s = rng.uniform(cfg.mu_s_min, cfg.mu_s_max);
    s.mu_d = rng.uniform(cfg.mu_d_min, cfg.mu_d_max);
  } while (s.mu_d > s.mu_s);
  s.restitution = rng.uniform(cfg.restitution_min, cfg.restitution_max);
  s.base_dx = rng.uniform(-cfg.base_pos_noise, cfg.base_pos_noise);
  s.base_dz = rng.uniform(-cfg.base_pos_noise, cfg.base_pos_noise);
  s.base_dpitch = rng.uniform(-cfg.base_rot_noise, cfg.base_rot_noise);
  for (int j = 0; j < num_joints; ++j)
    s.joint_offsets(j) = rng.uniform(-cfg.joint_noise, cfg.joint_noise);
  s.delay = rng.uniform(cfg.delay_min, cfg.delay_max);
  s.mass_scale = rng.uniform(cfg.mass_scale_min, cfg.mass_scale_max);
  s.inertia_scale = rng.uniform(cfg.inertia_scale_min, cfg.inertia_scale_max);
  return s;
}

void apply_randomization(const RandomizationSample& s, RobotModel* model,
                         WorldConfig* world) {
  for (auto& link : model->links) {
    link.mass *= s.mass_scale;
    link.inertia *= s.inertia_scale;
  }
  for (auto& j : model->joints) {
    j.kp *= s.kp_scale;
    j.kd *= s.kd_scale;
    j.dry_friction *= s.friction_scale;
    j.armature *= s.armature_scale;
  }
  world->mu_s = s.mu_s;
  world->mu_d = s.mu_d;
  world->restitution = s.restitution;
  // Restitution acts through contact damping: e = 0 is critical damping of
  // a reference mass against the contact spring.
  const double ref_mass = model->total_mass() / 10.0;
  world->contact_damping = std::min(
      damping_for_restitution(s.restitution, world->contact_stiffness, ref_mass),
      world->contact_damping);
}

NominalPose nominal_pose(PoseFamily family) {
  NominalPose p;
  p.joints = VecX::Zero(8);
  // Joint order: shoulder, elbow, hip_l, knee_l, ankle_l, hip_r, knee_r,
  // ankle_r. Positive hip swings the thigh forward, negative knee folds the
  // shin back.
  switch (family) {
    case PoseFamily::Standing:
      p.base_z = 0.945;
      break;
    case PoseFamily::Squatting:
      p.base_z = 0.60;
      p.joints << 0.3, -0.4, 0.9, -1.8, 0.9, 0.9, -1.8, 0.9;
      break;
    case PoseFamily::Kneeling:
      p.base_z = 0.48;
      p.joints << 0.2, -0.3, 0.1, -2.0, 0.5, 0.1, -2.0, 0.5;
      break;
    case PoseFamily::Sitting:
      p.base_z = 0.02;
      p.base_pitch = -0.4;
      p.joints << 1.0, -0.4, 1.97, 0.0, 0.9, 1.97, 0.0, 0.9;
      break;
    case PoseFamily::Supine:
      p.base_z = 0.12;
      p.base_pitch = -1.5707963267948966;
      p.joints << 0.2, -0.2, 0.1, -0.1, 0.0, 0.1, -0.1, 0.0;
      break;
  }
  return p;
}

SimState sample_initial_pose(const RobotModel& model, const WorldConfig& world,
                             PoseFamily family,
                             const RandomizationConfig& rand_cfg,
                             const EpisodeSettings& settings, Rng& rng,
                             VecX* hold_pose) {
  const NominalPose nominal = nominal_pose(family);
  const int nj = model.num_joints();
  const int settle_steps =
      static_cast<int>(std::round(settings.settle_time / world.dt_physics));

  for (int attempt = 0; attempt < settings.max_pose_tries; ++attempt) {
    SimState s = SimState::zero(model);
    VecX target = nominal.joints;
    s.q(1) = nominal.base_z;
    s.q(2) = nominal.base_pitch;
    if (rand_cfg.enabled) {
      s.q(0) += rng.uniform(-rand_cfg.base_pos_noise, rand_cfg.base_pos_noise);
      s.q(1) += rng.uniform(-rand_cfg.base_pos_noise, rand_cfg.base_pos_noise);
      s.q(2) += rng.uniform(-rand_cfg.base_rot_noise, rand_cfg.base_rot_noise);
      for (int j = 0; j < nj; ++j)
        target(j) += rng.uniform(-rand_cfg.joint_noise, rand_cfg.joint_noise);
    }
    for (int j = 0; j < nj; ++j)
      s.q(3 + j) =
          std::clamp(target(j), model.joints[j].lower, model.joints[j].upper);

    ActuatorCommand hold;
    hold.q_ref = target;
    bool ok = true;
    try {
      for (int i = 0; i < settle_steps; ++i)
        s = step(model, s, pd_torques(hold, s, model, 1.0), world);
    } catch (const SimFault&) {
      ok = false;
    }
    if (!ok || !s.finite()) continue;
    for (int j = 0; j < nj && ok; ++j)
      if (s.q(3 + j) < model.joints[j].lower - 1e-6 ||
          s.q(3 + j) > model.joints[j].upper + 1e-6)
        ok = false;
    if (!ok) continue;
    s.time = 0.0;
    if (hold_pose) *hold_pose = target;
    return s;
  }
  throw SimFault("no settled limit-consistent pose after max tries: " +
                 std::string(to_string(family)));
}

std::vector<PushSpec> schedule_pushes(const CurriculumState& curriculum,
                                      double mass_ratio, double horizon,
                                      Rng& rng) {
  std::vector<PushSpec> out;
  if (curriculum.stage == Stage::Exploration || curriculum.push_max <= 0.0)
    return out;
  const int count = rng.uniform_int(3);  // 0-2 standing-phase pushes
  for (int i = 0; i < count; ++i) {
    PushSpec p;
    p.start_time = rng.uniform(1.0, std::max(1.0, horizon - 1.0));
    p.duration = rng.uniform(0.1, 0.2);
    p.force = rng.uniform(curriculum.push_min, curriculum.push_max) * mass_ratio;
    p.height = rng.uniform(-0.2, 0.6);
    p.direction = rng.uniform() < 0.5 ? 1 : -1;
    out.push_back(p);
  }
  std::sort(out.begin(), out.end(),
            [](const PushSpec& a, const PushSpec& b) {
              return a.start_time < b.start_time;
            });
  return out;
}

std::optional<TerminationCause> check_termination(
    const std::vector<TickSample>& history, double torso_force,
    double torso_weight_share, const RewardConfig& reward,
    const EpisodeSettings& settings) {
  if (history.empty()) return std::nullopt;
  if (torso_force > settings.unsafe_force_factor * torso_weight_share)
    return TerminationCause::UnsafeTorsoContact;
  const TickSample& last = history.back();
  if (last.time >= settings.max_duration - 1e-9)
    return TerminationCause::Timeout;
  if (last.time >= settings.stuck_window &&
      last.h_c < reward.h_star - reward.delta_h) {
    // Latest sample at or before t - window.
    const double cutoff = last.time - settings.stuck_window;
    double ref = history.front().best_h;
    for (const auto& tick : history) {
      if (tick.time > cutoff + 1e-9) break;
      ref = tick.best_h;
    }
    if (last.best_h - ref < settings.stuck_epsilon)
      return TerminationCause::StuckLow;
  }
  return std::nullopt;
}

RecoveryStatus check_recovery(const std::vector<TickSample>& history,
                              const EpisodeSettings& settings) {
  RecoveryStatus out;
  bool in_run = false;
  double run_start = 0.0;
  for (const auto& tick : history) {
    const double tilt = std::abs(std::remainder(tick.pitch, 2.0 * M_PI));
    const bool ok = tick.h_c > settings.recovery_height &&
                    std::abs(tick.hd_c) < settings.recovery_max_speed &&
                    tilt < settings.recovery_max_tilt;
    if (!ok) {
      in_run = false;
      continue;
    }
    if (!in_run) {
      in_run = true;
      run_start = tick.time;
    }
    if (tick.time - run_start >= settings.recovery_window - 1e-9) {
      out.recovered = true;
      out.time = tick.time;
      return out;
    }
  }
  return out;
}

RecoveryEnv::RecoveryEnv(const RobotModel& model, const EnvConfig& cfg,
                         uint64_t seed)
    : base_model_(model), cfg_(cfg), rng_(seed) {
  cfg_.episode.validate();
  cfg_.curriculum.validate();
  cfg_.reward.validate();
  cfg_.world.validate();
  if (cfg_.families.empty()) throw ConfigError("no pose families enabled");
  curriculum_ = curriculum_at(cfg_.curriculum, 0, 1);
  reset();
}

void RecoveryEnv::reset() {
  reset(cfg_.families[rng_.uniform_int(
      static_cast<int>(cfg_.families.size()))]);
}

void RecoveryEnv::reset(PoseFamily family) {
  family_ = family;
  model_ = base_model_;
  world_ = cfg_.world;
  rand_ = sample_randomization(cfg_.randomization, base_model_.num_joints(),
                               rng_);
  apply_randomization(rand_, &model_, &world_);

  state_ = sample_initial_pose(model_, world_, family_, cfg_.randomization,
                               cfg_.episode, rng_, &hold_pose_);
  episode_start_ = state_.time;
  prev_action_ = VecX::Zero(model_.num_joints());
  delay_ = DelayBuffer(hold_pose_, rand_.delay);
  const double mass_ratio = model_.total_mass() / 50.0;
  pushes_ = schedule_pushes(curriculum_, mass_ratio, cfg_.episode.max_duration,
                            rng_);
  history_.clear();
  recovery_ = {};
  upright_seen_ = false;
  torso_weight_share_ = model_.links[0].mass * world_.gravity;
  have_prev_balance_ = false;

  // One probe step just to populate the contact set for the first snapshot.
  ContactState contacts;
  fallrec::step(model_, state_,
                pd_torques({hold_pose_, 0.0}, state_, model_,
                           curriculum_.torque_scale),
                world_, {}, &contacts);
  contacts_ = contacts;
  snapshot();
  history_.push_back({0.0, balance_.h_c, balance_.hd_c, state_.q(2),
                      balance_.h_c});
}

void RecoveryEnv::snapshot() {
  balance_ = balance_snapshot(model_, state_, contacts_,
                              have_prev_balance_ ? &prev_balance_ : nullptr,
                              world_);
}

void RecoveryEnv::maybe_induce_fall() {
  if (curriculum_.stage == Stage::Exploration || curriculum_.push_max <= 0.0)
    return;
  const bool upright = balance_.h_c > cfg_.episode.recovery_height &&
                       std::abs(balance_.hd_c) < 0.3;
  if (upright && !upright_seen_) {
    upright_seen_ = true;
    if (rng_.uniform() < cfg_.curriculum.fall_induction_prob) {
      PushSpec p;
      p.start_time = time_in_episode() + 0.1;
      p.duration = rng_.uniform(0.1, 0.2);
      p.force = curriculum_.push_max * cfg_.curriculum.fall_push_factor *
                (model_.total_mass() / 50.0);
      p.height = rng_.uniform(-0.2, 0.6);
      p.direction = rng_.uniform() < 0.5 ? 1 : -1;
      pushes_.push_back(p);
    }
  } else if (!upright && balance_.h_c < 0.6) {
    upright_seen_ = false;  // re-arm after an actual fall
  }
}

RecoveryEnv::StepResult RecoveryEnv::step(const VecX& action) {
  const int nj = model_.num_joints();
  VecX q_ref = hold_pose_ + cfg_.action_scale * action;
  for (int j = 0; j < nj; ++j) {
    const double lo = model_.joints[j].lower * curriculum_.position_factor;
    const double hi = model_.joints[j].upper * curriculum_.position_factor;
    q_ref(j) = std::clamp(q_ref(j), lo, hi);
  }
  delay_.push({q_ref, state_.time});

  VecX tau = VecX::Zero(nj);
  ContactState contacts;
  for (int i = 0; i < world_.control_decimation; ++i) {
    const ActuatorCommand cmd = delay_.effective(state_.time);
    tau = pd_torques(cmd, state_, model_, curriculum_.torque_scale);
    state_ = fallrec::step(model_, state_, tau, world_,
                           apply_push(pushes_, state_.time - episode_start_),
                           &contacts);
  }
  contacts_ = contacts;
  prev_balance_ = balance_;
  have_prev_balance_ = true;
  snapshot();
  maybe_induce_fall();

  double torso_force = 0.0;
  int hand_elbow = 0;
  for (size_t i = 0; i < contacts_.points.size(); ++i) {
    if (!contacts_.points[i].active) continue;
    const ContactLabel label = model_.contact_points[i].label;
    if (label == ContactLabel::Torso)
      torso_force = std::max(torso_force, contacts_.points[i].normal_force);
    if (label == ContactLabel::Hand || label == ContactLabel::Elbow)
      ++hand_elbow;
  }

  history_.push_back({time_in_episode(), balance_.h_c, balance_.hd_c,
                      state_.q(2),
                      std::max(history_.back().best_h, balance_.h_c)});
  const auto cause = check_termination(history_, torso_force,
                                       torso_weight_share_, cfg_.reward,
                                       cfg_.episode);

  StepResult out;
  out.cause = cause.value_or(TerminationCause::None);
  out.done = cause.has_value();

  Group3Inputs g3;
  g3.torques = tau;
  g3.torque_limits.resize(nj);
  for (int j = 0; j < nj; ++j) g3.torque_limits(j) = model_.joints[j].torque_limit;
  g3.action = action;
  g3.prev_action = prev_action_;
  g3.torso_pitch = state_.q(2);
  g3.active_hand_elbow_contacts = hand_elbow;
  g3.h_c = balance_.h_c;
  g3.unsafe_termination =
      out.cause == TerminationCause::UnsafeTorsoContact ||
      out.cause == TerminationCause::StuckLow;
  out.reward = total_reward(balance_, g3, cfg_.reward, cfg_.reduced_mode);

  if (!recovery_.recovered) recovery_ = check_recovery(history_, cfg_.episode);
  prev_action_ = action;
  return out;
}

VecX RecoveryEnv::actor_obs() {
  return assemble_observations(model_, state_, balance_, prev_action_,
                               hold_pose_, cfg_.noise, ObsMode::Actor, rng_);
}

VecX RecoveryEnv::critic_obs() const {
  Rng dummy(0);
  ObsNoiseConfig off;
  off.enabled = false;
  return assemble_observations(model_, state_, balance_, prev_action_,
                               hold_pose_, off,
                               cfg_.reduced_mode ? ObsMode::Actor
                                                 : ObsMode::Critic,
                               dummy);
}

int RecoveryEnv::actor_dim() const { return actor_obs_dim(base_model_); }

int RecoveryEnv::critic_dim() const {
  return actor_dim() + (cfg_.reduced_mode ? 0 : privileged_obs_dim());
}

EpisodeTrace run_episode(RecoveryEnv& env, const ActorCritic& policy,
                         PoseFamily family, bool stochastic,
                         const std::vector<PushSpec>* push_override) {
  EpisodeTrace trace;
  trace.family = family;
  try {
    env.reset(family);
    if (push_override) env.override_pushes(*push_override);
    while (true) {
      const VecX obs = env.actor_obs();
      VecX action;
      if (stochastic) {
        double lp;
        action = policy.sample(obs, env.rng(), &lp);
      } else {
        action = policy.action_mean(obs);
      }
      const RecoveryEnv::StepResult res = env.step(action);

      EpisodeTickRecord tick;
      tick.time = env.time_in_episode();
      tick.action = action;
      tick.reward = res.reward;
      tick.balance = env.balance();
      tick.pitch = env.state().q(2);
      const SupportHull feet = support_hull(env.model(), env.contacts(), true,
                                            1.0);
      if (!feet.empty()) {
        tick.support_valid = true;
        tick.support_min = feet.x_min();
        tick.support_max = feet.x_max();
      }
      trace.ticks.push_back(std::move(tick));
      trace.total_reward += res.reward.total;

      if (res.done) {
        trace.cause = res.cause;
        break;
      }
    }
    trace.duration = env.time_in_episode();
    trace.recovered = env.recovered();
    trace.recovery_time = env.recovery_time();
  } catch (const SimFault&) {
    trace.valid = false;
  }
  return trace;
}

MetricsReport aggregate_metrics(const std::vector<EpisodeTrace>& traces) {
  MetricsReport r;
  double recovery_time_sum = 0.0;
  int recovered = 0;
  for (const auto& t : traces) {
    if (!t.valid) continue;
    ++r.episodes;
    if (t.recovered) {
      ++recovered;
      recovery_time_sum += t.recovery_time;
    }
    switch (t.cause) {
      case TerminationCause::Timeout: r.timeout_rate += 1.0; break;
      case TerminationCause::StuckLow: r.stuck_low_rate += 1.0; break;
      case TerminationCause::UnsafeTorsoContact: r.unsafe_rate += 1.0; break;
      case TerminationCause::None: break;
    }
    r.mean_reward += t.total_reward;
    r.mean_length += t.duration;
  }
  if (r.episodes == 0) throw ConfigError("no valid traces to aggregate");
  const double n = r.episodes;
  r.recovery_rate = recovered / n;
  r.mean_recovery_time = recovered > 0 ? recovery_time_sum / recovered : 0.0;
  r.timeout_rate /= n;
  r.stuck_low_rate /= n;
  r.unsafe_rate /= n;
  r.mean_reward /= n;
  r.mean_length /= n;
  return r;
}

}  // namespace fallrec
