#pragma once

#include <optional>

#include "fallrec/balance.hpp"
#include "fallrec/dynamics.hpp"
#include "fallrec/observations.hpp"
#include "fallrec/reward.hpp"
#include "fallrec/rng.hpp"

namespace fallrec {

enum class PoseFamily { Standing, Squatting, Kneeling, Sitting, Supine };
enum class Stage { Exploration, Expansion, Annealing };
enum class TerminationCause { None, Timeout, StuckLow, UnsafeTorsoContact };

const char* to_string(PoseFamily f);
const char* to_string(Stage s);
const char* to_string(TerminationCause c);
PoseFamily pose_family_from_string(const std::string& s);

// Three training stages by iteration fraction; inside the last stage the
// torque scale and position-limit factor anneal linearly down to their
// hardware-safe values.
struct CurriculumConfig {
  bool enabled = true;
  double exploration_frac = 0.2;
  double expansion_frac = 0.5;  // annealing takes the remainder
  double torque_scale_start = 10.0;
  double torque_scale_end = 1.0;
  double position_factor_start = 1.0;
  double position_factor_end = 0.9;
  double push_min = 50.0;   // N, at reference mass
  double push_max = 300.0;
  double fall_push_factor = 1.5;     // fall-induction impulse multiplier
  double fall_induction_prob = 0.5;  // per detected upright stance

  void validate() const;
};

struct CurriculumState {
  Stage stage = Stage::Exploration;
  double torque_scale = 10.0;
  double position_factor = 1.0;
  double push_min = 0.0;  // zero until pushes unlock
  double push_max = 0.0;
  int iteration = 0;
};

// Pure function of (config, iteration/total); disabled curriculum pins the
// hardware-safe endpoint values with no pushes.
CurriculumState curriculum_at(const CurriculumConfig& cfg, int iteration,
                              int total_iterations);

struct RandomizationConfig {
  bool enabled = true;
  double gain_scale_min = 0.75, gain_scale_max = 1.25;  // PD kp/kd
  double friction_min = 0.5, friction_max = 4.0;        // joint dry friction, x nominal
  double armature_min = 0.5, armature_max = 1.6;
  double mu_s_min = 0.3, mu_s_max = 1.6;
  double mu_d_min = 0.3, mu_d_max = 1.2;
  double restitution_min = 0.0, restitution_max = 0.2;
  double base_pos_noise = 0.05;   // m
  double base_rot_noise = 0.2;    // rad
  double joint_noise = 0.1;       // rad
  double delay_min = 0.010, delay_max = 0.040;  // s
  double mass_scale_min = 0.9, mass_scale_max = 1.1;
  double inertia_scale_min = 0.9, inertia_scale_max = 1.1;
};

struct RandomizationSample {
  double kp_scale = 1.0, kd_scale = 1.0;
  double friction_scale = 1.0;
  double armature_scale = 1.0;
  double mu_s = 1.0, mu_d = 0.8;
  double restitution = 0.0;
  double base_dx = 0.0, base_dz = 0.0, base_dpitch = 0.0;
  VecX joint_offsets;  // rad, one per joint
  double delay = 0.0;  // s
  double mass_scale = 1.0, inertia_scale = 1.0;
};

// mu_d <= mu_s enforced by resampling the pair.
RandomizationSample sample_randomization(const RandomizationConfig& cfg,
                                         int num_joints, Rng& rng);

void apply_randomization(const RandomizationSample& s, RobotModel* model,
                         WorldConfig* world);

struct EpisodeSettings {
  double max_duration = 20.0;  // s
  double settle_time = 0.2;    // s before the policy engages
  int max_pose_tries = 10;

  double stuck_window = 2.0;     // s
  double stuck_epsilon = 0.01;   // m of best-height gain required
  double unsafe_force_factor = 5.0;  // x torso static weight share

  double recovery_height = 0.85;     // m (x standing CoM height / 1 m)
  double recovery_window = 1.0;      // s
  double recovery_max_speed = 0.1;   // m/s vertical
  double recovery_max_tilt = 1.2566370614359172;  // 72 deg

  void validate() const;
};

// Hand-authored nominal joint vector per family plus base pose (x is always
// 0); settled in-sim before use.
struct NominalPose {
  double base_z = 0.0;
  double base_pitch = 0.0;
  VecX joints;
};
NominalPose nominal_pose(PoseFamily family);

// Nominal pose + uniform joint/base noise (drawn internally so retries get
// fresh draws), settled with PD hold for settle_time. Resamples when the
// settled pose violates the joint limits; throws SimFault after
// max_pose_tries.
SimState sample_initial_pose(const RobotModel& model, const WorldConfig& world,
                             PoseFamily family,
                             const RandomizationConfig& rand_cfg,
                             const EpisodeSettings& settings, Rng& rng,
                             VecX* hold_pose = nullptr);

// Standing-phase push schedule for one episode. Empty during exploration.
std::vector<PushSpec> schedule_pushes(const CurriculumState& curriculum,
                                      double mass_ratio, double horizon,
                                      Rng& rng);

// One history row per control tick, oldest first.
struct TickSample {
  double time = 0.0;
  double h_c = 0.0;
  double hd_c = 0.0;
  double pitch = 0.0;
  double best_h = 0.0;  // running max of h_c
};

std::optional<TerminationCause> check_termination(
    const std::vector<TickSample>& history, double torso_force,
    double torso_weight_share, const RewardConfig& reward,
    const EpisodeSettings& settings);

// Recovered iff the height/speed/tilt conditions held continuously for the
// trailing window; returns the completion time of the first such window.
struct RecoveryStatus {
  bool recovered = false;
  double time = 0.0;
};
RecoveryStatus check_recovery(const std::vector<TickSample>& history,
                              const EpisodeSettings& settings);

struct EnvConfig {
  EpisodeSettings episode;
  CurriculumConfig curriculum;
  RandomizationConfig randomization;
  RewardConfig reward;
  ObsNoiseConfig noise;
  WorldConfig world;
  double action_scale = 0.3;
  bool reduced_mode = false;  // no privileged critic obs, no support-distance
                              // rewards, curriculum pinned at the endpoint
  std::vector<PoseFamily> families = {
      PoseFamily::Standing, PoseFamily::Squatting, PoseFamily::Kneeling,
      PoseFamily::Sitting, PoseFamily::Supine};
};

// One self-contained episode rollout machine: owns its RNG stream, the
// randomized model/world, the delay buffer and the tick history.
class RecoveryEnv {
 public:
  RecoveryEnv(const RobotModel& model, const EnvConfig& cfg, uint64_t seed);

  void set_curriculum(const CurriculumState& c) { curriculum_ = c; }
  const CurriculumState& curriculum() const { return curriculum_; }

  // Starts a new episode; optional fixed family override.
  void reset();
  void reset(PoseFamily family);

  struct StepResult {
    RewardBreakdown reward;
    bool done = false;
    TerminationCause cause = TerminationCause::None;
  };
  StepResult step(const VecX& action);

  VecX actor_obs();  // draws observation noise from the env RNG
  VecX critic_obs() const;
  int actor_dim() const;
  int critic_dim() const;

  const SimState& state() const { return state_; }
  const BalanceState& balance() const { return balance_; }
  const ContactState& contacts() const { return contacts_; }
  const RobotModel& model() const { return model_; }
  PoseFamily family() const { return family_; }
  double time_in_episode() const { return state_.time - episode_start_; }
  const std::vector<TickSample>& history() const { return history_; }
  bool recovered() const { return recovery_.recovered; }
  double recovery_time() const { return recovery_.time; }
  const std::vector<PushSpec>& pushes() const { return pushes_; }
  // Replaces the scheduled pushes (call after reset); used for sweep cells
  // and scripted traces where the push is part of the experiment grid.
  void override_pushes(std::vector<PushSpec> p) { pushes_ = std::move(p); }
  Rng& rng() { return rng_; }

 private:
  void snapshot();  // refresh balance_/contacts_ after stepping
  void maybe_induce_fall();

  RobotModel base_model_;
  EnvConfig cfg_;
  Rng rng_;

  RobotModel model_;        // randomized per episode
  WorldConfig world_;       // randomized per episode
  RandomizationSample rand_;
  CurriculumState curriculum_;
  PoseFamily family_ = PoseFamily::Standing;

  SimState state_;
  ContactState contacts_;
  BalanceState balance_;
  bool have_prev_balance_ = false;
  BalanceState prev_balance_;

  VecX hold_pose_;     // settled nominal joints; obs + action reference
  VecX prev_action_;
  DelayBuffer delay_;
  std::vector<PushSpec> pushes_;
  std::vector<TickSample> history_;
  RecoveryStatus recovery_;
  bool upright_seen_ = false;
  double episode_start_ = 0.0;
  double torso_weight_share_ = 0.0;
};

struct EpisodeTickRecord {
  double time = 0.0;
  VecX action;
  RewardBreakdown reward;
  BalanceState balance;
  double pitch = 0.0;
  double support_min = 0.0, support_max = 0.0;  // feet support interval
  bool support_valid = false;
};

struct EpisodeTrace {
  PoseFamily family = PoseFamily::Standing;
  std::vector<EpisodeTickRecord> ticks;
  TerminationCause cause = TerminationCause::None;
  bool recovered = false;
  double recovery_time = 0.0;
  double total_reward = 0.0;
  double duration = 0.0;
  bool valid = true;
};

// Deterministic-policy episode: action = mean. Throws nothing; simulator
// faults mark the trace invalid instead.
EpisodeTrace run_episode(RecoveryEnv& env, const ActorCritic& policy,
                         PoseFamily family, bool stochastic = false,
                         const std::vector<PushSpec>* push_override = nullptr);

struct MetricsReport {
  int episodes = 0;
  double recovery_rate = 0.0;
  double mean_recovery_time = 0.0;  // over recovered episodes
  double timeout_rate = 0.0;
  double stuck_low_rate = 0.0;
  double unsafe_rate = 0.0;
  double mean_reward = 0.0;
  double mean_length = 0.0;  // s
};

// Throws ConfigError on an empty (or all-invalid) input set.
MetricsReport aggregate_metrics(const std::vector<EpisodeTrace>& traces);

}  // namespace fallrec
