#include "fallrec/config.hpp"

#include <fstream>
#include <sstream>

#include "fallrec/observations.hpp"
#include "json.hpp"

namespace fallrec {

using nlohmann::json;

namespace {

// Pulls a field out of a section if present, erasing it so leftovers can be
// flagged as unknown keys.
template <typename T>
void take(json& j, const char* key, T* out) {
  auto it = j.find(key);
  if (it == j.end()) return;
  *out = it->get<T>();
  j.erase(it);
}

void finish_section(const json& j, const std::string& name) {
  if (!j.empty())
    throw ConfigError("unknown key in config section '" + name +
                      "': " + j.begin().key());
}

json world_to_json(const WorldConfig& w) {
  return {{"gravity", w.gravity},
          {"dt_physics", w.dt_physics},
          {"control_decimation", w.control_decimation},
          {"contact_stiffness", w.contact_stiffness},
          {"contact_damping", w.contact_damping},
          {"mu_s", w.mu_s},
          {"mu_d", w.mu_d},
          {"restitution", w.restitution},
          {"slip_vel", w.slip_vel},
          {"stribeck_vel", w.stribeck_vel},
          {"limit_stiffness", w.limit_stiffness},
          {"limit_damping", w.limit_damping}};
}

void world_from_json(json j, WorldConfig* w) {
  take(j, "gravity", &w->gravity);
  take(j, "dt_physics", &w->dt_physics);
  take(j, "control_decimation", &w->control_decimation);
  take(j, "contact_stiffness", &w->contact_stiffness);
  take(j, "contact_damping", &w->contact_damping);
  take(j, "mu_s", &w->mu_s);
  take(j, "mu_d", &w->mu_d);
  take(j, "restitution", &w->restitution);
  take(j, "slip_vel", &w->slip_vel);
  take(j, "stribeck_vel", &w->stribeck_vel);
  take(j, "limit_stiffness", &w->limit_stiffness);
  take(j, "limit_damping", &w->limit_damping);
  finish_section(j, "world");
}

json reward_to_json(const RewardConfig& r) {
  return {{"h_star", r.h_star},
          {"sigma_h", r.sigma_h},
          {"delta_h", r.delta_h},
          {"alpha_r", r.alpha_r},
          {"alpha_f", r.alpha_f},
          {"alpha_s", r.alpha_s},
          {"alpha_v", r.alpha_v},
          {"w_h", r.w_h},
          {"w_r", r.w_r},
          {"w_f", r.w_f},
          {"w_s", r.w_s},
          {"sigma_c", r.sigma_c},
          {"sigma_xi", r.sigma_xi},
          {"alpha_l", r.alpha_l},
          {"alpha_L", r.alpha_L},
          {"w_c", r.w_c},
          {"w_xi", r.w_xi},
          {"w_m", r.w_m},
          {"torque_weight", r.torque_weight},
          {"action_rate_weight", r.action_rate_weight},
          {"orient_weight", r.orient_weight},
          {"contact_gate_height", r.contact_gate_height},
          {"contact_bonus", r.contact_bonus},
          {"alive_bonus", r.alive_bonus},
          {"termination_penalty", r.termination_penalty}};
}

void reward_from_json(json j, RewardConfig* r) {
  take(j, "h_star", &r->h_star);
  take(j, "sigma_h", &r->sigma_h);
  take(j, "delta_h", &r->delta_h);
  take(j, "alpha_r", &r->alpha_r);
  take(j, "alpha_f", &r->alpha_f);
  take(j, "alpha_s", &r->alpha_s);
  take(j, "alpha_v", &r->alpha_v);
  take(j, "w_h", &r->w_h);
  take(j, "w_r", &r->w_r);
  take(j, "w_f", &r->w_f);
  take(j, "w_s", &r->w_s);
  take(j, "sigma_c", &r->sigma_c);
  take(j, "sigma_xi", &r->sigma_xi);
  take(j, "alpha_l", &r->alpha_l);
  take(j, "alpha_L", &r->alpha_L);
  take(j, "w_c", &r->w_c);
  take(j, "w_xi", &r->w_xi);
  take(j, "w_m", &r->w_m);
  take(j, "torque_weight", &r->torque_weight);
  take(j, "action_rate_weight", &r->action_rate_weight);
  take(j, "orient_weight", &r->orient_weight);
  take(j, "contact_gate_height", &r->contact_gate_height);
  take(j, "contact_bonus", &r->contact_bonus);
  take(j, "alive_bonus", &r->alive_bonus);
  take(j, "termination_penalty", &r->termination_penalty);
  finish_section(j, "reward");
}

json ppo_to_json(const PpoConfig& p) {
  return {{"clip_eps", p.clip_eps},
          {"gamma", p.gamma},
          {"gae_lambda", p.gae_lambda},
          {"learning_rate", p.learning_rate},
          {"target_kl", p.target_kl},
          {"entropy_coeff", p.entropy_coeff},
          {"value_coeff", p.value_coeff},
          {"rollout_steps", p.rollout_steps},
          {"num_envs", p.num_envs},
          {"minibatches", p.minibatches},
          {"epochs", p.epochs},
          {"iterations", p.iterations}};
}

void ppo_from_json(json j, PpoConfig* p) {
  take(j, "clip_eps", &p->clip_eps);
  take(j, "gamma", &p->gamma);
  take(j, "gae_lambda", &p->gae_lambda);
  take(j, "learning_rate", &p->learning_rate);
  take(j, "target_kl", &p->target_kl);
  take(j, "entropy_coeff", &p->entropy_coeff);
  take(j, "value_coeff", &p->value_coeff);
  take(j, "rollout_steps", &p->rollout_steps);
  take(j, "num_envs", &p->num_envs);
  take(j, "minibatches", &p->minibatches);
  take(j, "epochs", &p->epochs);
  take(j, "iterations", &p->iterations);
  finish_section(j, "ppo");
}

json policy_to_json(const PolicySpec& p) {
  return {{"actor_hidden", p.actor_hidden},
          {"critic_hidden", p.critic_hidden},
          {"init_action_std", p.init_action_std},
          {"action_scale", p.action_scale}};
}

void policy_from_json(json j, PolicySpec* p) {
  take(j, "actor_hidden", &p->actor_hidden);
  take(j, "critic_hidden", &p->critic_hidden);
  take(j, "init_action_std", &p->init_action_std);
  take(j, "action_scale", &p->action_scale);
  finish_section(j, "policy");
}

json noise_to_json(const ObsNoiseConfig& n) {
  return {{"enabled", n.enabled},
          {"ang_vel", n.ang_vel},
          {"gravity", n.gravity},
          {"joint_pos", n.joint_pos},
          {"joint_vel", n.joint_vel}};
}

void noise_from_json(json j, ObsNoiseConfig* n) {
  take(j, "enabled", &n->enabled);
  take(j, "ang_vel", &n->ang_vel);
  take(j, "gravity", &n->gravity);
  take(j, "joint_pos", &n->joint_pos);
  take(j, "joint_vel", &n->joint_vel);
  finish_section(j, "noise");
}

json episode_to_json(const EpisodeSettings& e) {
  return {{"max_duration", e.max_duration},
          {"settle_time", e.settle_time},
          {"max_pose_tries", e.max_pose_tries},
          {"stuck_window", e.stuck_window},
          {"stuck_epsilon", e.stuck_epsilon},
          {"unsafe_force_factor", e.unsafe_force_factor},
          {"recovery_height", e.recovery_height},
          {"recovery_window", e.recovery_window},
          {"recovery_max_speed", e.recovery_max_speed},
          {"recovery_max_tilt", e.recovery_max_tilt}};
}

void episode_from_json(json j, EpisodeSettings* e) {
  take(j, "max_duration", &e->max_duration);
  take(j, "settle_time", &e->settle_time);
  take(j, "max_pose_tries", &e->max_pose_tries);
  take(j, "stuck_window", &e->stuck_window);
  take(j, "stuck_epsilon", &e->stuck_epsilon);
  take(j, "unsafe_force_factor", &e->unsafe_force_factor);
  take(j, "recovery_height", &e->recovery_height);
  take(j, "recovery_window", &e->recovery_window);
  take(j, "recovery_max_speed", &e->recovery_max_speed);
  take(j, "recovery_max_tilt", &e->recovery_max_tilt);
  finish_section(j, "episode");
}

json curriculum_to_json(const CurriculumConfig& c) {
  return {{"enabled", c.enabled},
          {"exploration_frac", c.exploration_frac},
          {"expansion_frac", c.expansion_frac},
          {"torque_scale_start", c.torque_scale_start},
          {"torque_scale_end", c.torque_scale_end},
          {"position_factor_start", c.position_factor_start},
          {"position_factor_end", c.position_factor_end},
          {"push_min", c.push_min},
          {"push_max", c.push_max},
          {"fall_push_factor", c.fall_push_factor},
          {"fall_induction_prob", c.fall_induction_prob}};
}

void curriculum_from_json(json j, CurriculumConfig* c) {
  take(j, "enabled", &c->enabled);
  take(j, "exploration_frac", &c->exploration_frac);
  take(j, "expansion_frac", &c->expansion_frac);
  take(j, "torque_scale_start", &c->torque_scale_start);
  take(j, "torque_scale_end", &c->torque_scale_end);
  take(j, "position_factor_start", &c->position_factor_start);
  take(j, "position_factor_end", &c->position_factor_end);
  take(j, "push_min", &c->push_min);
  take(j, "push_max", &c->push_max);
  take(j, "fall_push_factor", &c->fall_push_factor);
  take(j, "fall_induction_prob", &c->fall_induction_prob);
  finish_section(j, "curriculum");
}

json randomization_to_json(const RandomizationConfig& r) {
  return {{"enabled", r.enabled},
          {"gain_scale_min", r.gain_scale_min},
          {"gain_scale_max", r.gain_scale_max},
          {"friction_min", r.friction_min},
          {"friction_max", r.friction_max},
          {"armature_min", r.armature_min},
          {"armature_max", r.armature_max},
          {"mu_s_min", r.mu_s_min},
          {"mu_s_max", r.mu_s_max},
          {"mu_d_min", r.mu_d_min},
          {"mu_d_max", r.mu_d_max},
          {"restitution_min", r.restitution_min},
          {"restitution_max", r.restitution_max},
          {"base_pos_noise", r.base_pos_noise},
          {"base_rot_noise", r.base_rot_noise},
          {"joint_noise", r.joint_noise},
          {"delay_min", r.delay_min},
          {"delay_max", r.delay_max},
          {"mass_scale_min", r.mass_scale_min},
          {"mass_scale_max", r.mass_scale_max},
          {"inertia_scale_min", r.inertia_scale_min},
          {"inertia_scale_max", r.inertia_scale_max}};
}

void randomization_from_json(json j, RandomizationConfig* r) {
  take(j, "enabled", &r->enabled);
  take(j, "gain_scale_min", &r->gain_scale_min);
  take(j, "gain_scale_max", &r->gain_scale_max);
  take(j, "friction_min", &r->friction_min);
  take(j, "friction_max", &r->friction_max);
  take(j, "armature_min", &r->armature_min);
  take(j, "armature_max", &r->armature_max);
  take(j, "mu_s_min", &r->mu_s_min);
  take(j, "mu_s_max", &r->mu_s_max);
  take(j, "mu_d_min", &r->mu_d_min);
  take(j, "mu_d_max", &r->mu_d_max);
  take(j, "restitution_min", &r->restitution_min);
  take(j, "restitution_max", &r->restitution_max);
  take(j, "base_pos_noise", &r->base_pos_noise);
  take(j, "base_rot_noise", &r->base_rot_noise);
  take(j, "joint_noise", &r->joint_noise);
  take(j, "delay_min", &r->delay_min);
  take(j, "delay_max", &r->delay_max);
  take(j, "mass_scale_min", &r->mass_scale_min);
  take(j, "mass_scale_max", &r->mass_scale_max);
  take(j, "inertia_scale_min", &r->inertia_scale_min);
  take(j, "inertia_scale_max", &r->inertia_scale_max);
  finish_section(j, "randomization");
}

}  // namespace

RobotModel ExperimentConfig::make_model() const {
  if (model_name != "planar_biped")
    throw ConfigError("unknown model: " + model_name);
  return default_biped();
}

EnvConfig ExperimentConfig::env_config(bool reduced_mode) const {
  EnvConfig e;
  e.episode = episode;
  e.curriculum = curriculum;
  e.randomization = randomization;
  e.reward = reward;
  e.noise = noise;
  e.world = world;
  e.action_scale = action_scale;
  e.reduced_mode = reduced_mode;
  e.families = families;
  if (reduced_mode) e.curriculum.enabled = false;
  return e;
}

PolicySpec ExperimentConfig::resolved_policy(bool reduced_mode) const {
  const RobotModel model = make_model();
  PolicySpec spec = policy;
  spec.actor_input_dim = actor_obs_dim(model);
  spec.critic_input_dim =
      spec.actor_input_dim + (reduced_mode ? 0 : privileged_obs_dim());
  spec.action_dim = model.num_joints();
  spec.action_scale = action_scale;
  spec.validate();
  return spec;
}

void ExperimentConfig::validate() const {
  world.validate();
  reward.validate();
  ppo.validate();
  episode.validate();
  curriculum.validate();
  make_model();
  if (families.empty()) throw ConfigError("families must not be empty");
  if (!(action_scale > 0.0)) throw ConfigError("action_scale must be > 0");
}

ExperimentConfig default_config() { return ExperimentConfig{}; }

std::string config_to_json(const ExperimentConfig& cfg) {
  json j;
  j["model"] = {{"name", cfg.model_name}};
  j["world"] = world_to_json(cfg.world);
  j["reward"] = reward_to_json(cfg.reward);
  j["ppo"] = ppo_to_json(cfg.ppo);
  j["policy"] = policy_to_json(cfg.policy);
  j["noise"] = noise_to_json(cfg.noise);
  j["episode"] = episode_to_json(cfg.episode);
  j["curriculum"] = curriculum_to_json(cfg.curriculum);
  j["randomization"] = randomization_to_json(cfg.randomization);
  j["action_scale"] = cfg.action_scale;
  std::vector<std::string> fam;
  for (PoseFamily f : cfg.families) fam.push_back(to_string(f));
  j["families"] = fam;
  return j.dump(2);
}

ExperimentConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  ExperimentConfig cfg;
  try {
    if (j.contains("model")) {
      json m = j["model"];
      take(m, "name", &cfg.model_name);
      finish_section(m, "model");
      j.erase("model");
    }
    if (j.contains("world")) { world_from_json(j["world"], &cfg.world); j.erase("world"); }
    if (j.contains("reward")) { reward_from_json(j["reward"], &cfg.reward); j.erase("reward"); }
    if (j.contains("ppo")) { ppo_from_json(j["ppo"], &cfg.ppo); j.erase("ppo"); }
    if (j.contains("policy")) { policy_from_json(j["policy"], &cfg.policy); j.erase("policy"); }
    if (j.contains("noise")) { noise_from_json(j["noise"], &cfg.noise); j.erase("noise"); }
    if (j.contains("episode")) { episode_from_json(j["episode"], &cfg.episode); j.erase("episode"); }
    if (j.contains("curriculum")) { curriculum_from_json(j["curriculum"], &cfg.curriculum); j.erase("curriculum"); }
    if (j.contains("randomization")) { randomization_from_json(j["randomization"], &cfg.randomization); j.erase("randomization"); }
    take(j, "action_scale", &cfg.action_scale);
    if (j.contains("families")) {
      cfg.families.clear();
      for (const auto& f : j["families"])
        cfg.families.push_back(pose_family_from_string(f.get<std::string>()));
      j.erase("families");
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config value: ") + e.what());
  }
  finish_section(j, "(top level)");
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return config_from_json(ss.str());
}

void save_config(const ExperimentConfig& cfg, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot write config file: " + path);
  f << config_to_json(cfg) << "\n";
}

uint64_t config_hash(const ExperimentConfig& cfg) {
  return fnv1a(config_to_json(cfg));
}

}  // namespace fallrec
