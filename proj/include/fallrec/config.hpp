#pragma once

#include <string>

#include "fallrec/env.hpp"
#include "fallrec/ppo.hpp"

namespace fallrec {

// Everything an experiment needs, round-trippable through JSON. Unknown keys
// are rejected so typos fail loudly.
struct ExperimentConfig {
  std::string model_name = "planar_biped";  // only supported model
  WorldConfig world;
  RewardConfig reward;
  PpoConfig ppo;
  PolicySpec policy;  // input dims filled in from the model at load time
  ObsNoiseConfig noise;
  EpisodeSettings episode;
  CurriculumConfig curriculum;
  RandomizationConfig randomization;
  double action_scale = 0.3;
  std::vector<PoseFamily> families = {
      PoseFamily::Standing, PoseFamily::Squatting, PoseFamily::Kneeling,
      PoseFamily::Sitting, PoseFamily::Supine};

  RobotModel make_model() const;
  EnvConfig env_config(bool reduced_mode) const;
  // Policy spec with observation dims resolved for the given mode.
  PolicySpec resolved_policy(bool reduced_mode) const;

  void validate() const;
};

ExperimentConfig default_config();

std::string config_to_json(const ExperimentConfig& cfg);
ExperimentConfig config_from_json(const std::string& text);
ExperimentConfig load_config(const std::string& path);
void save_config(const ExperimentConfig& cfg, const std::string& path);

// FNV-1a over the canonical serialized form; used to tie checkpoints to the
// config they were trained under.
uint64_t config_hash(const ExperimentConfig& cfg);

}  // namespace fallrec
