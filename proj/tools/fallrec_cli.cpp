#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fallrec/checkpoint.hpp"
#include "fallrec/config.hpp"
#include "fallrec/csv.hpp"
#include "fallrec/svg.hpp"
#include "fallrec/trainer.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace fallrec;

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  std::string checkpoint_path;
  uint64_t seed = 0;
  std::string mode = "full";
  int iters = -1;
  int envs = -1;
  int episodes = -1;
};

void add_common(CLI::App* cmd, CommonOpts* o, bool needs_checkpoint) {
  cmd->add_option("--config", o->config_path, "experiment config JSON");
  cmd->add_option("--out", o->out_dir, "output directory")->required();
  cmd->add_option("--seed", o->seed, "master RNG seed");
  cmd->add_option("--mode", o->mode, "full|reduced")
      ->check(CLI::IsMember({"full", "reduced"}));
  auto* ck = cmd->add_option("--checkpoint", o->checkpoint_path,
                             "checkpoint file");
  if (needs_checkpoint) ck->required();
  cmd->add_option("--iters", o->iters, "training iterations override");
  cmd->add_option("--envs", o->envs, "parallel env count override");
  cmd->add_option("--episodes", o->episodes, "evaluation episodes");
}

ExperimentConfig load_or_default(const CommonOpts& o) {
  ExperimentConfig cfg =
      o.config_path.empty() ? default_config() : load_config(o.config_path);
  if (o.iters >= 0) cfg.ppo.iterations = o.iters;
  if (o.envs >= 0) cfg.ppo.num_envs = o.envs;
  cfg.validate();
  return cfg;
}

void ensure_out(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir))
    throw ConfigError("output directory not writable: " + dir);
}

const std::vector<std::string> kStatsHeader = {
    "iteration",     "mean_step_reward", "mean_episode_length",
    "episodes",      "recovered",        "timeouts",
    "stuck_low",     "unsafe",           "approx_kl",
    "clip_fraction", "actor_loss",       "value_loss",
    "entropy",       "torque_scale",     "stage"};

void write_stats_row(CsvWriter& csv, const IterationStats& s) {
  csv.row(std::vector<std::string>{
      format_cell(s.iteration), format_cell(s.mean_step_reward),
      format_cell(s.mean_episode_length), format_cell(s.episodes_finished),
      format_cell(s.recovered), format_cell(s.timeouts),
      format_cell(s.stuck_low), format_cell(s.unsafe),
      format_cell(s.approx_kl), format_cell(s.clip_fraction),
      format_cell(s.actor_loss), format_cell(s.value_loss),
      format_cell(s.entropy), format_cell(s.torque_scale),
      to_string(s.stage)});
}

void check_finite(const IterationStats& s) {
  if (!std::isfinite(s.mean_step_reward) || !std::isfinite(s.actor_loss) ||
      !std::isfinite(s.value_loss) || !std::isfinite(s.approx_kl))
    throw std::runtime_error("non-finite training statistics at iteration " +
                             std::to_string(s.iteration));
}

json report_to_json(const MetricsReport& r) {
  return json{{"episodes", r.episodes},
              {"recovery_rate", r.recovery_rate},
              {"mean_recovery_time", r.mean_recovery_time},
              {"timeout_rate", r.timeout_rate},
              {"stuck_low_rate", r.stuck_low_rate},
              {"unsafe_rate", r.unsafe_rate},
              {"mean_reward", r.mean_reward},
              {"mean_length", r.mean_length}};
}

const std::vector<std::string> kReportHeader = {
    "family",          "episodes",       "recovery_rate",
    "mean_recovery_time", "timeout_rate", "stuck_low_rate",
    "unsafe_rate",     "mean_reward",    "mean_length"};

void write_report_row(CsvWriter& csv, const std::string& label,
                      const MetricsReport& r) {
  csv.row(std::vector<std::string>{
      label, format_cell(r.episodes), format_cell(r.recovery_rate),
      format_cell(r.mean_recovery_time), format_cell(r.timeout_rate),
      format_cell(r.stuck_low_rate), format_cell(r.unsafe_rate),
      format_cell(r.mean_reward), format_cell(r.mean_length)});
}

// Per-family rows followed by an aggregate row; returns the aggregate.
MetricsReport write_report_csv(const std::string& path,
                               const std::vector<EpisodeTrace>& traces,
                               const std::vector<PoseFamily>& families,
                               uint64_t hash) {
  CsvWriter csv(path, kReportHeader, hash);
  for (PoseFamily f : families) {
    std::vector<EpisodeTrace> sub;
    for (const auto& t : traces)
      if (t.family == f) sub.push_back(t);
    if (!sub.empty()) write_report_row(csv, to_string(f), aggregate_metrics(sub));
  }
  const MetricsReport all = aggregate_metrics(traces);
  write_report_row(csv, "all", all);
  return all;
}

int run_training(Trainer& trainer, const ExperimentConfig& cfg, CsvWriter& csv,
                 const std::string& out_dir, const std::string& tag) {
  const uint64_t hash = config_hash(cfg);
  const int total = cfg.ppo.iterations;
  const int every = std::max(1, total / 10);
  while (trainer.iteration() < total) {
    const IterationStats s = trainer.iterate();
    check_finite(s);
    write_stats_row(csv, s);
    if (trainer.iteration() % every == 0 && trainer.iteration() < total) {
      save_checkpoint(out_dir + "/" + tag + "checkpoint_iter_" +
                          std::to_string(trainer.iteration()) + ".bin",
                      trainer.make_checkpoint(hash));
    }
  }
  csv.flush();
  save_checkpoint(out_dir + "/" + tag + "final.bin",
                  trainer.make_checkpoint(hash));
  return total;
}

int cmd_train(const CommonOpts& o) {
  const ExperimentConfig cfg = load_or_default(o);
  const bool reduced = o.mode == "reduced";
  const uint64_t hash = config_hash(cfg);
  ensure_out(o.out_dir);
  save_config(cfg, o.out_dir + "/config.json");

  Trainer trainer(cfg, reduced, o.seed);
  bool resumed = false;
  if (!o.checkpoint_path.empty()) {
    // Tolerant load: resuming with a longer horizon (different --iters)
    // legitimately changes the config hash.
    trainer.restore(load_checkpoint(o.checkpoint_path, 0));
    resumed = true;
  }
  const PolicySpec spec = cfg.resolved_policy(reduced);
  std::cout << "mode=" << o.mode << " actor_dim=" << spec.actor_input_dim
            << " critic_dim=" << spec.critic_input_dim
            << " start_iteration=" << trainer.iteration()
            << " iterations=" << cfg.ppo.iterations << "\n";

  CsvWriter csv(o.out_dir + "/train_stats.csv", kStatsHeader, hash, resumed);
  run_training(trainer, cfg, csv, o.out_dir, "");

  const int eval_episodes = o.episodes > 0 ? o.episodes : 5;
  const auto traces = trainer.evaluate(eval_episodes, o.seed + 1);
  const MetricsReport all = write_report_csv(
      o.out_dir + "/final_metrics.csv", traces, cfg.families, hash);
  std::cout << report_to_json(all).dump() << "\n";
  return 0;
}

int cmd_eval(const CommonOpts& o) {
  const ExperimentConfig cfg = load_or_default(o);
  const bool reduced = o.mode == "reduced";
  const uint64_t hash = config_hash(cfg);
  const int episodes = o.episodes > 0 ? o.episodes : 20;
  if (o.episodes == 0) throw ConfigError("--episodes must be at least 1");
  ensure_out(o.out_dir);

  Trainer trainer(cfg, reduced, o.seed);
  trainer.restore(load_checkpoint(o.checkpoint_path, hash));
  const auto traces = trainer.evaluate(episodes, o.seed);
  const MetricsReport all = write_report_csv(o.out_dir + "/eval_report.csv",
                                             traces, cfg.families, hash);
  std::cout << report_to_json(all).dump() << "\n";
  return 0;
}

ActorCritic load_policy(const ExperimentConfig& cfg, bool reduced,
                        const std::string& ckpt_path, uint64_t hash) {
  PpoLearner learner(cfg.resolved_policy(reduced), cfg.ppo, 0);
  Rng dummy(0);
  restore_learner(load_checkpoint(ckpt_path, hash), &learner, &dummy);
  return learner.policy();
}

int cmd_sweep(const CommonOpts& o) {
  const ExperimentConfig cfg = load_or_default(o);
  const bool reduced = o.mode == "reduced";
  const uint64_t hash = config_hash(cfg);
  const int episodes = o.episodes > 0 ? o.episodes : 5;
  if (o.episodes == 0) throw ConfigError("--episodes must be at least 1");
  ensure_out(o.out_dir);

  const ActorCritic policy = load_policy(cfg, reduced, o.checkpoint_path, hash);
  const RobotModel model = cfg.make_model();
  EnvConfig env_cfg = cfg.env_config(reduced);
  env_cfg.curriculum.enabled = false;
  const double mass_ratio = model.total_mass() / 50.0;

  const std::vector<double> forces = {0, 50, 100, 200, 300, 500};
  const std::vector<int> directions = {+1, -1};
  const std::vector<double> heights = {-0.2, 0.0, 0.2, 0.6};

  CsvWriter csv(o.out_dir + "/sweep.csv",
                {"pose", "force", "direction", "height", "episodes",
                 "recovered", "recovery_rate", "mean_recovery_time",
                 "ci_halfwidth", "rate_increase_flag"},
                hash);

  // prev rate per (pose, dir, height) at the previous (lower) force, so the
  // monotonicity column can flag cells whose rate rises beyond sampling CI.
  std::map<std::string, std::pair<double, double>> prev;  // rate, ci
  int cell = 0;
  for (PoseFamily family : cfg.families) {
    for (double height : heights) {
      for (int dir : directions) {
        for (double force : forces) {
          const uint64_t cell_seed =
              o.seed ^ fnv1a(std::string(to_string(family)) + "/" +
                             format_cell(force) + "/" + std::to_string(dir) +
                             "/" + format_cell(height));
          RecoveryEnv env(model, env_cfg, cell_seed);
          std::vector<PushSpec> pushes;
          if (force > 0.0)
            pushes.push_back({1.0, 0.1, force * mass_ratio, height, dir});
          std::vector<EpisodeTrace> traces;
          for (int i = 0; i < episodes; ++i)
            traces.push_back(
                run_episode(env, policy, family, false, &pushes));
          const MetricsReport r = aggregate_metrics(traces);
          const double ci =
              1.96 * std::sqrt(std::max(
                         r.recovery_rate * (1.0 - r.recovery_rate), 1e-12) /
                     r.episodes);
          const std::string key = std::string(to_string(family)) + "/" +
                                  std::to_string(dir) + "/" +
                                  format_cell(height);
          double flag = 0.0;
          if (auto it = prev.find(key); it != prev.end()) {
            const auto [prate, pci] = it->second;
            if (r.recovery_rate > prate + ci + pci) flag = 1.0;
          }
          prev[key] = {r.recovery_rate, ci};
          csv.row(std::vector<std::string>{
              to_string(family), format_cell(force), std::to_string(dir),
              format_cell(height), format_cell(r.episodes),
              format_cell(r.recovery_rate * r.episodes),
              format_cell(r.recovery_rate), format_cell(r.mean_recovery_time),
              format_cell(ci), format_cell(flag)});
          ++cell;
        }
      }
    }
  }
  std::cout << json{{"cells", cell}, {"episodes_per_cell", episodes}}.dump()
            << "\n";
  return 0;
}

int cmd_trace(const CommonOpts& o, const std::string& family_name,
              double push_force, double push_height, double push_time,
              int push_dir) {
  const ExperimentConfig cfg = load_or_default(o);
  const bool reduced = o.mode == "reduced";
  const uint64_t hash = config_hash(cfg);
  ensure_out(o.out_dir);

  const ActorCritic policy = load_policy(cfg, reduced, o.checkpoint_path, hash);
  const RobotModel model = cfg.make_model();
  EnvConfig env_cfg = cfg.env_config(reduced);
  env_cfg.curriculum.enabled = false;
  RecoveryEnv env(model, env_cfg, o.seed);

  const PoseFamily family = pose_family_from_string(family_name);
  std::vector<PushSpec> pushes;
  if (push_force > 0.0)
    pushes.push_back({push_time, 0.1, push_force * model.total_mass() / 50.0,
                      push_height, push_dir});
  const EpisodeTrace trace = run_episode(env, policy, family, false, &pushes);
  if (!trace.valid) throw std::runtime_error("simulation fault during trace");

  CsvWriter csv(o.out_dir + "/trace.csv",
                {"time", "com_x", "com_z", "v_c_x", "v_c_z", "h_c",
                 "capture_point", "d_com", "d_cp", "support_min",
                 "support_max", "support_valid", "pitch", "reward"},
                hash);
  for (const auto& tick : trace.ticks) {
    csv.row(std::vector<double>{
        tick.time, tick.balance.p_c(0), tick.balance.p_c(1),
        tick.balance.v_c(0), tick.balance.v_c(1), tick.balance.h_c,
        tick.balance.xi_defined ? tick.balance.xi
                                : std::numeric_limits<double>::quiet_NaN(),
        tick.balance.d_com, tick.balance.d_cp, tick.support_min,
        tick.support_max, tick.support_valid ? 1.0 : 0.0, tick.pitch,
        tick.reward.total});
  }
  write_trace_svg(o.out_dir + "/trace.svg", trace);

  std::cout << json{{"family", to_string(trace.family)},
                    {"cause", to_string(trace.cause)},
                    {"recovered", trace.recovered},
                    {"recovery_time", trace.recovery_time},
                    {"duration", trace.duration},
                    {"total_reward", trace.total_reward},
                    {"ticks", trace.ticks.size()}}
                   .dump()
            << "\n";
  return 0;
}

int cmd_ablate(const CommonOpts& o) {
  const ExperimentConfig cfg = load_or_default(o);
  const uint64_t hash = config_hash(cfg);
  const int eval_episodes = o.episodes > 0 ? o.episodes : 20;
  if (o.episodes == 0) throw ConfigError("--episodes must be at least 1");
  ensure_out(o.out_dir);
  save_config(cfg, o.out_dir + "/config.json");

  MetricsReport reports[2];
  double final_mean_reward[2] = {0.0, 0.0};
  for (int variant = 0; variant < 2; ++variant) {
    const bool reduced = variant == 1;
    const std::string tag = reduced ? "reduced_" : "full_";
    Trainer trainer(cfg, reduced, o.seed);
    CsvWriter csv(o.out_dir + "/" + tag + "train_stats.csv", kStatsHeader,
                  hash);
    const int tail_from = cfg.ppo.iterations - std::max(1, cfg.ppo.iterations / 10);
    int tail_n = 0;
    while (trainer.iteration() < cfg.ppo.iterations) {
      const IterationStats s = trainer.iterate();
      check_finite(s);
      write_stats_row(csv, s);
      if (s.iteration >= tail_from) {
        final_mean_reward[variant] += s.mean_step_reward;
        ++tail_n;
      }
    }
    if (tail_n > 0) final_mean_reward[variant] /= tail_n;
    save_checkpoint(o.out_dir + "/" + tag + "final.bin",
                    trainer.make_checkpoint(hash));
    const auto traces = trainer.evaluate(eval_episodes, o.seed + 1);
    reports[variant] = write_report_csv(
        o.out_dir + "/" + tag + "eval_report.csv", traces, cfg.families, hash);
  }

  CsvWriter csv(o.out_dir + "/ablation.csv",
                {"section", "metric", "full", "reduced"}, hash);
  auto row = [&](const char* section, const char* metric, double f, double r) {
    csv.row(std::vector<std::string>{section, metric, format_cell(f),
                                     format_cell(r)});
  };
  row("performance", "mean_reward", reports[0].mean_reward,
      reports[1].mean_reward);
  row("performance", "train_mean_step_reward", final_mean_reward[0],
      final_mean_reward[1]);
  row("performance", "mean_episode_length", reports[0].mean_length,
      reports[1].mean_length);
  row("recovery", "recovery_rate", reports[0].recovery_rate,
      reports[1].recovery_rate);
  row("recovery", "mean_recovery_time", reports[0].mean_recovery_time,
      reports[1].mean_recovery_time);
  row("termination", "timeout_rate", reports[0].timeout_rate,
      reports[1].timeout_rate);
  row("termination", "stuck_low_rate", reports[0].stuck_low_rate,
      reports[1].stuck_low_rate);
  row("termination", "unsafe_rate", reports[0].unsafe_rate,
      reports[1].unsafe_rate);

  std::cout << json{{"full", report_to_json(reports[0])},
                    {"reduced", report_to_json(reports[1])}}
                   .dump()
            << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"planar biped fall-recovery experiments"};
  app.require_subcommand(1);

  CommonOpts train_o, eval_o, sweep_o, trace_o, ablate_o;
  std::string trace_family = "standing";
  double push_force = 0.0, push_height = 0.0, push_time = 1.0;
  int push_dir = 1;

  auto* train = app.add_subcommand("train", "train a policy");
  add_common(train, &train_o, false);
  auto* eval = app.add_subcommand("eval", "evaluate a checkpoint");
  add_common(eval, &eval_o, true);
  auto* sweep = app.add_subcommand("sweep", "push-grid recovery sweep");
  add_common(sweep, &sweep_o, true);
  auto* trace = app.add_subcommand("trace", "export one episode (CSV + SVG)");
  add_common(trace, &trace_o, true);
  trace->add_option("--family", trace_family, "initial pose family");
  trace->add_option("--push-force", push_force, "push magnitude [N]");
  trace->add_option("--push-height", push_height, "application height [m]");
  trace->add_option("--push-time", push_time, "push start time [s]");
  trace->add_option("--push-dir", push_dir, "+1 or -1")
      ->check(CLI::IsMember({1, -1}));
  auto* ablate = app.add_subcommand("ablate", "train full vs reduced variant");
  add_common(ablate, &ablate_o, false);

  try {
    app.parse(argc, argv);
    if (*train) return cmd_train(train_o);
    if (*eval) return cmd_eval(eval_o);
    if (*sweep) return cmd_sweep(sweep_o);
    if (*trace)
      return cmd_trace(trace_o, trace_family, push_force, push_height,
                       push_time, push_dir);
    if (*ablate) return cmd_ablate(ablate_o);
    return 1;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << json{{"error", "usage"}, {"message", e.what()}}.dump()
              << "\n";
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << json{{"error", "config"}, {"message", e.what()}}.dump()
              << "\n";
    return 3;
  } catch (const CheckpointError& e) {
    std::cerr << json{{"error", "checkpoint"}, {"message", e.what()}}.dump()
              << "\n";
    return 4;
  } catch (const SimFault& e) {
    std::cerr << json{{"error", "simulation"}, {"message", e.what()}}.dump()
              << "\n";
    return 5;
  } catch (const std::exception& e) {
    std::cerr << json{{"error", "runtime"}, {"message", e.what()}}.dump()
              << "\n";
    return 6;
  }
}
