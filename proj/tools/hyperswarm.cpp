#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "hyperswarm/runner.hpp"

using namespace hyperswarm;

namespace {

constexpr int kConfigExit = 2;
constexpr int kTargetMissedExit = 3;

void print_summary(const ExperimentResult& res, const ExperimentConfig& cfg) {
  std::printf("problem      %s\n", to_string(res.problem).c_str());
  std::printf("generations  %zu\n", res.generations);
  for (std::size_t p = 0; p < res.players.size(); ++p) {
    const auto& pl = res.players[p];
    const char* name = res.players.size() > 1 ? (p == 0 ? " A" : " B") : "";
    std::printf("player%s     best %.6g  final %.6g +- %.3g over %zu rollouts\n", name,
                pl.best_reward, pl.reward, pl.reward_std,
                res.problem == Problem::multilayer || res.problem == Problem::labyrinth_m1
                    ? std::size_t{1}
                    : cfg.rollout.final_rollouts);
  }
  if (res.problem == Problem::multilayer) {
    std::printf("error J      %d\n", res.error);
    std::printf("drift        %.3g (within layers)  %.3g (across)\n", res.isometry_drift,
                res.cross_layer_change);
  }
  if (res.mean_action_rewards) {
    std::printf("mean actions (%.6g, %.6g)\n", res.mean_action_rewards->first,
                res.mean_action_rewards->second);
  }
  if (cfg.cmaes.target) {
    std::printf("target       %g %s\n", *cfg.cmaes.target, res.target_reached ? "reached" : "NOT reached");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hyperbolic swarm policies trained with CMA-ES"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<std::size_t> generations;
  std::optional<unsigned> threads;
  bool quiet = false;
  auto* run = app.add_subcommand("run", "train a policy and write outputs");
  run->add_option("config", config_path, "experiment JSON")->required();
  run->add_option("--seed", seed, "override the seed");
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--generations", generations, "override cmaes.max_generations");
  run->add_option("--threads", threads, "evaluation threads");
  run->add_flag("--quiet", quiet, "no per-generation progress");

  auto* validate = app.add_subcommand("validate", "check an experiment or environment file");
  validate->add_option("config", config_path, "experiment or environment file")->required();

  std::size_t rollouts = 10000;
  auto* baseline = app.add_subcommand("baseline", "Monte Carlo reward of an untrained policy");
  baseline->add_option("config", config_path, "experiment JSON")->required();
  baseline->add_option("--rollouts", rollouts, "number of rollouts")->check(CLI::PositiveNumber);
  baseline->add_option("--seed", seed, "override the seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate->parsed()) {
      // An experiment file names a problem; anything else is an environment.
      std::ifstream in(config_path);
      nlohmann::json doc;
      const bool is_json = config_path.ends_with(".json");
      if (is_json) {
        try {
          doc = nlohmann::json::parse(in);
        } catch (const nlohmann::json::exception& e) {
          throw ConfigError(config_path + ": " + e.what());
        }
      }
      if (is_json && doc.contains("problem")) {
        const auto cfg = load_experiment(config_path);
        std::printf("ok: %s experiment, environment %s\n", to_string(cfg.problem).c_str(),
                    cfg.environment_path.string().c_str());
      } else {
        const auto env = load_environment(config_path);
        std::printf("ok: environment (%s)\n", environment_to_json(env).at("type").get<std::string>().c_str());
      }
      return 0;
    }

    auto cfg = load_experiment(config_path);
    if (seed) cfg.seed = *seed;

    if (baseline->parsed()) {
      const auto st = run_baseline(cfg, rollouts);
      std::printf("baseline %s: %zu rollouts mean %.6g std %.6g min %.6g max %.6g\n",
                  to_string(cfg.problem).c_str(), st.rollouts, st.mean, st.stddev, st.min, st.max);
      return 0;
    }

    if (out_dir) cfg.output_dir = *out_dir;
    if (generations) cfg.cmaes.max_generations = *generations;
    if (threads) cfg.cmaes.threads = *threads;
    cfg.validate();
    const auto res = run_experiment(cfg, {.progress = !quiet});
    write_outputs(res, cfg, cfg.output_dir);
    print_summary(res, cfg);
    std::printf("outputs      %s\n", cfg.output_dir.string().c_str());
    return cfg.cmaes.target && !res.target_reached ? kTargetMissedExit : 0;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfigExit;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
