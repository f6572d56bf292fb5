#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "hyperswarm/env_config.hpp"

namespace hyperswarm {

enum class Problem { frog, multilayer, labyrinth_m1, labyrinth_m2, two_frogs, plane_game };

std::string to_string(Problem p);
Problem problem_from_string(const std::string& name);  // throws ConfigError

struct CmaesSettings {
  std::size_t lambda = 0;  // 0: default 4 + floor(3 ln n)
  double sigma0 = 0.5;
  std::size_t max_generations = 300;
  /// Stop once the best-ever reward reaches this value.
  std::optional<double> target;
  /// Stop after this many generations without best-ever improvement >= patience_tol.
  std::size_t patience = 0;
  double patience_tol = 1e-6;
  unsigned threads = 1;
  /// Independent searches run side by side (per player in games); the
  /// reported policy is picked among them.
  std::size_t instances = 1;
};

struct RolloutSettings {
  double horizon = 2.0;
  double dt = 0.01;
  std::size_t samples = 1;       // action draws per policy distribution and evaluation
  std::size_t evaluations = 10;  // evaluations averaged into one fitness
  std::size_t final_rollouts = 1000;  // for scoring the trained policy
};

enum class Schedule { alternating, simultaneous };

struct ExperimentConfig {
  Problem problem = Problem::frog;
  std::uint64_t seed = 0;
  std::filesystem::path environment_path;
  Environment environment;
  CmaesSettings cmaes;
  RolloutSettings rollout;
  Schedule schedule = Schedule::alternating;
  /// Two players share CMA-ES and rollout seeds and start from the same
  /// points; with a mirror-symmetric game their histories coincide.
  bool mirror_players = false;
  /// Concentration s of the conformally natural law for initial points.
  double initial_concentration = 2.0;
  /// Multilayer: rank candidates with equal J by how close the linked pairs are.
  bool tie_break = true;
  std::filesystem::path output_dir = "out";
  double coupling_scale = 1.0;  // see PolicyLayout

  /// Throws ConfigError; also checks the environment type matches the problem.
  void validate() const;
};

/// Missing keys take per-problem defaults (horizon, budget, rollouts). The
/// environment path is resolved against `base_dir` and loaded.
ExperimentConfig experiment_from_json(const nlohmann::json& doc,
                                      const std::filesystem::path& base_dir);
ExperimentConfig load_experiment(const std::filesystem::path& path);
nlohmann::json experiment_to_json(const ExperimentConfig& cfg);

}  // namespace hyperswarm
