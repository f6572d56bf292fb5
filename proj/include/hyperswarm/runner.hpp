#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "hyperswarm/experiment.hpp"
#include "hyperswarm/geom.hpp"
#include "hyperswarm/swarm.hpp"

namespace hyperswarm {

/// One row of rewards.csv. Rewards are maximized; for the multilayer problem
/// the reward is -J.
struct TrainingRecord {
  std::size_t generation = 0;
  double best = 0.0;  // best-ever reward of this player so far
  double mean = 0.0;  // mean reward of the generation's candidates
  std::string player;  // "A" / "B", empty for one agent
  double elapsed = 0.0;  // seconds since the run started; not written to rewards.csv
};

/// Policy points at one moment of the swarm evolution.
struct Snapshot {
  double t = 0.0;
  std::vector<Complex> points;
  std::vector<std::size_t> groups;
};

struct PlayerOutcome {
  std::vector<double> params;  // the reported parameter vector
  double best_reward = 0.0;    // best-ever training reward
  double reward = 0.0;         // mean over final_rollouts rollouts of the reported policy
  double reward_std = 0.0;
  std::vector<GaussianParams> gaussians;  // jump / number policies
};

struct ExperimentResult {
  Problem problem = Problem::frog;
  std::vector<TrainingRecord> records;
  std::size_t generations = 0;
  bool target_reached = false;
  std::vector<PlayerOutcome> players;
  std::vector<Snapshot> snapshots;  // t = 0, mid-horizon, horizon
  /// Every integration step of the reported policy (phases as unit-circle
  /// points for labyrinth_m1, both players side by side for games).
  DiscTrajectory trajectory;

  std::vector<Complex> final_points;  // policy points at the horizon
  std::vector<double> final_angles;   // Kuramoto phases (method 1)
  std::vector<Point2> path;           // labyrinth walk of the reported policy's modes
  int error = 0;                      // multilayer J of the reported policy
  double isometry_drift = 0.0;        // largest within-layer distance change
  double cross_layer_change = 0.0;
  /// Rewards when every player plays its distribution means.
  std::optional<std::pair<double, double>> mean_action_rewards;

  nlohmann::json policy;  // contents of policy.json
};

struct RunOptions {
  bool progress = false;  // one stderr line per generation
};

/// Trains the configured problem end to end. Stochastic problems report the
/// final CMA-ES mean; deterministic ones (multilayer, labyrinth_m1) report
/// the best candidate seen.
ExperimentResult run_experiment(const ExperimentConfig& cfg, const RunOptions& opts = {});

/// rewards.csv, policy.json, points_T<t>.svg, trajectory.csv, rewards.svg,
/// timing.csv, plus path.svg for the labyrinth.
void write_outputs(const ExperimentResult& res, const ExperimentConfig& cfg,
                   const std::filesystem::path& dir);
void write_rewards_csv(std::ostream& out, std::span<const TrainingRecord> records);

struct BaselineStats {
  std::size_t rollouts = 0;
  double mean = 0.0;
  double stddev = 0.0;
  double min = 0.0;
  double max = 0.0;
};

/// Monte Carlo baseline: uniform random angles for the labyrinth, the
/// untrained policy (parameter vector zero) for every other problem.
BaselineStats run_baseline(const ExperimentConfig& cfg, std::size_t rollouts);

/// Initial policy points: conformally natural draws (or uniform phases for
/// method 1 of the labyrinth, or the instance's layers A and B).
std::vector<Complex> initial_points(const ExperimentConfig& cfg);

}  // namespace hyperswarm
