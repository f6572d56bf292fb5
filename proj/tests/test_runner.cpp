#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "hyperswarm/experiment.hpp"
#include "hyperswarm/policy_layout.hpp"
#include "hyperswarm/runner.hpp"
#include "hyperswarm/swarm.hpp"

using namespace hyperswarm;
namespace fs = std::filesystem;

namespace {

const fs::path kConfigs = HYPERSWARM_CONFIG_DIR;

// Shipped config cut down to a few cheap generations.
ExperimentConfig small(const std::string& name, std::size_t generations = 4) {
  auto cfg = load_experiment(kConfigs / "experiments" / name);
  cfg.cmaes.max_generations = generations;
  cfg.cmaes.lambda = 8;
  cfg.cmaes.instances = std::min<std::size_t>(cfg.cmaes.instances, 2);
  cfg.cmaes.target.reset();
  cfg.rollout.final_rollouts = 50;
  return cfg;
}

std::string csv(const ExperimentResult& res) {
  std::ostringstream out;
  write_rewards_csv(out, res.records);
  return out.str();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::set<std::string> file_names(const fs::path& dir) {
  std::set<std::string> out;
  for (const auto& e : fs::directory_iterator(dir)) out.insert(e.path().filename().string());
  return out;
}

fs::path scratch_dir(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("hyperswarm_test_" + name);
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("rewards.csv format") {
  std::vector<TrainingRecord> records{{0, 1.5, 0.25, "", 3.0}, {1, 2.0, 1.0 / 3.0, "A", 4.0}};
  std::ostringstream out;
  write_rewards_csv(out, records);
  CHECK(out.str() == "generation,best,mean,player\n0,1.5,0.25,\n1,2,0.3333333333,A\n");
}

TEST_CASE("reruns are byte identical for every problem") {
  for (const char* name : {"frog.json", "multilayer.json", "labyrinth_m1.json", "labyrinth_m2.json",
                           "two_frogs.json", "plane_game.json"}) {
    CAPTURE(name);
    const auto cfg = small(name);
    const auto first = run_experiment(cfg), second = run_experiment(cfg);
    CHECK(csv(first) == csv(second));
    CHECK(first.policy.dump() == second.policy.dump());
  }
}

TEST_CASE("thread count does not change results") {
  for (const char* name : {"frog.json", "two_frogs.json"}) {
    CAPTURE(name);
    auto cfg = small(name);
    cfg.cmaes.threads = 1;
    const auto serial = run_experiment(cfg);
    cfg.cmaes.threads = 4;
    const auto parallel = run_experiment(cfg);
    CHECK(csv(serial) == csv(parallel));
  }
}

TEST_CASE("seeds change the run") {
  auto cfg = small("frog.json");
  const auto a = run_experiment(cfg);
  cfg.seed += 1;
  CHECK(csv(a) != csv(run_experiment(cfg)));
}

TEST_CASE("output file set is fixed and files are byte stable") {
  const std::map<std::string, std::set<std::string>> expected_extra{
      {"labyrinth_m2.json", {"path.svg"}}, {"labyrinth_m1.json", {"path.svg"}}};
  for (const char* name : {"frog.json", "labyrinth_m2.json", "labyrinth_m1.json", "plane_game.json",
                           "multilayer.json"}) {
    CAPTURE(name);
    const auto cfg = small(name);
    const auto one = scratch_dir("one"), two = scratch_dir("two");
    write_outputs(run_experiment(cfg), cfg, one);
    write_outputs(run_experiment(cfg), cfg, two);
    const auto files = file_names(one);
    CHECK(files == file_names(two));
    for (const char* f : {"rewards.csv", "policy.json", "trajectory.csv", "rewards.svg", "timing.csv"}) {
      CHECK(files.count(f) == 1);
    }
    std::size_t snapshots = 0;
    for (const auto& f : files) snapshots += f.rfind("points_T", 0) == 0 && f.ends_with(".svg");
    CHECK(snapshots == 3);
    if (auto it = expected_extra.find(name); it != expected_extra.end()) {
      for (const auto& f : it->second) CHECK(files.count(f) == 1);
    } else {
      CHECK(files.count("path.svg") == 0);
    }
    for (const auto& f : files) {
      if (f == "timing.csv") continue;  // wall-clock times
      CAPTURE(f);
      CHECK(slurp(one / f) == slurp(two / f));
    }
    const auto header = slurp(one / "rewards.csv").substr(0, 29);
    CHECK(header == "generation,best,mean,player\n0");
    fs::remove_all(one);
    fs::remove_all(two);
  }
}

TEST_CASE("best column never decreases") {
  for (const char* name : {"frog.json", "multilayer.json", "labyrinth_m1.json", "labyrinth_m2.json",
                           "two_frogs.json"}) {
    CAPTURE(name);
    const auto res = run_experiment(small(name, 12));
    std::map<std::string, double> last;
    for (const auto& r : res.records) {
      if (last.count(r.player)) CHECK(r.best >= last[r.player]);
      last[r.player] = r.best;
    }
  }
}

TEST_CASE("mirrored plane game players have identical histories") {
  auto cfg = small("plane_game.json", 10);
  cfg.mirror_players = true;
  cfg.schedule = Schedule::simultaneous;
  const auto res = run_experiment(cfg);
  std::vector<std::pair<double, double>> a, b;
  for (const auto& r : res.records) (r.player == "A" ? a : b).emplace_back(r.best, r.mean);
  REQUIRE(a.size() == 10);
  CHECK(a == b);
  REQUIRE(res.players.size() == 2);
  CHECK(res.players[0].params == res.players[1].params);
}

TEST_CASE("multilayer run keeps layers rigid") {
  const auto res = run_experiment(small("multilayer.json", 6));
  CHECK(res.isometry_drift < 1e-5);
  CHECK(res.cross_layer_change > 1e-2);
  CHECK(res.error >= -4);
}

TEST_CASE("zero chain policy leaves the points where they started") {
  const auto cfg = small("labyrinth_m2.json");
  const auto layout = PolicyLayout::chain_swarm(10, cfg.coupling_scale);
  const auto spec = decode_swarm(std::vector<double>(layout.size(), 0.0), layout);
  const auto z0 = initial_points(cfg);
  REQUIRE(z0.size() == 10);
  IntegrateOptions io;
  io.dt = cfg.rollout.dt;
  const auto traj = integrate(SwarmField{spec}, DiscState(z0.begin(), z0.end()), 0.0,
                              cfg.rollout.horizon, io);
  for (std::size_t j = 0; j < z0.size(); ++j) CHECK(traj.final_state()[j] == z0[j]);
}

TEST_CASE("initial points") {
  auto cfg = small("plane_game.json");
  auto z = initial_points(cfg);
  REQUIRE(z.size() == 6);
  for (auto p : z) CHECK(std::abs(p) < 1.0);
  CHECK(initial_points(cfg) == z);  // drawn once per seed

  cfg.mirror_players = true;
  z = initial_points(cfg);
  CHECK(std::vector<Complex>(z.begin(), z.begin() + 3) == std::vector<Complex>(z.begin() + 3, z.end()));

  const auto m1 = initial_points(small("labyrinth_m1.json"));
  for (auto p : m1) CHECK(std::abs(std::abs(p) - 1.0) < 1e-12);
}

TEST_CASE("baseline statistics") {
  const auto cfg = small("labyrinth_m2.json");
  const auto a = run_baseline(cfg, 2000), b = run_baseline(cfg, 2000);
  CHECK(a.rollouts == 2000);
  CHECK(a.mean == b.mean);
  CHECK(a.stddev > 0.0);
  CHECK(a.min <= a.mean);
  CHECK(a.mean <= a.max);
}
