#include "hyperswarm/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <thread>

#include "hyperswarm/cmaes.hpp"
#include "hyperswarm/dist.hpp"
#include "hyperswarm/policy_layout.hpp"
#include "hyperswarm/svg.hpp"
#include "hyperswarm/swarm.hpp"

namespace hyperswarm {

using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

// Sub-streams of the experiment seed.
enum Stream : std::uint64_t {
  kInit = 1,
  kSearchA = 2,
  kSearchB = 3,
  kEvalA = 4,
  kEvalB = 5,
  kFinal = 6,
  kBaseline = 7,
  kValidate = 8,
};

constexpr std::size_t kPlayerPoints = 3;
constexpr double kFailedFitness = 1e300;
constexpr double kTieBreakWeight = 0.5;  // keeps J + weight * slack ordered by J

struct Evaluation {
  double reward = 0.0;
  double fitness = 0.0;
  bool failed = false;
};

using Evaluator = std::function<Evaluation(std::span<const double>, Rng&)>;

Evaluation from_reward(double reward) { return {reward, -reward, false}; }

IntegrateOptions integrate_options(const ExperimentConfig& cfg, bool record_all) {
  IntegrateOptions o;
  o.dt = cfg.rollout.dt;
  o.record_every = record_all ? 1 : std::numeric_limits<std::size_t>::max();
  return o;
}

std::size_t policy_points(Problem p) {
  switch (p) {
    case Problem::frog: return 5;
    case Problem::labyrinth_m1:
    case Problem::labyrinth_m2: return 10;
    case Problem::two_frogs:
    case Problem::plane_game: return 2 * kPlayerPoints;
    case Problem::multilayer: return 0;
  }
  return 0;
}

PolicyLayout layout_for(const ExperimentConfig& cfg) {
  const double c = cfg.coupling_scale;
  switch (cfg.problem) {
    case Problem::frog: return PolicyLayout::full_swarm(5, c);
    case Problem::multilayer: {
      const auto& inst = std::get<MultiLayerInstance>(cfg.environment);
      return PolicyLayout::sub_swarm({inst.layers[0].nodes.size(), inst.layers[1].nodes.size()}, c);
    }
    case Problem::labyrinth_m1: return PolicyLayout::kuramoto(10, c);
    case Problem::labyrinth_m2: return PolicyLayout::chain_swarm(10, c);
    case Problem::two_frogs:
    case Problem::plane_game: return PolicyLayout::full_swarm(kPlayerPoints, c);
  }
  throw std::logic_error("layout_for: unknown problem");
}

// ---- rollouts --------------------------------------------------------------

DiscTrajectory evolve_swarm(const SwarmSpec& spec, std::span<const Complex> init,
                            const ExperimentConfig& cfg, bool record_all) {
  return integrate(SwarmField{spec}, DiscState(init.begin(), init.end()), 0.0,
                   cfg.rollout.horizon, integrate_options(cfg, record_all));
}

std::vector<GaussianParams> to_gaussians(const DiscState& z) {
  std::vector<GaussianParams> out;
  out.reserve(z.size());
  for (const auto& v : z) out.push_back(disc_to_gaussian(DiscPoint(v)));
  return out;
}

std::vector<double> sample_all(std::span<const GaussianParams> policy, Rng& rng) {
  std::vector<double> out;
  out.reserve(policy.size());
  for (const auto& g : policy) out.push_back(gaussian_sample(g, rng));
  return out;
}

std::vector<double> sample_angles(std::span<const Complex> points, Rng& rng) {
  std::vector<double> out;
  out.reserve(points.size());
  for (const auto& a : points) out.push_back(wc_sample({DiscPoint(a)}, rng));
  return out;
}

std::vector<double> means_of(std::span<const GaussianParams> policy) {
  std::vector<double> out;
  for (const auto& g : policy) out.push_back(g.m);
  return out;
}

std::pair<double, double> joint_rewards(const ExperimentConfig& cfg, std::span<const double> a,
                                        std::span<const double> b) {
  if (cfg.problem == Problem::two_frogs) {
    return two_frog_rewards(a, b, std::get<TwoFrogConfig>(cfg.environment));
  }
  return plane_game_rewards(a, b, std::get<PlaneGameConfig>(cfg.environment));
}

std::size_t rollouts_per_fitness(const ExperimentConfig& cfg) {
  return cfg.rollout.samples * cfg.rollout.evaluations;
}

PhaseState kuramoto_phases(const KuramotoChainSpec& spec, std::span<const Complex> init,
                           const ExperimentConfig& cfg) {
  PhaseState phi;
  for (const auto& z : init) phi.push_back(std::arg(z));
  auto traj = integrate(KuramotoChainField{spec}, phi, 0.0, cfg.rollout.horizon,
                        integrate_options(cfg, false));
  return traj.final_state();
}

DiscTrajectory evolve_layers(const SubSwarmSpec& spec, std::span<const Complex> init,
                             const ExperimentConfig& cfg, bool record_all) {
  return integrate(SubSwarmField{spec}, DiscState(init.begin(), init.end()), 0.0,
                   cfg.rollout.horizon, integrate_options(cfg, record_all));
}

Evaluation multilayer_evaluation(const ExperimentConfig& cfg, const DiscState& z) {
  const auto& inst = std::get<MultiLayerInstance>(cfg.environment);
  const std::size_t na = inst.layers[0].nodes.size();
  const std::span<const Complex> a(z.data(), na), b(z.data() + na, z.size() - na);
  const int j = multilayer_error(inst, a, b);
  double fitness = j;
  if (cfg.tie_break) fitness += kTieBreakWeight * multilayer_edge_slack(inst, a, b);
  return {static_cast<double>(-j), fitness, false};
}

// Single-agent fitness of a parameter vector.
Evaluator single_agent_evaluator(const ExperimentConfig& cfg, const PolicyLayout& layout,
                                 const std::vector<Complex>& init) {
  const std::size_t reps = rollouts_per_fitness(cfg);
  switch (cfg.problem) {
    case Problem::frog:
      return [&cfg, layout, init, reps](std::span<const double> x, Rng& rng) {
        const auto policy = to_gaussians(evolve_swarm(decode_swarm(x, layout), init, cfg, false).final_state());
        const auto& env = std::get<FrogConfig>(cfg.environment);
        double total = 0.0;
        for (std::size_t r = 0; r < reps; ++r) total += frog_reward(sample_all(policy, rng), env);
        return from_reward(total / static_cast<double>(reps));
      };
    case Problem::labyrinth_m2:
      return [&cfg, layout, init, reps](std::span<const double> x, Rng& rng) {
        const auto a = evolve_swarm(decode_swarm(x, layout), init, cfg, false).final_state();
        const auto& env = std::get<LabyrinthConfig>(cfg.environment);
        double total = 0.0;
        for (std::size_t r = 0; r < reps; ++r) total += labyrinth_reward(sample_angles(a, rng), env);
        return from_reward(total / static_cast<double>(reps));
      };
    case Problem::labyrinth_m1:
      return [&cfg, layout, init](std::span<const double> x, Rng&) {
        const auto phi = kuramoto_phases(decode_kuramoto(x, layout), init, cfg);
        return from_reward(labyrinth_reward(phi, std::get<LabyrinthConfig>(cfg.environment)));
      };
    case Problem::multilayer:
      return [&cfg, layout, init](std::span<const double> x, Rng&) {
        return multilayer_evaluation(cfg, evolve_layers(decode_subswarm(x, layout), init, cfg, false).final_state());
      };
    default:
      throw std::logic_error("single_agent_evaluator: two-player problem");
  }
}

// ---- search loop -----------------------------------------------------------

struct Search {
  Search(std::size_t dim, const ExperimentConfig& cfg, std::uint64_t search_seed,
         std::uint64_t eval_seed_)
      : es(std::vector<double>(dim, 0.0), cfg.cmaes.sigma0, cfg.cmaes.lambda),
        rng(search_seed),
        eval_seed(eval_seed_) {}

  Cmaes es;
  Rng rng;
  std::uint64_t eval_seed;
  double best_fitness = std::numeric_limits<double>::infinity();
  double best_reward = -std::numeric_limits<double>::infinity();
  std::vector<double> best_x;
  std::vector<double> last_best_x;  // best candidate of the latest generation
  std::size_t failures = 0;
};

// Patience on the best-ever reward.
struct StallTracker {
  double reference = -std::numeric_limits<double>::infinity();
  std::size_t stalled = 0;

  bool update(double best_reward, const CmaesSettings& cm) {
    if (cm.patience == 0) return false;
    if (best_reward > reference + cm.patience_tol) {
      reference = best_reward;
      stalled = 0;
      return false;
    }
    return ++stalled >= cm.patience;
  }
};

std::vector<Evaluation> evaluate_all(const Evaluator& eval, const std::vector<Candidate>& pop,
                                     std::uint64_t generation_seed, unsigned threads) {
  std::vector<Evaluation> out(pop.size());
  auto run = [&](std::size_t k) {
    Rng sub(derive_seed(generation_seed, k));
    try {
      out[k] = eval(pop[k].x, sub);
    } catch (const IntegrationError&) {
      out[k] = {std::numeric_limits<double>::quiet_NaN(), kFailedFitness, true};
    }
  };
  if (threads <= 1) {
    for (std::size_t k = 0; k < pop.size(); ++k) run(k);
    return out;
  }
  std::vector<std::jthread> pool;
  const std::size_t workers = std::min<std::size_t>(threads, pop.size());
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t k = w; k < pop.size(); k += workers) run(k);
    });
  }
  pool.clear();
  return out;
}

// One ask / evaluate / tell round; returns the generation's mean reward.
double step(Search& s, const Evaluator& eval, std::size_t generation, unsigned threads) {
  auto pop = s.es.ask(s.rng);
  const auto evals = evaluate_all(eval, pop, derive_seed(s.eval_seed, generation), threads);
  double sum = 0.0;
  std::size_t ok = 0;
  double last_best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < pop.size(); ++k) {
    pop[k].fitness = evals[k].fitness;
    if (evals[k].failed) {
      ++s.failures;
      continue;
    }
    sum += evals[k].reward;
    ++ok;
    if (evals[k].fitness < last_best) {
      last_best = evals[k].fitness;
      s.last_best_x = pop[k].x;
    }
    if (evals[k].fitness < s.best_fitness) {
      s.best_fitness = evals[k].fitness;
      s.best_reward = evals[k].reward;
      s.best_x = pop[k].x;
    }
  }
  s.es.tell(pop);
  return ok ? sum / static_cast<double>(ok) : std::numeric_limits<double>::quiet_NaN();
}

// One game player: independent searches, the leader's mean being the policy
// the opponent trains against.
struct Player {
  Player(std::size_t dim, const ExperimentConfig& cfg, std::uint64_t search_stream,
         std::uint64_t eval_stream) {
    const auto search_seed = derive_seed(cfg.seed, search_stream);
    const auto eval_seed = derive_seed(cfg.seed, eval_stream);
    for (std::size_t i = 0; i < cfg.cmaes.instances; ++i) {
      searches.emplace_back(dim, cfg, i == 0 ? search_seed : derive_seed(search_seed, i),
                            i == 0 ? eval_seed : derive_seed(eval_seed, i));
      recent.push_back(-std::numeric_limits<double>::infinity());
    }
  }

  // Mean reward over all instances' candidates.
  double step(const Evaluator& eval, std::size_t generation, unsigned threads) {
    double sum = 0.0;
    std::size_t counted = 0;
    for (std::size_t i = 0; i < searches.size(); ++i) {
      recent[i] = step_search(searches[i], eval, generation, threads);
      if (std::isfinite(recent[i])) {
        sum += recent[i];
        ++counted;
      } else {
        recent[i] = -std::numeric_limits<double>::infinity();
      }
    }
    return counted ? sum / static_cast<double>(counted) : std::numeric_limits<double>::quiet_NaN();
  }

  // The instance whose latest generation scored best on average.
  const Search& leader() const {
    return searches[std::max_element(recent.begin(), recent.end()) - recent.begin()];
  }
  std::vector<double> current() const { return leader().es.mean_vector(); }

  double best_reward() const {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& s : searches) best = std::max(best, s.best_reward);
    return best;
  }
  std::size_t failures() const {
    std::size_t n = 0;
    for (const auto& s : searches) n += s.failures;
    return n;
  }

  static double step_search(Search& s, const Evaluator& eval, std::size_t generation,
                            unsigned threads) {
    return hyperswarm::step(s, eval, generation, threads);
  }

  std::vector<Search> searches;
  std::vector<double> recent;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void report(const RunOptions& opts, const TrainingRecord& r, double sigma) {
  if (!opts.progress) return;
  std::fprintf(stderr, "gen %4zu %s best %.6g mean %.6g sigma %.4g\n", r.generation,
               r.player.empty() ? "" : r.player.c_str(), r.best, r.mean, sigma);
}

// ---- reporting helpers -----------------------------------------------------

json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

json params_json(const PolicyParams& p) {
  return std::visit(
      [](const auto& spec) -> json {
        using T = std::decay_t<decltype(spec)>;
        if constexpr (std::is_same_v<T, KuramotoChainSpec>) {
          return {{"omega", spec.omega}, {"couplings", spec.couplings}};
        } else if constexpr (std::is_same_v<T, SubSwarmSpec>) {
          return {{"omega", spec.omega}, {"sizes", spec.sizes}, {"K", matrix_json(spec.K)},
                  {"beta", matrix_json(spec.beta)}};
        } else {
          return {{"omega", spec.omega}, {"K", matrix_json(spec.K)}, {"beta", matrix_json(spec.beta)}};
        }
      },
      p);
}

json points_json(std::span<const Complex> z) {
  json out = json::array();
  for (const auto& v : z) out.push_back({v.real(), v.imag()});
  return out;
}

json gaussians_json(std::span<const GaussianParams> g) {
  json out = json::array();
  for (const auto& p : g) out.push_back({{"m", p.m}, {"var", p.var}});
  return out;
}

template <class State>
std::vector<std::size_t> snapshot_indices(const Trajectory<State>& traj) {
  const std::size_t last = traj.states.size() - 1;
  return {0, last / 2, last};
}

std::vector<Snapshot> disc_snapshots(const DiscTrajectory& traj, std::span<const std::size_t> groups) {
  std::vector<Snapshot> out;
  for (auto i : snapshot_indices(traj)) {
    out.push_back({traj.times[i], traj.states[i], {groups.begin(), groups.end()}});
  }
  return out;
}

struct Stats {
  double mean = 0.0, stddev = 0.0, min = 0.0, max = 0.0;
};

Stats stats_of(std::span<const double> v) {
  Stats s;
  if (v.empty()) return s;
  s.min = *std::min_element(v.begin(), v.end());
  s.max = *std::max_element(v.begin(), v.end());
  for (double x : v) s.mean += x;
  s.mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - s.mean) * (x - s.mean);
  s.stddev = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
  return s;
}

std::vector<double> mode_angles(std::span<const Complex> a) {
  std::vector<double> out;
  for (const auto& v : a) out.push_back(wrap_angle(std::arg(v)));
  return out;
}

// ---- problem drivers -------------------------------------------------------

ExperimentResult run_single(const ExperimentConfig& cfg, const RunOptions& opts) {
  const auto start = Clock::now();
  const auto layout = layout_for(cfg);
  const auto init = initial_points(cfg);
  const auto eval = single_agent_evaluator(cfg, layout, init);

  // Instance 0 keeps the plain sub-streams so a one-instance run matches
  // the classic single search.
  std::vector<Search> searches;
  for (std::size_t i = 0; i < cfg.cmaes.instances; ++i) {
    const auto search_seed = derive_seed(cfg.seed, kSearchA);
    const auto eval_seed = derive_seed(cfg.seed, kEvalA);
    searches.emplace_back(layout.size(), cfg, i == 0 ? search_seed : derive_seed(search_seed, i),
                          i == 0 ? eval_seed : derive_seed(eval_seed, i));
  }
  auto leader = [&]() -> Search& {
    return *std::min_element(searches.begin(), searches.end(), [](const Search& a, const Search& b) {
      return a.best_fitness < b.best_fitness;
    });
  };

  ExperimentResult res;
  res.problem = cfg.problem;
  StallTracker stall;
  for (std::size_t gen = 0; gen < cfg.cmaes.max_generations; ++gen) {
    double mean = 0.0;
    std::size_t counted = 0;
    for (auto& s : searches) {
      const double m = step(s, eval, gen, cfg.cmaes.threads);
      if (std::isfinite(m)) {
        mean += m;
        ++counted;
      }
    }
    mean = counted ? mean / static_cast<double>(counted) : std::numeric_limits<double>::quiet_NaN();
    const Search& best = leader();
    res.records.push_back({gen, best.best_reward, mean, "", seconds_since(start)});
    report(opts, res.records.back(), best.es.sigma());
    res.generations = gen + 1;
    if (cfg.cmaes.target && best.best_reward >= *cfg.cmaes.target) {
      res.target_reached = true;
      break;
    }
    if (stall.update(best.best_reward, cfg.cmaes)) break;
  }
  std::size_t failures = 0;
  for (const auto& s : searches) failures += s.failures;
  if (failures > 0) {
    std::fprintf(stderr, "warning: %zu candidate rollouts failed to integrate\n", failures);
  }
  const Search& s = leader();

  const bool deterministic =
      cfg.problem == Problem::multilayer || cfg.problem == Problem::labyrinth_m1;
  PlayerOutcome player;
  player.best_reward = s.best_reward;
  json selection = json::object();
  if (deterministic) {
    player.params = s.best_x.empty() ? s.es.mean_vector() : s.best_x;
  } else {
    // On rugged landscapes the final mean can sit on a bad ridge while good
    // candidates surround it, so every instance's mean and best candidate
    // are scored on a validation stream separate from the final rollouts.
    const Rng validate(derive_seed(cfg.seed, kValidate));
    const std::size_t reps = cfg.rollout.final_rollouts;
    double best_score = -std::numeric_limits<double>::infinity();
    auto consider = [&](const std::vector<double>& x, std::size_t instance, const char* kind) {
      if (x.empty()) return;
      Rng rng = validate;
      double score = 0.0;
      try {
        for (std::size_t r = 0; r < reps; ++r) score += eval(x, rng).reward;
      } catch (const IntegrationError&) {
        return;
      }
      score /= static_cast<double>(reps);
      if (score > best_score) {
        best_score = score;
        player.params = x;
        selection = {{"instance", instance}, {"kind", kind}, {"validation_reward", score}};
      }
    };
    for (std::size_t i = 0; i < searches.size(); ++i) {
      consider(searches[i].es.mean_vector(), i, "mean");
      consider(searches[i].best_x, i, "best");
    }
    if (player.params.empty()) player.params = s.es.mean_vector();
  }
  const auto params = decode_policy(player.params, layout);

  Rng final_rng(derive_seed(cfg.seed, kFinal));
  std::vector<double> rewards;
  json extra = json::object();

  switch (cfg.problem) {
    case Problem::frog: {
      const auto traj = evolve_swarm(std::get<SwarmSpec>(params), init, cfg, true);
      res.final_points = traj.final_state();
      res.trajectory = traj;
      player.gaussians = to_gaussians(res.final_points);
      const auto& env = std::get<FrogConfig>(cfg.environment);
      for (std::size_t r = 0; r < cfg.rollout.final_rollouts; ++r) {
        rewards.push_back(frog_reward(sample_all(player.gaussians, final_rng), env));
      }
      res.snapshots = disc_snapshots(traj, std::vector<std::size_t>(init.size(), 0));
      extra["mean_action_reward"] = frog_reward(means_of(player.gaussians), env);
      break;
    }
    case Problem::labyrinth_m2: {
      const auto traj = evolve_swarm(std::get<SwarmSpec>(params), init, cfg, true);
      res.final_points = traj.final_state();
      res.trajectory = traj;
      const auto& env = std::get<LabyrinthConfig>(cfg.environment);
      for (std::size_t r = 0; r < cfg.rollout.final_rollouts; ++r) {
        rewards.push_back(labyrinth_reward(sample_angles(res.final_points, final_rng), env));
      }
      res.final_angles = mode_angles(res.final_points);
      res.path = labyrinth_path(res.final_angles, env);
      res.snapshots = disc_snapshots(traj, std::vector<std::size_t>(init.size(), 0));
      extra["mode_angles"] = res.final_angles;
      extra["mode_reward"] = labyrinth_reward(res.final_angles, env);
      break;
    }
    case Problem::labyrinth_m1: {
      const auto& spec = std::get<KuramotoChainSpec>(params);
      PhaseState phi0;
      for (const auto& z : init) phi0.push_back(std::arg(z));
      const auto traj = integrate(KuramotoChainField{spec}, phi0, 0.0, cfg.rollout.horizon,
                                  integrate_options(cfg, true));
      res.final_angles = traj.final_state();
      for (auto& a : res.final_angles) a = wrap_angle(a);
      const auto& env = std::get<LabyrinthConfig>(cfg.environment);
      rewards.push_back(labyrinth_reward(res.final_angles, env));
      res.path = labyrinth_path(res.final_angles, env);
      for (auto i : snapshot_indices(traj)) {
        Snapshot snap{traj.times[i], {}, std::vector<std::size_t>(phi0.size(), 0)};
        for (double a : traj.states[i]) snap.points.push_back(std::polar(1.0, a));
        res.snapshots.push_back(std::move(snap));
      }
      res.final_points = res.snapshots.back().points;
      res.trajectory.times = traj.times;
      for (const auto& st : traj.states) {
        DiscState pts;
        for (double a : st) pts.push_back(std::polar(1.0, a));
        res.trajectory.states.push_back(std::move(pts));
      }
      extra["angles"] = res.final_angles;
      break;
    }
    case Problem::multilayer: {
      const auto& inst = std::get<MultiLayerInstance>(cfg.environment);
      const auto traj = evolve_layers(std::get<SubSwarmSpec>(params), init, cfg, true);
      res.final_points = traj.final_state();
      res.trajectory = traj;
      std::vector<std::size_t> groups(inst.layers[0].nodes.size(), 0);
      groups.resize(init.size(), 1);
      res.isometry_drift = verify_isometry(traj, groups);
      res.cross_layer_change = cross_group_change(traj, groups);
      const auto e = multilayer_evaluation(cfg, res.final_points);
      res.error = static_cast<int>(-e.reward);
      rewards.push_back(e.reward);
      res.snapshots = disc_snapshots(traj, groups);
      // Layer C never moves; show it in every snapshot.
      for (auto& snap : res.snapshots) {
        for (const auto& n : inst.layers[2].nodes) {
          snap.points.push_back(n.z.value());
          snap.groups.push_back(2);
        }
      }
      extra["error"] = res.error;
      extra["minimum_error"] = -static_cast<int>(inst.cross_edges.size());
      extra["isometry_drift"] = res.isometry_drift;
      extra["cross_layer_change"] = res.cross_layer_change;
      break;
    }
    default:
      break;
  }
  const auto st = stats_of(rewards);
  player.reward = st.mean;
  player.reward_std = st.stddev;
  res.players.push_back(player);

  json p = {{"name", ""},
            {"params", player.params},
            {"decoded", params_json(params)},
            {"points", points_json(res.final_points)},
            {"reward", player.reward},
            {"reward_std", player.reward_std},
            {"best_reward", player.best_reward}};
  if (!player.gaussians.empty()) p["gaussians"] = gaussians_json(player.gaussians);
  res.policy = {{"problem", to_string(cfg.problem)},
                {"seed", cfg.seed},
                {"generations", res.generations},
                {"target_reached", res.target_reached},
                {"initial_points", points_json(init)},
                {"players", json::array({p})},
                {"summary", extra}};
  if (!selection.empty()) res.policy["selection"] = selection;
  return res;
}

ExperimentResult run_two_player(const ExperimentConfig& cfg, const RunOptions& opts) {
  const auto start = Clock::now();
  const auto layout = layout_for(cfg);
  const auto init = initial_points(cfg);
  const std::vector<Complex> init_a(init.begin(), init.begin() + kPlayerPoints);
  const std::vector<Complex> init_b(init.begin() + kPlayerPoints, init.end());
  const std::size_t reps = rollouts_per_fitness(cfg);

  auto policy_of = [&](std::span<const double> x, const std::vector<Complex>& z0) {
    return to_gaussians(evolve_swarm(decode_swarm(x, layout), z0, cfg, false).final_state());
  };
  // Player `me` plays x against the frozen opponent policy. Own actions are
  // drawn first, so mirrored players see identical random streams.
  auto evaluator = [&](int me, const std::vector<GaussianParams>& opponent) -> Evaluator {
    const auto& z0 = me == 0 ? init_a : init_b;
    return [&, me, opponent](std::span<const double> x, Rng& rng) {
      const auto own = policy_of(x, z0);
      double total = 0.0;
      for (std::size_t r = 0; r < reps; ++r) {
        const auto mine = sample_all(own, rng);
        const auto theirs = sample_all(opponent, rng);
        total += me == 0 ? joint_rewards(cfg, mine, theirs).first
                         : joint_rewards(cfg, theirs, mine).second;
      }
      return from_reward(total / static_cast<double>(reps));
    };
  };

  const std::uint64_t search_b = cfg.mirror_players ? kSearchA : kSearchB;
  const std::uint64_t eval_b = cfg.mirror_players ? kEvalA : kEvalB;
  Player a(layout.size(), cfg, kSearchA, kEvalA);
  Player b(layout.size(), cfg, search_b, eval_b);
  StallTracker stall_a, stall_b;

  ExperimentResult res;
  res.problem = cfg.problem;
  for (std::size_t gen = 0; gen < cfg.cmaes.max_generations; ++gen) {
    double mean_a = 0.0, mean_b = 0.0;
    if (cfg.schedule == Schedule::alternating) {
      mean_a = a.step(evaluator(0, policy_of(b.current(), init_b)), gen, cfg.cmaes.threads);
      mean_b = b.step(evaluator(1, policy_of(a.current(), init_a)), gen, cfg.cmaes.threads);
    } else {
      const auto pa = policy_of(a.current(), init_a);
      const auto pb = policy_of(b.current(), init_b);
      mean_a = a.step(evaluator(0, pb), gen, cfg.cmaes.threads);
      mean_b = b.step(evaluator(1, pa), gen, cfg.cmaes.threads);
    }
    const double t = seconds_since(start);
    res.records.push_back({gen, a.best_reward(), mean_a, "A", t});
    report(opts, res.records.back(), a.leader().es.sigma());
    res.records.push_back({gen, b.best_reward(), mean_b, "B", t});
    report(opts, res.records.back(), b.leader().es.sigma());
    res.generations = gen + 1;
    const bool stop_a = stall_a.update(a.best_reward(), cfg.cmaes);
    const bool stop_b = stall_b.update(b.best_reward(), cfg.cmaes);
    if (stop_a && stop_b) break;
  }
  if (a.failures() + b.failures() > 0) {
    std::fprintf(stderr, "warning: %zu candidate rollouts failed to integrate\n",
                 a.failures() + b.failures());
  }

  // One closing best-response round restricted to training candidates: A
  // picks against B's current policy, then B against A's pick, both on a
  // validation stream kept apart from the final rollouts.
  auto validate = [&](std::span<const double> xa, std::span<const double> xb) {
    const auto ga = policy_of(xa, init_a), gb = policy_of(xb, init_b);
    Rng rng(derive_seed(cfg.seed, kValidate));
    double ra = 0.0, rb = 0.0;
    for (std::size_t r = 0; r < cfg.rollout.final_rollouts; ++r) {
      const auto sa = sample_all(ga, rng);
      const auto [x, y] = joint_rewards(cfg, sa, sample_all(gb, rng));
      ra += x;
      rb += y;
    }
    const auto n = static_cast<double>(cfg.rollout.final_rollouts);
    return std::pair{ra / n, rb / n};
  };
  struct Choice {
    std::vector<double> x;
    json info;
    double score = -std::numeric_limits<double>::infinity();
  };
  auto pick = [&](const Player& me, int who, const std::vector<double>& other) {
    Choice best;
    for (std::size_t i = 0; i < me.searches.size(); ++i) {
      const Search& s = me.searches[i];
      const auto mean = s.es.mean_vector();
      const std::pair<const char*, const std::vector<double>*> options[] = {
          {"mean", &mean}, {"best", &s.best_x}, {"last_best", &s.last_best_x}};
      for (const auto& [kind, x] : options) {
        if (x->empty()) continue;
        double score;
        try {
          score = who == 0 ? validate(*x, other).first : validate(other, *x).second;
        } catch (const IntegrationError&) {
          continue;
        }
        if (score > best.score) {
          best = {*x, {{"instance", i}, {"kind", kind}, {"validation_reward", score}}, score};
        }
      }
    }
    if (best.x.empty()) best = {me.current(), {{"kind", "mean"}}, 0.0};
    return best;
  };
  const Choice choice_a = pick(a, 0, b.current());
  const Choice choice_b = pick(b, 1, choice_a.x);
  const auto& xa = choice_a.x;
  const auto& xb = choice_b.x;
  const auto traj_a = evolve_swarm(decode_swarm(xa, layout), init_a, cfg, true);
  const auto traj_b = evolve_swarm(decode_swarm(xb, layout), init_b, cfg, true);
  PlayerOutcome pa{xa, a.best_reward(), 0.0, 0.0, to_gaussians(traj_a.final_state())};
  PlayerOutcome pb{xb, b.best_reward(), 0.0, 0.0, to_gaussians(traj_b.final_state())};

  Rng final_rng(derive_seed(cfg.seed, kFinal));
  std::vector<double> ra, rb;
  for (std::size_t r = 0; r < cfg.rollout.final_rollouts; ++r) {
    const auto sa = sample_all(pa.gaussians, final_rng);
    const auto sb = sample_all(pb.gaussians, final_rng);
    const auto [x, y] = joint_rewards(cfg, sa, sb);
    ra.push_back(x);
    rb.push_back(y);
  }
  const auto st_a = stats_of(ra), st_b = stats_of(rb);
  pa.reward = st_a.mean;
  pa.reward_std = st_a.stddev;
  pb.reward = st_b.mean;
  pb.reward_std = st_b.stddev;
  res.mean_action_rewards = joint_rewards(cfg, means_of(pa.gaussians), means_of(pb.gaussians));

  res.final_points = traj_a.final_state();
  res.final_points.insert(res.final_points.end(), traj_b.final_state().begin(),
                          traj_b.final_state().end());
  res.trajectory.times = traj_a.times;
  for (std::size_t i = 0; i < traj_a.states.size(); ++i) {
    auto both = traj_a.states[i];
    both.insert(both.end(), traj_b.states[i].begin(), traj_b.states[i].end());
    res.trajectory.states.push_back(std::move(both));
  }
  for (auto i : snapshot_indices(traj_a)) {
    Snapshot snap{traj_a.times[i], traj_a.states[i], std::vector<std::size_t>(kPlayerPoints, 0)};
    snap.points.insert(snap.points.end(), traj_b.states[i].begin(), traj_b.states[i].end());
    snap.groups.resize(2 * kPlayerPoints, 1);
    res.snapshots.push_back(std::move(snap));
  }

  json players = json::array();
  for (const auto* p : {&pa, &pb}) {
    const auto& traj = p == &pa ? traj_a : traj_b;
    players.push_back({{"name", p == &pa ? "A" : "B"},
                       {"params", p->params},
                       {"decoded", params_json(decode_policy(p->params, layout))},
                       {"points", points_json(traj.final_state())},
                       {"gaussians", gaussians_json(p->gaussians)},
                       {"reward", p->reward},
                       {"reward_std", p->reward_std},
                       {"best_reward", p->best_reward}});
  }
  res.players = {pa, pb};
  res.policy = {{"problem", to_string(cfg.problem)},
                {"seed", cfg.seed},
                {"generations", res.generations},
                {"schedule", cfg.schedule == Schedule::alternating ? "alternating" : "simultaneous"},
                {"initial_points", points_json(init)},
                {"players", players},
                {"selection",
                 {{"A", choice_a.info}, {"B", choice_b.info}}},
                {"summary",
                 {{"mean_action_rewards",
                   {res.mean_action_rewards->first, res.mean_action_rewards->second}}}}};
  return res;
}

std::string time_tag(double t) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", t);
  return buf;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

}  // namespace

std::vector<Complex> initial_points(const ExperimentConfig& cfg) {
  Rng rng(derive_seed(cfg.seed, kInit));
  std::vector<Complex> out;
  switch (cfg.problem) {
    case Problem::multilayer: {
      const auto& inst = std::get<MultiLayerInstance>(cfg.environment);
      for (std::size_t l = 0; l < 2; ++l) {
        for (const auto& n : inst.layers[l].nodes) out.push_back(n.z.value());
      }
      return out;
    }
    case Problem::labyrinth_m1:
      for (std::size_t i = 0; i < policy_points(cfg.problem); ++i) {
        out.push_back(std::polar(1.0, kTwoPi * rng.uniform()));
      }
      return out;
    default: {
      const ConformalNatural law(DiscPoint{}, cfg.initial_concentration);
      const bool mirror = cfg.mirror_players &&
                          (cfg.problem == Problem::two_frogs || cfg.problem == Problem::plane_game);
      const std::size_t n = mirror ? kPlayerPoints : policy_points(cfg.problem);
      for (std::size_t i = 0; i < n; ++i) out.push_back(cn_sample(law, rng).value());
      if (mirror) out.insert(out.end(), out.begin(), out.end());
      return out;
    }
  }
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, const RunOptions& opts) {
  cfg.validate();
  if (cfg.problem == Problem::two_frogs || cfg.problem == Problem::plane_game) {
    return run_two_player(cfg, opts);
  }
  return run_single(cfg, opts);
}

void write_rewards_csv(std::ostream& out, std::span<const TrainingRecord> records) {
  out << "generation,best,mean,player\n";
  char buf[128];
  for (const auto& r : records) {
    std::snprintf(buf, sizeof buf, "%zu,%.10g,%.10g,", r.generation, r.best, r.mean);
    out << buf << r.player << '\n';
  }
}

void write_outputs(const ExperimentResult& res, const ExperimentConfig& cfg,
                   const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "rewards.csv", std::ios::binary);
    write_rewards_csv(out, res.records);
  }
  {
    std::ofstream out(dir / "timing.csv", std::ios::binary);
    out << "generation,player,elapsed_s\n";
    for (const auto& r : res.records) out << r.generation << ',' << r.player << ',' << r.elapsed << '\n';
  }
  write_file(dir / "policy.json", res.policy.dump(2) + "\n");

  for (const auto& snap : res.snapshots) {
    std::vector<PlotPoint> pts;
    for (std::size_t i = 0; i < snap.points.size(); ++i) {
      std::string label;
      if (cfg.problem == Problem::frog || cfg.problem == Problem::two_frogs ||
          cfg.problem == Problem::plane_game) {
        const auto g = disc_to_gaussian(DiscPoint(snap.points[i]));
        char buf[64];
        std::snprintf(buf, sizeof buf, "N(%.2f, %.2f)", g.m, g.var);
        label = buf;
      }
      pts.push_back({snap.points[i], snap.groups[i], label});
    }
    write_file(dir / ("points_T" + time_tag(snap.t) + ".svg"),
               render_disc_svg(pts, to_string(cfg.problem) + ", T = " + time_tag(snap.t)));
  }

  {
    std::ofstream out(dir / "trajectory.csv", std::ios::binary);
    write_trajectory_csv(out, res.trajectory);
  }

  std::vector<Series> series;
  for (const std::string player : {"", "A", "B"}) {
    Series best{player.empty() ? "best" : "best " + player, {}, {}};
    Series mean{player.empty() ? "mean" : "mean " + player, {}, {}};
    for (const auto& r : res.records) {
      if (r.player != player) continue;
      best.x.push_back(static_cast<double>(r.generation));
      best.y.push_back(r.best);
      mean.x.push_back(static_cast<double>(r.generation));
      mean.y.push_back(r.mean);
    }
    if (!best.x.empty()) {
      series.push_back(std::move(best));
      series.push_back(std::move(mean));
    }
  }
  write_file(dir / "rewards.svg",
             render_line_chart_svg(series, to_string(cfg.problem) + " training", "generation",
                                   "reward"));

  if (const auto* lab = std::get_if<LabyrinthConfig>(&cfg.environment); lab && !res.path.empty()) {
    write_file(dir / "path.svg", render_labyrinth_svg(*lab, res.path, to_string(cfg.problem) + " path"));
  }
}

BaselineStats run_baseline(const ExperimentConfig& cfg, std::size_t rollouts) {
  cfg.validate();
  if (rollouts == 0) throw ConfigError("baseline: rollouts must be >= 1");
  Rng rng(derive_seed(cfg.seed, kBaseline));
  std::vector<double> rewards;
  rewards.reserve(rollouts);

  if (const auto* lab = std::get_if<LabyrinthConfig>(&cfg.environment)) {
    std::vector<double> angles(lab->n_steps);
    for (std::size_t r = 0; r < rollouts; ++r) {
      for (auto& a : angles) a = kTwoPi * rng.uniform();
      rewards.push_back(labyrinth_reward(angles, *lab));
    }
  } else {
    const auto layout = layout_for(cfg);
    const std::vector<double> zero(layout.size(), 0.0);
    const auto init = initial_points(cfg);
    if (cfg.problem == Problem::two_frogs || cfg.problem == Problem::plane_game) {
      const std::vector<Complex> za(init.begin(), init.begin() + kPlayerPoints);
      const std::vector<Complex> zb(init.begin() + kPlayerPoints, init.end());
      const auto ga = to_gaussians(evolve_swarm(decode_swarm(zero, layout), za, cfg, false).final_state());
      const auto gb = to_gaussians(evolve_swarm(decode_swarm(zero, layout), zb, cfg, false).final_state());
      for (std::size_t r = 0; r < rollouts; ++r) {
        const auto sa = sample_all(ga, rng);
        rewards.push_back(joint_rewards(cfg, sa, sample_all(gb, rng)).first);
      }
    } else {
      const auto eval = single_agent_evaluator(cfg, layout, init);
      for (std::size_t r = 0; r < rollouts; ++r) {
        Rng sub = rng.split(r);
        rewards.push_back(eval(zero, sub).reward);
      }
    }
  }
  const auto st = stats_of(rewards);
  return {rollouts, st.mean, st.stddev, st.min, st.max};
}

}  // namespace hyperswarm
