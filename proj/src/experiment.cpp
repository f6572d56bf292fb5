#include "hyperswarm/experiment.hpp"

#include <fstream>

namespace hyperswarm {

using nlohmann::json;

namespace {

struct ProblemDefaults {
  double horizon;
  std::size_t samples;
  std::size_t evaluations;
  std::size_t max_generations;
  double sigma0;
  std::size_t patience;
};

// Horizons, rollout counts and the frog's unit initial spread follow the
// published algorithms; budgets are generous since none are published.
ProblemDefaults defaults_for(Problem p) {
  switch (p) {
    case Problem::frog: return {2.0, 1, 10, 300, 1.0, 30};
    case Problem::multilayer: return {4.0, 1, 1, 500, 0.5, 0};
    case Problem::labyrinth_m1: return {1.0, 1, 1, 300, 0.5, 0};
    case Problem::labyrinth_m2: return {1.0, 5, 1, 300, 0.5, 0};
    case Problem::two_frogs: return {2.0, 1, 10, 500, 0.5, 0};
    case Problem::plane_game: return {2.0, 1, 10, 300, 0.5, 0};
  }
  return {2.0, 1, 10, 300, 0.5, 0};
}

template <class T>
T get_or(const json& doc, const char* key, T fallback) {
  return doc.contains(key) && !doc.at(key).is_null() ? doc.at(key).get<T>() : fallback;
}

bool environment_matches(Problem p, const Environment& env) {
  switch (p) {
    case Problem::frog: return std::holds_alternative<FrogConfig>(env);
    case Problem::multilayer: return std::holds_alternative<MultiLayerInstance>(env);
    case Problem::labyrinth_m1:
    case Problem::labyrinth_m2: return std::holds_alternative<LabyrinthConfig>(env);
    case Problem::two_frogs: return std::holds_alternative<TwoFrogConfig>(env);
    case Problem::plane_game: return std::holds_alternative<PlaneGameConfig>(env);
  }
  return false;
}

}  // namespace

std::string to_string(Problem p) {
  switch (p) {
    case Problem::frog: return "frog";
    case Problem::multilayer: return "multilayer";
    case Problem::labyrinth_m1: return "labyrinth_m1";
    case Problem::labyrinth_m2: return "labyrinth_m2";
    case Problem::two_frogs: return "two_frogs";
    case Problem::plane_game: return "plane_game";
  }
  return "?";
}

Problem problem_from_string(const std::string& name) {
  for (auto p : {Problem::frog, Problem::multilayer, Problem::labyrinth_m1, Problem::labyrinth_m2,
                 Problem::two_frogs, Problem::plane_game}) {
    if (to_string(p) == name) return p;
  }
  throw ConfigError("unknown problem '" + name + "'");
}

void ExperimentConfig::validate() const {
  if (!(rollout.horizon > 0.0)) throw ConfigError("rollout.horizon must be > 0");
  if (!(rollout.dt > 0.0)) throw ConfigError("rollout.dt must be > 0");
  if (rollout.samples == 0) throw ConfigError("rollout.samples must be >= 1");
  if (rollout.evaluations == 0) throw ConfigError("rollout.evaluations must be >= 1");
  if (rollout.final_rollouts == 0) throw ConfigError("rollout.final_rollouts must be >= 1");
  if (!(cmaes.sigma0 > 0.0)) throw ConfigError("cmaes.sigma0 must be > 0");
  if (cmaes.max_generations == 0) throw ConfigError("cmaes.max_generations must be >= 1");
  if (cmaes.lambda == 1) throw ConfigError("cmaes.lambda must be >= 2");
  if (!(coupling_scale > 0.0)) throw ConfigError("coupling_scale must be > 0");
  if (!(initial_concentration > 1.0)) throw ConfigError("initial_concentration must be > 1");
  if (cmaes.instances == 0) throw ConfigError("cmaes.instances must be >= 1");
  if (cmaes.target && (problem == Problem::two_frogs || problem == Problem::plane_game)) {
    throw ConfigError("cmaes.target is not defined for two-player problems");
  }
  if (!environment_matches(problem, environment)) {
    throw ConfigError("environment " + environment_path.string() + " does not fit problem " +
                      to_string(problem));
  }
}

ExperimentConfig experiment_from_json(const json& doc, const std::filesystem::path& base_dir) {
  if (!doc.is_object()) throw ConfigError("experiment: expected a JSON object");
  if (get_or<int>(doc, "schema_version", -1) != kSchemaVersion) {
    throw ConfigError("experiment: missing or unsupported schema_version");
  }
  ExperimentConfig cfg;
  try {
    cfg.problem = problem_from_string(doc.at("problem").get<std::string>());
    const auto d = defaults_for(cfg.problem);
    cfg.seed = get_or<std::uint64_t>(doc, "seed", 0);

    auto env = std::filesystem::path(doc.at("environment").get<std::string>());
    cfg.environment_path = env.is_absolute() ? env : base_dir / env;
    cfg.environment = load_environment(cfg.environment_path);

    const json cm = doc.value("cmaes", json::object());
    cfg.cmaes.lambda = get_or<std::size_t>(cm, "lambda", 0);
    cfg.cmaes.sigma0 = get_or(cm, "sigma0", d.sigma0);
    cfg.cmaes.max_generations = get_or(cm, "max_generations", d.max_generations);
    if (cm.contains("target") && !cm.at("target").is_null()) cfg.cmaes.target = cm.at("target").get<double>();
    cfg.cmaes.patience = get_or(cm, "patience", d.patience);
    cfg.cmaes.patience_tol = get_or(cm, "patience_tol", cfg.cmaes.patience_tol);
    cfg.cmaes.threads = get_or(cm, "threads", 1u);
    cfg.cmaes.instances = get_or(cm, "instances", cfg.cmaes.instances);

    const json ro = doc.value("rollout", json::object());
    cfg.rollout.horizon = get_or(ro, "horizon", d.horizon);
    cfg.rollout.dt = get_or(ro, "dt", cfg.rollout.dt);
    cfg.rollout.samples = get_or(ro, "samples", d.samples);
    cfg.rollout.evaluations = get_or(ro, "evaluations", d.evaluations);
    cfg.rollout.final_rollouts = get_or(ro, "final_rollouts", cfg.rollout.final_rollouts);

    const json tp = doc.value("two_player", json::object());
    const auto schedule = get_or<std::string>(tp, "schedule", "alternating");
    if (schedule == "alternating") {
      cfg.schedule = Schedule::alternating;
    } else if (schedule == "simultaneous") {
      cfg.schedule = Schedule::simultaneous;
    } else {
      throw ConfigError("two_player.schedule must be alternating or simultaneous");
    }
    cfg.mirror_players = get_or(tp, "mirror_players", false);

    cfg.initial_concentration = get_or(doc, "initial_concentration", cfg.initial_concentration);
    cfg.tie_break = get_or(doc, "tie_break", cfg.tie_break);
    cfg.output_dir = get_or<std::string>(doc, "output_dir", "out");
    cfg.coupling_scale = get_or(doc, "coupling_scale", cfg.coupling_scale);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("experiment: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_experiment(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open experiment file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return experiment_from_json(doc, path.parent_path());
}

json experiment_to_json(const ExperimentConfig& cfg) {
  json cm = {{"lambda", cfg.cmaes.lambda},
             {"sigma0", cfg.cmaes.sigma0},
             {"max_generations", cfg.cmaes.max_generations},
             {"patience", cfg.cmaes.patience},
             {"patience_tol", cfg.cmaes.patience_tol},
             {"threads", cfg.cmaes.threads},
             {"instances", cfg.cmaes.instances}};
  cm["target"] = cfg.cmaes.target ? json(*cfg.cmaes.target) : json(nullptr);
  return {{"schema_version", kSchemaVersion},
          {"problem", to_string(cfg.problem)},
          {"seed", cfg.seed},
          {"environment", cfg.environment_path.string()},
          {"cmaes", cm},
          {"rollout",
           {{"horizon", cfg.rollout.horizon},
            {"dt", cfg.rollout.dt},
            {"samples", cfg.rollout.samples},
            {"evaluations", cfg.rollout.evaluations},
            {"final_rollouts", cfg.rollout.final_rollouts}}},
          {"two_player",
           {{"schedule", cfg.schedule == Schedule::alternating ? "alternating" : "simultaneous"},
            {"mirror_players", cfg.mirror_players}}},
          {"initial_concentration", cfg.initial_concentration},
          {"tie_break", cfg.tie_break},
          {"output_dir", cfg.output_dir.string()},
          {"coupling_scale", cfg.coupling_scale}};
}

}  // namespace hyperswarm
