#include "hyperswarm/env_config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iterator>
#include <numbers>
#include <sstream>

namespace hyperswarm {

using nlohmann::json;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

// Degrees that are exact multiples of 1/1000 print back as written.
double to_degrees(double rad) { return std::round(rad / kDeg * 1e9) / 1e9; }

template <class T>
T get_or(const json& doc, const char* key, T fallback) {
  return doc.contains(key) ? doc.at(key).get<T>() : fallback;
}

void check_schema(const json& doc) {
  if (!doc.is_object()) throw ConfigError("config: expected a JSON object");
  if (!doc.contains("schema_version")) throw ConfigError("config: missing schema_version");
  const int v = doc.at("schema_version").get<int>();
  if (v != kSchemaVersion) {
    throw ConfigError("config: unsupported schema_version " + std::to_string(v));
  }
}

FrogConfig frog_from(const json& doc) {
  FrogConfig cfg;
  if (doc.contains("reward_spots")) {
    cfg.reward_spots.clear();
    for (const auto& s : doc.at("reward_spots")) {
      cfg.reward_spots.push_back({s.at("position").get<double>(), s.at("value").get<double>()});
    }
  }
  cfg.capture_radius = get_or(doc, "capture_radius", cfg.capture_radius);
  cfg.jump_cost = get_or(doc, "jump_cost", cfg.jump_cost);
  cfg.free_jump_threshold = get_or(doc, "free_jump_threshold", cfg.free_jump_threshold);
  if (doc.contains("bounds")) {
    const auto& b = doc.at("bounds");
    if (!b.is_array() || b.size() != 2) throw ConfigError("frog: bounds must be [lo, hi]");
    cfg.lo = b[0].get<double>();
    cfg.hi = b[1].get<double>();
  }
  cfg.out_of_bounds_penalty = get_or(doc, "out_of_bounds_penalty", cfg.out_of_bounds_penalty);
  return cfg;
}

json frog_to(const FrogConfig& cfg) {
  json spots = json::array();
  for (const auto& s : cfg.reward_spots) spots.push_back({{"position", s.position}, {"value", s.value}});
  return {{"reward_spots", spots},
          {"capture_radius", cfg.capture_radius},
          {"jump_cost", cfg.jump_cost},
          {"free_jump_threshold", cfg.free_jump_threshold},
          {"bounds", {cfg.lo, cfg.hi}},
          {"out_of_bounds_penalty", cfg.out_of_bounds_penalty}};
}

LabyrinthConfig labyrinth_from(const json& doc) {
  LabyrinthConfig cfg;
  cfg.radii = doc.at("radii").get<std::vector<double>>();
  for (const auto& circle : doc.at("circles")) {
    std::vector<Arc> table;
    for (const auto& a : circle.at("arcs")) {
      table.push_back({a.at("start_deg").get<double>() * kDeg, a.at("end_deg").get<double>() * kDeg,
                       a.at("reward").get<double>()});
    }
    cfg.arcs.push_back(std::move(table));
  }
  cfg.step_length = get_or(doc, "step_length", cfg.step_length);
  cfg.n_steps = get_or<std::size_t>(doc, "n_steps", cfg.n_steps);
  cfg.barrier_value = get_or(doc, "barrier_value", cfg.barrier_value);
  return cfg;
}

json labyrinth_to(const LabyrinthConfig& cfg) {
  json circles = json::array();
  for (const auto& table : cfg.arcs) {
    json arcs = json::array();
    for (const auto& a : table) {
      arcs.push_back({{"start_deg", to_degrees(a.start)},
                      {"end_deg", to_degrees(a.end)},
                      {"reward", a.reward}});
    }
    circles.push_back({{"arcs", arcs}});
  }
  return {{"radii", cfg.radii},
          {"circles", circles},
          {"step_length", cfg.step_length},
          {"n_steps", cfg.n_steps},
          {"barrier_value", cfg.barrier_value}};
}

PlaneGameConfig plane_from(const json& doc) {
  PlaneGameConfig cfg;
  for (const auto& a : doc.at("annuli")) {
    Annulus annulus{a.at("r_in").get<double>(), a.at("r_out").get<double>(), {}};
    for (const auto& f : a.at("fields")) {
      annulus.fields.push_back({f.at("start_deg").get<double>() * kDeg,
                                f.at("end_deg").get<double>() * kDeg,
                                f.at("reward_a").get<double>(), f.at("reward_b").get<double>()});
    }
    cfg.annuli.push_back(std::move(annulus));
  }
  return cfg;
}

json plane_to(const PlaneGameConfig& cfg) {
  json annuli = json::array();
  for (const auto& a : cfg.annuli) {
    json fields = json::array();
    for (const auto& f : a.fields) {
      fields.push_back({{"start_deg", to_degrees(f.start)},
                        {"end_deg", to_degrees(f.end)},
                        {"reward_a", f.reward_a},
                        {"reward_b", f.reward_b}});
    }
    annuli.push_back({{"r_in", a.r_in}, {"r_out", a.r_out}, {"fields", fields}});
  }
  return {{"annuli", annuli}};
}

// "A:A6" -> (layer index, node index).
std::pair<std::size_t, std::size_t> resolve(const MultiLayerInstance& inst, const std::string& ref) {
  const auto colon = ref.find(':');
  if (colon == std::string::npos) {
    throw ConfigError("multilayer: node reference '" + ref + "' is not layer:node");
  }
  const auto layer = inst.layer_index(ref.substr(0, colon));
  return {layer, inst.layers[layer].index_of(ref.substr(colon + 1))};
}

void add_edge(MultiLayerInstance& inst, const std::string& u, const std::string& v) {
  const auto [la, na] = resolve(inst, u);
  const auto [lb, nb] = resolve(inst, v);
  if (la == lb) {
    inst.layers[la].edges.emplace_back(na, nb);
  } else {
    inst.cross_edges.push_back({la, na, lb, nb});
  }
}

std::string node_ref(const MultiLayerInstance& inst, std::size_t layer, std::size_t node) {
  return inst.layers[layer].name + ":" + inst.layers[layer].nodes[node].id;
}

MultiLayerInstance multilayer_from(const json& doc) {
  MultiLayerInstance inst;
  inst.epsilon = get_or(doc, "epsilon", inst.epsilon);
  for (const auto& l : doc.at("layers")) {
    Layer layer;
    layer.name = l.at("name").get<std::string>();
    for (const auto& n : l.at("nodes")) {
      const auto z = n.at("z").get<std::vector<double>>();
      if (z.size() != 2) throw ConfigError("multilayer: node coordinates must be [re, im]");
      layer.nodes.push_back({n.at("id").get<std::string>(), DiscPoint(z[0], z[1])});
    }
    inst.layers.push_back(std::move(layer));
  }
  for (std::size_t l = 0; l < inst.layers.size(); ++l) {
    const auto& spec = doc.at("layers")[l];
    if (!spec.contains("edges")) continue;
    for (const auto& e : spec.at("edges")) {
      const auto name = inst.layers[l].name + ":";
      add_edge(inst, name + e.at(0).get<std::string>(), name + e.at(1).get<std::string>());
    }
  }
  for (const auto& e : doc.at("cross_edges")) {
    add_edge(inst, e.at(0).get<std::string>(), e.at(1).get<std::string>());
  }
  return inst;
}

json multilayer_to(const MultiLayerInstance& inst) {
  json layers = json::array();
  for (const auto& layer : inst.layers) {
    json nodes = json::array(), edges = json::array();
    for (const auto& n : layer.nodes) nodes.push_back({{"id", n.id}, {"z", {n.z.re(), n.z.im()}}});
    for (auto [i, j] : layer.edges) edges.push_back({layer.nodes[i].id, layer.nodes[j].id});
    layers.push_back({{"name", layer.name}, {"nodes", nodes}, {"edges", edges}});
  }
  json cross = json::array();
  for (const auto& e : inst.cross_edges) {
    cross.push_back({node_ref(inst, e.layer_a, e.node_a), node_ref(inst, e.layer_b, e.node_b)});
  }
  return {{"epsilon", inst.epsilon}, {"layers", layers}, {"cross_edges", cross}};
}

template <class F>
auto rethrow_as_config(const std::string& what, F&& f) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(what + ": " + e.what());
  }
}

void validate(const Environment& env) {
  std::visit([](const auto& cfg) { cfg.validate(); }, env);
}

}  // namespace

Environment environment_from_json(const json& doc) {
  check_schema(doc);
  const auto type = rethrow_as_config("config", [&] { return doc.at("type").get<std::string>(); });
  return rethrow_as_config(type, [&]() -> Environment {
    Environment env;
    if (type == "frog") {
      env = frog_from(doc);
    } else if (type == "two_frogs") {
      TwoFrogConfig cfg;
      cfg.base = frog_from(doc);
      cfg.long_jump_threshold = get_or(doc, "long_jump_threshold", cfg.long_jump_threshold);
      cfg.long_jump_cost = get_or(doc, "long_jump_cost", cfg.long_jump_cost);
      cfg.collision_radius = get_or(doc, "collision_radius", cfg.base.capture_radius);
      env = cfg;
    } else if (type == "labyrinth") {
      env = labyrinth_from(doc);
    } else if (type == "plane_game") {
      env = plane_from(doc);
    } else if (type == "multilayer") {
      env = multilayer_from(doc);
    } else {
      throw ConfigError("config: unknown environment type '" + type + "'");
    }
    validate(env);
    return env;
  });
}

json environment_to_json(const Environment& env) {
  json doc = std::visit(
      [](const auto& cfg) -> json {
        using T = std::decay_t<decltype(cfg)>;
        if constexpr (std::is_same_v<T, FrogConfig>) {
          json j = frog_to(cfg);
          j["type"] = "frog";
          return j;
        } else if constexpr (std::is_same_v<T, TwoFrogConfig>) {
          json j = frog_to(cfg.base);
          j["type"] = "two_frogs";
          j["long_jump_threshold"] = cfg.long_jump_threshold;
          j["long_jump_cost"] = cfg.long_jump_cost;
          j["collision_radius"] = cfg.collision_radius;
          return j;
        } else if constexpr (std::is_same_v<T, LabyrinthConfig>) {
          json j = labyrinth_to(cfg);
          j["type"] = "labyrinth";
          return j;
        } else if constexpr (std::is_same_v<T, PlaneGameConfig>) {
          json j = plane_to(cfg);
          j["type"] = "plane_game";
          return j;
        } else {
          json j = multilayer_to(cfg);
          j["type"] = "multilayer";
          return j;
        }
      },
      env);
  doc["schema_version"] = kSchemaVersion;
  return doc;
}

Environment load_environment(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open environment file " + path.string());
  const auto ext = path.extension().string();
  if (ext == ".edges" || ext == ".txt") {
    return rethrow_as_config(path.string(), [&]() -> Environment {
      auto inst = parse_edge_list(in);
      inst.validate();
      return inst;
    });
  }
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return environment_from_json(doc);
}

MultiLayerInstance parse_edge_list(std::istream& in) {
  MultiLayerInstance inst;
  std::vector<std::pair<std::string, std::string>> edges;
  enum class Block { none, edges, coordinates } block = Block::none;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string head;
    if (!(fields >> head)) continue;
    auto fail = [&](const std::string& msg) {
      throw ConfigError("edge list line " + std::to_string(lineno) + ": " + msg);
    };
    if (head == "epsilon") {
      if (!(fields >> inst.epsilon)) fail("expected a number after epsilon");
    } else if (head == "edges") {
      block = Block::edges;
    } else if (head == "coordinates") {
      block = Block::coordinates;
    } else if (block == Block::edges) {
      std::string other;
      if (!(fields >> other)) fail("expected two node references");
      edges.emplace_back(head, other);
    } else if (block == Block::coordinates) {
      double re = 0.0, im = 0.0;
      if (!(fields >> re >> im)) fail("expected node re im");
      const auto colon = head.find(':');
      if (colon == std::string::npos) fail("node reference must be layer:node");
      const auto layer_name = head.substr(0, colon);
      auto it = std::find_if(inst.layers.begin(), inst.layers.end(),
                             [&](const Layer& l) { return l.name == layer_name; });
      if (it == inst.layers.end()) {
        inst.layers.push_back({layer_name, {}, {}});
        it = std::prev(inst.layers.end());
      }
      it->nodes.push_back({head.substr(colon + 1), DiscPoint(re, im)});
    } else {
      fail("unexpected '" + head + "' outside an edges or coordinates block");
    }
  }
  for (const auto& [u, v] : edges) add_edge(inst, u, v);
  return inst;
}

void write_edge_list(std::ostream& out, const MultiLayerInstance& inst) {
  out << std::setprecision(17);
  out << "epsilon " << inst.epsilon << "\nedges\n";
  for (std::size_t l = 0; l < inst.layers.size(); ++l) {
    for (auto [i, j] : inst.layers[l].edges) {
      out << node_ref(inst, l, i) << ' ' << node_ref(inst, l, j) << '\n';
    }
  }
  for (const auto& e : inst.cross_edges) {
    out << node_ref(inst, e.layer_a, e.node_a) << ' ' << node_ref(inst, e.layer_b, e.node_b)
        << '\n';
  }
  out << "coordinates\n";
  for (std::size_t l = 0; l < inst.layers.size(); ++l) {
    for (std::size_t i = 0; i < inst.layers[l].nodes.size(); ++i) {
      const auto z = inst.layers[l].nodes[i].z;
      out << node_ref(inst, l, i) << ' ' << z.re() << ' ' << z.im() << '\n';
    }
  }
}

MultiLayerInstance transform_layers(const MultiLayerInstance& inst, const MobiusTransform& ga,
                                    const MobiusTransform& gb) {
  MultiLayerInstance out = inst;
  for (auto& n : out.layers.at(0).nodes) n.z = mobius_apply(ga, n.z);
  for (auto& n : out.layers.at(1).nodes) n.z = mobius_apply(gb, n.z);
  return out;
}

}  // namespace hyperswarm
