#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <variant>

#include <json.hpp>

#include "hyperswarm/envs.hpp"

namespace hyperswarm {

inline constexpr int kSchemaVersion = 1;

/// Malformed or inconsistent configuration. The CLI maps it to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Environment =
    std::variant<FrogConfig, TwoFrogConfig, LabyrinthConfig, PlaneGameConfig, MultiLayerInstance>;

/// Environment documents carry "schema_version" and "type"
/// (frog | two_frogs | labyrinth | plane_game | multilayer). Angles are in
/// degrees on disk and radians in memory.
Environment environment_from_json(const nlohmann::json& doc);
nlohmann::json environment_to_json(const Environment& env);

/// JSON file, or the edge-list text format for multilayer graphs when the
/// extension is .edges or .txt. Every loaded environment is validated.
Environment load_environment(const std::filesystem::path& path);

/// Edge-list text format:
///
///   # comment
///   epsilon 0.2
///   edges
///   A:A1 A:A2        same layer: tree edge; different layers: cross edge
///   coordinates
///   A:A1 0.10 -0.05
///
/// Layers are ordered by first appearance in the coordinate block; the third
/// layer is the one kept fixed.
MultiLayerInstance parse_edge_list(std::istream& in);
void write_edge_list(std::ostream& out, const MultiLayerInstance& inst);

/// Returns the instance with layers A and B moved by ga and gb.
MultiLayerInstance transform_layers(const MultiLayerInstance& inst, const MobiusTransform& ga,
                                    const MobiusTransform& gb);

}  // namespace hyperswarm
