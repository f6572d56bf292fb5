#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hyperswarm/geom.hpp"

namespace hyperswarm {

struct RewardSpot {
  double position = 0.0;
  double value = 0.0;
};

struct FrogConfig {
  std::vector<RewardSpot> reward_spots{{1.0, 2.0}, {3.0, 3.0}, {5.0, 3.0}};
  double capture_radius = 0.25;
  double jump_cost = 1.0;
  double free_jump_threshold = 0.0;  // jumps with |j| <= this are free
  double lo = -1.0;
  double hi = 8.0;
  double out_of_bounds_penalty = 10.0;

  void validate() const;
};

struct TwoFrogConfig {
  FrogConfig base;
  double long_jump_threshold = 3.0;
  double long_jump_cost = 2.0;
  double collision_radius = 0.25;

  void validate() const;
};

/// Angular interval [start, end) traversed counter-clockwise, in radians.
/// end < start wraps through zero.
struct Arc {
  double start = 0.0;
  double end = 0.0;
  double reward = 0.0;
};

struct LabyrinthConfig {
  std::vector<double> radii{1.0, 2.0, 3.0, 4.0, 5.0};
  std::vector<std::vector<Arc>> arcs;  // one arc table per circle
  double step_length = 1.0;
  std::size_t n_steps = 10;
  double barrier_value = -100.0;

  /// Checks radii, and that every arc table tiles its circle.
  void validate() const;
  /// Index of the arc on circle `circle` containing `angle`.
  std::size_t arc_at(std::size_t circle, double angle) const;
  bool is_barrier(const Arc& arc) const { return arc.reward == barrier_value; }
};

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

struct ArcCrossing {
  std::size_t circle = 0;
  std::size_t arc = 0;
  Point2 point;
  double t = 0.0;  // parameter along the segment, in (0, 1]
};

struct Field {
  double start = 0.0;  // radians, counter-clockwise as for Arc
  double end = 0.0;
  double reward_a = 0.0;
  double reward_b = 0.0;
};

struct Annulus {
  double r_in = 0.0;
  double r_out = 0.0;
  std::vector<Field> fields;
};

struct PlaneGameConfig {
  std::vector<Annulus> annuli;

  void validate() const;
};

struct GraphNode {
  std::string id;
  DiscPoint z;
};

struct Layer {
  std::string name;
  std::vector<GraphNode> nodes;
  std::vector<std::pair<std::size_t, std::size_t>> edges;  // tree edges, node indices

  std::size_t index_of(const std::string& id) const;
};

/// Link between layers, by layer and node index.
struct CrossEdge {
  std::size_t layer_a = 0, node_a = 0;
  std::size_t layer_b = 0, node_b = 0;
};

/// Three embedded trees A, B, C plus the links between them. C is the layer
/// that stays put.
struct MultiLayerInstance {
  std::vector<Layer> layers;
  std::vector<CrossEdge> cross_edges;
  double epsilon = 0.2;

  /// Throws std::invalid_argument unless there are three layers, indices are
  /// in range, and each layer is properly embedded: tree edge <=> d < epsilon.
  void validate() const;
  std::size_t layer_index(const std::string& name) const;
};

double frog_reward(std::span<const double> jumps, const FrogConfig& cfg);

/// Simultaneous jumps. Each player owns a private copy of every reward; when
/// both land within collision_radius of each other at the same spot neither
/// collects, and the rewards stay.
std::pair<double, double> two_frog_rewards(std::span<const double> jumps_a,
                                           std::span<const double> jumps_b,
                                           const TwoFrogConfig& cfg);

/// All contacts of the segment p0 -> p1 with the labyrinth circles, in order
/// along the segment. The start point is excluded and the end point included,
/// so consecutive steps never report a shared vertex twice; a tangency is a
/// single contact.
std::vector<ArcCrossing> segment_arc_crossings(Point2 p0, Point2 p1,
                                               const LabyrinthConfig& cfg);

/// Walk of n_steps from the origin. Positive arcs pay once; barrier arcs
/// charge on every crossing.
double labyrinth_reward(std::span<const double> angles, const LabyrinthConfig& cfg);

/// Vertices of the walk, starting with the origin.
std::vector<Point2> labyrinth_path(std::span<const double> angles,
                                   const LabyrinthConfig& cfg);

std::pair<double, double> plane_game_rewards(std::span<const double> a,
                                             std::span<const double> b,
                                             const PlaneGameConfig& cfg);

/// J over the evolved layers A and B against the fixed layer C. Points are
/// given per layer, in node order.
int multilayer_error(const MultiLayerInstance& inst, std::span<const Complex> layer_a,
                     std::span<const Complex> layer_b);
int multilayer_error(const MultiLayerInstance& inst, const MobiusTransform& ga,
                     const MobiusTransform& gb);

/// Mean over cross edges of d / (1 + d), in [0, 1). Breaks ties between
/// configurations with equal J.
double multilayer_edge_slack(const MultiLayerInstance& inst,
                             std::span<const Complex> layer_a,
                             std::span<const Complex> layer_b);

}  // namespace hyperswarm
