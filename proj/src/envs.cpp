#include "hyperswarm/envs.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hyperswarm {

namespace {

constexpr double kAngleTol = 1e-9;

// Counter-clockwise extent of [start, end); a full turn when start == end.
double arc_span(double start, double end) {
  const double s = wrap_angle(end - start);
  return s == 0.0 ? kTwoPi : s;
}

bool in_arc(double start, double end, double angle) {
  const double off = wrap_angle(angle - start);
  return off < arc_span(start, end);
}

void validate_tiling(std::vector<std::pair<double, double>> arcs, const std::string& what) {
  if (arcs.empty()) throw std::invalid_argument(what + ": no arcs");
  double total = 0.0;
  for (auto& [s, e] : arcs) {
    total += arc_span(s, e);
    s = wrap_angle(s);
    e = wrap_angle(e);
  }
  if (std::abs(total - kTwoPi) > kAngleTol) {
    throw std::invalid_argument(what + ": arcs do not cover the circle exactly once");
  }
  std::sort(arcs.begin(), arcs.end());
  for (std::size_t i = 0; i < arcs.size(); ++i) {
    const double next = arcs[(i + 1) % arcs.size()].first;
    if (std::abs(std::remainder(arcs[i].second - next, kTwoPi)) > kAngleTol) {
      throw std::invalid_argument(what + ": arcs leave a gap or overlap");
    }
  }
}

double jump_cost(double j, const FrogConfig& cfg) {
  return std::abs(j) > cfg.free_jump_threshold ? cfg.jump_cost : 0.0;
}

}  // namespace

void FrogConfig::validate() const {
  if (!(lo < hi)) throw std::invalid_argument("frog: bounds need lo < hi");
  if (!(capture_radius > 0.0)) throw std::invalid_argument("frog: capture_radius must be > 0");
  if (free_jump_threshold < 0.0) {
    throw std::invalid_argument("frog: free_jump_threshold must be >= 0");
  }
}

void TwoFrogConfig::validate() const {
  base.validate();
  if (!(collision_radius > 0.0)) {
    throw std::invalid_argument("two frogs: collision_radius must be > 0");
  }
}

void LabyrinthConfig::validate() const {
  if (radii.empty()) throw std::invalid_argument("labyrinth: no circles");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0) || (i > 0 && !(radii[i] > radii[i - 1]))) {
      throw std::invalid_argument("labyrinth: radii must be positive and strictly increasing");
    }
  }
  if (arcs.size() != radii.size()) {
    throw std::invalid_argument("labyrinth: need one arc table per circle");
  }
  for (std::size_t c = 0; c < arcs.size(); ++c) {
    std::vector<std::pair<double, double>> spans;
    for (const auto& a : arcs[c]) spans.emplace_back(a.start, a.end);
    validate_tiling(std::move(spans), "labyrinth circle " + std::to_string(c));
  }
  if (!(step_length > 0.0)) throw std::invalid_argument("labyrinth: step_length must be > 0");
  if (n_steps == 0) throw std::invalid_argument("labyrinth: n_steps must be >= 1");
}

std::size_t LabyrinthConfig::arc_at(std::size_t circle, double angle) const {
  const auto& table = arcs.at(circle);
  for (std::size_t i = 0; i < table.size(); ++i) {
    if (in_arc(table[i].start, table[i].end, angle)) return i;
  }
  // Only reachable through round-off at a seam; the nearest start wins.
  std::size_t best = 0;
  double best_off = kTwoPi;
  for (std::size_t i = 0; i < table.size(); ++i) {
    const double off = std::abs(std::remainder(angle - table[i].start, kTwoPi));
    if (off < best_off) {
      best_off = off;
      best = i;
    }
  }
  return best;
}

void PlaneGameConfig::validate() const {
  for (std::size_t i = 0; i < annuli.size(); ++i) {
    const auto& a = annuli[i];
    if (!(a.r_in >= 0.0 && a.r_out > a.r_in)) {
      throw std::invalid_argument("plane game: annulus needs 0 <= r_in < r_out");
    }
    if (i > 0 && a.r_in < annuli[i - 1].r_out) {
      throw std::invalid_argument("plane game: annuli must be ordered and disjoint");
    }
    std::vector<std::pair<double, double>> spans;
    for (const auto& f : a.fields) spans.emplace_back(f.start, f.end);
    validate_tiling(std::move(spans), "plane game annulus " + std::to_string(i));
  }
}

std::size_t Layer::index_of(const std::string& id) const {
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].id == id) return i;
  }
  throw std::invalid_argument("layer " + name + ": unknown node '" + id + "'");
}

std::size_t MultiLayerInstance::layer_index(const std::string& name) const {
  for (std::size_t i = 0; i < layers.size(); ++i) {
    if (layers[i].name == name) return i;
  }
  throw std::invalid_argument("multilayer: unknown layer '" + name + "'");
}

void MultiLayerInstance::validate() const {
  if (!(epsilon > 0.0)) throw std::invalid_argument("multilayer: epsilon must be > 0");
  if (layers.size() != 3) throw std::invalid_argument("multilayer: expected three layers");
  for (const auto& layer : layers) {
    const std::size_t n = layer.nodes.size();
    std::vector<std::vector<bool>> linked(n, std::vector<bool>(n, false));
    for (auto [i, j] : layer.edges) {
      if (i >= n || j >= n || i == j) {
        throw std::invalid_argument("multilayer: bad edge in layer " + layer.name);
      }
      linked[i][j] = linked[j][i] = true;
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const bool close = hyp_distance(layer.nodes[i].z, layer.nodes[j].z) < epsilon;
        if (close != linked[i][j]) {
          throw std::invalid_argument("multilayer: layer " + layer.name +
                                      " is not properly embedded at nodes " +
                                      layer.nodes[i].id + ", " + layer.nodes[j].id);
        }
      }
    }
  }
  for (const auto& e : cross_edges) {
    if (e.layer_a >= 3 || e.layer_b >= 3 || e.layer_a == e.layer_b ||
        e.node_a >= layers[e.layer_a].nodes.size() ||
        e.node_b >= layers[e.layer_b].nodes.size()) {
      throw std::invalid_argument("multilayer: cross edge references a missing node");
    }
  }
}

double frog_reward(std::span<const double> jumps, const FrogConfig& cfg) {
  std::vector<bool> taken(cfg.reward_spots.size(), false);
  double pos = 0.0, total = 0.0;
  for (double j : jumps) {
    pos += j;
    total -= jump_cost(j, cfg);
    for (std::size_t s = 0; s < taken.size(); ++s) {
      if (!taken[s] && std::abs(pos - cfg.reward_spots[s].position) <= cfg.capture_radius) {
        taken[s] = true;
        total += cfg.reward_spots[s].value;
      }
    }
    if (pos < cfg.lo || pos > cfg.hi) total -= cfg.out_of_bounds_penalty;
  }
  return total;
}

std::pair<double, double> two_frog_rewards(std::span<const double> jumps_a,
                                           std::span<const double> jumps_b,
                                           const TwoFrogConfig& cfg) {
  if (jumps_a.size() != jumps_b.size()) {
    throw std::invalid_argument("two_frog_rewards: players made different numbers of jumps");
  }
  const auto& spots = cfg.base.reward_spots;
  const double cr = cfg.base.capture_radius;
  std::vector<bool> taken_a(spots.size(), false), taken_b(spots.size(), false);
  double pa = 0.0, pb = 0.0, ra = 0.0, rb = 0.0;

  auto cost = [&](double j) {
    if (std::abs(j) <= cfg.base.free_jump_threshold) return 0.0;
    return std::abs(j) > cfg.long_jump_threshold ? cfg.long_jump_cost : cfg.base.jump_cost;
  };
  auto out = [&](double p) {
    return p < cfg.base.lo || p > cfg.base.hi ? cfg.base.out_of_bounds_penalty : 0.0;
  };

  for (std::size_t k = 0; k < jumps_a.size(); ++k) {
    pa += jumps_a[k];
    pb += jumps_b[k];
    ra -= cost(jumps_a[k]) + out(pa);
    rb -= cost(jumps_b[k]) + out(pb);
    const bool together = std::abs(pa - pb) <= cfg.collision_radius;
    for (std::size_t s = 0; s < spots.size(); ++s) {
      const bool a_here = std::abs(pa - spots[s].position) <= cr;
      const bool b_here = std::abs(pb - spots[s].position) <= cr;
      if (a_here && b_here && together) continue;
      if (a_here && !taken_a[s]) {
        taken_a[s] = true;
        ra += spots[s].value;
      }
      if (b_here && !taken_b[s]) {
        taken_b[s] = true;
        rb += spots[s].value;
      }
    }
  }
  return {ra, rb};
}

std::vector<ArcCrossing> segment_arc_crossings(Point2 p0, Point2 p1,
                                               const LabyrinthConfig& cfg) {
  const double dx = p1.x - p0.x, dy = p1.y - p0.y;
  const double a = dx * dx + dy * dy;
  if (!(a > 0.0)) throw std::invalid_argument("segment_arc_crossings: degenerate segment");
  const double b = 2.0 * (p0.x * dx + p0.y * dy);
  const double c0 = p0.x * p0.x + p0.y * p0.y;

  std::vector<ArcCrossing> out;
  auto add = [&](std::size_t circle, double t) {
    if (!(t > kAngleTol && t <= 1.0 + kAngleTol)) return;
    const Point2 p{p0.x + t * dx, p0.y + t * dy};
    out.push_back({circle, cfg.arc_at(circle, std::atan2(p.y, p.x)), p, t});
  };
  for (std::size_t c = 0; c < cfg.radii.size(); ++c) {
    const double r = cfg.radii[c];
    const double cc = c0 - r * r;
    const double disc = b * b - 4.0 * a * cc;
    // Relative tolerance: a grazing step is one contact, not zero or two.
    const double scale = b * b + std::abs(4.0 * a * cc);
    if (disc < -1e-12 * scale) continue;
    if (disc <= 1e-12 * scale) {
      add(c, -b / (2.0 * a));
      continue;
    }
    // Cancellation-free pair of roots.
    const double sq = std::sqrt(disc);
    const double q = -0.5 * (b + std::copysign(sq, b));
    double t1 = q / a;
    double t2 = q != 0.0 ? cc / q : -t1;
    if (t1 > t2) std::swap(t1, t2);
    add(c, t1);
    add(c, t2);
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const ArcCrossing& x, const ArcCrossing& y) { return x.t < y.t; });
  return out;
}

std::vector<Point2> labyrinth_path(std::span<const double> angles,
                                   const LabyrinthConfig& cfg) {
  std::vector<Point2> path{{0.0, 0.0}};
  for (double th : angles) {
    const auto& p = path.back();
    path.push_back({p.x + cfg.step_length * std::cos(th), p.y + cfg.step_length * std::sin(th)});
  }
  return path;
}

double labyrinth_reward(std::span<const double> angles, const LabyrinthConfig& cfg) {
  if (angles.size() != cfg.n_steps) {
    throw std::invalid_argument("labyrinth_reward: expected " + std::to_string(cfg.n_steps) +
                                " angles, got " + std::to_string(angles.size()));
  }
  std::vector<std::vector<bool>> taken(cfg.arcs.size());
  for (std::size_t c = 0; c < cfg.arcs.size(); ++c) taken[c].assign(cfg.arcs[c].size(), false);

  const auto path = labyrinth_path(angles, cfg);
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < path.size(); ++k) {
    for (const auto& hit : segment_arc_crossings(path[k], path[k + 1], cfg)) {
      const Arc& arc = cfg.arcs[hit.circle][hit.arc];
      if (cfg.is_barrier(arc)) {
        total += arc.reward;
      } else if (!taken[hit.circle][hit.arc]) {
        taken[hit.circle][hit.arc] = true;
        total += arc.reward;
      }
    }
  }
  return total;
}

std::pair<double, double> plane_game_rewards(std::span<const double> a,
                                             std::span<const double> b,
                                             const PlaneGameConfig& cfg) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("plane_game_rewards: players chose different counts");
  }
  double px = 0.0, py = 0.0;
  for (double v : a) px += v;
  for (double v : b) py += v;
  const double r = std::hypot(px, py);
  const double angle = std::atan2(py, px);
  for (const auto& annulus : cfg.annuli) {
    if (r < annulus.r_in || r > annulus.r_out) continue;
    for (const auto& f : annulus.fields) {
      if (in_arc(f.start, f.end, angle)) return {f.reward_a, f.reward_b};
    }
  }
  return {0.0, 0.0};
}

namespace {

template <class PointOf>
int error_sum(const MultiLayerInstance& inst, PointOf point) {
  auto is_edge = [&](std::size_t la, std::size_t i, std::size_t lb, std::size_t j) {
    for (const auto& e : inst.cross_edges) {
      if ((e.layer_a == la && e.node_a == i && e.layer_b == lb && e.node_b == j) ||
          (e.layer_a == lb && e.node_a == j && e.layer_b == la && e.node_b == i)) {
        return true;
      }
    }
    return false;
  };
  int total = 0;
  for (std::size_t la = 0; la < 3; ++la) {
    for (std::size_t lb = la + 1; lb < 3; ++lb) {
      for (std::size_t i = 0; i < inst.layers[la].nodes.size(); ++i) {
        for (std::size_t j = 0; j < inst.layers[lb].nodes.size(); ++j) {
          const bool close = hyp_distance(point(la, i), point(lb, j)) < inst.epsilon;
          const bool edge = is_edge(la, i, lb, j);
          if (close && edge) {
            --total;
          } else if (close != edge) {
            ++total;
          }
        }
      }
    }
  }
  return total;
}

void check_layer_sizes(const MultiLayerInstance& inst, std::size_t na, std::size_t nb) {
  if (inst.layers.size() != 3 || na != inst.layers[0].nodes.size() ||
      nb != inst.layers[1].nodes.size()) {
    throw std::invalid_argument("multilayer_error: point sets do not match the instance");
  }
}

}  // namespace

int multilayer_error(const MultiLayerInstance& inst, std::span<const Complex> layer_a,
                     std::span<const Complex> layer_b) {
  check_layer_sizes(inst, layer_a.size(), layer_b.size());
  return error_sum(inst, [&](std::size_t l, std::size_t i) -> Complex {
    if (l == 0) return layer_a[i];
    if (l == 1) return layer_b[i];
    return inst.layers[2].nodes[i].z.value();
  });
}

int multilayer_error(const MultiLayerInstance& inst, const MobiusTransform& ga,
                     const MobiusTransform& gb) {
  if (inst.layers.size() != 3) throw std::invalid_argument("multilayer_error: need three layers");
  std::vector<Complex> a, b;
  for (const auto& n : inst.layers[0].nodes) a.push_back(mobius_apply(ga, n.z).value());
  for (const auto& n : inst.layers[1].nodes) b.push_back(mobius_apply(gb, n.z).value());
  return multilayer_error(inst, a, b);
}

double multilayer_edge_slack(const MultiLayerInstance& inst,
                             std::span<const Complex> layer_a,
                             std::span<const Complex> layer_b) {
  check_layer_sizes(inst, layer_a.size(), layer_b.size());
  if (inst.cross_edges.empty()) return 0.0;
  auto point = [&](std::size_t l, std::size_t i) -> Complex {
    if (l == 0) return layer_a[i];
    if (l == 1) return layer_b[i];
    return inst.layers[2].nodes[i].z.value();
  };
  double sum = 0.0;
  for (const auto& e : inst.cross_edges) {
    const double d = hyp_distance(point(e.layer_a, e.node_a), point(e.layer_b, e.node_b));
    sum += d / (1.0 + d);
  }
  return sum / static_cast<double>(inst.cross_edges.size());
}

}  // namespace hyperswarm
