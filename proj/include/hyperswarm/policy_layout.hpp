#pragma once

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

#include "hyperswarm/swarm.hpp"

namespace hyperswarm {

/// How a flat CMA-ES parameter vector maps onto swarm parameters.
///
///   full_swarm   [K upper triangle with diagonal, row-major | beta, same order | omega]
///   sub_swarm    same, over the p x p group matrices
///   kuramoto     [omega | K_12 ... K_{n-1,n}]
///   chain_swarm  [omega | K_12 ... K_{n-1,n}], omega decoded as |raw|, no phase shifts
///
/// Phase shifts are reduced to [0, 2 pi) on decode. Couplings and omega are
/// multiplied by coupling_scale, so the optimizer can search rates of order
/// one while the swarm sees rates large enough to reach the boundary.
struct PolicyLayout {
  enum class Kind { full_swarm, sub_swarm, kuramoto, chain_swarm };

  Kind kind = Kind::full_swarm;
  std::vector<std::size_t> sizes;  // oscillator count, or sub-swarm sizes
  double coupling_scale = 1.0;

  static PolicyLayout full_swarm(std::size_t n, double scale = 1.0) {
    return {Kind::full_swarm, {n}, scale};
  }
  static PolicyLayout sub_swarm(std::vector<std::size_t> sizes, double scale = 1.0) {
    return {Kind::sub_swarm, std::move(sizes), scale};
  }
  static PolicyLayout kuramoto(std::size_t n, double scale = 1.0) {
    return {Kind::kuramoto, {n}, scale};
  }
  static PolicyLayout chain_swarm(std::size_t n, double scale = 1.0) {
    return {Kind::chain_swarm, {n}, scale};
  }

  std::size_t size() const;
};

using PolicyParams = std::variant<SwarmSpec, SubSwarmSpec, KuramotoChainSpec>;

/// Throws std::invalid_argument when x.size() != layout.size().
PolicyParams decode_policy(std::span<const double> x, const PolicyLayout& layout);
std::vector<double> encode_policy(const PolicyParams& params, const PolicyLayout& layout);

SwarmSpec decode_swarm(std::span<const double> x, const PolicyLayout& layout);
SubSwarmSpec decode_subswarm(std::span<const double> x, const PolicyLayout& layout);
KuramotoChainSpec decode_kuramoto(std::span<const double> x, const PolicyLayout& layout);

}  // namespace hyperswarm
