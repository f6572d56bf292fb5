#include "hyperswarm/policy_layout.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace hyperswarm {

namespace {

std::size_t triangle(std::size_t n) { return n * (n + 1) / 2; }

std::size_t oscillators(const PolicyLayout& layout) {
  if (layout.sizes.size() != 1 || layout.sizes[0] == 0) {
    throw std::invalid_argument("policy layout: expected one positive oscillator count");
  }
  return layout.sizes[0];
}

void check_length(std::span<const double> x, const PolicyLayout& layout) {
  if (x.size() != layout.size()) {
    throw std::invalid_argument("policy layout: vector has " + std::to_string(x.size()) +
                                " entries, layout needs " + std::to_string(layout.size()));
  }
}

// Fills symmetric K and beta from the two upper triangles starting at x[0].
void unpack_symmetric(std::span<const double> x, std::size_t n, double scale, Eigen::MatrixXd& K,
                      Eigen::MatrixXd& beta) {
  K.resize(n, n);
  beta.resize(n, n);
  const std::size_t t = triangle(n);
  std::size_t idx = 0;
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = j; k < n; ++k, ++idx) {
      K(j, k) = K(k, j) = scale * x[idx];
      beta(j, k) = beta(k, j) = wrap_angle(x[t + idx]);
    }
  }
}

void pack_symmetric(const Eigen::MatrixXd& K, const Eigen::MatrixXd& beta, std::size_t n,
                    double scale, std::vector<double>& out) {
  if (static_cast<std::size_t>(K.rows()) != n || static_cast<std::size_t>(beta.rows()) != n) {
    throw std::invalid_argument("policy layout: matrix size does not match the layout");
  }
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = j; k < n; ++k) out.push_back(K(j, k) / scale);
  }
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = j; k < n; ++k) out.push_back(beta(j, k));
  }
}

}  // namespace

std::size_t PolicyLayout::size() const {
  if (!(coupling_scale > 0.0)) throw std::invalid_argument("policy layout: coupling_scale must be > 0");
  switch (kind) {
    case Kind::full_swarm:
      return 2 * triangle(oscillators(*this)) + 1;
    case Kind::sub_swarm:
      if (sizes.empty()) throw std::invalid_argument("policy layout: no sub-swarms");
      return 2 * triangle(sizes.size()) + 1;
    case Kind::kuramoto:
    case Kind::chain_swarm:
      return oscillators(*this);
  }
  return 0;
}

SwarmSpec decode_swarm(std::span<const double> x, const PolicyLayout& layout) {
  check_length(x, layout);
  const std::size_t n = oscillators(layout);
  if (layout.kind == PolicyLayout::Kind::chain_swarm) {
    std::vector<double> couplings(x.begin() + 1, x.end());
    for (auto& c : couplings) c *= layout.coupling_scale;
    return chain_swarm(layout.coupling_scale * std::abs(x[0]), couplings);
  }
  if (layout.kind != PolicyLayout::Kind::full_swarm) {
    throw std::invalid_argument("decode_swarm: layout does not describe a swarm");
  }
  SwarmSpec spec;
  spec.n = n;
  unpack_symmetric(x, n, layout.coupling_scale, spec.K, spec.beta);
  spec.omega = layout.coupling_scale * x.back();
  return spec;
}

SubSwarmSpec decode_subswarm(std::span<const double> x, const PolicyLayout& layout) {
  if (layout.kind != PolicyLayout::Kind::sub_swarm) {
    throw std::invalid_argument("decode_subswarm: layout does not describe sub-swarms");
  }
  check_length(x, layout);
  SubSwarmSpec spec;
  spec.sizes = layout.sizes;
  unpack_symmetric(x, layout.sizes.size(), layout.coupling_scale, spec.K, spec.beta);
  spec.omega = layout.coupling_scale * x.back();
  return spec;
}

KuramotoChainSpec decode_kuramoto(std::span<const double> x, const PolicyLayout& layout) {
  if (layout.kind != PolicyLayout::Kind::kuramoto) {
    throw std::invalid_argument("decode_kuramoto: layout does not describe a Kuramoto chain");
  }
  check_length(x, layout);
  KuramotoChainSpec spec{layout.coupling_scale * x[0], std::vector<double>(x.begin() + 1, x.end())};
  for (auto& c : spec.couplings) c *= layout.coupling_scale;
  return spec;
}

PolicyParams decode_policy(std::span<const double> x, const PolicyLayout& layout) {
  switch (layout.kind) {
    case PolicyLayout::Kind::full_swarm:
    case PolicyLayout::Kind::chain_swarm:
      return decode_swarm(x, layout);
    case PolicyLayout::Kind::sub_swarm:
      return decode_subswarm(x, layout);
    case PolicyLayout::Kind::kuramoto:
      return decode_kuramoto(x, layout);
  }
  throw std::invalid_argument("decode_policy: unknown layout");
}

std::vector<double> encode_policy(const PolicyParams& params, const PolicyLayout& layout) {
  std::vector<double> out;
  out.reserve(layout.size());
  switch (layout.kind) {
    case PolicyLayout::Kind::full_swarm: {
      const auto& spec = std::get<SwarmSpec>(params);
      pack_symmetric(spec.K, spec.beta, oscillators(layout), layout.coupling_scale, out);
      out.push_back(spec.omega / layout.coupling_scale);
      break;
    }
    case PolicyLayout::Kind::sub_swarm: {
      const auto& spec = std::get<SubSwarmSpec>(params);
      if (spec.sizes != layout.sizes) {
        throw std::invalid_argument("encode_policy: sub-swarm sizes do not match the layout");
      }
      pack_symmetric(spec.K, spec.beta, spec.sizes.size(), layout.coupling_scale, out);
      out.push_back(spec.omega / layout.coupling_scale);
      break;
    }
    case PolicyLayout::Kind::kuramoto: {
      const auto& spec = std::get<KuramotoChainSpec>(params);
      if (spec.n() != oscillators(layout)) {
        throw std::invalid_argument("encode_policy: chain length does not match the layout");
      }
      out.push_back(spec.omega / layout.coupling_scale);
      for (double c : spec.couplings) out.push_back(c / layout.coupling_scale);
      break;
    }
    case PolicyLayout::Kind::chain_swarm: {
      const auto& spec = std::get<SwarmSpec>(params);
      const std::size_t n = oscillators(layout);
      if (spec.n != n) throw std::invalid_argument("encode_policy: swarm size does not match");
      out.push_back(spec.omega / layout.coupling_scale);
      for (std::size_t j = 0; j + 1 < n; ++j) out.push_back(spec.K(j, j + 1) / layout.coupling_scale);
      break;
    }
  }
  return out;
}

}  // namespace hyperswarm
