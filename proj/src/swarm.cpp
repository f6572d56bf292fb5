#include "hyperswarm/swarm.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>

namespace hyperswarm {

namespace {

const Complex kI{0.0, 1.0};

void check_symmetric(const Eigen::MatrixXd& m, std::size_t n, const char* what) {
  if (static_cast<std::size_t>(m.rows()) != n ||
      static_cast<std::size_t>(m.cols()) != n) {
    throw std::invalid_argument(std::string(what) + ": wrong shape");
  }
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = j + 1; k < n; ++k) {
      if (m(j, k) != m(k, j)) {
        throw std::invalid_argument(std::string(what) + ": not symmetric");
      }
    }
  }
}

Eigen::MatrixXcd phase_coupling(const Eigen::MatrixXd& K,
                                const Eigen::MatrixXd& beta) {
  Eigen::MatrixXcd c(K.rows(), K.cols());
  for (Eigen::Index j = 0; j < K.rows(); ++j) {
    for (Eigen::Index k = 0; k < K.cols(); ++k) {
      c(j, k) = std::polar(K(j, k), beta(j, k));
    }
  }
  return c;
}

inline Complex riccati(Complex f, double omega, Complex z) {
  return kI * (f * z * z + omega * z + std::conj(f));
}

}  // namespace

void SwarmSpec::validate() const {
  if (n == 0) throw std::invalid_argument("SwarmSpec: n must be positive");
  check_symmetric(K, n, "SwarmSpec.K");
  check_symmetric(beta, n, "SwarmSpec.beta");
}

SwarmSpec chain_swarm(double omega, std::span<const double> couplings) {
  SwarmSpec spec;
  spec.n = couplings.size() + 1;
  spec.omega = omega;
  spec.K = Eigen::MatrixXd::Zero(spec.n, spec.n);
  spec.beta = Eigen::MatrixXd::Zero(spec.n, spec.n);
  for (std::size_t j = 0; j < couplings.size(); ++j) {
    spec.K(j, j + 1) = couplings[j];
    spec.K(j + 1, j) = couplings[j];
  }
  return spec;
}

std::size_t SubSwarmSpec::total() const {
  return std::accumulate(sizes.begin(), sizes.end(), std::size_t{0});
}

void SubSwarmSpec::validate() const {
  if (sizes.empty()) throw std::invalid_argument("SubSwarmSpec: no sub-swarms");
  if (std::find(sizes.begin(), sizes.end(), std::size_t{0}) != sizes.end()) {
    throw std::invalid_argument("SubSwarmSpec: empty sub-swarm");
  }
  const std::size_t p = sizes.size();
  if (static_cast<std::size_t>(K.rows()) != p ||
      static_cast<std::size_t>(K.cols()) != p ||
      static_cast<std::size_t>(beta.rows()) != p ||
      static_cast<std::size_t>(beta.cols()) != p) {
    throw std::invalid_argument("SubSwarmSpec: coupling shape must be p x p");
  }
}

SwarmField::SwarmField(const SwarmSpec& spec)
    : n_(spec.n), omega_(spec.omega), coupling_(phase_coupling(spec.K, spec.beta)) {
  spec.validate();
}

void SwarmField::operator()(double, const DiscState& z, DiscState& dz) const {
  if (z.size() != n_) throw std::invalid_argument("swarm: state size mismatch");
  const Complex scale = kI / (2.0 * static_cast<double>(n_));
  for (std::size_t j = 0; j < n_; ++j) {
    Complex sum{0.0, 0.0};
    for (std::size_t k = 0; k < n_; ++k) sum += coupling_(j, k) * std::conj(z[k]);
    dz[j] = riccati(scale * sum, omega_, z[j]);
  }
}

SubSwarmField::SubSwarmField(const SubSwarmSpec& spec) : omega_(spec.omega) {
  spec.validate();
  offsets_.push_back(0);
  for (auto s : spec.sizes) offsets_.push_back(offsets_.back() + s);
  coupling_ = phase_coupling(spec.K, spec.beta);
  for (std::size_t m = 0; m < spec.sizes.size(); ++m) {
    coupling_.col(static_cast<Eigen::Index>(m)) /= static_cast<double>(spec.sizes[m]);
  }
}

void SubSwarmField::operator()(double, const DiscState& z, DiscState& dz) const {
  const std::size_t p = offsets_.size() - 1;
  if (z.size() != offsets_.back()) {
    throw std::invalid_argument("sub-swarm: state size mismatch");
  }
  std::vector<Complex> conj_sum(p);
  for (std::size_t m = 0; m < p; ++m) {
    Complex s{0.0, 0.0};
    for (std::size_t k = offsets_[m]; k < offsets_[m + 1]; ++k) s += std::conj(z[k]);
    conj_sum[m] = s;
  }
  for (std::size_t l = 0; l < p; ++l) {
    Complex f{0.0, 0.0};
    for (std::size_t m = 0; m < p; ++m) f += coupling_(l, m) * conj_sum[m];
    f *= 0.5 * kI;
    for (std::size_t j = offsets_[l]; j < offsets_[l + 1]; ++j) {
      dz[j] = riccati(f, omega_, z[j]);
    }
  }
}

KuramotoChainField::KuramotoChainField(KuramotoChainSpec spec)
    : spec_(std::move(spec)) {
  if (spec_.couplings.empty()) {
    throw std::invalid_argument("Kuramoto chain needs at least 2 oscillators");
  }
}

void KuramotoChainField::operator()(double, const PhaseState& phi,
                                    PhaseState& dphi) const {
  const std::size_t n = spec_.n();
  if (phi.size() != n) throw std::invalid_argument("kuramoto: state size mismatch");
  std::fill(dphi.begin(), dphi.end(), spec_.omega);
  for (std::size_t j = 0; j + 1 < n; ++j) {
    // Edge (j, j+1) contributes equal and opposite terms.
    const double flow = spec_.couplings[j] * std::sin(phi[j + 1] - phi[j]);
    dphi[j] += flow;
    dphi[j + 1] -= flow;
  }
}

DiscState swarm_rhs(const SwarmSpec& spec, std::span<const Complex> z) {
  DiscState state(z.begin(), z.end());
  DiscState dz(state.size());
  SwarmField{spec}(0.0, state, dz);
  return dz;
}

std::vector<DiscState> subswarm_rhs(const SubSwarmSpec& spec,
                                    const std::vector<DiscState>& z) {
  if (z.size() != spec.sizes.size()) {
    throw std::invalid_argument("subswarm_rhs: wrong number of sub-swarms");
  }
  DiscState flat;
  for (std::size_t l = 0; l < z.size(); ++l) {
    if (z[l].size() != spec.sizes[l]) {
      throw std::invalid_argument("subswarm_rhs: sub-swarm size mismatch");
    }
    flat.insert(flat.end(), z[l].begin(), z[l].end());
  }
  DiscState dflat(flat.size());
  SubSwarmField{spec}(0.0, flat, dflat);
  std::vector<DiscState> out;
  auto it = dflat.begin();
  for (auto size : spec.sizes) {
    out.emplace_back(it, it + static_cast<std::ptrdiff_t>(size));
    it += static_cast<std::ptrdiff_t>(size);
  }
  return out;
}

PhaseState kuramoto_rhs(const KuramotoChainSpec& spec, std::span<const double> phi) {
  PhaseState state(phi.begin(), phi.end());
  PhaseState dphi(state.size());
  KuramotoChainField{spec}(0.0, state, dphi);
  return dphi;
}

namespace {

double max_pair_change(const DiscTrajectory& traj, std::span<const std::size_t> group,
                       bool same_group_wanted) {
  if (traj.states.empty()) return 0.0;
  const auto& z0 = traj.states.front();
  if (group.size() != z0.size()) {
    throw std::invalid_argument("verify_isometry: grouping size mismatch");
  }
  const std::size_t n = z0.size();
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if ((group[i] == group[j]) != same_group_wanted) continue;
      const double d0 = hyp_distance(z0[i], z0[j]);
      for (const auto& z : traj.states) {
        worst = std::max(worst, std::abs(hyp_distance(z[i], z[j]) - d0));
      }
    }
  }
  return worst;
}

}  // namespace

double verify_isometry(const DiscTrajectory& traj, std::span<const std::size_t> group) {
  return max_pair_change(traj, group, true);
}

double cross_group_change(const DiscTrajectory& traj,
                          std::span<const std::size_t> group) {
  return max_pair_change(traj, group, false);
}

void write_trajectory_csv(std::ostream& out, const DiscTrajectory& traj) {
  const std::size_t n = traj.states.empty() ? 0 : traj.states.front().size();
  out << "t";
  for (std::size_t j = 1; j <= n; ++j) out << ",re" << j << ",im" << j;
  out << '\n';
  const auto old_precision = out.precision(17);
  for (std::size_t r = 0; r < traj.times.size(); ++r) {
    out << traj.times[r];
    for (const auto& z : traj.states[r]) out << ',' << z.real() << ',' << z.imag();
    out << '\n';
  }
  out.precision(old_precision);
}

}  // namespace hyperswarm
