#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hyperswarm/geom.hpp"

namespace hyperswarm {

using DiscState = std::vector<Complex>;
using PhaseState = std::vector<double>;

/// General Poincare swarm: n oscillators, symmetric couplings K and phase
/// shifts beta, common frequency omega.
struct SwarmSpec {
  std::size_t n = 0;
  double omega = 0.0;
  Eigen::MatrixXd K;
  Eigen::MatrixXd beta;

  /// Throws std::invalid_argument on shape or symmetry violations.
  void validate() const;
};

/// SwarmSpec coupling only nearest neighbours j, j+1 with zero phase shifts.
SwarmSpec chain_swarm(double omega, std::span<const double> couplings);

/// p globally coupled sub-swarms; oscillators of sub-swarm l see one common
/// field built from the mean conjugate positions of every sub-swarm.
struct SubSwarmSpec {
  std::vector<std::size_t> sizes;
  double omega = 0.0;
  Eigen::MatrixXd K;
  Eigen::MatrixXd beta;

  std::size_t total() const;
  void validate() const;
};

/// Kuramoto phase oscillators coupled along an array.
struct KuramotoChainSpec {
  double omega = 0.0;
  std::vector<double> couplings;  // K_{j,j+1}, n - 1 entries

  std::size_t n() const { return couplings.size() + 1; }
};

class IntegrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Right-hand side of the general swarm with the complex couplings
/// e^{i beta_jk} K_jk cached once.
class SwarmField {
 public:
  explicit SwarmField(const SwarmSpec& spec);
  void operator()(double t, const DiscState& z, DiscState& dz) const;

 private:
  std::size_t n_;
  double omega_;
  Eigen::MatrixXcd coupling_;
};

class SubSwarmField {
 public:
  explicit SubSwarmField(const SubSwarmSpec& spec);
  /// State is the concatenation of all sub-swarms in order.
  void operator()(double t, const DiscState& z, DiscState& dz) const;

 private:
  std::vector<std::size_t> offsets_;
  double omega_;
  Eigen::MatrixXcd coupling_;  // e^{i beta_lm} K_lm / N_m
};

class KuramotoChainField {
 public:
  explicit KuramotoChainField(KuramotoChainSpec spec);
  void operator()(double t, const PhaseState& phi, PhaseState& dphi) const;

 private:
  KuramotoChainSpec spec_;
};

/// dz_j/dt = i (f_j z_j^2 + omega z_j + conj(f_j)),
/// f_j = (i / 2N) sum_k e^{i beta_jk} K_jk conj(z_k).
DiscState swarm_rhs(const SwarmSpec& spec, std::span<const Complex> z);
std::vector<DiscState> subswarm_rhs(const SubSwarmSpec& spec,
                                    const std::vector<DiscState>& z);
PhaseState kuramoto_rhs(const KuramotoChainSpec& spec,
                        std::span<const double> phi);

template <class State>
struct Trajectory {
  std::vector<double> times;
  std::vector<State> states;
  /// Steps on which some oscillator had to be pulled back inside the disc.
  std::size_t boundary_corrections = 0;

  const State& final_state() const { return states.back(); }
};

using DiscTrajectory = Trajectory<DiscState>;
using PhaseTrajectory = Trajectory<PhaseState>;

struct IntegrateOptions {
  double dt = 1e-3;
  /// Record every k-th step; t0 and t1 are always recorded.
  std::size_t record_every = 1;
  /// A run fails when an oscillator sits beyond 1 - 1e-9 for more than this
  /// many consecutive steps. Zero disables the check.
  std::size_t max_boundary_streak = 1000;
};

namespace detail {

inline constexpr double kDiscGuard = 1.0 - 1e-12;
inline constexpr double kExcursion = 1.0 - 1e-9;

struct GuardResult {
  bool corrected = false;
  bool excursion = false;
};

inline GuardResult guard_state(DiscState& z) {
  GuardResult res;
  for (auto& v : z) {
    const double r = std::abs(v);
    if (!std::isfinite(r)) {
      throw IntegrationError("integrate: non-finite disc state");
    }
    if (r > kExcursion) res.excursion = true;
    if (r >= kDiscGuard) {
      v *= kDiscGuard / r;
      res.corrected = true;
    }
  }
  return res;
}

inline GuardResult guard_state(PhaseState& phi) {
  for (double v : phi) {
    if (!std::isfinite(v)) {
      throw IntegrationError("integrate: non-finite phase state");
    }
  }
  return {};
}

template <class State>
void axpy(State& out, const State& x, double h, const State& k) {
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + h * k[i];
}

}  // namespace detail

/// Classical fixed-step RK4 from t0 to t1. The last step is shortened so the
/// final recorded time is exactly t1. Disc states are renormalized radially
/// to 1 - 1e-12 whenever round-off pushes them onto the boundary.
template <class Field, class State>
Trajectory<State> integrate(const Field& rhs, State state, double t0, double t1,
                            const IntegrateOptions& opts = {}) {
  if (!(opts.dt > 0.0)) throw std::invalid_argument("integrate: dt must be > 0");
  if (!(t1 >= t0)) throw std::invalid_argument("integrate: t1 < t0");
  if (opts.record_every == 0) {
    throw std::invalid_argument("integrate: record_every must be >= 1");
  }

  Trajectory<State> traj;
  detail::guard_state(state);
  traj.times.push_back(t0);
  traj.states.push_back(state);

  const double span = t1 - t0;
  auto steps = static_cast<std::size_t>(std::ceil(span / opts.dt - 1e-9));
  if (span > 0.0 && steps == 0) steps = 1;

  State k1(state.size()), k2(state.size()), k3(state.size()),
      k4(state.size()), tmp(state.size());
  std::size_t streak = 0;
  double t = t0;
  for (std::size_t step = 1; step <= steps; ++step) {
    const double t_next =
        step == steps ? t1 : t0 + static_cast<double>(step) * opts.dt;
    const double h = t_next - t;
    rhs(t, state, k1);
    detail::axpy(tmp, state, 0.5 * h, k1);
    rhs(t + 0.5 * h, tmp, k2);
    detail::axpy(tmp, state, 0.5 * h, k2);
    rhs(t + 0.5 * h, tmp, k3);
    detail::axpy(tmp, state, h, k3);
    rhs(t_next, tmp, k4);
    for (std::size_t i = 0; i < state.size(); ++i) {
      state[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    t = t_next;

    const auto guard = detail::guard_state(state);
    if (guard.corrected) ++traj.boundary_corrections;
    streak = guard.excursion ? streak + 1 : 0;
    if (opts.max_boundary_streak != 0 && streak > opts.max_boundary_streak) {
      throw IntegrationError("integrate: oscillator stuck on the boundary at t = " +
                             std::to_string(t));
    }

    if (step % opts.record_every == 0 || step == steps) {
      traj.times.push_back(t);
      traj.states.push_back(state);
    }
  }
  return traj;
}

/// Largest change of a same-group pairwise hyperbolic distance along the
/// trajectory. group[i] labels oscillator i; pairs in different groups are
/// ignored.
double verify_isometry(const DiscTrajectory& traj,
                       std::span<const std::size_t> group);

/// Largest change of any cross-group pairwise hyperbolic distance.
double cross_group_change(const DiscTrajectory& traj,
                          std::span<const std::size_t> group);

/// CSV with header t,re1,im1,...; one row per recorded step.
void write_trajectory_csv(std::ostream& out, const DiscTrajectory& traj);

}  // namespace hyperswarm
