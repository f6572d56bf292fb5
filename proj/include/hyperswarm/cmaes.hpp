#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "hyperswarm/rng.hpp"

namespace hyperswarm {

struct Candidate {
  std::vector<double> x;
  double fitness = 0.0;  // lower is better
};

/// (mu/mu_w, lambda)-CMA-ES with rank-one and rank-mu covariance updates and
/// cumulative step-size adaptation. Strategy constants are the usual
/// defaults from Hansen's tutorial.
class Cmaes {
 public:
  /// lambda = 0 selects the default 4 + floor(3 ln dim).
  Cmaes(std::vector<double> mean0, double sigma0, std::size_t lambda = 0);

  static std::size_t default_lambda(std::size_t dim);

  /// lambda candidates x_k = mean + sigma B D n_k.
  std::vector<Candidate> ask(Rng& rng) const;

  /// Takes the lambda candidates of the matching ask with fitnesses filled in.
  /// Non-finite fitnesses rank last; ties keep candidate order.
  void tell(std::span<const Candidate> evaluated);

  std::size_t dim() const { return dim_; }
  std::size_t lambda() const { return lambda_; }
  std::size_t mu() const { return mu_; }
  std::size_t generation() const { return generation_; }
  double sigma() const { return sigma_; }
  double mu_eff() const { return mu_eff_; }
  const Eigen::VectorXd& mean() const { return mean_; }
  std::vector<double> mean_vector() const;
  const Eigen::MatrixXd& covariance() const { return C_; }
  const Eigen::VectorXd& weights() const { return weights_; }
  const Eigen::VectorXd& path_sigma() const { return p_sigma_; }
  const Eigen::VectorXd& path_c() const { return p_c_; }

 private:
  void update_eigensystem();

  std::size_t dim_;
  std::size_t lambda_;
  std::size_t mu_;
  Eigen::VectorXd weights_;
  double mu_eff_;
  double c_sigma_, d_sigma_, c_c_, c_1_, c_mu_, chi_n_;

  Eigen::VectorXd mean_;
  double sigma_;
  Eigen::MatrixXd C_;
  Eigen::MatrixXd B_;
  Eigen::VectorXd D_;  // standard deviations along the eigenbasis
  Eigen::VectorXd p_sigma_, p_c_;
  std::size_t generation_ = 0;
};

/// Objective to minimize. The Rng is a fresh sub-stream per (generation,
/// candidate index), so noisy objectives stay reproducible under any
/// evaluation order.
using Objective = std::function<double(std::span<const double>, Rng&)>;

struct GenerationStats;

struct OptimizeOptions {
  std::size_t max_generations = 300;
  std::optional<double> target;  // stop once best-ever fitness <= target
  /// Stop after this many generations without a best-ever improvement of at
  /// least patience_tol. Zero disables.
  std::size_t patience = 0;
  double patience_tol = 1e-6;
  std::size_t lambda = 0;
  unsigned threads = 1;
  bool progress = false;  // one line per generation on stderr
  /// Called after every tell.
  std::function<void(const Cmaes&, const GenerationStats&)> on_generation;
};

struct GenerationStats {
  std::size_t generation = 0;
  double best = 0.0;       // best fitness of this generation
  double mean = 0.0;       // mean fitness of this generation
  double best_ever = 0.0;
  double sigma = 0.0;
};

struct OptimizeResult {
  Candidate best;
  std::vector<GenerationStats> history;
  std::vector<double> final_mean;
  bool reached_target = false;
};

/// Evaluates all candidates of a generation, sub-seeding by candidate index.
void evaluate_population(const Objective& objective, std::vector<Candidate>& population,
                         std::uint64_t generation_seed, unsigned threads);

OptimizeResult cmaes_optimize(const Objective& objective, std::vector<double> mean0,
                              double sigma0, const OptimizeOptions& opts, Rng& rng);

}  // namespace hyperswarm
