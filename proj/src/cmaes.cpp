#include "hyperswarm/cmaes.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace hyperswarm {

std::size_t Cmaes::default_lambda(std::size_t dim) {
  return 4 + static_cast<std::size_t>(std::floor(3.0 * std::log(static_cast<double>(dim))));
}

Cmaes::Cmaes(std::vector<double> mean0, double sigma0, std::size_t lambda)
    : dim_(mean0.size()), sigma_(sigma0) {
  if (dim_ == 0) throw std::invalid_argument("Cmaes: dimension must be >= 1");
  if (!(sigma0 > 0.0)) throw std::invalid_argument("Cmaes: sigma0 must be > 0");
  lambda_ = lambda == 0 ? default_lambda(dim_) : lambda;
  if (lambda_ < 2) throw std::invalid_argument("Cmaes: lambda must be >= 2");
  mu_ = lambda_ / 2;

  weights_.resize(static_cast<Eigen::Index>(mu_));
  const double base = std::log((static_cast<double>(lambda_) + 1.0) / 2.0);
  for (std::size_t i = 0; i < mu_; ++i) {
    weights_(static_cast<Eigen::Index>(i)) = base - std::log(static_cast<double>(i) + 1.0);
  }
  weights_ /= weights_.sum();
  mu_eff_ = 1.0 / weights_.squaredNorm();

  const double n = static_cast<double>(dim_);
  c_sigma_ = (mu_eff_ + 2.0) / (n + mu_eff_ + 5.0);
  d_sigma_ = 1.0 + 2.0 * std::max(0.0, std::sqrt((mu_eff_ - 1.0) / (n + 1.0)) - 1.0) +
             c_sigma_;
  c_c_ = (4.0 + mu_eff_ / n) / (n + 4.0 + 2.0 * mu_eff_ / n);
  c_1_ = 2.0 / ((n + 1.3) * (n + 1.3) + mu_eff_);
  c_mu_ = std::min(1.0 - c_1_,
                   2.0 * (mu_eff_ - 2.0 + 1.0 / mu_eff_) / ((n + 2.0) * (n + 2.0) + mu_eff_));
  chi_n_ = std::sqrt(n) * (1.0 - 1.0 / (4.0 * n) + 1.0 / (21.0 * n * n));

  mean_ = Eigen::Map<const Eigen::VectorXd>(mean0.data(), static_cast<Eigen::Index>(dim_));
  C_ = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(dim_), static_cast<Eigen::Index>(dim_));
  B_ = C_;
  D_ = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(dim_));
  p_sigma_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim_));
  p_c_ = p_sigma_;
}

std::vector<double> Cmaes::mean_vector() const {
  return {mean_.data(), mean_.data() + mean_.size()};
}

std::vector<Candidate> Cmaes::ask(Rng& rng) const {
  std::vector<Candidate> out(lambda_);
  Eigen::VectorXd z(static_cast<Eigen::Index>(dim_));
  for (auto& cand : out) {
    for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = rng.normal();
    const Eigen::VectorXd x = mean_ + sigma_ * (B_ * D_.cwiseProduct(z));
    cand.x.assign(x.data(), x.data() + x.size());
  }
  return out;
}

void Cmaes::tell(std::span<const Candidate> evaluated) {
  if (evaluated.size() != lambda_) {
    throw std::invalid_argument("Cmaes::tell: expected exactly lambda candidates");
  }
  std::vector<double> rank_key(lambda_);
  for (std::size_t k = 0; k < lambda_; ++k) {
    if (evaluated[k].x.size() != dim_) {
      throw std::invalid_argument("Cmaes::tell: candidate dimension mismatch");
    }
    rank_key[k] = evaluated[k].fitness;
    if (!std::isfinite(rank_key[k])) {
      std::cerr << "cmaes: warning: non-finite fitness for candidate " << k
                << " in generation " << generation_ << ", ranked last\n";
      rank_key[k] = std::numeric_limits<double>::infinity();
    }
  }
  std::vector<std::size_t> order(lambda_);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return rank_key[a] < rank_key[b]; });

  const auto n = static_cast<Eigen::Index>(dim_);
  Eigen::MatrixXd selected(n, static_cast<Eigen::Index>(mu_));
  Eigen::VectorXd new_mean = Eigen::VectorXd::Zero(n);
  for (std::size_t i = 0; i < mu_; ++i) {
    const auto& x = evaluated[order[i]].x;
    const Eigen::Map<const Eigen::VectorXd> xv(x.data(), n);
    new_mean += weights_(static_cast<Eigen::Index>(i)) * xv;
    selected.col(static_cast<Eigen::Index>(i)) = (xv - mean_) / sigma_;
  }
  const Eigen::VectorXd y_w = (new_mean - mean_) / sigma_;
  mean_ = new_mean;

  const Eigen::MatrixXd inv_sqrt_c = B_ * D_.cwiseInverse().asDiagonal() * B_.transpose();
  p_sigma_ = (1.0 - c_sigma_) * p_sigma_ +
             std::sqrt(c_sigma_ * (2.0 - c_sigma_) * mu_eff_) * (inv_sqrt_c * y_w);

  const double ps_norm = p_sigma_.norm();
  const double decay =
      1.0 - std::pow(1.0 - c_sigma_, 2.0 * static_cast<double>(generation_ + 1));
  const bool h_sigma =
      ps_norm / std::sqrt(decay) < (1.4 + 2.0 / (static_cast<double>(dim_) + 1.0)) * chi_n_;

  p_c_ = (1.0 - c_c_) * p_c_;
  if (h_sigma) p_c_ += std::sqrt(c_c_ * (2.0 - c_c_) * mu_eff_) * y_w;

  const double lost_variance = h_sigma ? 0.0 : c_1_ * c_c_ * (2.0 - c_c_);
  Eigen::MatrixXd rank_mu = selected * weights_.asDiagonal() * selected.transpose();
  C_ = (1.0 - c_1_ - c_mu_ + lost_variance) * C_ + c_1_ * (p_c_ * p_c_.transpose()) +
       c_mu_ * rank_mu;

  sigma_ *= std::exp((c_sigma_ / d_sigma_) * (ps_norm / chi_n_ - 1.0));
  ++generation_;
  update_eigensystem();
}

void Cmaes::update_eigensystem() {
  C_ = (0.5 * (C_ + C_.transpose())).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(C_);
  if (solver.info() != Eigen::Success) {
    // Fall back to the diagonal; never fatal.
    std::cerr << "cmaes: warning: eigendecomposition failed, resetting to diag(C)\n";
    C_ = Eigen::MatrixXd(C_.diagonal().cwiseAbs().asDiagonal());
    solver.compute(C_);
  }
  Eigen::VectorXd ev = solver.eigenvalues();
  const double floor = 1e-14 * std::max(ev.maxCoeff(), std::numeric_limits<double>::min());
  bool repaired = false;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i) < floor) {
      ev(i) = floor;
      repaired = true;
    }
  }
  B_ = solver.eigenvectors();
  if (repaired) {
    C_ = B_ * ev.asDiagonal() * B_.transpose();
    C_ = (0.5 * (C_ + C_.transpose())).eval();
  }
  D_ = ev.cwiseSqrt();
}

void evaluate_population(const Objective& objective, std::vector<Candidate>& population,
                         std::uint64_t generation_seed, unsigned threads) {
  auto run = [&](std::size_t k) {
    Rng sub(derive_seed(generation_seed, k));
    population[k].fitness = objective(population[k].x, sub);
  };
  if (threads <= 1 || population.size() < 2) {
    for (std::size_t k = 0; k < population.size(); ++k) run(k);
    return;
  }
  std::vector<std::jthread> pool;
  const std::size_t workers = std::min<std::size_t>(threads, population.size());
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t k = w; k < population.size(); k += workers) run(k);
    });
  }
}

OptimizeResult cmaes_optimize(const Objective& objective, std::vector<double> mean0,
                              double sigma0, const OptimizeOptions& opts, Rng& rng) {
  if (opts.max_generations == 0) {
    throw std::invalid_argument("cmaes_optimize: generation budget must be >= 1");
  }
  Cmaes es(std::move(mean0), sigma0, opts.lambda);
  const std::uint64_t eval_seed = derive_seed(rng.seed(), 0x5eedULL);

  OptimizeResult result;
  result.best.fitness = std::numeric_limits<double>::infinity();
  std::size_t stalled = 0;
  double reference = std::numeric_limits<double>::infinity();

  for (std::size_t gen = 0; gen < opts.max_generations; ++gen) {
    auto population = es.ask(rng);
    evaluate_population(objective, population, derive_seed(eval_seed, gen), opts.threads);

    GenerationStats stats;
    stats.generation = gen;
    stats.best = std::numeric_limits<double>::infinity();
    double sum = 0.0;
    for (const auto& c : population) {
      sum += c.fitness;
      if (c.fitness < stats.best) stats.best = c.fitness;
      if (c.fitness < result.best.fitness) result.best = c;
    }
    stats.mean = sum / static_cast<double>(population.size());
    stats.best_ever = result.best.fitness;

    es.tell(population);
    stats.sigma = es.sigma();
    result.history.push_back(stats);
    if (opts.on_generation) opts.on_generation(es, stats);
    if (opts.progress) {
      std::fprintf(stderr, "gen %zu best %.6g sigma %.4g\n", gen, stats.best_ever, stats.sigma);
    }

    if (opts.target && result.best.fitness <= *opts.target) {
      result.reached_target = true;
      break;
    }
    if (opts.patience > 0) {
      if (result.best.fitness < reference - opts.patience_tol) {
        reference = result.best.fitness;
        stalled = 0;
      } else if (++stalled >= opts.patience) {
        break;
      }
    }
  }
  result.final_mean = es.mean_vector();
  return result;
}

}  // namespace hyperswarm
