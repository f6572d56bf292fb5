#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <numeric>

#include "hyperswarm/cmaes.hpp"

using namespace hyperswarm;

namespace {

double sphere(std::span<const double> x) {
  return std::inner_product(x.begin(), x.end(), x.begin(), 0.0);
}

double rosenbrock(std::span<const double> x) {
  double f = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    f += 100.0 * std::pow(x[i + 1] - x[i] * x[i], 2) + std::pow(1.0 - x[i], 2);
  }
  return f;
}

// Runs ask/tell with the evaluation sub-seeding of cmaes_optimize and returns
// the mean after every generation.
std::vector<Eigen::VectorXd> mean_path(const Objective& f, std::vector<double> mean0,
                                       std::size_t generations, std::uint64_t seed) {
  Cmaes es(std::move(mean0), 1.0);
  Rng rng(seed);
  std::vector<Eigen::VectorXd> path;
  for (std::size_t g = 0; g < generations; ++g) {
    auto pop = es.ask(rng);
    evaluate_population(f, pop, g, 1);
    es.tell(pop);
    path.push_back(es.mean());
  }
  return path;
}

}  // namespace

TEST_CASE("Default strategy parameters") {
  CHECK(Cmaes::default_lambda(10) == 10);
  CHECK(Cmaes::default_lambda(1) == 4);
  const Cmaes es(std::vector<double>(10, 0.0), 0.5);
  CHECK(es.lambda() == 10);
  CHECK(es.mu() == 5);
  CHECK(es.generation() == 0);
  CHECK(es.covariance().isApprox(Eigen::MatrixXd::Identity(10, 10)));
  CHECK(es.path_sigma().norm() == 0.0);
  CHECK(es.weights().sum() == doctest::Approx(1.0));
  for (Eigen::Index i = 1; i < es.weights().size(); ++i) {
    CHECK(es.weights()(i) <= es.weights()(i - 1));
  }
  CHECK_THROWS_AS(Cmaes({}, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(Cmaes({1.0}, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(Cmaes({1.0}, -1.0), std::invalid_argument);
}

TEST_CASE("ask samples N(mean, sigma^2 C)") {
  SUBCASE("degenerate sigma") {
    const Cmaes es({1.0, -2.0, 3.0}, 1e-12);
    Rng rng(1);
    for (const auto& c : es.ask(rng)) {
      CHECK(std::abs(c.x[0] - 1.0) < 1e-10);
      CHECK(std::abs(c.x[1] + 2.0) < 1e-10);
    }
  }
  SUBCASE("moments for C = I") {
    const std::size_t dim = 4;
    const Cmaes es(std::vector<double>(dim, 1.5), 2.0);
    Rng rng(2);
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(dim);
    Eigen::MatrixXd outer = Eigen::MatrixXd::Zero(dim, dim);
    std::size_t n = 0;
    while (n < 10000) {
      for (const auto& c : es.ask(rng)) {
        Eigen::VectorXd y(dim);
        for (std::size_t i = 0; i < dim; ++i) y(i) = (c.x[i] - 1.5) / 2.0;
        sum += y;
        outer += y * y.transpose();
        ++n;
      }
    }
    const Eigen::VectorXd mean = sum / static_cast<double>(n);
    const Eigen::MatrixXd cov = outer / static_cast<double>(n) - mean * mean.transpose();
    CHECK(mean.cwiseAbs().maxCoeff() < 0.05);
    CHECK((cov - Eigen::MatrixXd::Identity(dim, dim)).cwiseAbs().maxCoeff() < 0.1);
  }
  SUBCASE("determinism") {
    const Cmaes es({0.0, 0.0}, 1.0);
    Rng a(3), b(3);
    const auto ca = es.ask(a), cb = es.ask(b);
    for (std::size_t k = 0; k < ca.size(); ++k) CHECK(ca[k].x == cb[k].x);
  }
}

TEST_CASE("tell with tied fitnesses recombines the first mu candidates") {
  Cmaes es({0.0, 0.0, 0.0}, 1.0);
  Rng rng(4);
  auto pop = es.ask(rng);
  for (auto& c : pop) c.fitness = 1.0;
  Eigen::VectorXd expected = Eigen::VectorXd::Zero(3);
  for (std::size_t i = 0; i < es.mu(); ++i) {
    expected += es.weights()(static_cast<Eigen::Index>(i)) *
                Eigen::Map<const Eigen::VectorXd>(pop[i].x.data(), 3);
  }
  es.tell(pop);
  CHECK((es.mean() - expected).norm() < 1e-15);
  CHECK(es.generation() == 1);
}

TEST_CASE("tell rejects malformed populations and ranks non-finite last") {
  Cmaes es({0.0, 0.0}, 1.0);
  Rng rng(5);
  auto pop = es.ask(rng);
  auto short_pop = pop;
  short_pop.pop_back();
  CHECK_THROWS_AS(es.tell(short_pop), std::invalid_argument);

  for (std::size_t k = 0; k < pop.size(); ++k) pop[k].fitness = static_cast<double>(k);
  pop[0].fitness = std::numeric_limits<double>::quiet_NaN();
  Eigen::VectorXd expected = Eigen::VectorXd::Zero(2);
  for (std::size_t i = 0; i < es.mu(); ++i) {
    expected += es.weights()(static_cast<Eigen::Index>(i)) *
                Eigen::Map<const Eigen::VectorXd>(pop[i + 1].x.data(), 2);
  }
  es.tell(pop);
  CHECK((es.mean() - expected).norm() < 1e-15);
}

TEST_CASE("Covariance stays symmetric positive definite under random fitness") {
  Cmaes es(std::vector<double>(6, 0.0), 1.0);
  Rng rng(6), noise(7);
  double min_eig = std::numeric_limits<double>::infinity();
  for (int g = 0; g < 1000; ++g) {
    auto pop = es.ask(rng);
    for (auto& c : pop) c.fitness = noise.uniform();
    es.tell(pop);
    const auto& C = es.covariance();
    CHECK((C - C.transpose()).cwiseAbs().maxCoeff() == 0.0);
    min_eig = std::min(min_eig, Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(C).eigenvalues().minCoeff());
    CHECK(es.sigma() > 0.0);
  }
  CHECK(min_eig > 0.0);
}

TEST_CASE("Solves the sphere in dimension 5") {
  Cmaes es(std::vector<double>(5, 3.0), 1.0);
  Rng rng(8);
  std::size_t g = 0;
  for (; g < 300 && es.mean().norm() >= 1e-6; ++g) {
    auto pop = es.ask(rng);
    for (auto& c : pop) c.fitness = sphere(c.x);
    es.tell(pop);
  }
  CHECK(es.mean().norm() < 1e-6);
  MESSAGE("sphere generations: " << g);
}

TEST_CASE("Solves Rosenbrock in dimension 2") {
  Cmaes es({-1.0, 1.0}, 1.0);
  Rng rng(9);
  std::size_t g = 0;
  for (; g < 600 && rosenbrock(es.mean_vector()) >= 1e-6; ++g) {
    auto pop = es.ask(rng);
    for (auto& c : pop) c.fitness = rosenbrock(c.x);
    es.tell(pop);
  }
  CHECK(rosenbrock(es.mean_vector()) < 1e-6);
  MESSAGE("rosenbrock generations: " << g);
}

TEST_CASE("Translation equivariance") {
  const std::vector<double> c{2.5, -1.0, 0.75, 4.0, -3.0};
  const Objective base = [](std::span<const double> x, Rng&) { return sphere(x); };
  const Objective shifted = [&](std::span<const double> x, Rng&) {
    std::vector<double> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] - c[i];
    return sphere(y);
  };
  const std::vector<double> m0{1.0, 1.0, -2.0, 0.5, 0.0};
  std::vector<double> m0c(5);
  for (std::size_t i = 0; i < 5; ++i) m0c[i] = m0[i] + c[i];
  const auto p = mean_path(base, m0, 120, 10);
  const auto q = mean_path(shifted, m0c, 120, 10);
  const Eigen::Map<const Eigen::VectorXd> cv(c.data(), 5);
  double worst = 0.0;
  for (std::size_t g = 0; g < p.size(); ++g) worst = std::max(worst, (q[g] - p[g] - cv).cwiseAbs().maxCoeff());
  CHECK(worst < 1e-12);
}

TEST_CASE("cmaes_optimize") {
  SUBCASE("budget must be positive") {
    Rng rng(1);
    OptimizeOptions opts;
    opts.max_generations = 0;
    CHECK_THROWS_AS(cmaes_optimize([](std::span<const double>, Rng&) { return 0.0; }, {0.0}, 1.0,
                                   opts, rng),
                    std::invalid_argument);
  }
  SUBCASE("constant objective gives a flat history") {
    Rng rng(2);
    OptimizeOptions opts;
    opts.max_generations = 20;
    const auto res =
        cmaes_optimize([](std::span<const double>, Rng&) { return 4.0; }, {0.0, 1.0}, 1.0, opts, rng);
    CHECK(res.history.size() == 20);
    for (const auto& h : res.history) {
      CHECK(h.best == 4.0);
      CHECK(h.mean == 4.0);
    }
    CHECK(res.best.fitness == 4.0);
  }
  SUBCASE("shifted sphere, monotone best-ever, reproducible") {
    const std::vector<double> c{1.0, -2.0, 0.5, 3.0, -0.25};
    const Objective f = [&](std::span<const double> x, Rng&) {
      double s = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - c[i]) * (x[i] - c[i]);
      return s;
    };
    OptimizeOptions opts;
    opts.max_generations = 300;
    Rng r1(3), r2(3);
    const auto a = cmaes_optimize(f, std::vector<double>(5, 0.0), 1.0, opts, r1);
    const auto b = cmaes_optimize(f, std::vector<double>(5, 0.0), 1.0, opts, r2);
    for (std::size_t i = 0; i < 5; ++i) CHECK(std::abs(a.final_mean[i] - c[i]) < 1e-4);
    for (std::size_t g = 1; g < a.history.size(); ++g) {
      CHECK(a.history[g].best_ever <= a.history[g - 1].best_ever);
    }
    CHECK(a.final_mean == b.final_mean);
    CHECK(a.best.x == b.best.x);
  }
  SUBCASE("noisy sphere with averaging") {
    const Objective f = [](std::span<const double> x, Rng& rng) {
      double s = 0.0;
      for (int k = 0; k < 10; ++k) s += sphere(x) + rng.normal();
      return s / 10.0;
    };
    // The noise floor keeps the mean wandering at roughly the noise scale, so
    // the check is on first passage below 0.3.
    double closest = std::numeric_limits<double>::infinity();
    OptimizeOptions opts;
    opts.max_generations = 300;
    opts.on_generation = [&](const Cmaes& es, const GenerationStats&) {
      closest = std::min(closest, es.mean().norm());
    };
    Rng rng(4);
    cmaes_optimize(f, std::vector<double>(5, 3.0), 1.0, opts, rng);
    CHECK(closest < 0.3);
  }
  SUBCASE("target and patience stop early") {
    Rng rng(5);
    OptimizeOptions opts;
    opts.max_generations = 500;
    opts.target = 1e-3;
    const auto res = cmaes_optimize([](std::span<const double> x, Rng&) { return sphere(x); },
                                    {2.0, 2.0}, 1.0, opts, rng);
    CHECK(res.reached_target);
    CHECK(res.history.size() < 500);

    OptimizeOptions flat;
    flat.max_generations = 500;
    flat.patience = 30;
    Rng rng2(6);
    const auto stalled =
        cmaes_optimize([](std::span<const double>, Rng&) { return 1.0; }, {0.0}, 1.0, flat, rng2);
    CHECK(stalled.history.size() == 31);
  }
  SUBCASE("parallel evaluation matches serial") {
    const Objective f = [](std::span<const double> x, Rng& rng) { return sphere(x) + rng.normal(); };
    OptimizeOptions opts;
    opts.max_generations = 40;
    Rng r1(7), r2(7);
    const auto serial = cmaes_optimize(f, {1.0, 2.0, 3.0}, 0.5, opts, r1);
    opts.threads = 3;
    const auto parallel = cmaes_optimize(f, {1.0, 2.0, 3.0}, 0.5, opts, r2);
    CHECK(serial.final_mean == parallel.final_mean);
  }
}
