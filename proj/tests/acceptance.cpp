// Acceptance run: one PASS/FAIL line per criterion, exit status 0 only when
// every criterion passes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "hyperswarm/cmaes.hpp"
#include "hyperswarm/dist.hpp"
#include "hyperswarm/experiment.hpp"
#include "hyperswarm/geom.hpp"
#include "hyperswarm/runner.hpp"
#include "hyperswarm/swarm.hpp"
#include "support/stats.hpp"

using namespace hyperswarm;
using namespace hyperswarm::testing;
namespace fs = std::filesystem;

namespace {

const fs::path kConfigs = HYPERSWARM_CONFIG_DIR;
const std::vector<std::uint64_t> kSeeds{1, 2, 3, 4, 5};

struct Verdict {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const char* name, const Verdict& v) {
  std::printf("%s [%d] %s: %s\n", v.pass ? "PASS" : "FAIL", id, name, v.detail.c_str());
  std::fflush(stdout);
  if (!v.pass) ++failures;
}

ExperimentConfig experiment(const std::string& name, std::uint64_t seed) {
  auto cfg = load_experiment(kConfigs / "experiments" / name);
  cfg.seed = seed;
  return cfg;
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double seconds(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - since).count();
}

double best_reward(const ExperimentResult& res) {
  double best = -INFINITY;
  for (const auto& r : res.records) best = std::max(best, r.best);
  return best;
}

// ---- frog ---------------------------------------------------------------

void frog_criteria() {
  int optimum = 0, structure = 0;
  std::string seeds_a, seeds_b;
  for (auto seed : kSeeds) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto res = run_experiment(experiment("frog.json", seed));
    const double wall = seconds(t0);
    const double best = best_reward(res);
    const bool ok = best >= 4.5 && res.generations <= 300 && wall < 120.0;
    optimum += ok;
    int free_jumps = 0;
    for (const auto& g : res.players.at(0).gaussians) free_jumps += std::abs(g.m) < 0.2;
    structure += free_jumps == 2;
    seeds_a += " s" + std::to_string(seed) + "=" + fmt("%.2f", best) + "/" + fmt("%.0fs", wall);
    seeds_b += " s" + std::to_string(seed) + "=" + std::to_string(free_jumps);
  }
  report(1, "frog optimum", {optimum >= 4, std::to_string(optimum) + "/5 seeds reach best >= 4.5 within 300 generations and 2 min;" + seeds_a});
  report(2, "frog structure", {structure >= 3, std::to_string(structure) + "/5 seeds with exactly two |m| < 0.2;" + seeds_b});
}

// ---- multilayer ---------------------------------------------------------

void multilayer_criterion() {
  int solved = 0;
  double worst_drift = 0.0;
  std::string seeds;
  for (auto seed : kSeeds) {
    const auto res = run_experiment(experiment("multilayer.json", seed));
    worst_drift = std::max(worst_drift, res.isometry_drift);
    const bool ok = res.error == -4 && res.generations <= 500 && res.isometry_drift < 1e-5;
    solved += ok;
    seeds += " s" + std::to_string(seed) + "=J" + std::to_string(res.error) + "@" +
             std::to_string(res.generations);
  }
  report(3, "multilayer oracle instance",
         {solved >= 4, std::to_string(solved) + "/5 seeds reach J = -4 within 500 generations; max drift " +
                           fmt("%.2e", worst_drift) + ";" + seeds});
}

// ---- propositions -------------------------------------------------------

DiscState random_points(Rng& rng, std::size_t n) {
  DiscState z(n);
  for (auto& v : z) v = std::polar(0.8 * std::sqrt(rng.uniform()), kTwoPi * rng.uniform());
  return z;
}

void propositions_criterion() {
  Rng rng(2024);
  IntegrateOptions io;
  io.dt = 1e-3;
  double global_drift = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    SwarmSpec spec;
    spec.n = 2 + rng.next_u64() % 9;
    spec.omega = rng.normal();
    spec.K = Eigen::MatrixXd::Constant(spec.n, spec.n, 2.0 * rng.normal());
    spec.beta = Eigen::MatrixXd::Constant(spec.n, spec.n, kTwoPi * rng.uniform());
    const auto traj = integrate(SwarmField(spec), random_points(rng, spec.n), 0.0, 2.0, io);
    global_drift = std::max(global_drift, verify_isometry(traj, std::vector<std::size_t>(spec.n, 0)));
  }
  double group_drift = 0.0, min_cross = INFINITY;
  for (int trial = 0; trial < 10; ++trial) {
    SubSwarmSpec spec;
    spec.sizes = {2 + rng.next_u64() % 4, 2 + rng.next_u64() % 4};
    spec.omega = rng.normal();
    spec.K.resize(2, 2);
    spec.beta.resize(2, 2);
    for (int l = 0; l < 2; ++l) {
      for (int m = l; m < 2; ++m) {
        spec.K(l, m) = spec.K(m, l) = 2.0 * rng.normal();
        spec.beta(l, m) = spec.beta(m, l) = kTwoPi * rng.uniform();
      }
    }
    std::vector<std::size_t> groups(spec.sizes[0], 0);
    groups.resize(spec.total(), 1);
    const auto traj = integrate(SubSwarmField(spec), random_points(rng, spec.total()), 0.0, 2.0, io);
    group_drift = std::max(group_drift, verify_isometry(traj, groups));
    min_cross = std::min(min_cross, cross_group_change(traj, groups));
  }
  const bool pass = global_drift < 1e-6 && group_drift < 1e-6 && min_cross > 1e-2;
  report(4, "swarm isometry numerics",
         {pass, "global drift " + fmt("%.2e", global_drift) + " (20 swarms), within-group drift " +
                    fmt("%.2e", group_drift) + ", smallest cross-group change " + fmt("%.3f", min_cross) +
                    " (10 systems)"});
}

// ---- distributions ------------------------------------------------------

double integrate_disc(const std::function<double(Complex)>& f, int radial, int angular) {
  const double h = 1.0 / radial;
  double total = 0.0;
  for (int i = 0; i <= radial; ++i) {
    const double r = std::min(i * h, 1.0 - 1e-15);
    double ring = 0.0;
    for (int k = 0; k < angular; ++k) ring += f(std::polar(r, kTwoPi * k / angular));
    ring *= kTwoPi / angular * r;
    const double w = (i == 0 || i == radial) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    total += w * ring;
  }
  return total * h / 3.0;
}

void distribution_criterion() {
  double wc_norm = 0.0;
  for (const Complex a : {Complex{0.0, 0.0}, Complex{0.5, 0.2}, Complex{-0.3, -0.9}}) {
    const WrappedCauchy d{DiscPoint(a)};
    constexpr int points = 10000;
    double sum = 0.0;
    for (int k = 0; k < points; ++k) sum += wc_density(d, kTwoPi * k / points);
    wc_norm = std::max(wc_norm, std::abs(sum * kTwoPi / points - 1.0));
  }
  double cn_norm = 0.0;
  for (auto [a, s] : {std::pair{Complex{0.0, 0.0}, 2.0}, std::pair{Complex{0.3, -0.2}, 3.0}}) {
    const ConformalNatural d(DiscPoint(a), s);
    const double total = integrate_disc(
        [&](Complex z) {
          const double w = 1.0 - std::norm(z);
          return w <= 0.0 ? 0.0 : cn_density(d, DiscPoint(z)) / (w * w);
        },
        4000, 256);
    cn_norm = std::max(cn_norm, std::abs(total - 1.0));
  }

  constexpr std::size_t n = 100000;
  const WrappedCauchy wc{DiscPoint(0.6, -0.3)};
  Rng rng(77);
  std::vector<double> angles(n);
  for (auto& x : angles) x = wc_sample(wc, rng);
  const double wc_bins = max_bin_deviation(angles, 0.0, kTwoPi, 50, [&](double x) { return wc_density(wc, x); });

  const DiscPoint a(0.4, 0.2);
  const double s = 2.5;
  const ConformalNatural cn(a, s);
  const MobiusTransform to_origin(a, 0.0);
  std::vector<double> radii(n), phases(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Complex w = to_origin(cn_sample(cn, rng).value());
    radii[i] = std::abs(w);
    phases[i] = wrap_angle(std::arg(w));
  }
  const double cn_radial = max_bin_deviation(radii, 0.0, 1.0, 50, [&](double r) {
    return 2.0 * (s - 1.0) * r * std::pow(1.0 - r * r, s - 2.0);
  });
  const double cn_angular = max_bin_deviation(phases, 0.0, kTwoPi, 50, [](double) { return 1.0 / kTwoPi; });

  std::vector<double> uniform(10000);
  for (auto& x : uniform) x = wc_sample({DiscPoint{}}, rng);
  const double ks = ks_statistic(uniform, [](double x) { return x / kTwoPi; });

  const bool pass = wc_norm < 1e-8 && cn_norm < 1e-6 && wc_bins < 3.0 && cn_radial < 3.0 &&
                    cn_angular < 3.0 && ks < 0.02;
  report(5, "distribution correctness",
         {pass, "wc norm err " + fmt("%.1e", wc_norm) + ", cn norm err " + fmt("%.1e", cn_norm) +
                    ", worst bin deviation wc " + fmt("%.2f", wc_bins) + " / cn radius " +
                    fmt("%.2f", cn_radial) + " / cn angle " + fmt("%.2f", cn_angular) +
                    " sigma, KS uniform " + fmt("%.4f", ks)});
}

// ---- CMA-ES -------------------------------------------------------------

double sphere(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s;
}

double rosenbrock(std::span<const double> x) {
  return 100.0 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1.0 - x[0], 2);
}

template <class F, class Stop>
std::size_t run_until(Cmaes& es, Rng& rng, std::size_t budget, F f, Stop done) {
  std::size_t g = 0;
  for (; g < budget && !done(); ++g) {
    auto pop = es.ask(rng);
    for (auto& c : pop) c.fitness = f(c.x);
    es.tell(pop);
  }
  return g;
}

void cmaes_criterion() {
  Cmaes sph(std::vector<double>(5, 3.0), 1.0);
  Rng r1(8);
  const auto g_sphere = run_until(sph, r1, 300, sphere, [&] { return sph.mean().norm() < 1e-6; });
  const double sphere_norm = sph.mean().norm();

  Cmaes ros({-1.0, 1.0}, 1.0);
  Rng r2(9);
  const auto g_rosen = run_until(ros, r2, 600, rosenbrock, [&] { return rosenbrock(ros.mean_vector()) < 1e-6; });
  const double rosen_f = rosenbrock(ros.mean_vector());

  const std::vector<double> c{2.5, -1.0, 0.75, 4.0, -3.0};
  Cmaes base({1.0, 1.0, -2.0, 0.5, 0.0}, 1.0), moved({3.5, 0.0, -1.25, 4.5, -3.0}, 1.0);
  Rng rb(10), rm(10);
  double worst = 0.0;
  for (int g = 0; g < 120; ++g) {
    auto p = base.ask(rb), q = moved.ask(rm);
    for (auto& x : p) x.fitness = sphere(x.x);
    for (auto& x : q) {
      std::vector<double> y(5);
      for (std::size_t i = 0; i < 5; ++i) y[i] = x.x[i] - c[i];
      x.fitness = sphere(y);
    }
    base.tell(p);
    moved.tell(q);
    for (std::size_t i = 0; i < 5; ++i) worst = std::max(worst, std::abs(moved.mean()[i] - base.mean()[i] - c[i]));
  }
  const bool pass = sphere_norm < 1e-6 && rosen_f < 1e-6 && worst < 1e-12;
  report(6, "CMA-ES quality",
         {pass, "sphere |mean| " + fmt("%.1e", sphere_norm) + " after " + std::to_string(g_sphere) +
                    " generations, Rosenbrock f " + fmt("%.1e", rosen_f) + " after " +
                    std::to_string(g_rosen) + ", translation error " + fmt("%.1e", worst)});
}

// ---- labyrinth ----------------------------------------------------------

void labyrinth_criterion() {
  const auto m2_cfg = load_experiment(kConfigs / "experiments" / "labyrinth_m2.json");
  const auto m2 = run_experiment(m2_cfg);
  const auto base = run_baseline(m2_cfg, 1000);
  const double trained = m2.players.at(0).reward;
  const double needed = base.mean + 2.0 * base.stddev;
  const bool m2_ok = trained >= needed && m2_cfg.rollout.final_rollouts == 1000;

  const auto m1_cfg = load_experiment(kConfigs / "experiments" / "labyrinth_m1.json");
  const auto m1 = run_experiment(m1_cfg);
  const double gen0 = m1.records.front().best;
  const double search_best = run_baseline(m1_cfg, 10000).max;
  const double final_m1 = m1.players.at(0).reward;
  const double m1_needed = gen0 + 0.5 * (search_best - gen0);
  const bool m1_ok = final_m1 >= m1_needed;

  report(7, "labyrinth",
         {m2_ok && m1_ok, "method 2 mean " + fmt("%.2f", trained) + " vs baseline " + fmt("%.2f", base.mean) +
                              " + 2 x " + fmt("%.2f", base.stddev) + " = " + fmt("%.2f", needed) +
                              "; method 1 final " + fmt("%.0f", final_m1) + " vs gen0 " + fmt("%.0f", gen0) +
                              " + 50% of gap to random-search best " + fmt("%.0f", search_best) + " = " +
                              fmt("%.1f", m1_needed)});
}

// ---- two players --------------------------------------------------------

void two_player_criterion() {
  int frogs = 0, plane = 0;
  std::string frog_seeds, plane_seeds;
  for (auto seed : kSeeds) {
    const auto res = run_experiment(experiment("two_frogs.json", seed));
    const double a = res.players.at(0).reward, b = res.players.at(1).reward;
    frogs += std::min(a, b) >= 3.0 && std::max(a, b) >= 4.5;
    frog_seeds += " s" + std::to_string(seed) + "=(" + fmt("%.2f", a) + "," + fmt("%.2f", b) + ")";
  }
  for (auto seed : kSeeds) {
    const auto res = run_experiment(experiment("plane_game.json", seed));
    const double a = res.players.at(0).reward, b = res.players.at(1).reward;
    const auto joint = res.mean_action_rewards.value();
    // The joint play sits on the (2,2) field and the rollouts pay its values.
    plane += joint == std::pair{2.0, 2.0} && std::abs(a - 2.0) < 0.05 && std::abs(b - 2.0) < 0.05;
    plane_seeds += " s" + std::to_string(seed) + "=(" + fmt("%.3f", a) + "," + fmt("%.3f", b) + ")";
  }
  report(8, "two-player outcomes",
         {frogs >= 3 && plane >= 3, "two_frogs " + std::to_string(frogs) + "/5 with min >= 3, max >= 4.5;" +
                                        frog_seeds + "; plane_game " + std::to_string(plane) +
                                        "/5 on the (2,2) field;" + plane_seeds});
}

// ---- determinism --------------------------------------------------------

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void determinism_criterion() {
  const auto root = fs::temp_directory_path() / "hyperswarm_acceptance";
  fs::remove_all(root);
  int identical = 0, total = 0;
  for (const char* name : {"plane_game.json", "labyrinth_m1.json", "labyrinth_m2.json", "multilayer.json"}) {
    const auto cfg = experiment(name, 3);
    std::string bytes[2];
    for (int k = 0; k < 2; ++k) {
      const auto dir = root / (std::string(name) + std::to_string(k));
      write_outputs(run_experiment(cfg), cfg, dir);
      bytes[k] = slurp(dir / "rewards.csv");
    }
    ++total;
    identical += !bytes[0].empty() && bytes[0] == bytes[1];
  }
  fs::remove_all(root);
  report(9, "determinism", {identical == total, std::to_string(identical) + "/" + std::to_string(total) +
                                                    " experiments rerun to byte-identical rewards.csv"});
}

// ---- geometry -----------------------------------------------------------

DiscPoint random_disc_point(Rng& rng, double max_radius = 0.95) {
  return DiscPoint(std::polar(max_radius * std::sqrt(rng.uniform()), kTwoPi * rng.uniform()));
}

void geometry_criterion() {
  Rng rng(31);
  double group = 0.0, metric = 0.0, invariance = 0.0, cayley = 0.0;
  bool axioms = true;
  const auto id = MobiusTransform::identity();
  for (int i = 0; i < 1000; ++i) {
    const MobiusTransform g1(random_disc_point(rng, 0.9), kTwoPi * rng.uniform());
    const MobiusTransform g2(random_disc_point(rng, 0.9), kTwoPi * rng.uniform());
    const MobiusTransform g3(random_disc_point(rng, 0.9), kTwoPi * rng.uniform());
    const auto x = random_disc_point(rng), y = random_disc_point(rng), z = random_disc_point(rng);
    auto at = [&](const MobiusTransform& g, DiscPoint p) { return mobius_apply(g, p).value(); };
    const auto inv = mobius_inverse(g1);
    group = std::max({group, std::abs(at(mobius_compose(g1, g2), x) - g1(g2(x.value()))),
                      std::abs(at(mobius_compose(mobius_compose(g1, g2), g3), x) -
                               at(mobius_compose(g1, mobius_compose(g2, g3)), x)),
                      std::abs(at(mobius_compose(id, g1), x) - at(g1, x)),
                      std::abs(at(mobius_compose(g1, id), x) - at(g1, x)),
                      std::abs(at(mobius_compose(inv, g1), x) - x.value()),
                      std::abs(at(mobius_compose(g1, inv), x) - x.value())});

    const double dxy = hyp_distance(x, y);
    axioms = axioms && dxy >= 0.0 && hyp_distance(x, x) == 0.0;
    metric = std::max({metric, std::abs(dxy - hyp_distance(y, x)),
                       std::max(0.0, hyp_distance(x, z) - dxy - hyp_distance(y, z))});
    invariance = std::max(invariance, std::abs(hyp_distance(mobius_apply(g1, x), mobius_apply(g1, y)) - dxy));
    cayley = std::max(cayley, std::abs(gaussian_to_disc(disc_to_gaussian(x)).value() - x.value()));
  }

  SwarmSpec rot;
  rot.n = 1;
  rot.omega = 1.0;
  rot.K = Eigen::MatrixXd::Zero(1, 1);
  rot.beta = Eigen::MatrixXd::Zero(1, 1);
  auto run = [&](double dt) {
    IntegrateOptions io;
    io.dt = dt;
    return integrate(SwarmField(rot), DiscState{Complex{0.5, 0.1}}, 0.0, 2.0, io).final_state()[0];
  };
  // Exact solution of dz = i z: rotation by the elapsed time.
  const Complex exact = Complex{0.5, 0.1} * std::polar(1.0, 2.0);
  const double order = std::log2(std::abs(run(0.1) - exact) / std::abs(run(0.05) - exact));

  const bool pass = axioms && group < 1e-12 && metric < 1e-12 && invariance < 1e-12 && cayley < 1e-12 &&
                    order >= 3.7 && order <= 4.3;
  report(10, "geometry invariants",
         {pass, "1000 cases: group " + fmt("%.1e", group) + ", metric " + fmt("%.1e", metric) +
                    ", invariance " + fmt("%.1e", invariance) + ", Cayley round trip " + fmt("%.1e", cayley) +
                    "; RK4 order " + fmt("%.3f", order)});
}

}  // namespace

int main() {
  frog_criteria();
  multilayer_criterion();
  propositions_criterion();
  distribution_criterion();
  cmaes_criterion();
  labyrinth_criterion();
  two_player_criterion();
  determinism_criterion();
  geometry_criterion();
  std::printf("%s: %d criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
