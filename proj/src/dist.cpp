#include "hyperswarm/dist.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace hyperswarm {

ConformalNatural::ConformalNatural(DiscPoint a, double s) : a_(a), s_(s) {
  if (!(s > 1.0)) {
    throw std::domain_error("ConformalNatural: concentration s must exceed 1");
  }
}

double wc_sample(const WrappedCauchy& d, Rng& rng) {
  const double theta = kTwoPi * rng.uniform();
  const MobiusTransform g(d.a, 0.0);
  return wrap_angle(std::arg(g(std::polar(1.0, theta))));
}

double wc_density(const WrappedCauchy& d, double angle) {
  const double r = d.a.norm();
  const double mode = std::arg(d.a.value());
  return (1.0 - r * r) /
         (kTwoPi * (1.0 - 2.0 * r * std::cos(angle - mode) + r * r));
}

DiscPoint cn_sample(const ConformalNatural& d, Rng& rng) {
  // Radial inverse CDF at a = 0: P(|zeta| <= r) = 1 - (1 - r^2)^(s - 1).
  const double u = rng.uniform_open();
  double r2 = -std::expm1(std::log1p(-u) / (d.s() - 1.0));
  if (r2 > 1.0 - 1e-12) r2 = 1.0 - 1e-12;
  const double theta = kTwoPi * rng.uniform();
  const Complex centered = std::polar(std::sqrt(r2), theta);
  // (a, 0) sends 0 to a; the law at a = 0 is rotation invariant.
  return mobius_apply(MobiusTransform(d.a(), 0.0), centered);
}

double cn_density(const ConformalNatural& d, DiscPoint zeta) {
  const Complex a = d.a().value();
  const Complex z = zeta.value();
  const double ratio = (1.0 - std::norm(a)) * (1.0 - std::norm(z)) /
                       std::norm(1.0 - std::conj(a) * z);
  return (d.s() - 1.0) / std::numbers::pi * std::pow(ratio, d.s());
}

double gaussian_sample(const GaussianParams& p, Rng& rng) {
  if (!(p.var > 0.0)) {
    throw std::domain_error("gaussian_sample: variance must be positive");
  }
  const double var = p.var < kMinVariance ? kMinVariance : p.var;
  return p.m + std::sqrt(var) * rng.normal();
}

}  // namespace hyperswarm
