#include "hyperswarm/geom.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace hyperswarm {

namespace {

constexpr double kBoundaryClamp = 1.0 - 1e-12;

const Complex kI{0.0, 1.0};

Complex clamp_into_disc(Complex z) {
  const double r = std::abs(z);
  if (r >= kBoundaryClamp) return z * (kBoundaryClamp / r);
  return z;
}

// Matrix form [[-e, e a], [-conj(a), 1]] of z -> e (a - z) / (1 - conj(a) z).
struct Mat2 {
  Complex p, q, r, s;
};

Mat2 to_matrix(const MobiusTransform& g) {
  const Complex e = std::polar(1.0, g.phi());
  const Complex a = g.a().value();
  return {-e, e * a, -std::conj(a), Complex{1.0, 0.0}};
}

Mat2 mul(const Mat2& x, const Mat2& y) {
  return {x.p * y.p + x.q * y.r, x.p * y.q + x.q * y.s,
          x.r * y.p + x.s * y.r, x.r * y.q + x.s * y.s};
}

MobiusTransform from_matrix(const Mat2& m) {
  // Scale so the lower-right entry is 1; the other entries then read off
  // directly. s never vanishes for a disc automorphism (|s| >= 1 - |a|^2 > 0
  // up to the common scale).
  const Complex e = -m.p / m.s;
  const Complex a = -std::conj(m.r / m.s);
  return MobiusTransform(DiscPoint(clamp_into_disc(a)), std::arg(e));
}

}  // namespace

double wrap_angle(double angle) {
  double r = std::fmod(angle, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  // fmod of a tiny negative number can round up to exactly 2 pi.
  if (r >= kTwoPi) r = 0.0;
  return r;
}

DiscPoint::DiscPoint(double re, double im) : DiscPoint(Complex{re, im}) {}

DiscPoint::DiscPoint(Complex z) : z_(z) {
  if (!(std::norm(z) < 1.0)) {
    throw std::domain_error("DiscPoint outside the open unit disc: |z| = " +
                            std::to_string(std::abs(z)));
  }
}

MobiusTransform::MobiusTransform(DiscPoint a, double phi)
    : a_(a), phi_(wrap_angle(phi)) {}

MobiusTransform MobiusTransform::identity() {
  return MobiusTransform(DiscPoint{}, std::numbers::pi);
}

Complex MobiusTransform::operator()(Complex z) const {
  const Complex a = a_.value();
  return std::polar(1.0, phi_) * (a - z) / (1.0 - std::conj(a) * z);
}

DiscPoint mobius_apply(const MobiusTransform& g, DiscPoint z) {
  return DiscPoint(clamp_into_disc(g(z.value())));
}

DiscPoint mobius_apply(const MobiusTransform& g, Complex z) {
  return mobius_apply(g, DiscPoint(z));
}

MobiusTransform mobius_compose(const MobiusTransform& g1,
                               const MobiusTransform& g2) {
  return from_matrix(mul(to_matrix(g1), to_matrix(g2)));
}

MobiusTransform mobius_inverse(const MobiusTransform& g) {
  // The inverse of (a, phi) is (a e^{i phi}, -phi).
  const Complex a = g.a().value() * std::polar(1.0, g.phi());
  return MobiusTransform(DiscPoint(a), -g.phi());
}

double hyp_distance(Complex z, Complex w) {
  double ratio = std::abs(z - w) / std::abs(1.0 - std::conj(w) * z);
  if (ratio > kBoundaryClamp) ratio = kBoundaryClamp;
  return 2.0 * std::atanh(ratio);
}

double hyp_distance(DiscPoint z, DiscPoint w) {
  return hyp_distance(z.value(), w.value());
}

GaussianParams disc_to_gaussian(DiscPoint zeta) {
  const Complex z = zeta.value();
  const Complex xi = kI * (1.0 - z) / (1.0 + z);
  double var = xi.imag() / std::numbers::sqrt2;
  if (var < kMinVariance) var = kMinVariance;
  return {xi.real(), var};
}

DiscPoint gaussian_to_disc(const GaussianParams& p) {
  if (!(p.var > 0.0)) {
    throw std::domain_error("gaussian_to_disc: variance must be positive");
  }
  const Complex xi{p.m, std::numbers::sqrt2 * p.var};
  return DiscPoint(clamp_into_disc((kI - xi) / (kI + xi)));
}

}  // namespace hyperswarm
