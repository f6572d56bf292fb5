#pragma once

#include "hyperswarm/geom.hpp"
#include "hyperswarm/rng.hpp"

namespace hyperswarm {

/// Wrapped Cauchy law on the circle, parameterized by one disc point
/// a = r e^{i Phi}. a = 0 is the uniform law; |a| -> 1 tends to a point mass.
struct WrappedCauchy {
  DiscPoint a;
};

/// Conformally natural law on the disc with center a and concentration s > 1.
class ConformalNatural {
 public:
  ConformalNatural(DiscPoint a, double s);

  DiscPoint a() const { return a_; }
  double s() const { return s_; }

 private:
  DiscPoint a_;
  double s_;
};

/// Pushes a uniform angle through the automorphism (a, phi = 0) and returns
/// the argument of the image, in [0, 2 pi).
double wc_sample(const WrappedCauchy& d, Rng& rng);

/// Density of wc_sample's law with respect to d(angle):
///   (1 / 2pi) (1 - r^2) / (1 - 2 r cos(angle - Phi) + r^2).
/// The map (a, 0) is an involution, so the density is |g'| evaluated at the
/// angle itself; its mode sits at Phi = arg a.
double wc_density(const WrappedCauchy& d, double angle);

DiscPoint cn_sample(const ConformalNatural& d, Rng& rng);

/// ((s - 1) / pi) ((1 - |a|^2)(1 - |zeta|^2) / |1 - conj(a) zeta|^2)^s.
/// This is a density against the hyperbolic area dA / (1 - |zeta|^2)^2,
/// not against Lebesgue measure.
double cn_density(const ConformalNatural& d, DiscPoint zeta);

/// m + sqrt(var) n with n standard normal; var is floored at kMinVariance.
/// Throws std::domain_error when var <= 0.
double gaussian_sample(const GaussianParams& p, Rng& rng);

}  // namespace hyperswarm
