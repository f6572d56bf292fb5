#pragma once

#include <complex>
#include <numbers>

namespace hyperswarm {

using Complex = std::complex<double>;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Reduce an angle to [0, 2*pi).
double wrap_angle(double angle);

/// A point of the open unit disc. Construction with |z| >= 1 throws
/// std::domain_error, so every DiscPoint in flight is a valid disc point.
class DiscPoint {
 public:
  DiscPoint() = default;
  DiscPoint(double re, double im);
  explicit DiscPoint(Complex z);

  double re() const { return z_.real(); }
  double im() const { return z_.imag(); }
  Complex value() const { return z_; }
  double norm() const { return std::abs(z_); }

  friend bool operator==(const DiscPoint&, const DiscPoint&) = default;

 private:
  Complex z_{0.0, 0.0};
};

/// Orientation-preserving disc automorphism z -> e^{i phi} (a - z) / (1 - conj(a) z).
///
/// With this parameterization the identity is (a = 0, phi = pi), not (0, 0):
/// (0, 0) is the half-turn z -> -z.
class MobiusTransform {
 public:
  MobiusTransform() = default;
  MobiusTransform(DiscPoint a, double phi);

  static MobiusTransform identity();

  DiscPoint a() const { return a_; }
  double phi() const { return phi_; }

  /// Evaluate on an arbitrary complex number (no domain check). The unit
  /// circle maps onto itself, which the circular samplers rely on.
  Complex operator()(Complex z) const;

 private:
  DiscPoint a_;
  double phi_ = 0.0;
};

/// Mean and variance of a one-variate normal law.
struct GaussianParams {
  double m = 0.0;
  double var = 1.0;
};

inline constexpr double kMinVariance = 1e-12;

DiscPoint mobius_apply(const MobiusTransform& g, DiscPoint z);
/// Applies the map to a raw complex number with |z| < 1; throws otherwise.
DiscPoint mobius_apply(const MobiusTransform& g, Complex z);

/// Returns h with h(z) = g1(g2(z)).
MobiusTransform mobius_compose(const MobiusTransform& g1,
                               const MobiusTransform& g2);
MobiusTransform mobius_inverse(const MobiusTransform& g);

/// Poincare-disc distance (curvature -1): 2 artanh(|z - w| / |1 - conj(w) z|).
double hyp_distance(DiscPoint z, DiscPoint w);
double hyp_distance(Complex z, Complex w);

/// Inverse Cayley map to the upper half-plane, read as (mean, sqrt(2) * variance).
/// The variance is floored at kMinVariance so points that drift onto the
/// boundary give almost-deterministic laws instead of a zero variance.
GaussianParams disc_to_gaussian(DiscPoint zeta);
/// Exact inverse of disc_to_gaussian; throws std::domain_error for var <= 0.
DiscPoint gaussian_to_disc(const GaussianParams& p);

}  // namespace hyperswarm
