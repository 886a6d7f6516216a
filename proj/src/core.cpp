#include "weaklim/core.hpp"

#include <cmath>

namespace weaklim {

Vec lambda_map(Phase phase, const Vec& u, const MaterialPair& m) {
  return m.alpha(phase) * u.squaredNorm() * u;
}

double gamma(double t, const MaterialPair& m) {
  require_fraction(t);
  if (t == 0.0) return m.alpha0();
  if (t == 1.0) return m.alpha1();
  const double d = (1.0 - t) * std::cbrt(m.alpha1()) + t * std::cbrt(m.alpha0());
  return m.alpha1() * m.alpha0() / (d * d * d);
}

Vec phase_one_mean(double t, const Vec& U, const Vec& x) {
  return U - (1.0 - t) * x;
}

Vec phase_zero_mean(double t, const Vec& U, const Vec& x) {
  return U + t * x;
}

double quartic_energy(double t, const Vec& U, const Vec& x,
                      const MaterialPair& m) {
  require_fraction(t);
  require_same_dim(U, x, "quartic_energy");
  const double n1 = phase_one_mean(t, U, x).squaredNorm();
  const double n0 = phase_zero_mean(t, U, x).squaredNorm();
  return t * m.alpha1() * n1 * n1 + (1.0 - t) * m.alpha0() * n0 * n0;
}

Vec quartic_minimizer(double t, const Vec& U, const MaterialPair& m) {
  require_fraction(t);
  const double c1 = std::cbrt(m.alpha1());
  const double c0 = std::cbrt(m.alpha0());
  return (c1 - c0) / ((1.0 - t) * c1 + t * c0) * U;
}

}  // namespace weaklim
