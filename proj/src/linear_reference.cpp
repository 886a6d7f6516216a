#include "weaklim/linear_reference.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace weaklim {

namespace {

double ball_coefficient(double t, const MaterialPair& m) {
  const double jump = m.alpha1() - m.alpha0();
  if (!(jump > 0.0)) {
    throw DegenerateMaterials("linear condition requires alpha1 > alpha0");
  }
  return ((1.0 - t) * m.alpha1() + t * m.alpha0()) / jump;
}

}  // namespace

Vec linear_V(double t, const Vec& U, const Vec& x, const MaterialPair& m) {
  require_fraction(t);
  require_same_dim(U, x, "linear_V");
  return t * m.alpha1() * (U - (1.0 - t) * x) +
         (1.0 - t) * m.alpha0() * (U + t * x);
}

double linear_condition_margin(double t, const Vec& U, const Vec& x,
                               const MaterialPair& m) {
  require_fraction(t);
  require_same_dim(U, x, "linear_condition_margin");
  return U.dot(x) - ball_coefficient(t, m) * x.squaredNorm();
}

double linear_necessary_margin(double t, const Vec& U, const Vec& V,
                               const MaterialPair& m) {
  require_fraction(t);
  require_same_dim(U, V, "linear_necessary_margin");
  const double harmonic =
      m.alpha1() * m.alpha0() / ((1.0 - t) * m.alpha1() + t * m.alpha0());
  return U.dot(V) - harmonic * U.squaredNorm();
}

Vec linear_minimizer(double t, const Vec& U, const MaterialPair& m) {
  require_fraction(t);
  return (m.alpha1() - m.alpha0()) /
         ((1.0 - t) * m.alpha1() + t * m.alpha0()) * U;
}

Laminate linear_build_laminate(double t, const Vec& U, const Vec& x,
                               const MaterialPair& m, double boundary_tol) {
  const double margin = linear_condition_margin(t, U, x, m);
  const double scale = std::max(1.0, U.norm() * x.norm());
  if (margin < -boundary_tol * scale) {
    std::ostringstream os;
    os << "direction is outside the feasible ball (margin " << margin << ")";
    throw InfeasibleDirection(os.str());
  }
  if (margin <= boundary_tol * scale || x.squaredNorm() == 0.0) {
    return first_order_laminate(t, U, x, m, Law::linear);
  }
  // The ray s*x leaves the ball at s* = U.x / (coef |x|^2) > 1.
  const double s_star = U.dot(x) / (ball_coefficient(t, m) * x.squaredNorm());
  const double r = 1.0 / s_star;
  const Vec x1 = s_star * x;
  return second_order_laminate(t, U, r, x1, Vec::Zero(x.size()), m,
                               Law::linear);
}

}  // namespace weaklim
