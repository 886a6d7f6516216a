// Small dense univariate polynomials with exact real-root isolation.
//
// Used for the quartic level-set crossings along rays. Roots are isolated by
// recursing on the derivative (so every search interval is monotone) and then
// refined by bracketed Newton until the bracket or the step collapses.
#pragma once

#include <initializer_list>
#include <optional>
#include <vector>

namespace weaklim {

class Polynomial {
 public:
  Polynomial() = default;
  Polynomial(std::initializer_list<double> ascending);
  explicit Polynomial(std::vector<double> ascending);

  /// Coefficients, lowest degree first.
  const std::vector<double>& coefficients() const noexcept { return c_; }
  int degree() const noexcept;

  double operator()(double s) const noexcept;
  Polynomial derivative() const;

  /// Drops the constant term and divides by s. Intended for polynomials that
  /// vanish at the origin by construction.
  Polynomial deflate_at_zero() const;

  /// Upper bound on the modulus of any root (Cauchy).
  double root_bound() const;

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(double k, const Polynomial& a);

 private:
  void trim();
  std::vector<double> c_;
};

/// All distinct real roots in [lo, hi], ascending.
std::vector<double> real_roots(const Polynomial& p, double lo, double hi);

/// Smallest real root strictly greater than `above`, if any.
std::optional<double> smallest_root_above(const Polynomial& p, double above);

/// Bisection on a bracketing interval until the bracket collapses to adjacent
/// doubles. f(lo) and f(hi) must have opposite signs (or one must vanish).
template <class F>
double bisect(F&& f, double lo, double hi) {
  double flo = f(lo);
  if (flo == 0.0) return lo;
  if (f(hi) == 0.0) return hi;
  for (int i = 0; i < 2000; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (!(mid > lo && mid < hi)) break;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace weaklim
