#include "weaklim/polynomial.hpp"

#include <algorithm>
#include <cmath>

namespace weaklim {

Polynomial::Polynomial(std::initializer_list<double> ascending)
    : c_(ascending) {
  trim();
}

Polynomial::Polynomial(std::vector<double> ascending)
    : c_(std::move(ascending)) {
  trim();
}

void Polynomial::trim() {
  while (!c_.empty() && c_.back() == 0.0) c_.pop_back();
}

int Polynomial::degree() const noexcept {
  return static_cast<int>(c_.size()) - 1;
}

double Polynomial::operator()(double s) const noexcept {
  double acc = 0.0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * s + *it;
  return acc;
}

Polynomial Polynomial::derivative() const {
  if (c_.size() <= 1) return {};
  std::vector<double> d(c_.size() - 1);
  for (std::size_t k = 1; k < c_.size(); ++k) {
    d[k - 1] = static_cast<double>(k) * c_[k];
  }
  return Polynomial(std::move(d));
}

Polynomial Polynomial::deflate_at_zero() const {
  if (c_.size() <= 1) return {};
  return Polynomial(std::vector<double>(c_.begin() + 1, c_.end()));
}

double Polynomial::root_bound() const {
  if (degree() < 1) return 0.0;
  const double lead = std::abs(c_.back());
  double m = 0.0;
  for (std::size_t k = 0; k + 1 < c_.size(); ++k) {
    m = std::max(m, std::abs(c_[k]) / lead);
  }
  return 1.0 + m;
}

Polynomial operator+(const Polynomial& a, const Polynomial& b) {
  std::vector<double> c(std::max(a.c_.size(), b.c_.size()), 0.0);
  for (std::size_t i = 0; i < a.c_.size(); ++i) c[i] += a.c_[i];
  for (std::size_t i = 0; i < b.c_.size(); ++i) c[i] += b.c_[i];
  return Polynomial(std::move(c));
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  if (a.c_.empty() || b.c_.empty()) return {};
  std::vector<double> c(a.c_.size() + b.c_.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.c_.size(); ++i) {
    for (std::size_t j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
  }
  return Polynomial(std::move(c));
}

Polynomial operator*(double k, const Polynomial& a) {
  std::vector<double> c = a.c_;
  for (double& v : c) v *= k;
  return Polynomial(std::move(c));
}

namespace {

// Newton inside a sign-changing bracket, falling back to bisection whenever
// the step leaves the bracket; stops when the bracket is two adjacent doubles
// or a Newton step no longer moves the iterate.
double bracketed_newton(const Polynomial& p, const Polynomial& dp, double lo,
                        double hi) {
  double flo = p(lo);
  if (flo == 0.0) return lo;
  const double fhi = p(hi);
  if (fhi == 0.0) return hi;
  double x = 0.5 * (lo + hi);
  for (int i = 0; i < 2000; ++i) {
    const double fx = p(x);
    if (fx == 0.0) return x;
    if ((fx < 0.0) == (flo < 0.0)) {
      lo = x;
      flo = fx;
    } else {
      hi = x;
    }
    const double mid = 0.5 * (lo + hi);
    if (!(mid > lo && mid < hi)) break;
    const double d = dp(x);
    const double next = d != 0.0 ? x - fx / d : mid;
    if (next == x) return x;
    x = next > lo && next < hi ? next : mid;
  }
  return std::abs(p(lo)) <= std::abs(p(hi)) ? lo : hi;
}

}  // namespace

std::vector<double> real_roots(const Polynomial& p, double lo, double hi) {
  std::vector<double> roots;
  if (!(lo <= hi)) return roots;
  const int deg = p.degree();
  if (deg < 1) return roots;  // constant (or zero) polynomial: nothing isolated
  if (deg == 1) {
    const auto& c = p.coefficients();
    const double r = -c[0] / c[1];
    if (r >= lo && r <= hi) roots.push_back(r);
    return roots;
  }

  const Polynomial dp = p.derivative();
  std::vector<double> knots{lo};
  for (double r : real_roots(dp, lo, hi)) {
    if (r > knots.back() && r < hi) knots.push_back(r);
  }
  knots.push_back(hi);

  auto push = [&roots](double r) {
    if (roots.empty() || r > roots.back()) roots.push_back(r);
  };
  for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
    const double a = knots[k];
    const double b = knots[k + 1];
    const double fa = p(a);
    const double fb = p(b);
    if (fa == 0.0) {
      push(a);
    } else if (fb != 0.0 && (fa < 0.0) != (fb < 0.0)) {
      push(bracketed_newton(p, dp, a, b));
    }
    if (k + 2 == knots.size() && fb == 0.0) push(b);
  }
  return roots;
}

std::optional<double> smallest_root_above(const Polynomial& p, double above) {
  const double bound = p.root_bound();
  if (!(bound > above)) return std::nullopt;
  for (double r : real_roots(p, above, bound)) {
    if (r > above) return r;
  }
  return std::nullopt;
}

}  // namespace weaklim
