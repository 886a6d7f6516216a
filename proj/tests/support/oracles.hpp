// Independent reference computations for the tests. Nothing here calls the
// library's formulas; each quantity is recomputed from its definition.
#pragma once

#include "weaklim/types.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <random>
#include <vector>

namespace oracle {

using weaklim::Mat;
using weaklim::Vec;

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline Vec random_vec(Rng& rng, Eigen::Index n, double lo = -1.0, double hi = 1.0) {
  Vec v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = uniform(rng, lo, hi);
  return v;
}

inline Vec random_nonzero(Rng& rng, Eigen::Index n, double min_norm = 0.2,
                          double max_norm = 2.0) {
  Vec v;
  do {
    v = random_vec(rng, n);
  } while (v.norm() < 1e-3);
  return v.normalized() * uniform(rng, min_norm, max_norm);
}

/// alpha0 in [0.5, 2], alpha1/alpha0 in [1.2, 12].
inline weaklim::MaterialPair random_materials(Rng& rng) {
  const double a0 = uniform(rng, 0.5, 2.0);
  return {a0 * uniform(rng, 1.2, 12.0), a0};
}

inline Vec flux(double alpha, const Vec& u) { return alpha * u.squaredNorm() * u; }

/// Psi written out term by term from its definition.
inline double psi(double t, const Vec& U, const Vec& x, double a1, double a0) {
  const Vec A = t * x + U;
  const Vec B = (1.0 - t) * x - U;
  return a0 * A.squaredNorm() * A.dot(x) + a1 * B.squaredNorm() * B.dot(x);
}

/// Mean flux of the two-atom laminate with gradients U - (1-t)x, U + tx.
inline Vec phi(double t, const Vec& U, const Vec& x, double a1, double a0) {
  return t * flux(a1, U - (1.0 - t) * x) + (1.0 - t) * flux(a0, U + t * x);
}

inline double energy(double t, const Vec& U, const Vec& x, double a1, double a0) {
  const double n1 = (U - (1.0 - t) * x).squaredNorm();
  const double n0 = (U + t * x).squaredNorm();
  return t * a1 * n1 * n1 + (1.0 - t) * a0 * n0 * n0;
}

/// Plain bisection; f(lo) and f(hi) must differ in sign.
inline double bisect(const std::function<double(double)>& f, double lo, double hi,
                     int iterations = 200) {
  double flo = f(lo);
  for (int i = 0; i < iterations; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// First sign change of f on (0, smax] found by a uniform march, then bisected.
inline std::optional<double> first_crossing(const std::function<double(double)>& f,
                                            double smax, int steps = 4000) {
  const double h = smax / steps;
  double prev_s = h * 1e-3;
  double prev = f(prev_s);
  for (int k = 1; k <= steps; ++k) {
    const double s = k * h;
    const double v = f(s);
    if ((v < 0.0) != (prev < 0.0)) return bisect(f, prev_s, s);
    prev_s = s;
    prev = v;
  }
  return std::nullopt;
}

/// Nelder-Mead simplex minimiser.
inline Vec nelder_mead(const std::function<double(const Vec&)>& f, Vec x0,
                       double step, int iterations = 20000, double ftol = 1e-15) {
  const Eigen::Index n = x0.size();
  std::vector<Vec> s(n + 1, x0);
  for (Eigen::Index i = 0; i < n; ++i) s[i + 1](i) += step;
  std::vector<double> fs(n + 1);
  for (Eigen::Index i = 0; i <= n; ++i) fs[i] = f(s[i]);
  for (int it = 0; it < iterations; ++it) {
    std::vector<int> idx(n + 1);
    for (int i = 0; i <= n; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return fs[a] < fs[b]; });
    std::vector<Vec> s2;
    std::vector<double> f2;
    for (int i : idx) {
      s2.push_back(s[i]);
      f2.push_back(fs[i]);
    }
    s = s2;
    fs = f2;
    if (std::abs(fs[n] - fs[0]) <= ftol * (1.0 + std::abs(fs[0])) &&
        (s[n] - s[0]).norm() <= 1e-12)
      break;
    Vec centroid = Vec::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i) centroid += s[i];
    centroid /= static_cast<double>(n);
    const Vec xr = centroid + (centroid - s[n]);
    const double fr = f(xr);
    if (fr < fs[0]) {
      const Vec xe = centroid + 2.0 * (centroid - s[n]);
      const double fe = f(xe);
      if (fe < fr) {
        s[n] = xe;
        fs[n] = fe;
      } else {
        s[n] = xr;
        fs[n] = fr;
      }
    } else if (fr < fs[n - 1]) {
      s[n] = xr;
      fs[n] = fr;
    } else {
      const Vec xc = centroid + 0.5 * (s[n] - centroid);
      const double fc = f(xc);
      if (fc < fs[n]) {
        s[n] = xc;
        fs[n] = fc;
      } else {
        for (Eigen::Index i = 1; i <= n; ++i) {
          s[i] = s[0] + 0.5 * (s[i] - s[0]);
          fs[i] = f(s[i]);
        }
      }
    }
  }
  return s[0];
}

/// Central-difference gradient.
inline Vec fd_gradient(const std::function<double(const Vec&)>& f, const Vec& x,
                       double h) {
  Vec g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Vec p = x, m = x;
    p(i) += h;
    m(i) -= h;
    g(i) = (f(p) - f(m)) / (2.0 * h);
  }
  return g;
}

/// Central-difference Jacobian of a vector map.
inline Mat fd_jacobian(const std::function<Vec(const Vec&)>& F, const Vec& x,
                       double h) {
  const Vec f0 = F(x);
  Mat J(f0.size(), x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Vec p = x, m = x;
    p(i) += h;
    m(i) -= h;
    J.col(i) = (F(p) - F(m)) / (2.0 * h);
  }
  return J;
}

/// Second central differences of a scalar function.
inline Mat fd_hessian(const std::function<double(const Vec&)>& f, const Vec& x,
                      double h) {
  const Eigen::Index n = x.size();
  Mat H(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = 0; k < n; ++k) {
      Vec pp = x, pm = x, mp = x, mm = x;
      pp(i) += h;
      pp(k) += h;
      pm(i) += h;
      pm(k) -= h;
      mp(i) -= h;
      mp(k) += h;
      mm(i) -= h;
      mm(k) -= h;
      H(i, k) = (f(pp) - f(pm) - f(mp) + f(mm)) / (4.0 * h * h);
    }
  }
  return H;
}

/// Point strictly inside C = {psi <= 0}: a fraction of the way from a point
/// with psi < 0 to the first crossing along a random ray. Returns the pair
/// (x, boundary point on the same ray).
struct InteriorSample {
  Vec x;
  Vec boundary;
  Vec origin;
};

inline InteriorSample interior_point(Rng& rng, double t, const Vec& U, double a1,
                                     double a0, double lo = 0.05, double hi = 0.95) {
  // Descend psi from the origin along -grad to find a point with psi < 0.
  auto f = [&](const Vec& x) { return psi(t, U, x, a1, a0); };
  const Vec g = fd_gradient(f, Vec::Zero(U.size()), 1e-6);
  double s = 1.0;
  Vec origin = Vec::Zero(U.size());
  for (int k = 0; k < 80; ++k) {
    const Vec trial = -s * g / g.norm() * U.norm();
    if (f(trial) < 0.0) {
      origin = trial;
      break;
    }
    s *= 0.5;
  }
  Vec d = random_vec(rng, U.size());
  d.normalize();
  const double smax = 20.0 * (U.norm() + origin.norm()) + 1.0;
  auto along = [&](double r) { return f(origin + r * d); };
  const auto root = first_crossing(along, smax);
  const Vec b = origin + root.value_or(0.0) * d;
  return {origin + uniform(rng, lo, hi) * (b - origin), b, origin};
}

}  // namespace oracle
