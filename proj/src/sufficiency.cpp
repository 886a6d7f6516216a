#include "weaklim/sufficiency.hpp"

#include "weaklim/boundary_image.hpp"
#include "weaklim/core.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace weaklim {

namespace {

// M(y) = |y|^2 I + 2 y y^T, the derivative of y -> |y|^2 y.
Mat cubic_derivative(const Vec& y) {
  const Eigen::Index n = y.size();
  return y.squaredNorm() * Mat::Identity(n, n) + 2.0 * y * y.transpose();
}

// Affine vector function p + s*q of a scalar s.
using Quadratic = std::array<double, 3>;

// (a + s b).(c + s d) as ascending coefficients.
Quadratic affine_dot(const Vec& a, const Vec& b, const Vec& c, const Vec& d) {
  return {a.dot(c), a.dot(d) + b.dot(c), b.dot(d)};
}

void add_product(std::array<double, 5>& acc, double k, const Quadratic& f,
                 const Quadratic& g) {
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) acc[i + j] += k * f[i] * g[j];
  }
}

void require_open_fraction(double t, const char* what) {
  if (!(t > 0.0 && t < 1.0)) {
    std::ostringstream os;
    os << what << " requires t in (0,1), got " << t;
    throw InvalidInput(os.str());
  }
}

std::vector<Vec> spread_directions(Eigen::Index n) {
  std::vector<Vec> dirs;
  if (n == 2) {
    for (int k = 0; k < 8; ++k) {
      const double a = k * std::numbers::pi / 4.0;
      Vec d(2);
      d << std::cos(a), std::sin(a);
      dirs.push_back(d);
    }
    return dirs;
  }
  if (n == 3) {
    for (int k = 0; k < 8; ++k) {
      Vec d(3);
      d << ((k & 1) ? 1.0 : -1.0), ((k & 2) ? 1.0 : -1.0), ((k & 4) ? 1.0 : -1.0);
      dirs.push_back(d / std::sqrt(3.0));
    }
    return dirs;
  }
  for (int k = 0; k < 8; ++k) {
    Vec d = Vec::Zero(n);
    d(static_cast<Eigen::Index>(k / 2) % n) = (k % 2 == 0) ? 1.0 : -1.0;
    dirs.push_back(d);
  }
  return dirs;
}

// Psi(center + s*d) for the first crossing s > 0; center must satisfy Psi < 0.
std::optional<Vec> ray_to_boundary(double t, const Vec& U, const Vec& center,
                                   const Vec& d, const MaterialPair& m) {
  const Polynomial p = psi_along_ray(t, U, center, d, m);
  const auto s = smallest_root_above(p, 0.0);
  if (!s) return std::nullopt;
  return Vec(center + *s * d);
}

}  // namespace

double psi(double t, const Vec& U, const Vec& x, const MaterialPair& m) {
  require_same_dim(U, x, "psi");
  const Vec A = t * x + U;
  const Vec B = (1.0 - t) * x - U;
  return (m.alpha0() * A.squaredNorm() * A + m.alpha1() * B.squaredNorm() * B)
      .dot(x);
}

Vec psi_gradient(double t, const Vec& U, const Vec& x, const MaterialPair& m) {
  require_same_dim(U, x, "psi_gradient");
  const Vec A = t * x + U;
  const Vec B = (1.0 - t) * x - U;
  const Vec G = m.alpha0() * A.squaredNorm() * A + m.alpha1() * B.squaredNorm() * B;
  const Mat DG = m.alpha0() * t * cubic_derivative(A) +
                 m.alpha1() * (1.0 - t) * cubic_derivative(B);
  return G + DG * x;
}

Mat psi_hessian(double t, const Vec& U, const Vec& x, const MaterialPair& m) {
  require_same_dim(U, x, "psi_hessian");
  const Eigen::Index n = x.size();
  const Mat I = Mat::Identity(n, n);
  const Vec A = t * x + U;
  const Vec B = (1.0 - t) * x - U;
  const Mat DG = m.alpha0() * t * cubic_derivative(A) +
                 m.alpha1() * (1.0 - t) * cubic_derivative(B);
  auto third = [&](const Vec& y) -> Mat {
    return y.dot(x) * I + x * y.transpose() + y * x.transpose();
  };
  return 2.0 * DG + 2.0 * m.alpha0() * t * t * third(A) +
         2.0 * m.alpha1() * (1.0 - t) * (1.0 - t) * third(B);
}

double psi_hessian_mineig(double t, const Vec& U, const Vec& x,
                          const MaterialPair& m) {
  require_open_fraction(t, "psi_hessian_mineig");
  Eigen::SelfAdjointEigenSolver<Mat> es(psi_hessian(t, U, x, m),
                                        Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

Vec phi_map(double t, const Vec& U, const Vec& x, const MaterialPair& m) {
  require_same_dim(U, x, "phi_map");
  const Vec u1 = phase_one_mean(t, U, x);
  const Vec u0 = phase_zero_mean(t, U, x);
  return t * m.alpha1() * u1.squaredNorm() * u1 +
         (1.0 - t) * m.alpha0() * u0.squaredNorm() * u0;
}

Mat phi_jacobian(double t, const Vec& U, const Vec& x, const MaterialPair& m) {
  require_same_dim(U, x, "phi_jacobian");
  return t * (1.0 - t) *
         (m.alpha0() * cubic_derivative(phase_zero_mean(t, U, x)) -
          m.alpha1() * cubic_derivative(phase_one_mean(t, U, x)));
}

Polynomial psi_along_ray(double t, const Vec& U, const Vec& origin,
                         const Vec& direction, const MaterialPair& m) {
  require_same_dim(U, origin, "psi_along_ray");
  require_same_dim(U, direction, "psi_along_ray");
  const Vec a0 = U + t * origin, a1 = t * direction;
  const Vec b0 = (1.0 - t) * origin - U, b1 = (1.0 - t) * direction;
  std::array<double, 5> c{};
  add_product(c, m.alpha0(), affine_dot(a0, a1, a0, a1),
              affine_dot(a0, a1, origin, direction));
  add_product(c, m.alpha1(), affine_dot(b0, b1, b0, b1),
              affine_dot(b0, b1, origin, direction));
  return Polynomial(std::vector<double>(c.begin(), c.end()));
}

double first_order_root(double t, const Vec& U, const Vec& direction,
                        const MaterialPair& m) {
  require_open_fraction(t, "first_order_root");
  require_same_dim(U, direction, "first_order_root");
  const double norm = direction.norm();
  if (!(norm > 0.0)) throw InvalidInput("lamination direction must be nonzero");
  const Vec d = direction / norm;
  // Psi(s d) = s * g(s) with g cubic.
  const Polynomial g =
      psi_along_ray(t, U, Vec::Zero(U.size()), d, m).deflate_at_zero();
  const double floor = 1e-12 * std::max(1.0, U.norm());
  for (double r : real_roots(g, 0.0, g.root_bound())) {
    if (r > floor) return r;
  }
  throw NoPositiveRoot("the ray never returns to the first-order level set");
}

BoundarySplit boundary_decompose(double t, const Vec& U, const Vec& x,
                                 const MaterialPair& m, const Tolerances& tol) {
  require_fraction(t);
  const double value = psi(t, U, x, m);
  if (value > tol.psi) {
    std::ostringstream os;
    os << "direction lies outside C (Psi = " << value << ")";
    throw OutsideC(os.str(), value);
  }
  const Vec zero = Vec::Zero(x.size());
  if (x.squaredNorm() == 0.0) return {1.0, zero, zero};
  if (value >= -tol.root) return {1.0, x, zero};
  const Polynomial g = psi_along_ray(t, U, zero, x, m).deflate_at_zero();
  const auto s = smallest_root_above(g, 1.0);
  if (!s) throw NoPositiveRoot("no exit of the ray through x from C");
  return {1.0 / *s, *s * x, zero};
}

Vec interior_center(double t, const Vec& U, const MaterialPair& m) {
  const Eigen::Index n = U.size();
  Vec x = Vec::Zero(n);
  const double scale = U.norm();
  if (scale == 0.0) return x;
  const double grad_tol = 1e-14 * std::pow(scale, 3) * (m.alpha1() + m.alpha0());
  for (int it = 0; it < 200; ++it) {
    const Vec g = psi_gradient(t, U, x, m);
    if (g.norm() <= grad_tol) break;
    Mat H = psi_hessian(t, U, x, m);
    Eigen::SelfAdjointEigenSolver<Mat> es(H, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    const double floor = 1e-8 * scale * scale * (m.alpha1() + m.alpha0());
    if (lo < floor) H += (floor - lo) * Mat::Identity(n, n);
    const Vec step = -H.ldlt().solve(g);
    const double f0 = psi(t, U, x, m);
    const double slope = g.dot(step);
    double lambda = 1.0;
    for (int k = 0; k < 60; ++k) {
      if (psi(t, U, x + lambda * step, m) <= f0 + 1e-4 * lambda * slope) break;
      lambda *= 0.5;
    }
    x += lambda * step;
    if ((lambda * step).norm() <= 1e-15 * (1.0 + x.norm())) break;
  }
  return x;
}

BoundarySplit flux_chord_decompose(double t, const Vec& U, const Vec& V,
                                   const MaterialPair& m, const Tolerances& tol,
                                   const BoundaryImage* image) {
  require_open_fraction(t, "flux_chord_decompose");
  require_same_dim(U, V, "flux_chord_decompose");
  const Vec zero = Vec::Zero(U.size());
  const Vec from = phi_map(t, U, zero, m);
  if ((V - from).norm() <= 1e-14 * std::max(1.0, from.norm())) {
    return {1.0, zero, zero};
  }
  std::optional<BoundaryImage> local;
  if (image == nullptr) {
    local.emplace(t, U, m, tol);
    image = &*local;
  }
  const auto exit = image->ray_exit(from, V);
  if (!exit) {
    throw OutsideC("no boundary image point on the ray through V", 0.0);
  }
  const double lambda = exit->second;
  if (lambda < 1.0 - 1e-9) {
    std::ostringstream os;
    os << "flux lies outside Phi(C) (ray exit at lambda = " << lambda << ")";
    throw OutsideC(os.str(), 0.0);
  }
  return {std::min(1.0, 1.0 / lambda), exit->first, zero};
}

Laminate build_laminate_for_flux(double t, const Vec& U, const Vec& V,
                                 const MaterialPair& m, const Tolerances& tol,
                                 const BoundaryImage* image) {
  require_fraction(t);
  require_same_dim(U, V, "build_laminate_for_flux");
  if (t == 0.0 || t == 1.0) {
    const Phase p = t == 1.0 ? Phase::one : Phase::zero;
    return dirac_laminate(p, U, m);
  }
  const BoundarySplit split = flux_chord_decompose(t, U, V, m, tol, image);
  return second_order_laminate(t, U, split.r, split.x1, split.x0, m);
}

Laminate build_second_order_laminate(double t, const Vec& U, const Vec& x,
                                     const MaterialPair& m,
                                     const Tolerances& tol,
                                     const BoundaryImage* image) {
  require_fraction(t);
  if (t == 0.0 || t == 1.0) {
    return dirac_laminate(t == 1.0 ? Phase::one : Phase::zero, U, m);
  }
  const double value = psi(t, U, x, m);
  if (value > tol.psi) {
    std::ostringstream os;
    os << "direction lies outside C (Psi = " << value << ")";
    throw OutsideC(os.str(), value);
  }
  if (std::abs(value) <= tol.jump) return first_order_laminate(t, U, x, m);
  return build_laminate_for_flux(t, U, phi_map(t, U, x, m), m, tol, image);
}

NewtonOutcome solve_flux(double t, const Vec& U, const Vec& V,
                         const MaterialPair& m, const Vec& start,
                         const Tolerances& tol) {
  NewtonOutcome out;
  out.x = start;
  Vec F = phi_map(t, U, out.x, m) - V;
  double f2 = F.squaredNorm();
  const double stop = 1e-14 * std::max(1.0, V.norm());
  const int max_iter = static_cast<int>(tol.newton_iterations);
  const int halvings = static_cast<int>(tol.line_search_halvings);
  for (out.iterations = 0; out.iterations < max_iter; ++out.iterations) {
    if (std::sqrt(f2) <= stop) break;
    const Mat J = phi_jacobian(t, U, out.x, m);
    const Vec step = J.completeOrthogonalDecomposition().solve(-F);
    if (!step.allFinite()) break;
    double lambda = 1.0;
    bool accepted = false;
    for (int k = 0; k <= halvings; ++k) {
      const Vec trial = out.x + lambda * step;
      const Vec Ft = phi_map(t, U, trial, m) - V;
      const double ft2 = Ft.squaredNorm();
      if (ft2 < (1.0 - 1e-4 * lambda) * f2) {
        out.x = trial;
        F = Ft;
        f2 = ft2;
        accepted = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!accepted) break;
  }
  out.residual = std::sqrt(f2);
  out.psi_value = psi(t, U, out.x, m);
  out.converged = out.residual <= tol.membership;
  return out;
}

std::optional<NewtonOutcome> find_preimage(double t, const Vec& U,
                                           const Vec& V, const MaterialPair& m,
                                           const Tolerances& tol,
                                           const BoundaryImage* image,
                                           std::uint64_t seed) {
  const Eigen::Index n = U.size();
  std::vector<Vec> starts;
  const Vec center = image != nullptr ? image->center() : interior_center(t, U, m);
  starts.push_back(center);
  starts.push_back(Vec::Zero(n));
  starts.push_back(quartic_minimizer(t, U, m));
  for (const Vec& d : spread_directions(n)) {
    if (auto b = ray_to_boundary(t, U, center, d, m)) starts.push_back(*b);
  }
  if (image != nullptr && !image->images().empty()) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < image->images().size(); ++k) {
      const double d = (image->images()[k] - V).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = k;
      }
    }
    const Vec& b = image->samples()[best];
    starts.push_back(b);
    starts.push_back(center + 0.5 * (b - center));
  }
  if (seed != 0) {
    std::mt19937_64 rng(seed);
    std::shuffle(starts.begin(), starts.end(), rng);
  }

  auto accept = [&](const NewtonOutcome& o) {
    return o.converged && o.psi_value <= tol.psi;
  };
  for (const Vec& s : starts) {
    NewtonOutcome o = solve_flux(t, U, V, m, s, tol);
    if (accept(o)) return o;
  }

  // Continuation from the image of the center along the straight flux path.
  const Vec from = phi_map(t, U, center, m);
  Vec x = center;
  constexpr int steps = 16;
  for (int k = 1; k <= steps; ++k) {
    const Vec target = from + (static_cast<double>(k) / steps) * (V - from);
    NewtonOutcome o = solve_flux(t, U, target, m, x, tol);
    if (!o.converged) return std::nullopt;
    x = o.x;
  }
  NewtonOutcome o = solve_flux(t, U, V, m, x, tol);
  if (accept(o)) return o;
  return std::nullopt;
}

ReachabilityReport reachable(const Triplet& tr, const MaterialPair& m,
                             const Tolerances& tol, const BoundaryImage* image,
                             std::uint64_t seed) {
  ReachabilityReport rep;
  const double t = tr.t;
  const Eigen::Index n = tr.dim();

  if (t == 0.0 || t == 1.0) {
    const Phase p = t == 1.0 ? Phase::one : Phase::zero;
    const double res = (lambda_map(p, tr.U, m) - tr.V).norm();
    rep.method = "pure-phase";
    rep.certified = true;
    rep.reachable = res <= tol.membership;
    rep.flux_residual = res;
    if (rep.reachable) rep.x_solution = Vec::Zero(n);
    return rep;
  }
  if (tr.U.squaredNorm() == 0.0) {
    // C = {0} and Phi(0) = 0.
    const double res = tr.V.norm();
    rep.method = "closed-form";
    rep.certified = true;
    rep.reachable = res <= tol.membership;
    rep.flux_residual = res;
    rep.psi_value = 0.0;
    if (rep.reachable) {
      rep.x_solution = Vec::Zero(n);
      rep.r = 1.0;
      rep.x1 = Vec::Zero(n);
      rep.x0 = Vec::Zero(n);
    }
    return rep;
  }

  std::optional<BoundaryImage> local;
  if (image == nullptr && (n == 2 || n == 3)) {
    local.emplace(t, tr.U, m, tol);
    image = &*local;
  }

  const auto pre = find_preimage(t, tr.U, tr.V, m, tol, image, seed);
  std::optional<BoundaryImage::Membership> mem;
  if (image != nullptr) mem = image->classify(tr.V);

  if (pre) {
    rep.newton_found = true;
    rep.reachable = true;
    rep.certified = true;
    rep.method = "newton";
    rep.x_solution = pre->x;
    rep.flux_residual = pre->residual;
    rep.psi_value = pre->psi_value;
  } else if (mem) {
    rep.reachable = mem->inside;
    rep.certified = mem->certified;
    rep.method = n == 2 ? "polygon" : "mesh";
  } else {
    rep.reachable = false;
    rep.certified = false;
    rep.method = "newton";
  }
  if (mem) {
    rep.oracle_inside = mem->inside;
    rep.boundary_distance = mem->distance;
    rep.anomaly = mem->certified && mem->inside != rep.newton_found;
  }

  if (rep.reachable && image != nullptr) {
    try {
      const BoundarySplit split =
          flux_chord_decompose(t, tr.U, tr.V, m, tol, image);
      rep.r = split.r;
      rep.x1 = split.x1;
      rep.x0 = split.x0;
    } catch (const OutsideC&) {
      rep.anomaly = true;
    }
  }
  return rep;
}

}  // namespace weaklim
