// Lamination reachability for p=4 mixtures.
//
// For fixed (t, U) a direction x gives a first-order laminate iff
//   Psi(x) = (a0 |tx+U|^2 (tx+U) + a1 |(1-t)x-U|^2 ((1-t)x-U)) . x = 0,
// with mean flux
//   Phi(x) = t a1 |U-(1-t)x|^2 (U-(1-t)x) + (1-t) a0 |U+tx|^2 (U+tx).
// A triplet (t, U, V) is reachable iff V lies in Phi(C), C = {Psi <= 0}; a
// second-order laminate then always realises it.
#pragma once

#include "weaklim/laminate.hpp"
#include "weaklim/polynomial.hpp"
#include "weaklim/types.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace weaklim {

class BoundaryImage;

double psi(double t, const Vec& U, const Vec& x, const MaterialPair& m);
Vec psi_gradient(double t, const Vec& U, const Vec& x, const MaterialPair& m);
Mat psi_hessian(double t, const Vec& U, const Vec& x, const MaterialPair& m);

/// Smallest eigenvalue of the analytic Hessian of Psi. Requires t in (0,1).
double psi_hessian_mineig(double t, const Vec& U, const Vec& x,
                          const MaterialPair& m);

Vec phi_map(double t, const Vec& U, const Vec& x, const MaterialPair& m);

/// Symmetric: t(1-t) [a0 M(U+tx) - a1 M(U-(1-t)x)], M(y) = |y|^2 I + 2 y y^T.
Mat phi_jacobian(double t, const Vec& U, const Vec& x, const MaterialPair& m);

/// Psi(origin + s*direction) as an exact quartic in s.
Polynomial psi_along_ray(double t, const Vec& U, const Vec& origin,
                         const Vec& direction, const MaterialPair& m);

/// Smallest s > 0 with Psi(s*direction) = 0, i.e. the first-order jump
/// condition along the ray. Throws NoPositiveRoot when the ray never returns
/// to the zero level set (e.g. U = 0).
double first_order_root(double t, const Vec& U, const Vec& direction,
                        const MaterialPair& m);

/// x = r*x1 + (1-r)*x0 with Psi(x1) = Psi(x0) = 0.
struct BoundarySplit {
  double r = 1.0;
  Vec x1;
  Vec x0;
};

/// Through-origin split: x0 = 0, x1 = s*x where s > 1 is the ray exit,
/// r = 1/s. Throws OutsideC if Psi(x) > tol.psi.
BoundarySplit boundary_decompose(double t, const Vec& U, const Vec& x,
                                 const MaterialPair& m,
                                 const Tolerances& tol = {});

/// Local minimiser of Psi reached by damped Newton from the origin; strictly
/// inside C whenever U != 0 and t in (0,1).
Vec interior_center(double t, const Vec& U, const MaterialPair& m);

/// Split of a flux V in Phi(C): x0 = 0 and x1 on the zero level set of Psi
/// with Phi(x1) on the ray from Phi(0) through V, so that
/// r*Phi(x1) + (1-r)*Phi(0) = V. Supported for N = 2 and N = 3.
BoundarySplit flux_chord_decompose(double t, const Vec& U, const Vec& V,
                                   const MaterialPair& m,
                                   const Tolerances& tol = {},
                                   const BoundaryImage* image = nullptr);

/// Second-order laminate with phase fraction t, mean gradient U and mean flux
/// V (which must lie in Phi(C)).
Laminate build_laminate_for_flux(double t, const Vec& U, const Vec& V,
                                 const MaterialPair& m,
                                 const Tolerances& tol = {},
                                 const BoundaryImage* image = nullptr);

/// Laminate realising the triplet (t, U, Phi(x)) for x in C. Boundary points
/// of C (|Psi(x)| <= tol.jump) give first-order laminates. Throws OutsideC.
Laminate build_second_order_laminate(double t, const Vec& U, const Vec& x,
                                     const MaterialPair& m,
                                     const Tolerances& tol = {},
                                     const BoundaryImage* image = nullptr);

struct NewtonOutcome {
  bool converged = false;
  Vec x;
  double residual = 0.0;
  double psi_value = 0.0;
  int iterations = 0;
};

/// Damped Newton on Phi(x) = V from one start, backtracking on |Phi(x)-V|^2.
NewtonOutcome solve_flux(double t, const Vec& U, const Vec& V,
                         const MaterialPair& m, const Vec& start,
                         const Tolerances& tol = {});

/// Multistart preimage search restricted to C: returns the first converged
/// start whose end point satisfies Psi <= tol.psi.
std::optional<NewtonOutcome> find_preimage(double t, const Vec& U,
                                           const Vec& V, const MaterialPair& m,
                                           const Tolerances& tol = {},
                                           const BoundaryImage* image = nullptr,
                                           std::uint64_t seed = 0);

struct ReachabilityReport {
  bool reachable = false;
  bool certified = false;  // decided by a preimage or a certified oracle
  std::string method;      // pure-phase | closed-form | newton | polygon | mesh
  std::optional<Vec> x_solution;
  std::optional<double> r;
  std::optional<Vec> x1;
  std::optional<Vec> x0;
  std::optional<double> flux_residual;  // |Phi(x_solution) - V|
  std::optional<double> psi_value;      // Psi(x_solution)
  bool newton_found = false;
  std::optional<bool> oracle_inside;
  std::optional<double> boundary_distance;
  bool anomaly = false;  // Newton and the geometric oracle disagree
};

ReachabilityReport reachable(const Triplet& tr, const MaterialPair& m,
                             const Tolerances& tol = {},
                             const BoundaryImage* image = nullptr,
                             std::uint64_t seed = 0);

}  // namespace weaklim
