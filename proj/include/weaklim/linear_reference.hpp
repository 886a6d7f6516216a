// Exact treatment of the linear isotropic two-phase case (v = alpha*u).
//
// A lamination direction x is feasible iff
//     ((1-t) a1 + t a0) / (a1 - a0) |x|^2 <= U.x,
// a ball through the origin. Boundary directions give first-order laminates;
// interior ones are split through the origin into a second-order laminate.
#pragma once

#include "weaklim/laminate.hpp"
#include "weaklim/types.hpp"

namespace weaklim {

/// t a1 (U - (1-t)x) + (1-t) a0 (U + t x).
Vec linear_V(double t, const Vec& U, const Vec& x, const MaterialPair& m);

/// U.x - ((1-t) a1 + t a0)/(a1 - a0) |x|^2. Nonnegative iff x is feasible.
double linear_condition_margin(double t, const Vec& U, const Vec& x,
                               const MaterialPair& m);

/// U.V - a1 a0 / ((1-t) a1 + t a0) |U|^2 (harmonic-mean bound).
double linear_necessary_margin(double t, const Vec& U, const Vec& V,
                               const MaterialPair& m);

/// (a1 - a0) / ((1-t) a1 + t a0) U, the minimiser of the quadratic energy;
/// it lies on the boundary of the feasible ball.
Vec linear_minimizer(double t, const Vec& U, const MaterialPair& m);

/// Margins within `boundary_tol` (relative to |U||x|) of zero are treated as
/// boundary and produce the first-order laminate.
Laminate linear_build_laminate(double t, const Vec& U, const Vec& x,
                               const MaterialPair& m,
                               double boundary_tol = 1e-12);

}  // namespace weaklim
