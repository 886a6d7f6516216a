// Closed-form scalar and vector formulas shared by the necessity and
// sufficiency sides.
#pragma once

#include "weaklim/types.hpp"

namespace weaklim {

/// alpha_phase * |u|^2 * u, the p=4 constitutive map onto the phase manifold.
Vec lambda_map(Phase phase, const Vec& u, const MaterialPair& m);

/// gamma(t) = a1*a0 / ((1-t) a1^{1/3} + t a0^{1/3})^3. Exact endpoint values
/// gamma(0) = alpha0 and gamma(1) = alpha1.
double gamma(double t, const MaterialPair& m);

/// Phase-1 and phase-0 mean gradients U - (1-t)x and U + t x for a
/// lamination direction x.
Vec phase_one_mean(double t, const Vec& U, const Vec& x);
Vec phase_zero_mean(double t, const Vec& U, const Vec& x);

/// W(x) = t a1 |U-(1-t)x|^4 + (1-t) a0 |U+tx|^4.
double quartic_energy(double t, const Vec& U, const Vec& x,
                      const MaterialPair& m);

/// Global minimiser of quartic_energy; a multiple of U:
///   (a1^{1/3} - a0^{1/3}) / ((1-t) a1^{1/3} + t a0^{1/3}) * U.
Vec quartic_minimizer(double t, const Vec& U, const MaterialPair& m);

}  // namespace weaklim
