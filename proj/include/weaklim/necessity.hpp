// Necessary conditions: the gamma bound on V.U, the quartic ellipsoid of
// admissible directions, Hankel moment matrices and explicit moment
// certificates for the relaxed (matrix) moment problem.
#pragma once

#include "weaklim/types.hpp"

#include <string>
#include <vector>

namespace weaklim {

/// V.U - gamma(t) |U|^4. The triplet passes the necessary test iff >= 0.
double necessary_margin(const Triplet& tr, const MaterialPair& m);

/// U.V - quartic_energy(t, U, x): nonnegative iff x lies in the quartic
/// ellipsoid of feasible lamination directions.
double direction_region_margin(const Triplet& tr, const Vec& x,
                               const MaterialPair& m);

/// Same closed form as direction_region_margin, reached by eliminating the
/// scalar c from the two strict witness inequalities.
double eliminate_c_margin(const Triplet& tr, const Vec& a,
                          const MaterialPair& m);

/// (1, u, |u|^2).
Vec moment_vector(const Vec& u);

struct WeightedPoint {
  double weight;
  Vec u;
};

struct HankelMoments {
  Vec a;  // sum w Phi(u)
  Mat A;  // sum w Phi(u) Phi(u)^T
};

/// Throws InvalidInput when the weights do not sum to 1 within 1e-12, are
/// negative, or the points have mixed dimensions.
HankelMoments hankel_matrix(const std::vector<WeightedPoint>& mu);

/// Smallest eigenvalue of A - a a^T.
double hankel_defect_mineig(const HankelMoments& h);

/// Per-phase blocks of the relaxed moment problem plus the explicit witness
/// used to build them.
struct PhaseBlock {
  Mat Q11;     // N x N
  Vec Q12;     // N
  double Q22;  // scalar
  Vec U;       // first moment
  double s;    // second moment of |u| (|U|^2 <= s)
  Vec u;       // witness vector in the V identity
  double sigma;
  double gamma;
};

struct MomentCertificate {
  double t;
  PhaseBlock one;
  PhaseBlock zero;
  Vec a;
  Vec b;
  double c;
};

/// Slacks of the two witness inequalities,
///   (1/a1)(V.U - (1-t)c) - |U - (1-t)a|^4  and  (1/a0)(V.U + tc) - |U + ta|^4.
struct WitnessSlacks {
  double one;
  double zero;
};
WitnessSlacks witness_slacks(const Triplet& tr, const MaterialPair& m,
                             const Vec& a, double c);

/// c equalising a1*slack1 and a0*slack0; both then equal
/// U.V - quartic_energy(t, U, a).
double balanced_c(const Triplet& tr, const MaterialPair& m, const Vec& a);

/// Explicit construction of matrices, vectors and scalars satisfying the
/// relaxed moment problem for a witness (a, c). Throws InfeasibleWitness when
/// a slack is negative beyond `tol.equality` (relative), or when a slack
/// vanishes while the corresponding witness vector does not.
MomentCertificate build_certificate(const Triplet& tr, const MaterialPair& m,
                                    const Vec& a, double c,
                                    const Tolerances& tol = {});

/// Defaults: a = quartic_minimizer, c = balanced_c.
MomentCertificate build_certificate(const Triplet& tr, const MaterialPair& m,
                                    const Tolerances& tol = {});

/// Recomputes Q11, Q12 and Q22 of both phases from the witness fields
/// (U, s, u, sigma, gamma). Used after editing a witness by hand.
void reassemble(MomentCertificate& cert);

struct ConstraintResidual {
  std::string name;
  double residual;
  bool ok;
};

struct CertificateReport {
  std::vector<ConstraintResidual> equalities;
  double psd_one_mineig = 0.0;
  double psd_zero_mineig = 0.0;
  bool psd_one_ok = false;
  bool psd_zero_ok = false;
  bool second_moment_ok = false;  // s_i >= |U_i|^2
  bool pass = false;
};

/// Checks every equality (relative 1e-10 by default) and both block PSD
/// conditions (smallest eigenvalue >= -1e-9). Never throws on failure.
CertificateReport verify_certificate(const MomentCertificate& cert,
                                     const Triplet& tr, const MaterialPair& m,
                                     const Tolerances& tol = {});

}  // namespace weaklim
