#include "weaklim/necessity.hpp"

#include "weaklim/core.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace weaklim {

namespace {

double pow4_norm(const Vec& u) {
  const double n2 = u.squaredNorm();
  return n2 * n2;
}

double relative_gap(double lhs, double rhs) {
  return std::abs(lhs - rhs) /
         std::max({1.0, std::abs(lhs), std::abs(rhs)});
}

double relative_gap(const Vec& lhs, const Vec& rhs) {
  return (lhs - rhs).norm() / std::max({1.0, lhs.norm(), rhs.norm()});
}

double min_eigenvalue(const Mat& sym) {
  Eigen::SelfAdjointEigenSolver<Mat> es(sym, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

Mat block_defect(const PhaseBlock& b) {
  const Eigen::Index n = b.U.size();
  Mat M(n + 1, n + 1);
  M.topLeftCorner(n, n) = b.Q11;
  M.topRightCorner(n, 1) = b.Q12;
  M.bottomLeftCorner(1, n) = b.Q12.transpose();
  M(n, n) = b.Q22;
  Vec w(n + 1);
  w.head(n) = b.U;
  w(n) = b.s;
  return M - w * w.transpose();
}

// Fills s, sigma, Q22 for one phase given the upper bound B = Q22.
void choose_second_moment(PhaseBlock& b, double bound, double slack) {
  const double floor = pow4_norm(b.U);
  b.s = std::sqrt(floor + 0.5 * slack);
  b.Q22 = bound;
  b.sigma = std::max(0.0, bound - b.s * b.s);
}

void choose_gamma(PhaseBlock& b, const Tolerances& tol, const char* name) {
  const double u2 = b.u.squaredNorm();
  if (u2 == 0.0) {
    b.gamma = 1.0;
  } else if (b.sigma > 0.0) {
    b.gamma = u2 / b.sigma;
  } else if (u2 <= tol.psd) {
    b.gamma = 1.0;
  } else {
    std::ostringstream os;
    os << "witness slack of phase " << name
       << " vanishes while the flux identity needs |u|^2 = " << u2
       << " > 0; the boundary triplet is not representable";
    throw InfeasibleWitness(os.str());
  }
  const Eigen::Index n = b.U.size();
  b.Q11 = b.U * b.U.transpose() + b.gamma * Mat::Identity(n, n);
}

}  // namespace

double necessary_margin(const Triplet& tr, const MaterialPair& m) {
  return tr.V.dot(tr.U) - gamma(tr.t, m) * pow4_norm(tr.U);
}

double direction_region_margin(const Triplet& tr, const Vec& x,
                               const MaterialPair& m) {
  return tr.U.dot(tr.V) - quartic_energy(tr.t, tr.U, x, m);
}

double eliminate_c_margin(const Triplet& tr, const Vec& a,
                          const MaterialPair& m) {
  // t a1 * slack1 + (1-t) a0 * slack0 does not depend on c.
  const WitnessSlacks s = witness_slacks(tr, m, a, 0.0);
  return tr.t * m.alpha1() * s.one + (1.0 - tr.t) * m.alpha0() * s.zero;
}

Vec moment_vector(const Vec& u) {
  const Eigen::Index n = u.size();
  Vec phi(n + 2);
  phi(0) = 1.0;
  phi.segment(1, n) = u;
  phi(n + 1) = u.squaredNorm();
  return phi;
}

HankelMoments hankel_matrix(const std::vector<WeightedPoint>& mu) {
  if (mu.empty()) throw InvalidInput("measure has no atoms");
  const Eigen::Index n = mu.front().u.size();
  double total = 0.0;
  for (const auto& p : mu) {
    if (p.u.size() != n) throw InvalidInput("measure atoms differ in dimension");
    if (!(p.weight >= 0.0)) throw InvalidInput("measure weights must be >= 0");
    total += p.weight;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    std::ostringstream os;
    os << "measure weights sum to " << total << ", not 1";
    throw InvalidInput(os.str());
  }
  HankelMoments h{Vec::Zero(n + 2), Mat::Zero(n + 2, n + 2)};
  for (const auto& p : mu) {
    const Vec phi = moment_vector(p.u);
    h.a += p.weight * phi;
    h.A += p.weight * (phi * phi.transpose());
  }
  return h;
}

double hankel_defect_mineig(const HankelMoments& h) {
  return min_eigenvalue(h.A - h.a * h.a.transpose());
}

WitnessSlacks witness_slacks(const Triplet& tr, const MaterialPair& m,
                             const Vec& a, double c) {
  require_same_dim(tr.U, a, "witness");
  const double t = tr.t;
  const double vu = tr.V.dot(tr.U);
  return {(vu - (1.0 - t) * c) / m.alpha1() -
              pow4_norm(phase_one_mean(t, tr.U, a)),
          (vu + t * c) / m.alpha0() - pow4_norm(phase_zero_mean(t, tr.U, a))};
}

double balanced_c(const Triplet& tr, const MaterialPair& m, const Vec& a) {
  require_same_dim(tr.U, a, "witness");
  return m.alpha0() * pow4_norm(phase_zero_mean(tr.t, tr.U, a)) -
         m.alpha1() * pow4_norm(phase_one_mean(tr.t, tr.U, a));
}

MomentCertificate build_certificate(const Triplet& tr, const MaterialPair& m,
                                    const Vec& a, double c,
                                    const Tolerances& tol) {
  require_same_dim(tr.U, a, "build_certificate");
  const double t = tr.t;
  const double vu = tr.V.dot(tr.U);

  MomentCertificate cert;
  cert.t = t;
  cert.a = a;
  cert.c = c;
  cert.one.U = phase_one_mean(t, tr.U, a);
  cert.zero.U = phase_zero_mean(t, tr.U, a);

  const double bound1 = (vu - (1.0 - t) * c) / m.alpha1();
  const double bound0 = (vu + t * c) / m.alpha0();
  double slack1 = bound1 - pow4_norm(cert.one.U);
  double slack0 = bound0 - pow4_norm(cert.zero.U);
  const double scale1 = std::max({1.0, std::abs(bound1), pow4_norm(cert.one.U)});
  const double scale0 = std::max({1.0, std::abs(bound0), pow4_norm(cert.zero.U)});
  if (slack1 < -tol.equality * scale1 || slack0 < -tol.equality * scale0) {
    std::ostringstream os;
    os << "witness inequalities fail: (1/a1)(V.U-(1-t)c) - |U1|^4 = " << slack1
       << ", (1/a0)(V.U+tc) - |U0|^4 = " << slack0;
    throw InfeasibleWitness(os.str());
  }
  slack1 = std::max(0.0, slack1);
  slack0 = std::max(0.0, slack0);
  choose_second_moment(cert.one, bound1, slack1);
  choose_second_moment(cert.zero, bound0, slack0);

  // V = (1-t) a0 [s0 U0 + u0] + t a1 [s1 U1 + u1] with u1 = u0.
  const Vec residual = tr.V - (1.0 - t) * m.alpha0() * cert.zero.s * cert.zero.U -
                       t * m.alpha1() * cert.one.s * cert.one.U;
  const Vec split = residual / ((1.0 - t) * m.alpha0() + t * m.alpha1());
  cert.one.u = split;
  cert.zero.u = split;
  cert.one.Q12 = cert.one.s * cert.one.U + cert.one.u;
  cert.zero.Q12 = cert.zero.s * cert.zero.U + cert.zero.u;

  if (t < 1.0) {
    cert.b = (tr.V - m.alpha1() * cert.one.Q12) / (1.0 - t);
  } else {
    cert.b = (m.alpha0() * cert.zero.Q12 - tr.V) / t;
  }

  choose_gamma(cert.one, tol, "1");
  choose_gamma(cert.zero, tol, "0");
  return cert;
}

MomentCertificate build_certificate(const Triplet& tr, const MaterialPair& m,
                                    const Tolerances& tol) {
  const Vec a = quartic_minimizer(tr.t, tr.U, m);
  return build_certificate(tr, m, a, balanced_c(tr, m, a), tol);
}

void reassemble(MomentCertificate& cert) {
  for (PhaseBlock* b : {&cert.one, &cert.zero}) {
    const Eigen::Index n = b->U.size();
    b->Q11 = b->U * b->U.transpose() + b->gamma * Mat::Identity(n, n);
    b->Q12 = b->s * b->U + b->u;
    b->Q22 = b->s * b->s + b->sigma;
  }
}

CertificateReport verify_certificate(const MomentCertificate& cert,
                                     const Triplet& tr, const MaterialPair& m,
                                     const Tolerances& tol) {
  CertificateReport rep;
  const double t = tr.t;
  const double a1 = m.alpha1();
  const double a0 = m.alpha0();
  const double vu = tr.V.dot(tr.U);
  const PhaseBlock& p1 = cert.one;
  const PhaseBlock& p0 = cert.zero;

  auto add = [&](std::string name, double r) {
    rep.equalities.push_back({std::move(name), r, r <= tol.equality});
  };
  add("U = tU1 + (1-t)U0", relative_gap(tr.U, t * p1.U + (1.0 - t) * p0.U));
  add("V = t a1 Q12_1 + (1-t) a0 Q12_0",
      relative_gap(tr.V, t * a1 * p1.Q12 + (1.0 - t) * a0 * p0.Q12));
  add("U.V = t a1 Q22_1 + (1-t) a0 Q22_0",
      relative_gap(vu, t * a1 * p1.Q22 + (1.0 - t) * a0 * p0.Q22));
  add("U1 = U - (1-t)a", relative_gap(p1.U, tr.U - (1.0 - t) * cert.a));
  add("U0 = U + ta", relative_gap(p0.U, tr.U + t * cert.a));
  add("a1 Q12_1 = V - (1-t)b",
      relative_gap(a1 * p1.Q12, tr.V - (1.0 - t) * cert.b));
  add("a0 Q12_0 = V + tb", relative_gap(a0 * p0.Q12, tr.V + t * cert.b));
  add("a1 Q22_1 = V.U - (1-t)c", relative_gap(a1 * p1.Q22, vu - (1.0 - t) * cert.c));
  add("a0 Q22_0 = V.U + tc", relative_gap(a0 * p0.Q22, vu + t * cert.c));
  add("Q11_1 symmetric", (p1.Q11 - p1.Q11.transpose()).norm() /
                             std::max(1.0, p1.Q11.norm()));
  add("Q11_0 symmetric", (p0.Q11 - p0.Q11.transpose()).norm() /
                             std::max(1.0, p0.Q11.norm()));

  rep.psd_one_mineig = min_eigenvalue(block_defect(p1));
  rep.psd_zero_mineig = min_eigenvalue(block_defect(p0));
  rep.psd_one_ok = rep.psd_one_mineig >= -tol.psd;
  rep.psd_zero_ok = rep.psd_zero_mineig >= -tol.psd;

  auto moment_ok = [&](const PhaseBlock& b) {
    const double floor = b.U.squaredNorm();
    return b.s >= floor - tol.equality * std::max(1.0, floor);
  };
  rep.second_moment_ok = moment_ok(p1) && moment_ok(p0);

  rep.pass = rep.psd_one_ok && rep.psd_zero_ok && rep.second_moment_ok &&
             std::all_of(rep.equalities.begin(), rep.equalities.end(),
                         [](const ConstraintResidual& r) { return r.ok; });
  return rep;
}

}  // namespace weaklim
