// Acceptance suite: one line per criterion. With an argument N only that
// criterion runs; the exit status is non-zero if any selected criterion fails.
#include "weaklim/core.hpp"
#include "weaklim/laminate.hpp"
#include "weaklim/linear_reference.hpp"
#include "weaklim/necessity.hpp"
#include "weaklim/region_scan.hpp"
#include "weaklim/sufficiency.hpp"

#include "oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <string>
#include <vector>

using namespace weaklim;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double limit_seconds;
  std::function<Outcome()> run;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

// gamma recomputed from its formula.
double gamma_ref(double t, double a1, double a0) {
  const double d = (1 - t) * std::cbrt(a1) + t * std::cbrt(a0);
  return a1 * a0 / (d * d * d);
}

struct Sums {
  double mass1 = 0.0;
  double weights = 0.0;
  Vec U, V;
};

Sums summation(const Laminate& lam) {
  Sums s;
  s.U = Vec::Zero(lam.dim());
  s.V = Vec::Zero(lam.dim());
  for (const PhaseAtom& a : lam.atoms()) {
    s.weights += a.weight;
    if (a.phase == Phase::one) s.mass1 += a.weight;
    s.U += a.weight * a.u;
    s.V += a.weight * a.v;
  }
  return s;
}

Outcome pure_phase() {
  oracle::Rng rng(1001);
  double worst = 0.0;
  for (double t : {0.0, 1.0}) {
    for (int k = 0; k < 100; ++k) {
      const MaterialPair m = oracle::random_materials(rng);
      const Vec U = oracle::random_vec(rng, k % 2 ? 3 : 2, -1.5, 1.5);
      const double alpha = t == 1.0 ? m.alpha1() : m.alpha0();
      const Triplet tr(t, U, oracle::flux(alpha, U));
      worst = std::max(worst, std::abs(necessary_margin(tr, m)));
    }
  }
  return {worst <= 1e-12, fmt("max |margin| = %.3g over 200 cases (tol 1e-12)", worst)};
}

Outcome minimiser_formula() {
  oracle::Rng rng(1002);
  double worst_x = 0.0, worst_w = 0.0;
  for (int k = 0; k < 100; ++k) {
    const double t = oracle::uniform(rng, 0.02, 0.98);
    const MaterialPair m = oracle::random_materials(rng);
    const Vec U = oracle::random_nonzero(rng, k % 2 ? 3 : 2, 0.3, 2.0);
    auto f = [&](const Vec& x) { return oracle::energy(t, U, x, m.alpha1(), m.alpha0()); };
    const Vec nm = oracle::nelder_mead(f, Vec::Zero(U.size()), 0.5);
    const Vec closed = quartic_minimizer(t, U, m);
    worst_x = std::max(worst_x, (nm - closed).norm());
    const double target = gamma_ref(t, m.alpha1(), m.alpha0()) * std::pow(U.squaredNorm(), 2);
    worst_w = std::max(worst_w, std::abs(quartic_energy(t, U, closed, m) - target) / target);
  }
  return {worst_x <= 1e-6 && worst_w <= 1e-10,
          fmt("max |x_nm - x*| = %.3g (tol 1e-6), max rel |W(x*) - gamma|U|^4| = %.3g "
              "(tol 1e-10)",
              worst_x, worst_w)};
}

Outcome inclusion() {
  oracle::Rng rng(1003);
  int violations = 0;
  double worst = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 1000; ++k) {
    const double t = oracle::uniform(rng, 0.02, 0.98);
    const MaterialPair m = oracle::random_materials(rng);
    const Vec U = oracle::random_nonzero(rng, k % 2 ? 3 : 2);
    const auto s = oracle::interior_point(rng, t, U, m.alpha1(), m.alpha0());
    const Laminate lam = build_second_order_laminate(t, U, s.x, m);
    const Sums sum = summation(lam);
    const double margin = sum.V.dot(sum.U) -
                          gamma_ref(t, m.alpha1(), m.alpha0()) * std::pow(sum.U.squaredNorm(), 2);
    worst = std::min(worst, margin);
    if (margin < -1e-9) ++violations;
  }
  return {violations == 0,
          fmt("%d violations in 1000 laminates, min necessary margin = %.3g (tol -1e-9)",
              violations, worst)};
}

Outcome laminate_suite() {
  oracle::Rng rng(1004);
  Tolerances tol;
  int built = 0, failed = 0;
  double worst_flux = 0.0, worst_mass = 0.0;
  std::string first_failure;
  auto check = [&](const Laminate& lam, double t, const Vec& U, const Vec& V) {
    ++built;
    const LaminateReport rep = verify_laminate(lam, tol, ExpectedMoments{t, U, V});
    const Sums s = summation(lam);
    const double flux_err = (s.V - V).norm() / std::max(1.0, V.norm());
    worst_flux = std::max(worst_flux, flux_err);
    worst_mass = std::max(worst_mass, std::abs(s.mass1 - t));
    const bool ok = rep.pass && lam.tree_weight_sum() == 1.0 &&
                    std::abs(s.mass1 - t) <= 1e-12 && flux_err <= 1e-9 &&
                    rep.manifold_max <= 1e-12 && rep.jump_max <= 1e-10 &&
                    rep.divcurl <= 1e-9;
    if (!ok && first_failure.empty()) {
      first_failure = fmt(" first failure: laminate %d (manifold %.2g jump %.2g divcurl %.2g)",
                          built, rep.manifold_max, rep.jump_max, rep.divcurl);
    }
    failed += !ok;
  };
  for (int k = 0; k < 400; ++k) {
    const double t = oracle::uniform(rng, 0.02, 0.98);
    const MaterialPair m = oracle::random_materials(rng);
    const Vec U = oracle::random_nonzero(rng, k % 2 ? 3 : 2);
    const auto s = oracle::interior_point(rng, t, U, m.alpha1(), m.alpha0());
    check(build_second_order_laminate(t, U, s.x, m), t, U,
          oracle::phi(t, U, s.x, m.alpha1(), m.alpha0()));
    // First-order laminate on the boundary point of the same ray.
    check(build_second_order_laminate(t, U, s.boundary, m), t, U,
          oracle::phi(t, U, s.boundary, m.alpha1(), m.alpha0()));
  }
  for (int k = 0; k < 50; ++k) {
    const MaterialPair m = oracle::random_materials(rng);
    const Vec u = oracle::random_vec(rng, 2);
    const Phase p = k % 2 ? Phase::one : Phase::zero;
    check(dirac_laminate(p, u, m), p == Phase::one ? 1.0 : 0.0, u,
          oracle::flux(m.alpha(p), u));
  }

  // Negative constructions.
  const MaterialPair m(2.0, 1.0);
  const Vec U = v2(1, 0.4), d = v2(0.6, 0.8);
  const double s = first_order_root(0.3, U, d, m);
  const LaminateReport perturbed = verify_laminate(first_order_laminate(0.3, U, 1.1 * s * d, m));
  std::vector<PhaseAtom> atoms{
      {0.5, Phase::one, v2(1, 0), oracle::flux(2.0, v2(1, 0))},
      {0.5, Phase::zero, v2(0, 1), oracle::flux(1.0, v2(0, 1))}};
  const Laminate broken(m, Law::quartic, atoms,
                        LaminateNode::split(0.5, v2(1, 0), LaminateNode::leaf(0),
                                            LaminateNode::leaf(1)));
  const double broken_divcurl = divcurl_check(broken);
  const bool negatives = !perturbed.jump_ok && broken_divcurl > 1e-9;

  return {failed == 0 && negatives,
          fmt("%d/%d laminates pass all oracles; max mean-flux error %.3g, max phase-mass "
              "error %.3g; perturbed-root jump %.3g (fails), broken-pair div-curl %.3g "
              "(fails)%s",
              built - failed, built, worst_flux, worst_mass, perturbed.jump_max,
              broken_divcurl, first_failure.c_str())};
}

Outcome round_trip() {
  oracle::Rng rng(1005);
  int reach = 0, agree = 0;
  double worst = 0.0;
  for (int k = 0; k < 500; ++k) {
    const double t = oracle::uniform(rng, 0.05, 0.95);
    const MaterialPair m = oracle::random_materials(rng);
    const Vec U = oracle::random_nonzero(rng, 2, 0.3, 2.0);
    const auto s = oracle::interior_point(rng, t, U, m.alpha1(), m.alpha0());
    const Vec V = phi_map(t, U, s.x, m);
    const ReachabilityReport rep = reachable(Triplet(t, U, V), m);
    if (rep.reachable && rep.x_solution) {
      const double res = (oracle::phi(t, U, *rep.x_solution, m.alpha1(), m.alpha0()) - V).norm();
      worst = std::max(worst, res);
      if (res <= 1e-8) ++reach;
    }
    if (rep.newton_found && rep.oracle_inside && *rep.oracle_inside && !rep.anomaly) ++agree;
  }
  return {reach == 500 && agree == 500,
          fmt("%d/500 reachable with residual <= 1e-8 (max %.3g), Newton and polygon agree "
              "on %d/500",
              reach, worst, agree)};
}

Outcome gap_exhibition() {
  const MaterialPair m(8.0, 1.0);
  const RegionScanReport rep =
      scan_region(0.5, v2(1, 0), m, ScanWindow{v2(0, -3), v2(6, 3), 200});
  std::size_t witnesses = 0;
  for (const ScanCell& c : rep.cells) {
    if (c.cls == ScanClass::necessary_only && c.certified && !c.reachable &&
        c.necessary_margin > 1e-3 && c.boundary_distance > 1e-3) {
      ++witnesses;
    }
  }
  std::string best;
  if (rep.max_gap) {
    best = fmt("; max-gap witness V = (%.4g, %.4g), margin %.4g, distance %.4g",
               rep.max_gap->V(0), rep.max_gap->V(1), rep.max_gap->necessary_margin,
               rep.max_gap->boundary_distance);
  }
  return {rep.necessary_only > 0 && witnesses > 0 && rep.inclusion_violations == 0,
          fmt("necessary_only %zu, reachable %zu, infeasible %zu; %zu certified gap cells "
              "with margin > 1e-3 and distance > 1e-3; inclusion violations %zu%s",
              rep.necessary_only, rep.reachable, rep.infeasible, witnesses,
              rep.inclusion_violations, best.c_str())};
}

Outcome linear_oracle() {
  oracle::Rng rng(1007);
  double worst_jump = 0.0, worst_flux = 0.0, worst_margin = 0.0;
  for (int k = 0; k < 500; ++k) {
    const double t = oracle::uniform(rng, 0.02, 0.98);
    const MaterialPair m = oracle::random_materials(rng);
    const Vec U = oracle::random_nonzero(rng, k % 2 ? 3 : 2);
    const double a1 = m.alpha1(), a0 = m.alpha0();
    // Feasible directions form the ball with diameter [0, xm].
    const Vec xm = (a1 - a0) / ((1 - t) * a1 + t * a0) * U;
    const Vec x = 0.5 * xm + oracle::uniform(rng, 0.0, 1.0) * 0.5 * xm.norm() *
                                 oracle::random_nonzero(rng, U.size(), 1.0, 1.0);
    const Laminate lam = linear_build_laminate(t, U, x, m);
    for (const auto& lvl : jump_check(lam)) worst_jump = std::max(worst_jump, lvl.residual);
    const Vec Vref = t * a1 * (U - (1 - t) * x) + (1 - t) * a0 * (U + t * x);
    worst_flux = std::max(worst_flux,
                          (summation(lam).V - Vref).norm() / std::max(1.0, Vref.norm()));
    const Vec Vmin = linear_V(t, U, linear_minimizer(t, U, m), m);
    worst_margin = std::max(worst_margin, std::abs(linear_necessary_margin(t, U, Vmin, m)));
  }
  return {worst_jump <= 1e-12 && worst_flux <= 1e-12 && worst_margin <= 1e-10,
          fmt("max jump %.3g (tol 1e-12), max rel mean-flux error %.3g (tol 1e-12), "
              "max |harmonic margin at minimiser| %.3g (tol 1e-10)",
              worst_jump, worst_flux, worst_margin)};
}

Outcome certificates() {
  oracle::Rng rng(1008);
  int feasible = 0, passed = 0, infeasible = 0, reported = 0;
  double worst_eig = std::numeric_limits<double>::infinity(), worst_eq = 0.0;
  int negatives = 0, caught = 0;
  while (feasible < 200 || infeasible < 200) {
    const double t = oracle::uniform(rng, 0.02, 0.98);
    const MaterialPair m = oracle::random_materials(rng);
    const Eigen::Index n = (feasible + infeasible) % 2 ? 3 : 2;
    const Vec U = oracle::random_nonzero(rng, n);
    const Vec V = oracle::random_vec(rng, n, -8, 8);
    const Triplet tr(t, U, V);
    const double margin = necessary_margin(tr, m);
    if (margin > 1e-6 && feasible < 200) {
      ++feasible;
      const MomentCertificate cert = build_certificate(tr, m);
      const CertificateReport rep = verify_certificate(cert, tr, m);
      worst_eig = std::min({worst_eig, rep.psd_one_mineig, rep.psd_zero_mineig});
      for (const auto& e : rep.equalities) worst_eq = std::max(worst_eq, e.residual);
      passed += rep.pass;
      if (cert.one.u.squaredNorm() > 1e-6) {
        MomentCertificate broken = cert;
        broken.one.sigma = 0.5 * broken.one.u.squaredNorm() / broken.one.gamma;
        reassemble(broken);
        ++negatives;
        caught += !verify_certificate(broken, tr, m).psd_one_ok;
      }
    } else if (margin < -1e-6 && infeasible < 200) {
      ++infeasible;
      try {
        build_certificate(tr, m);
      } catch (const InfeasibleWitness&) {
        ++reported;
      }
    }
  }
  return {passed == 200 && reported == 200 && negatives > 0 && caught == negatives,
          fmt("%d/200 feasible pass (min block eigenvalue %.3g, max equality residual %.3g); "
              "%d/200 infeasible reported; sigma_1 perturbation fails PSD in %d/%d",
              passed, worst_eig, worst_eq, reported, caught, negatives)};
}

Outcome convexity() {
  oracle::Rng rng(1009);
  int below = 0;
  double worst_gap = std::numeric_limits<double>::infinity(), worst_fd = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const double t = oracle::uniform(rng, 0.05, 0.95);
    const MaterialPair m = oracle::random_materials(rng);
    const Eigen::Index n = k % 2 ? 3 : 2;
    const Vec U = oracle::random_vec(rng, n);
    const Vec x = oracle::random_vec(rng, n);
    const double bound = 2 * t * (1 - t) * (m.alpha1() + m.alpha0());
    const double gap = psi_hessian_mineig(t, U, x, m) - bound;
    worst_gap = std::min(worst_gap, gap);
    if (gap < -1e-9) ++below;
    auto f = [&](const Vec& y) { return oracle::psi(t, U, y, m.alpha1(), m.alpha0()); };
    const Mat H = psi_hessian(t, U, x, m);
    worst_fd = std::max(worst_fd, (H - oracle::fd_hessian(f, x, 1e-4)).cwiseAbs().maxCoeff() /
                                      std::max(1.0, H.cwiseAbs().maxCoeff()));
  }
  return {below == 0 && worst_fd <= 1e-5,
          fmt("Hessian min eigenvalue below 2t(1-t)(a1+a0) - 1e-9 at %d/1000 points "
              "(worst shortfall %.3g); analytic vs finite-difference Hessian max rel error "
              "%.3g (tol 1e-5)",
              below, -worst_gap, worst_fd)};
}

Outcome hankel() {
  oracle::Rng rng(1010);
  double worst = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 1000; ++k) {
    const int atoms = 1 + static_cast<int>(rng() % 8);
    const Eigen::Index n = k % 2 ? 3 : 2;
    std::vector<double> w(atoms);
    double total = 0.0;
    for (double& x : w) total += (x = oracle::uniform(rng, 0.01, 1.0));
    std::vector<WeightedPoint> mu;
    for (int i = 0; i < atoms; ++i) {
      mu.push_back({w[i] / total, oracle::random_vec(rng, n, -2, 2)});
    }
    worst = std::min(worst, hankel_defect_mineig(hankel_matrix(mu)));
  }
  const HankelMoments dirac = hankel_matrix({{1.0, v2(0.7, -1.3)}});
  const double dirac_max = (dirac.A - dirac.a * dirac.a.transpose()).cwiseAbs().maxCoeff();
  return {worst >= -1e-10 && dirac_max == 0.0,
          fmt("min eigenvalue of A - a a^T over 1000 measures = %.3g (tol -1e-10); Dirac "
              "defect max entry = %.3g",
              worst, dirac_max)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {1, "pure-phase equality", 1, pure_phase},
      {2, "minimiser formula", 5, minimiser_formula},
      {3, "sufficiency within necessity", 10, inclusion},
      {4, "laminate oracle suite", 10, laminate_suite},
      {5, "reachability round trip", 30, round_trip},
      {6, "gap exhibition", 60, gap_exhibition},
      {7, "linear oracle", 5, linear_oracle},
      {8, "certificates", 10, certificates},
      {9, "convexity", 5, convexity},
      {10, "Hankel PSD", 5, hankel},
  };
  int only = 0;
  if (argc > 1) only = std::atoi(argv[1]);
  bool ok = true;
  for (const Criterion& c : all) {
    if (only != 0 && c.id != only) continue;
    const auto start = std::chrono::steady_clock::now();
    const Outcome out = c.run();
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool pass = out.pass && secs < c.limit_seconds;
    ok = ok && pass;
    std::printf("[%s] %2d %s: %s; %.2fs (limit %.0fs)\n", pass ? "PASS" : "FAIL", c.id,
                c.name, out.detail.c_str(), secs, c.limit_seconds);
    std::fflush(stdout);
  }
  return ok ? 0 : 1;
}
