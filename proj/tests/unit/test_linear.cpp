#include "weaklim/laminate.hpp"
#include "weaklim/linear_reference.hpp"

#include "oracles.hpp"

#include <doctest.h>

using namespace weaklim;

namespace {

Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

}  // namespace

TEST_CASE("linear flux and margins on the documented configuration") {
  const MaterialPair m(2.0, 1.0);
  const Vec U = v2(1, 0);
  CHECK((linear_V(0.5, U, v2(2.0 / 3.0, 0), m) - v2(4.0 / 3.0, 0)).norm() <= 1e-15);
  CHECK((linear_V(0.3, U, v2(0, 0), m) - (0.3 * 2 + 0.7) * U).norm() <= 1e-15);
  CHECK((linear_V(1.0, U, v2(5, 5), m) - 2.0 * U).norm() == 0.0);

  CHECK(linear_condition_margin(0.5, U, v2(0, 0), m) == 0.0);
  CHECK(std::abs(linear_condition_margin(0.5, U, v2(2.0 / 3.0, 0), m)) <= 1e-15);
  CHECK(linear_condition_margin(0.5, U, v2(1.0 / 3.0, 0), m) ==
        doctest::Approx(1.0 / 6.0).epsilon(1e-14));

  CHECK(linear_necessary_margin(0.0, U, 1.0 * U, m) == 0.0);
  CHECK(linear_necessary_margin(1.0, U, 2.0 * U, m) == 0.0);
  CHECK(std::abs(linear_necessary_margin(0.5, U, v2(4.0 / 3.0, 0), m)) <= 1e-15);
}

TEST_CASE("linear laminates reproduce their moments") {
  const MaterialPair m(2.0, 1.0);
  const Vec U = v2(1, 0);

  const Laminate edge = linear_build_laminate(0.5, U, v2(2.0 / 3.0, 0), m);
  CHECK(edge.atoms().size() == 2);
  const Laminate zero = linear_build_laminate(0.5, U, v2(0, 0), m);
  for (const auto& a : zero.atoms()) CHECK((a.u - U).norm() == 0.0);
  const Laminate inner = linear_build_laminate(0.5, U, v2(1.0 / 3.0, 0), m);
  CHECK(inner.atoms().size() == 4);

  for (const Laminate* lam : {&edge, &zero, &inner}) {
    const LaminateReport rep = verify_laminate(*lam);
    CHECK(rep.pass);
  }
  const LaminateMoments mom = laminate_moments(inner);
  CHECK((mom.V - linear_V(0.5, U, v2(1.0 / 3.0, 0), m)).norm() <= 1e-15);

  CHECK_THROWS_AS(linear_build_laminate(0.5, U, v2(1.0, 0), m), InfeasibleDirection);
}

TEST_CASE("random feasible directions") {
  oracle::Rng rng(21);
  for (int k = 0; k < 300; ++k) {
    const double t = oracle::uniform(rng, 0.01, 0.99);
    const MaterialPair m = oracle::random_materials(rng);
    const Vec U = oracle::random_nonzero(rng, k % 3 == 0 ? 3 : 2);
    // The feasible set is the ball with diameter [0, minimiser].
    const Vec xm = linear_minimizer(t, U, m);
    CHECK(std::abs(linear_condition_margin(t, U, xm, m)) <= 1e-12 * U.squaredNorm() + 1e-15);
    CHECK(std::abs(linear_necessary_margin(t, U, linear_V(t, U, xm, m), m)) <= 1e-10);
    const Vec c = 0.5 * xm;
    const Vec x = c + oracle::uniform(rng, 0.0, 0.999) * 0.5 * xm.norm() *
                          oracle::random_nonzero(rng, U.size(), 1.0, 1.0);
    REQUIRE(linear_condition_margin(t, U, x, m) >= 0.0);
    const Laminate lam = linear_build_laminate(t, U, x, m);
    double sumw = 0.0;
    Vec Vbar = Vec::Zero(U.size()), Ubar = Vec::Zero(U.size());
    for (const auto& a : lam.atoms()) {
      sumw += a.weight;
      Ubar += a.weight * a.u;
      Vbar += a.weight * a.v;
      CHECK((a.v - m.alpha(a.phase) * a.u).norm() <= 1e-15 * std::max(1.0, a.v.norm()));
    }
    CHECK(std::abs(sumw - 1.0) <= 1e-15);
    CHECK((Ubar - U).norm() <= 1e-12);
    CHECK((Vbar - linear_V(t, U, x, m)).norm() <= 1e-12 * std::max(1.0, Vbar.norm()));
    for (const auto& lvl : jump_check(lam)) CHECK(lvl.residual <= 1e-12);
  }
}

TEST_CASE("equality of the linear condition is the jump condition") {
  oracle::Rng rng(22);
  for (int k = 0; k < 200; ++k) {
    const double t = oracle::uniform(rng, 0.01, 0.99);
    const MaterialPair m = oracle::random_materials(rng);
    const Vec U = oracle::random_nonzero(rng, 2);
    const Vec xm = linear_minimizer(t, U, m);
    const Vec dir = oracle::random_nonzero(rng, 2, 1.0, 1.0);
    const Vec x = 0.5 * xm + 0.5 * xm.norm() * dir;  // on the sphere
    CHECK(std::abs(linear_condition_margin(t, U, x, m)) <= 1e-12);
    const Vec u1 = U - (1 - t) * x, u0 = U + t * x;
    const double jump = (u1 - u0).dot(m.alpha1() * u1 - m.alpha0() * u0);
    CHECK(std::abs(jump) <= 1e-12);
  }
}
