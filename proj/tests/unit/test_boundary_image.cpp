#include "weaklim/boundary_image.hpp"
#include "weaklim/sufficiency.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace weaklim;

namespace {

Vec vec(std::initializer_list<double> xs) {
  Vec v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

// Winding number of the closed polygon around p, computed by summing angles.
double angle_winding(const std::vector<Vec>& poly, const Vec& p) {
  double total = 0.0;
  for (std::size_t k = 0; k < poly.size(); ++k) {
    const Vec a = poly[k] - p;
    const Vec b = poly[(k + 1) % poly.size()] - p;
    total += std::atan2(a(0) * b(1) - a(1) * b(0), a.dot(b));
  }
  return total / (2 * M_PI);
}

}  // namespace

TEST_CASE("construction rejects unsupported inputs") {
  const MaterialPair m(2.0, 1.0);
  CHECK_THROWS_AS(BoundaryImage(0.0, vec({1, 0}), m), InvalidInput);
  CHECK_THROWS_AS(BoundaryImage(0.5, vec({0, 0}), m), InvalidInput);
  CHECK_THROWS_AS(BoundaryImage(0.5, vec({1, 0, 0, 0}), m), UnsupportedDimension);
}

TEST_CASE("sampled boundary lies on the zero level set") {
  const MaterialPair m(8.0, 1.0);
  const BoundaryImage image(0.5, vec({1, 0}), m);
  CHECK(image.samples().size() == 720);
  CHECK(psi(0.5, image.U(), image.center(), m) < 0.0);
  CHECK(psi_gradient(0.5, image.U(), image.center(), m).norm() <= 1e-12);
  for (std::size_t k = 0; k < image.samples().size(); ++k) {
    CHECK(std::abs(psi(0.5, image.U(), image.samples()[k], m)) <= 1e-12);
    CHECK((phi_map(0.5, image.U(), image.samples()[k], m) - image.images()[k]).norm() == 0.0);
  }
  CHECK(image.sagitta() > 0.0);
  CHECK(image.sagitta() < 1e-3);
  CHECK(image.band() >= 4 * image.sagitta());
  CHECK(image.image_polygon_convex());
}

TEST_CASE("polygon membership agrees with an angle-sum winding oracle") {
  const MaterialPair m(5.0, 1.0);
  const BoundaryImage image(0.35, vec({0.8, 0.3}), m);
  oracle::Rng rng(51);
  const Vec c = image.center_image();
  double extent = 0.0;
  for (const Vec& p : image.images()) extent = std::max(extent, (p - c).norm());
  int inside = 0, checked = 0;
  for (int k = 0; k < 2000; ++k) {
    const Vec V = c + oracle::random_vec(rng, 2, -1.5 * extent, 1.5 * extent);
    const auto mem = image.classify(V);
    if (mem.distance <= image.band()) continue;
    const bool ref = std::abs(angle_winding(image.images(), V)) > 0.5;
    CHECK(mem.inside == ref);
    CHECK(mem.certified);
    inside += ref;
    ++checked;
  }
  CHECK(inside > 20);
  CHECK(checked > 1000);
}

TEST_CASE("images of interior points lie inside") {
  oracle::Rng rng(52);
  for (int k = 0; k < 40; ++k) {
    const double t = oracle::uniform(rng, 0.1, 0.9);
    const MaterialPair m = oracle::random_materials(rng);
    const Eigen::Index n = k % 2 ? 3 : 2;
    const Vec U = oracle::random_nonzero(rng, n, 0.5, 1.5);
    const BoundaryImage image(t, U, m);
    for (int j = 0; j < 10; ++j) {
      const auto s = oracle::interior_point(rng, t, U, m.alpha1(), m.alpha0(), 0.05, 0.95);
      const auto mem = image.classify(phi_map(t, U, s.x, m));
      CHECK(mem.inside);
    }
  }
}

TEST_CASE("ray exit lands on the level set and the ray") {
  const MaterialPair m(8.0, 1.0);
  for (const Vec& U : {vec({1, 0}), vec({1, 0.5, -0.2})}) {
    const BoundaryImage image(0.5, U, m);
    const Vec from = phi_map(0.5, U, Vec::Zero(U.size()), m);
    const Vec V = phi_map(0.5, U, image.center(), m);
    const auto exit = image.ray_exit(from, V);
    REQUIRE(exit.has_value());
    CHECK(exit->second > 1.0);
    const Vec& x1 = exit->first;
    CHECK(std::abs(psi(0.5, U, x1, m)) <= 1e-10);
    const Vec on_ray = from + exit->second * (V - from);
    CHECK((phi_map(0.5, U, x1, m) - on_ray).norm() <= 1e-9);
  }
}

TEST_CASE("three-dimensional mesh") {
  const MaterialPair m(4.0, 1.0);
  const BoundaryImage image(0.4, vec({1, 0.2, -0.3}), m);
  CHECK(image.samples().size() == 642);
  CHECK(image.triangles().size() == 1280);
  const Vec far = image.center_image() + 100.0 * Vec::Ones(3);
  CHECK_FALSE(image.classify(far).inside);
  CHECK(image.classify(image.center_image()).inside);
  CHECK_THROWS_AS(image.image_polygon_convex(), UnsupportedDimension);
}
