#include "weaklim/boundary_image.hpp"

#include "weaklim/polynomial.hpp"
#include "weaklim/sufficiency.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

namespace weaklim {

namespace {

using Vec3 = Eigen::Vector3d;

double cross2(const Vec& a, const Vec& b) { return a(0) * b(1) - a(1) * b(0); }

double segment_distance(const Vec& p, const Vec& a, const Vec& b) {
  const Vec ab = b - a;
  const double len2 = ab.squaredNorm();
  double s = len2 > 0.0 ? (p - a).dot(ab) / len2 : 0.0;
  s = std::clamp(s, 0.0, 1.0);
  return (p - (a + s * ab)).norm();
}

// Closest point on triangle abc to p (Ericson, Real-Time Collision Detection).
double triangle_distance(const Vec3& p, const Vec3& a, const Vec3& b,
                         const Vec3& c) {
  const Vec3 ab = b - a, ac = c - a, ap = p - a;
  const double d1 = ab.dot(ap), d2 = ac.dot(ap);
  if (d1 <= 0.0 && d2 <= 0.0) return (p - a).norm();
  const Vec3 bp = p - b;
  const double d3 = ab.dot(bp), d4 = ac.dot(bp);
  if (d3 >= 0.0 && d4 <= d3) return (p - b).norm();
  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) {
    return (p - (a + d1 / (d1 - d3) * ab)).norm();
  }
  const Vec3 cp = p - c;
  const double d5 = ab.dot(cp), d6 = ac.dot(cp);
  if (d6 >= 0.0 && d5 <= d6) return (p - c).norm();
  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) {
    return (p - (a + d2 / (d2 - d6) * ac)).norm();
  }
  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    return (p - (b + (d4 - d3) / ((d4 - d3) + (d5 - d6)) * (c - b))).norm();
  }
  const double denom = va + vb + vc;
  if (denom == 0.0) {
    return std::min({segment_distance(p, a, b), segment_distance(p, b, c),
                     segment_distance(p, a, c)});
  }
  const double v = vb / denom, w = vc / denom;
  return (p - (a + v * ab + w * ac)).norm();
}

// Signed solid angle of triangle abc seen from the origin (Van Oosterom and
// Strackee).
double solid_angle(const Vec3& a, const Vec3& b, const Vec3& c) {
  const double la = a.norm(), lb = b.norm(), lc = c.norm();
  const double num = a.dot(b.cross(c));
  const double den = la * lb * lc + a.dot(b) * lc + a.dot(c) * lb + b.dot(c) * la;
  return 2.0 * std::atan2(num, den);
}

void icosphere(int subdivisions, std::vector<Vec>& verts,
               std::vector<std::array<int, 3>>& faces) {
  const double g = (1.0 + std::sqrt(5.0)) / 2.0;
  const double raw[12][3] = {{-1, g, 0}, {1, g, 0},  {-1, -g, 0}, {1, -g, 0},
                             {0, -1, g}, {0, 1, g},  {0, -1, -g}, {0, 1, -g},
                             {g, 0, -1}, {g, 0, 1},  {-g, 0, -1}, {-g, 0, 1}};
  verts.clear();
  for (const auto& r : raw) {
    Vec v(3);
    v << r[0], r[1], r[2];
    verts.push_back(v.normalized());
  }
  faces = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
           {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
           {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
           {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  for (int level = 0; level < subdivisions; ++level) {
    std::map<std::pair<int, int>, int> cache;
    auto midpoint = [&](int i, int j) {
      const auto key = std::minmax(i, j);
      auto it = cache.find(key);
      if (it != cache.end()) return it->second;
      verts.push_back((verts[i] + verts[j]).normalized());
      const int idx = static_cast<int>(verts.size()) - 1;
      cache.emplace(key, idx);
      return idx;
    };
    std::vector<std::array<int, 3>> next;
    next.reserve(faces.size() * 4);
    for (const auto& f : faces) {
      const int a = midpoint(f[0], f[1]);
      const int b = midpoint(f[1], f[2]);
      const int c = midpoint(f[2], f[0]);
      next.push_back({f[0], a, c});
      next.push_back({f[1], b, a});
      next.push_back({f[2], c, b});
      next.push_back({a, b, c});
    }
    faces = std::move(next);
  }
}

Vec3 as3(const Vec& v) { return Vec3(v(0), v(1), v(2)); }

}  // namespace

BoundaryImage::BoundaryImage(double t, const Vec& U, const MaterialPair& m,
                             const Tolerances& tol)
    : t_(t), U_(U), m_(m), tol_(tol) {
  if (!(t > 0.0 && t < 1.0)) {
    throw InvalidInput("boundary image requires t in (0,1)");
  }
  if (U.size() != 2 && U.size() != 3) {
    std::ostringstream os;
    os << "membership geometry supports N = 2 and N = 3, got N = " << U.size();
    throw UnsupportedDimension(os.str());
  }
  if (U.squaredNorm() == 0.0) {
    throw InvalidInput("boundary image requires U != 0 (C reduces to {0})");
  }
  center_ = interior_center(t, U, m);
  center_image_ = phi_map(t, U, center_, m);

  if (U.size() == 2) {
    const int M = static_cast<int>(tol.polygon_samples);
    if (M < 8) throw InvalidInput("polygon_samples must be at least 8");
    for (int k = 0; k < M; ++k) {
      const double th = 2.0 * std::numbers::pi * k / M;
      theta_.push_back(th);
      Vec d(2);
      d << std::cos(th), std::sin(th);
      dirs_.push_back(d);
      x_.push_back(boundary_at_angle(th));
      img_.push_back(phi_map(t, U, x_.back(), m));
    }
    for (int k = 0; k < M; ++k) {
      const int j = (k + 1) % M;
      const double mid = theta_[k] + std::numbers::pi / M;
      const Vec p = phi_map(t, U, boundary_at_angle(mid), m);
      sagitta_ = std::max(sagitta_, segment_distance(p, img_[k], img_[j]));
    }
  } else {
    icosphere(static_cast<int>(tol.sphere_subdivisions), dirs_, tris_);
    for (const Vec& d : dirs_) {
      x_.push_back(boundary_point(d));
      img_.push_back(phi_map(t, U, x_.back(), m));
    }
    std::map<std::pair<int, int>, Vec3> edge_images;
    auto edge_image = [&](int i, int j) -> const Vec3& {
      const auto key = std::minmax(i, j);
      auto it = edge_images.find(key);
      if (it == edge_images.end()) {
        const Vec p = phi_map(t, U, boundary_point(dirs_[i] + dirs_[j]), m);
        it = edge_images.emplace(key, as3(p)).first;
      }
      return it->second;
    };
    for (const auto& f : tris_) {
      const Vec3 a = as3(img_[f[0]]), b = as3(img_[f[1]]), c = as3(img_[f[2]]);
      auto gap = [&](const Vec3& p) {
        sagitta_ = std::max(sagitta_, triangle_distance(p, a, b, c));
      };
      gap(as3(phi_map(t, U, boundary_point(dirs_[f[0]] + dirs_[f[1]] + dirs_[f[2]]), m)));
      gap(edge_image(f[0], f[1]));
      gap(edge_image(f[1], f[2]));
      gap(edge_image(f[2], f[0]));
    }
  }
  double extent = 0.0;
  for (const Vec& p : img_) extent = std::max(extent, (p - center_image_).norm());
  band_ = 4.0 * sagitta_ + 1e-12 * std::max(1.0, extent);
}

Vec BoundaryImage::boundary_point(const Vec& direction) const {
  require_same_dim(U_, direction, "boundary_point");
  const double n = direction.norm();
  if (!(n > 0.0)) throw InvalidInput("boundary direction must be nonzero");
  const Vec d = direction / n;
  const Polynomial p = psi_along_ray(t_, U_, center_, d, m_);
  const auto s = smallest_root_above(p, 0.0);
  if (!s) throw NoPositiveRoot("ray from the center of C does not leave C");
  return center_ + *s * d;
}

Vec BoundaryImage::boundary_at_angle(double theta) const {
  Vec d(2);
  d << std::cos(theta), std::sin(theta);
  return boundary_point(d);
}

BoundaryImage::Membership BoundaryImage::classify(const Vec& V) const {
  require_same_dim(U_, V, "classify");
  return dim() == 2 ? classify_2d(V) : classify_3d(V);
}

std::optional<std::pair<Vec, double>> BoundaryImage::ray_exit(
    const Vec& from, const Vec& V) const {
  require_same_dim(U_, from, "ray_exit");
  require_same_dim(U_, V, "ray_exit");
  if ((V - from).squaredNorm() == 0.0) return std::nullopt;
  return dim() == 2 ? ray_exit_2d(from, V) : ray_exit_3d(from, V);
}

bool BoundaryImage::image_polygon_convex() const {
  if (dim() != 2) throw UnsupportedDimension("polygon convexity is 2-D only");
  const std::size_t M = img_.size();
  double extent = 0.0;
  for (const Vec& p : img_) extent = std::max(extent, (p - center_image_).norm());
  const double floor = 1e-12 * extent * extent;
  int sign = 0;
  for (std::size_t k = 0; k < M; ++k) {
    const Vec e1 = img_[(k + 1) % M] - img_[k];
    const Vec e2 = img_[(k + 2) % M] - img_[(k + 1) % M];
    const double c = cross2(e1, e2);
    if (std::abs(c) <= floor) continue;
    const int s = c > 0.0 ? 1 : -1;
    if (sign == 0) sign = s;
    if (s != sign) return false;
  }
  return true;
}

BoundaryImage::Membership BoundaryImage::classify_2d(const Vec& V) const {
  const std::size_t M = img_.size();
  int winding = 0;
  double dist = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < M; ++k) {
    const Vec& a = img_[k];
    const Vec& b = img_[(k + 1) % M];
    dist = std::min(dist, segment_distance(V, a, b));
    const double side = cross2(b - a, V - a);
    if (a(1) <= V(1)) {
      if (b(1) > V(1) && side > 0.0) ++winding;
    } else if (b(1) <= V(1) && side < 0.0) {
      --winding;
    }
  }
  Membership out;
  out.inside = winding != 0;
  out.certified = true;
  out.distance = dist;
  if (dist > band_) return out;

  const auto exit = ray_exit_2d(center_image_, V);
  if (exit) {
    const double lambda = exit->second;
    out.inside = lambda >= 1.0;
    out.refined = true;
    out.distance = std::abs(lambda - 1.0) * (V - center_image_).norm();
  }
  return out;
}

std::optional<std::pair<Vec, double>> BoundaryImage::ray_exit_2d(
    const Vec& from, const Vec& V) const {
  const Vec w = V - from;
  const double w2 = w.squaredNorm();
  auto f = [&](double th) {
    return cross2(phi_map(t_, U_, boundary_at_angle(th), m_) - from, w);
  };
  const std::size_t M = img_.size();
  std::vector<double> fk(M);
  for (std::size_t k = 0; k < M; ++k) fk[k] = cross2(img_[k] - from, w);

  std::optional<std::pair<Vec, double>> best;
  auto consider = [&](double th) {
    const Vec x = boundary_at_angle(th);
    const double lambda = (phi_map(t_, U_, x, m_) - from).dot(w) / w2;
    if (lambda <= 0.0) return;
    if (!best || lambda > best->second) best.emplace(x, lambda);
  };
  for (std::size_t k = 0; k < M; ++k) {
    const std::size_t j = (k + 1) % M;
    const double lo = theta_[k];
    const double hi = j == 0 ? 2.0 * std::numbers::pi : theta_[j];
    if (fk[k] == 0.0) {
      consider(lo);
    } else if ((fk[k] < 0.0) != (fk[j] < 0.0) && fk[j] != 0.0) {
      consider(bisect(f, lo, hi));
    }
  }
  return best;
}

BoundaryImage::Membership BoundaryImage::classify_3d(const Vec& V) const {
  const Vec3 p = as3(V);
  double omega = 0.0;
  double dist = std::numeric_limits<double>::infinity();
  for (const auto& f : tris_) {
    const Vec3 a = as3(img_[f[0]]), b = as3(img_[f[1]]), c = as3(img_[f[2]]);
    omega += solid_angle(a - p, b - p, c - p);
    dist = std::min(dist, triangle_distance(p, a, b, c));
  }
  Membership out;
  out.inside = std::abs(omega) > 2.0 * std::numbers::pi;
  out.certified = true;
  out.distance = dist;
  if (dist > band_) return out;

  const auto exit = ray_exit_3d(center_image_, V);
  if (exit) {
    const double lambda = exit->second;
    out.inside = lambda >= 1.0;
    out.refined = true;
    out.distance = std::abs(lambda - 1.0) * (V - center_image_).norm();
  } else {
    out.certified = false;
  }
  return out;
}

std::optional<std::pair<Vec, double>> BoundaryImage::ray_exit_3d(
    const Vec& from, const Vec& V) const {
  const Vec3 o = as3(from);
  const Vec3 w = as3(V - from);
  const double w2 = w.squaredNorm();
  const double scale = std::max(1.0, from.norm() + V.norm());

  // Newton on z = (y, lambda): Phi(y) - from - lambda w = 0, Psi(y) = 0.
  auto residual = [&](const Vec& z) {
    Vec F(4);
    const Vec y = z.head(3);
    F.head(3) = phi_map(t_, U_, y, m_) - from - z(3) * (V - from);
    F(3) = psi(t_, U_, y, m_);
    return F;
  };
  auto solve = [&](Vec z) -> std::optional<Vec> {
    Vec F = residual(z);
    for (int it = 0; it < 60; ++it) {
      if (F.norm() <= 1e-13 * scale) return z;
      const Vec y = z.head(3);
      Mat J = Mat::Zero(4, 4);
      J.topLeftCorner(3, 3) = phi_jacobian(t_, U_, y, m_);
      J.block(0, 3, 3, 1) = -(V - from);
      J.block(3, 0, 1, 3) = psi_gradient(t_, U_, y, m_).transpose();
      const Vec step = J.fullPivLu().solve(-F);
      if (!step.allFinite()) return std::nullopt;
      double lambda = 1.0;
      bool accepted = false;
      for (int k = 0; k < 40; ++k) {
        const Vec zt = z + lambda * step;
        const Vec Ft = residual(zt);
        if (Ft.norm() < F.norm()) {
          z = zt;
          F = Ft;
          accepted = true;
          break;
        }
        lambda *= 0.5;
      }
      if (!accepted) break;
    }
    if (F.norm() <= 1e-10 * scale) return z;
    return std::nullopt;
  };

  std::optional<std::pair<Vec, double>> best;
  for (const auto& f : tris_) {
    const Vec3 a = as3(img_[f[0]]), b = as3(img_[f[1]]), c = as3(img_[f[2]]);
    // Moller-Trumbore with a slightly enlarged triangle.
    const Vec3 e1 = b - a, e2 = c - a;
    const Vec3 h = w.cross(e2);
    const double det = e1.dot(h);
    if (std::abs(det) <= 1e-300) continue;
    const Vec3 s = o - a;
    const double u = s.dot(h) / det;
    const Vec3 q = s.cross(e1);
    const double v = w.dot(q) / det;
    const double slack = 1e-6;
    if (u < -slack || v < -slack || u + v > 1.0 + slack) continue;
    const double lam = e2.dot(q) / det;
    if (lam <= 0.0) continue;
    const double wa = std::max(0.0, 1.0 - u - v), wb = std::max(0.0, u),
                 wc = std::max(0.0, v);
    const Vec dir = wa * dirs_[f[0]] + wb * dirs_[f[1]] + wc * dirs_[f[2]];
    Vec z(4);
    z.head(3) = boundary_point(dir);
    z(3) = lam;
    const auto sol = solve(z);
    if (!sol) continue;
    const double lambda = (*sol)(3);
    if (!(lambda > 0.0)) continue;
    // Project lambda onto the ray once more for a consistent value.
    const Vec y = sol->head(3);
    const double proj = (as3(phi_map(t_, U_, y, m_)) - o).dot(w) / w2;
    if (!best || proj > best->second) best.emplace(y, proj);
  }
  return best;
}

}  // namespace weaklim
