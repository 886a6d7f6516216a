// Sampled boundary of C(t, U) and of its image Phi(C) for N = 2 (closed
// polygon) and N = 3 (icosphere triangle mesh). Used as the geometric
// membership oracle. Immutable after construction, so one instance can be
// shared read-only across threads for a fixed (t, U).
#pragma once

#include "weaklim/types.hpp"

#include <array>
#include <optional>
#include <vector>

namespace weaklim {

class BoundaryImage {
 public:
  /// Requires U != 0, t in (0,1) and N in {2, 3}; throws otherwise.
  BoundaryImage(double t, const Vec& U, const MaterialPair& m,
                const Tolerances& tol = {});

  struct Membership {
    bool inside = false;
    bool certified = false;  // false only when a 3-D query sits in the band
    bool refined = false;    // 2-D exact radial refinement was used
    double distance = 0.0;   // to the sampled image boundary (or refined gap)
  };

  Membership classify(const Vec& V) const;

  /// Point of the zero level set of Psi on the ray center + s*direction.
  Vec boundary_point(const Vec& direction) const;

  /// Farthest point x1 of the zero level set whose image lies on the ray
  /// from `from` through V; returns (x1, lambda) with
  /// Phi(x1) = from + lambda (V - from).
  std::optional<std::pair<Vec, double>> ray_exit(const Vec& from,
                                                 const Vec& V) const;

  int dim() const noexcept { return static_cast<int>(center_.size()); }
  double t() const noexcept { return t_; }
  const Vec& U() const noexcept { return U_; }
  const MaterialPair& materials() const noexcept { return m_; }
  const Vec& center() const noexcept { return center_; }
  const Vec& center_image() const noexcept { return center_image_; }
  const std::vector<Vec>& samples() const noexcept { return x_; }
  const std::vector<Vec>& images() const noexcept { return img_; }
  const std::vector<std::array<int, 3>>& triangles() const noexcept {
    return tris_;
  }
  /// Maximal deviation of the true image boundary from the sampled one.
  double sagitta() const noexcept { return sagitta_; }
  double band() const noexcept { return band_; }

  /// 2-D only: whether every turn of the image polygon has the same sign.
  bool image_polygon_convex() const;

 private:
  Vec boundary_at_angle(double theta) const;
  Membership classify_2d(const Vec& V) const;
  Membership classify_3d(const Vec& V) const;
  std::optional<std::pair<Vec, double>> ray_exit_2d(const Vec& from,
                                                    const Vec& V) const;
  std::optional<std::pair<Vec, double>> ray_exit_3d(const Vec& from,
                                                    const Vec& V) const;

  double t_;
  Vec U_;
  MaterialPair m_;
  Tolerances tol_;
  Vec center_;
  Vec center_image_;
  std::vector<double> theta_;  // 2-D sample angles
  std::vector<Vec> dirs_;      // sample directions from the center
  std::vector<Vec> x_;         // boundary samples of C
  std::vector<Vec> img_;       // their images
  std::vector<std::array<int, 3>> tris_;
  double sagitta_ = 0.0;
  double band_ = 0.0;
};

}  // namespace weaklim
