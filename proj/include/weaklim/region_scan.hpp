// Grid classification of flux space for fixed (t, U): every cell centre V is
// labelled infeasible (fails the gamma bound), necessary_only (passes the
// bound but lies outside Phi(C)) or reachable.
#pragma once

#include "weaklim/types.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace weaklim {

enum class ScanClass { infeasible, necessary_only, reachable };
std::string to_string(ScanClass c);

/// Axis-aligned box [lo, hi] split into `resolution` cells per axis.
struct ScanWindow {
  Vec lo;
  Vec hi;
  int resolution = 0;

  /// Throws InvalidInput on mismatched dimensions, empty boxes or
  /// resolution < 1.
  void validate(Eigen::Index dim) const;
  std::size_t cell_count() const;
  /// Centre of cell `index` (first axis varies fastest).
  Vec cell_center(std::size_t index) const;
};

struct ScanCell {
  Vec V;
  double necessary_margin = 0.0;
  bool reachable = false;
  ScanClass cls = ScanClass::infeasible;
  bool certified = true;
  bool anomaly = false;         // oracle says inside but Newton found no preimage
  double boundary_distance = 0.0;
  bool margin_band = false;     // |necessary_margin| <= tol.boundary_band
};

struct GapWitness {
  std::size_t index = 0;
  Vec V;
  double necessary_margin = 0.0;
  double boundary_distance = 0.0;
};

struct RegionScanReport {
  double t = 0.0;
  Vec U;
  double alpha1 = 0.0;
  double alpha0 = 0.0;
  ScanWindow window;
  std::vector<ScanCell> cells;
  std::size_t infeasible = 0;
  std::size_t necessary_only = 0;
  std::size_t reachable = 0;
  double gap_fraction = 0.0;  // necessary_only / (necessary_only + reachable)
  std::optional<GapWitness> max_gap;  // maximises min(margin, distance)
  std::size_t inclusion_violations = 0;
  std::size_t margin_band = 0;
  std::size_t uncertified = 0;
  std::size_t anomalies = 0;
  std::optional<bool> image_convex;  // 2-D polygon convexity probe
};

/// jobs = 0 uses the available hardware parallelism. Results do not depend
/// on the worker count.
RegionScanReport scan_region(double t, const Vec& U, const MaterialPair& m,
                             const ScanWindow& window,
                             const Tolerances& tol = {}, unsigned jobs = 0,
                             std::uint64_t seed = 0);

/// Header `Vx,Vy[,Vz],necessary_margin,reachable,class`.
void write_scan_csv(const RegionScanReport& rep, std::ostream& os);

}  // namespace weaklim
