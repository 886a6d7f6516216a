#include "weaklim/region_scan.hpp"

#include "weaklim/boundary_image.hpp"
#include "weaklim/io.hpp"
#include "weaklim/necessity.hpp"
#include "weaklim/sufficiency.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>
#include <thread>

namespace weaklim {

std::string to_string(ScanClass c) {
  switch (c) {
    case ScanClass::infeasible:
      return "infeasible";
    case ScanClass::necessary_only:
      return "necessary_only";
    case ScanClass::reachable:
      return "reachable";
  }
  return "infeasible";
}

void ScanWindow::validate(Eigen::Index dim) const {
  if (lo.size() != dim || hi.size() != dim) {
    std::ostringstream os;
    os << "scan window must have dimension " << dim;
    throw InvalidInput(os.str());
  }
  if (resolution < 1) throw InvalidInput("scan resolution must be >= 1");
  for (Eigen::Index i = 0; i < dim; ++i) {
    if (!std::isfinite(lo(i)) || !std::isfinite(hi(i)) || !(hi(i) > lo(i))) {
      throw InvalidInput("scan window needs finite bounds with lo < hi");
    }
  }
  const double cells = std::pow(static_cast<double>(resolution),
                                static_cast<double>(dim));
  if (cells > 1e8) throw InvalidInput("scan window has too many cells");
}

std::size_t ScanWindow::cell_count() const {
  std::size_t n = 1;
  for (Eigen::Index i = 0; i < lo.size(); ++i) {
    n *= static_cast<std::size_t>(resolution);
  }
  return n;
}

Vec ScanWindow::cell_center(std::size_t index) const {
  Vec V(lo.size());
  for (Eigen::Index i = 0; i < lo.size(); ++i) {
    const std::size_t k = index % static_cast<std::size_t>(resolution);
    index /= static_cast<std::size_t>(resolution);
    V(i) = lo(i) + (static_cast<double>(k) + 0.5) * (hi(i) - lo(i)) / resolution;
  }
  return V;
}

RegionScanReport scan_region(double t, const Vec& U, const MaterialPair& m,
                             const ScanWindow& window, const Tolerances& tol,
                             unsigned jobs, std::uint64_t seed) {
  require_fraction(t);
  if (U.size() != 2 && U.size() != 3) {
    std::ostringstream os;
    os << "scan supports N = 2 and N = 3, got N = " << U.size();
    throw UnsupportedDimension(os.str());
  }
  window.validate(U.size());

  RegionScanReport rep;
  rep.t = t;
  rep.U = U;
  rep.alpha1 = m.alpha1();
  rep.alpha0 = m.alpha0();
  rep.window = window;

  std::optional<BoundaryImage> image;
  const bool geometric = t > 0.0 && t < 1.0 && U.squaredNorm() > 0.0;
  if (geometric) {
    image.emplace(t, U, m, tol);
    if (U.size() == 2) rep.image_convex = image->image_polygon_convex();
  }

  const std::size_t n = window.cell_count();
  rep.cells.resize(n);

  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      ScanCell& cell = rep.cells[i];
      cell.V = window.cell_center(i);
      const Triplet tr(t, U, cell.V);
      cell.necessary_margin = necessary_margin(tr, m);
      cell.margin_band = std::abs(cell.necessary_margin) <= tol.boundary_band;
      if (geometric) {
        const auto mem = image->classify(cell.V);
        cell.reachable = mem.inside;
        cell.certified = mem.certified;
        cell.boundary_distance = mem.distance;
        if (cell.reachable) {
          const auto pre = find_preimage(t, U, cell.V, m, tol, &*image, seed);
          cell.anomaly = !pre.has_value();
        }
      } else {
        const ReachabilityReport r = reachable(tr, m, tol, nullptr, seed);
        cell.reachable = r.reachable;
        cell.certified = r.certified;
        cell.boundary_distance = r.flux_residual.value_or(0.0);
      }
      if (cell.reachable) {
        cell.cls = ScanClass::reachable;
      } else if (cell.necessary_margin >= 0.0) {
        cell.cls = ScanClass::necessary_only;
      } else {
        cell.cls = ScanClass::infeasible;
      }
    }
  };

  unsigned workers = jobs != 0 ? jobs : std::thread::hardware_concurrency();
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(
                                                         std::min<std::size_t>(n, 1024))));
  if (workers == 1) {
    work(0, n);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (n + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      const std::size_t b = std::min(n, w * chunk);
      const std::size_t e = std::min(n, b + chunk);
      pool.emplace_back(work, b, e);
    }
    for (auto& th : pool) th.join();
  }

  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const ScanCell& c = rep.cells[i];
    switch (c.cls) {
      case ScanClass::infeasible:
        ++rep.infeasible;
        break;
      case ScanClass::necessary_only:
        ++rep.necessary_only;
        break;
      case ScanClass::reachable:
        ++rep.reachable;
        break;
    }
    if (c.reachable && c.necessary_margin < -1e-9) ++rep.inclusion_violations;
    if (c.margin_band) ++rep.margin_band;
    if (!c.certified) ++rep.uncertified;
    if (c.anomaly) ++rep.anomalies;
    if (c.cls == ScanClass::necessary_only && c.certified) {
      const double score = std::min(c.necessary_margin, c.boundary_distance);
      if (score > best_score) {
        best_score = score;
        rep.max_gap = GapWitness{i, c.V, c.necessary_margin, c.boundary_distance};
      }
    }
  }
  const std::size_t passing = rep.necessary_only + rep.reachable;
  rep.gap_fraction =
      passing > 0 ? static_cast<double>(rep.necessary_only) / passing : 0.0;
  return rep;
}

void write_scan_csv(const RegionScanReport& rep, std::ostream& os) {
  const Eigen::Index dim = rep.U.size();
  os << "Vx,Vy";
  if (dim == 3) os << ",Vz";
  os << ",necessary_margin,reachable,class\n";
  for (const ScanCell& c : rep.cells) {
    for (Eigen::Index i = 0; i < dim; ++i) os << format_number(c.V(i)) << ',';
    os << format_number(c.necessary_margin) << ','
       << (c.reachable ? "true" : "false") << ',' << to_string(c.cls) << '\n';
  }
}

}  // namespace weaklim
