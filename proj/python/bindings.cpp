#include "weaklim/core.hpp"
#include "weaklim/io.hpp"
#include "weaklim/linear_reference.hpp"
#include "weaklim/necessity.hpp"
#include "weaklim/region_scan.hpp"
#include "weaklim/sufficiency.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace weaklim;

namespace {

Triplet triplet(double t, const Vec& U, const Vec& V) { return Triplet(t, U, V); }

// Reports cross the boundary as compact JSON text; the Python side decodes
// them into dicts.
std::string check_reachable(double t, const Vec& U, const Vec& V, double a1,
                            double a0, std::uint64_t seed) {
  const Triplet tr(t, U, V);
  const MaterialPair m(a1, a0);
  Json out = to_json(reachable(tr, m, {}, nullptr, seed));
  out["necessary_margin"] = necessary_margin(tr, m);
  return dump_json(out, -1);
}

std::string build_laminate(double t, const Vec& U, const Vec& x, double a1,
                           double a0) {
  return dump_json(to_json(build_second_order_laminate(t, U, x, MaterialPair(a1, a0))), -1);
}

std::string build_laminate_for_V(double t, const Vec& U, const Vec& V, double a1,
                                 double a0) {
  return dump_json(to_json(build_laminate_for_flux(t, U, V, MaterialPair(a1, a0))), -1);
}

std::string verify_laminate_json(const std::string& text) {
  const LoadedLaminate loaded = laminate_from_json(Json::parse(text));
  return dump_json(to_json(verify_laminate(loaded.laminate, {}, std::nullopt,
                                           loaded.stored_weights)),
                   -1);
}

std::string certificate(double t, const Vec& U, const Vec& V, double a1, double a0) {
  const Triplet tr(t, U, V);
  const MaterialPair m(a1, a0);
  const MomentCertificate cert = build_certificate(tr, m);
  Json out = to_json(verify_certificate(cert, tr, m));
  out["certificate"] = to_json(cert);
  return dump_json(out, -1);
}

py::dict scan(double t, const Vec& U, double a1, double a0, const Vec& lo,
              const Vec& hi, int resolution, unsigned jobs, std::uint64_t seed) {
  const RegionScanReport rep =
      scan_region(t, U, MaterialPair(a1, a0), ScanWindow{lo, hi, resolution}, {}, jobs, seed);
  const auto n = static_cast<Eigen::Index>(rep.cells.size());
  Mat V(n, U.size());
  Vec margin(n);
  Eigen::VectorXi cls(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const ScanCell& c = rep.cells[static_cast<std::size_t>(i)];
    V.row(i) = c.V.transpose();
    margin(i) = c.necessary_margin;
    cls(i) = static_cast<int>(c.cls);
  }
  py::dict out;
  out["summary"] = dump_json(summary_json(rep), -1);
  out["V"] = V;
  out["necessary_margin"] = margin;
  out["cls"] = cls;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, mod) {
  // Later registrations are tried first, so subclasses come after Error.
  py::register_exception<Error>(mod, "Error", PyExc_RuntimeError);
  py::register_exception<InvalidInput>(mod, "InvalidInput", PyExc_ValueError);
  py::register_exception<OutsideC>(mod, "OutsideC", PyExc_ArithmeticError);
  py::register_exception<InfeasibleWitness>(mod, "InfeasibleWitness",
                                            PyExc_ArithmeticError);

  mod.def("gamma", [](double t, double a1, double a0) {
    return gamma(t, MaterialPair(a1, a0));
  });
  mod.def("quartic_minimizer", [](double t, const Vec& U, double a1, double a0) {
    return quartic_minimizer(t, U, MaterialPair(a1, a0));
  });
  mod.def("necessary_margin", [](double t, const Vec& U, const Vec& V, double a1,
                                 double a0) {
    return necessary_margin(triplet(t, U, V), MaterialPair(a1, a0));
  });
  mod.def("psi", [](double t, const Vec& U, const Vec& x, double a1, double a0) {
    return psi(t, U, x, MaterialPair(a1, a0));
  });
  mod.def("phi", [](double t, const Vec& U, const Vec& x, double a1, double a0) {
    return phi_map(t, U, x, MaterialPair(a1, a0));
  });
  mod.def("linear_necessary_margin", [](double t, const Vec& U, const Vec& V,
                                        double a1, double a0) {
    return linear_necessary_margin(t, U, V, MaterialPair(a1, a0));
  });
  mod.def("check_reachable", &check_reachable);
  mod.def("build_laminate", &build_laminate);
  mod.def("build_laminate_for_V", &build_laminate_for_V);
  mod.def("verify_laminate", &verify_laminate_json);
  mod.def("certificate", &certificate);
  mod.def("scan", &scan);
}
