#include "weaklim/types.hpp"

#include <cmath>
#include <map>
#include <sstream>

namespace weaklim {

Phase phase_from_int(int value) {
  if (value == 1) return Phase::one;
  if (value == 0) return Phase::zero;
  throw InvalidInput("phase must be 0 or 1, got " + std::to_string(value));
}

std::string_view to_string(Law law) {
  return law == Law::linear ? "linear" : "quartic";
}

Law law_from_string(std::string_view name) {
  if (name == "linear") return Law::linear;
  if (name == "quartic") return Law::quartic;
  throw InvalidInput("unknown constitutive law '" + std::string(name) + "'");
}

MaterialPair::MaterialPair(double alpha1, double alpha0)
    : alpha1_(alpha1), alpha0_(alpha0) {
  if (!std::isfinite(alpha1) || !std::isfinite(alpha0) || !(alpha0 > 0.0)) {
    throw DegenerateMaterials("conductivities must be finite and positive");
  }
  if (!(alpha1 > alpha0)) {
    std::ostringstream os;
    os << "materials require alpha1 > alpha0 (got alpha1=" << alpha1
       << ", alpha0=" << alpha0 << ")";
    throw DegenerateMaterials(os.str());
  }
}

void require_fraction(double t) {
  if (!(t >= 0.0 && t <= 1.0)) {
    std::ostringstream os;
    os << "volume fraction t must lie in [0,1], got " << t;
    throw InvalidInput(os.str());
  }
}

void require_same_dim(const Vec& a, const Vec& b, std::string_view what) {
  if (a.size() != b.size()) {
    std::ostringstream os;
    os << what << ": dimension mismatch (" << a.size() << " vs " << b.size()
       << ")";
    throw InvalidInput(os.str());
  }
}

Triplet::Triplet(double t_, Vec U_, Vec V_)
    : t(t_), U(std::move(U_)), V(std::move(V_)) {
  require_fraction(t);
  require_same_dim(U, V, "triplet");
  if (U.size() < 2) {
    throw InvalidInput("triplet dimension must be at least 2");
  }
  if (!U.allFinite() || !V.allFinite()) {
    throw InvalidInput("triplet fields must be finite");
  }
}

void Tolerances::set(std::string_view key, double value) {
  static const std::map<std::string_view, double Tolerances::*> fields = {
      {"manifold", &Tolerances::manifold},
      {"membership", &Tolerances::membership},
      {"psi", &Tolerances::psi},
      {"root", &Tolerances::root},
      {"psd", &Tolerances::psd},
      {"equality", &Tolerances::equality},
      {"divcurl", &Tolerances::divcurl},
      {"jump", &Tolerances::jump},
      {"phase_mass", &Tolerances::phase_mass},
      {"mean", &Tolerances::mean},
      {"boundary_band", &Tolerances::boundary_band},
      {"polygon_samples", &Tolerances::polygon_samples},
      {"sphere_subdivisions", &Tolerances::sphere_subdivisions},
      {"newton_iterations", &Tolerances::newton_iterations},
      {"line_search_halvings", &Tolerances::line_search_halvings},
  };
  const auto it = fields.find(key);
  if (it == fields.end()) {
    throw InvalidInput("unknown tolerance '" + std::string(key) + "'");
  }
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw InvalidInput("tolerance '" + std::string(key) +
                       "' must be positive and finite");
  }
  this->*(it->second) = value;
}

}  // namespace weaklim
