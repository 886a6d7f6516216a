// Shared domain types for two-phase p=4 conductivity mixtures.
//
// Fields are column vectors in R^N with N chosen at runtime. Everything in
// this library works at the level of constant triplets (t, U, V) and finite
// discrete Young measures; no spatial discretisation happens anywhere.
#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace weaklim {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// ---------------------------------------------------------------------------
// Errors. InvalidInput (and its children) are caller mistakes; everything else
// derived from Error is a mathematical outcome (infeasible, outside C, ...).
// ---------------------------------------------------------------------------
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
 public:
  using Error::Error;
};

class DegenerateMaterials : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

class UnsupportedDimension : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

class InfeasibleDirection : public Error {
 public:
  using Error::Error;
};

class InfeasibleWitness : public Error {
 public:
  using Error::Error;
};

class NoPositiveRoot : public Error {
 public:
  using Error::Error;
};

class OutsideC : public Error {
 public:
  OutsideC(const std::string& what, double psi_value)
      : Error(what), psi_value_(psi_value) {}
  double psi_value() const noexcept { return psi_value_; }

 private:
  double psi_value_;
};

class InvariantViolation : public Error {
 public:
  InvariantViolation(const std::string& what, std::size_t atom_index)
      : Error(what), atom_index_(atom_index) {}
  std::size_t atom_index() const noexcept { return atom_index_; }

 private:
  std::size_t atom_index_;
};

enum class Phase { zero = 0, one = 1 };

inline int to_int(Phase p) { return p == Phase::one ? 1 : 0; }
Phase phase_from_int(int value);

// Constitutive law of the atoms: v = alpha*u (linear) or v = alpha*|u|^2*u.
enum class Law { linear, quartic };

std::string_view to_string(Law law);
Law law_from_string(std::string_view name);

/// The two conductivities. Construction enforces alpha1 > alpha0 > 0.
class MaterialPair {
 public:
  MaterialPair(double alpha1, double alpha0);

  double alpha1() const noexcept { return alpha1_; }
  double alpha0() const noexcept { return alpha0_; }
  double alpha(Phase p) const noexcept {
    return p == Phase::one ? alpha1_ : alpha0_;
  }

 private:
  double alpha1_;
  double alpha0_;
};

/// Volume fraction and mean field pair (t, U, V) under test.
struct Triplet {
  Triplet(double t, Vec U, Vec V);

  Eigen::Index dim() const noexcept { return U.size(); }

  double t;
  Vec U;
  Vec V;
};

/// Throws InvalidInput unless t lies in [0, 1].
void require_fraction(double t);

/// Throws InvalidInput when the sizes of a and b differ.
void require_same_dim(const Vec& a, const Vec& b, std::string_view what);

/// Named numerical tolerances. Every entry can be overridden by name.
struct Tolerances {
  double manifold = 1e-12;     // relative, atom on its phase manifold
  double membership = 1e-8;    // absolute, |Phi(x) - V|
  double psi = 1e-8;           // Psi(x) <= psi counts as x in C
  double root = 1e-12;         // boundary root bracketing
  double psd = 1e-9;           // smallest eigenvalue >= -psd
  double equality = 1e-10;     // relative, certificate equalities
  double divcurl = 1e-9;       // relative
  double jump = 1e-10;         // per lamination level
  double phase_mass = 1e-12;
  double mean = 1e-9;          // relative, laminate means vs targets
  double boundary_band = 1e-6; // scan metadata band around margins
  double polygon_samples = 720;
  double sphere_subdivisions = 3;
  double newton_iterations = 200;
  double line_search_halvings = 40;

  /// Override one entry. Unknown keys and non-positive values are rejected.
  void set(std::string_view key, double value);
};

}  // namespace weaklim
