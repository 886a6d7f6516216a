// Finite laminates (discrete Young measures with a lamination tree) and the
// oracles that check them: moments, div-curl product identity and jump
// orthogonality at every level.
#pragma once

#include "weaklim/types.hpp"

#include <optional>
#include <vector>

namespace weaklim {

struct PhaseAtom {
  double weight = 0.0;
  Phase phase = Phase::one;
  Vec u;
  Vec v;
};

/// One level of the lamination tree. Internal nodes have exactly two
/// children; the first carries `fraction` of the node's mass. Leaves refer
/// to an atom.
struct LaminateNode {
  double fraction = 1.0;
  Vec direction;
  std::vector<LaminateNode> children;
  int atom = -1;

  bool is_leaf() const noexcept { return children.empty(); }
  static LaminateNode leaf(int atom_index);
  static LaminateNode split(double fraction, Vec direction, LaminateNode first,
                            LaminateNode second);
};

class Laminate {
 public:
  /// Atom weights are recomputed from the tree (products of fractions), so
  /// stored weights never drift from the construction fractions.
  Laminate(MaterialPair materials, Law law, std::vector<PhaseAtom> atoms,
           LaminateNode tree);

  const MaterialPair& materials() const noexcept { return materials_; }
  Law law() const noexcept { return law_; }
  const std::vector<PhaseAtom>& atoms() const noexcept { return atoms_; }
  const LaminateNode& tree() const noexcept { return tree_; }
  Eigen::Index dim() const noexcept { return atoms_.front().u.size(); }

  /// Sum of atom weights accumulated through the tree. Exactly 1 when every
  /// fraction f satisfies f + (1 - f) == 1, which holds for all doubles in
  /// [0, 1].
  double tree_weight_sum() const;

  /// Direct sum over the atom list.
  double atom_weight_sum() const;

  /// Flux prescribed by the law for an atom.
  Vec law_flux(const PhaseAtom& atom) const;

 private:
  MaterialPair materials_;
  Law law_;
  std::vector<PhaseAtom> atoms_;
  LaminateNode tree_;
};

/// Single Dirac mass on one phase manifold.
Laminate dirac_laminate(Phase phase, const Vec& u, const MaterialPair& m,
                        Law law = Law::quartic);

/// Two atoms with phase-1 weight t: u1 = U - (1-t)x, u0 = U + t x. The level
/// normal is x/|x| (e1 when x = 0).
Laminate first_order_laminate(double t, const Vec& U, const Vec& x,
                              const MaterialPair& m, Law law = Law::quartic);

/// Two first-order branches sharing the mean gradient U, mixed with fraction
/// r along a normal orthogonal to the difference of their mean fluxes.
Laminate second_order_laminate(double t, const Vec& U, double r,
                               const Vec& x1, const Vec& x0,
                               const MaterialPair& m, Law law = Law::quartic);

/// Unit vector orthogonal to w; deterministic (first vector of an orthonormal
/// basis of the complement). e1 when w vanishes.
Vec orthogonal_unit(const Vec& w);

struct LaminateMoments {
  double t = 0.0;  // phase-1 mass
  Vec U;
  Vec V;
  double q1 = 0.0;  // phase-conditional |u|^p moments (p = 4 quartic, 2 linear)
  double q0 = 0.0;
  double product_moment = 0.0;  // sum w u.v
};

/// Throws InvariantViolation (with the atom index) when an atom is off its
/// manifold or carries a non-positive weight.
LaminateMoments laminate_moments(const Laminate& lam,
                                 const Tolerances& tol = {});

/// |sum w u.v - U.V| / max(1, |U.V|).
double divcurl_check(const Laminate& lam);

struct LevelResidual {
  int depth = 0;
  double fraction = 0.0;
  double residual = 0.0;  // |du.dv| / max(1, |du||dv|)
};

/// Jump orthogonality between the children means at every internal node,
/// in depth-first order.
std::vector<LevelResidual> jump_check(const Laminate& lam);

struct LaminateReport {
  double tree_weight_sum = 0.0;
  double weight_consistency = 0.0;  // max |stored - tree product| (file input)
  double phase_mass = 0.0;
  double manifold_max = 0.0;   // relative
  std::size_t manifold_worst_atom = 0;
  double jump_max = 0.0;
  double divcurl = 0.0;
  std::optional<double> phase_mass_error;  // vs expected t
  std::optional<double> mean_u_error;      // relative, vs expected U
  std::optional<double> mean_v_error;      // relative, vs expected V
  LaminateMoments moments;
  bool weights_ok = false;
  bool manifold_ok = false;
  bool jump_ok = false;
  bool divcurl_ok = false;
  bool expected_ok = true;
  bool pass = false;
};

struct ExpectedMoments {
  double t;
  Vec U;
  Vec V;
};

/// Runs every oracle and reports instead of throwing.
LaminateReport verify_laminate(
    const Laminate& lam, const Tolerances& tol = {},
    const std::optional<ExpectedMoments>& expected = std::nullopt,
    const std::vector<double>& stored_weights = {});

}  // namespace weaklim
