#include "weaklim/laminate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace weaklim {

namespace {

double law_exponent_norm(Law law, const Vec& u) {
  const double n2 = u.squaredNorm();
  return law == Law::quartic ? n2 * n2 : n2;
}

struct SubtreeSums {
  double mass = 0.0;
  Vec u;
  Vec v;
};

SubtreeSums accumulate(const LaminateNode& node,
                       const std::vector<PhaseAtom>& atoms,
                       std::vector<LevelResidual>* levels, int depth) {
  if (node.is_leaf()) {
    const PhaseAtom& a = atoms[static_cast<std::size_t>(node.atom)];
    return {a.weight, a.weight * a.u, a.weight * a.v};
  }
  SubtreeSums first = accumulate(node.children[0], atoms, levels, depth + 1);
  SubtreeSums second = accumulate(node.children[1], atoms, levels, depth + 1);
  if (levels != nullptr) {
    const Vec du = first.u / first.mass - second.u / second.mass;
    const Vec dv = first.v / first.mass - second.v / second.mass;
    const double scale = std::max(1.0, du.norm() * dv.norm());
    levels->push_back({depth, node.fraction, std::abs(du.dot(dv)) / scale});
  }
  return {first.mass + second.mass, first.u + second.u, first.v + second.v};
}

void assign_weights(const LaminateNode& node, double mass,
                    std::vector<PhaseAtom>& atoms, std::vector<int>& seen) {
  if (node.is_leaf()) {
    if (node.atom < 0 || static_cast<std::size_t>(node.atom) >= atoms.size()) {
      throw InvalidInput("laminate tree refers to a missing atom");
    }
    if (seen[static_cast<std::size_t>(node.atom)]++ != 0) {
      throw InvalidInput("laminate tree refers to an atom twice");
    }
    atoms[static_cast<std::size_t>(node.atom)].weight = mass;
    return;
  }
  if (node.children.size() != 2) {
    throw InvalidInput("laminate tree nodes must have exactly two children");
  }
  if (!(node.fraction > 0.0 && node.fraction < 1.0)) {
    throw InvalidInput("laminate fractions must lie in (0,1)");
  }
  assign_weights(node.children[0], mass * node.fraction, atoms, seen);
  assign_weights(node.children[1], mass * (1.0 - node.fraction), atoms, seen);
}

double tree_sum(const LaminateNode& node) {
  if (node.is_leaf()) return 1.0;
  return node.fraction * tree_sum(node.children[0]) +
         (1.0 - node.fraction) * tree_sum(node.children[1]);
}

void check_directions(const LaminateNode& node, Eigen::Index dim) {
  if (node.is_leaf()) return;
  if (node.direction.size() != dim) {
    throw InvalidInput("laminate level direction has the wrong dimension");
  }
  for (const auto& c : node.children) check_directions(c, dim);
}

Vec unit_or_e1(const Vec& x) {
  const double n = x.norm();
  if (n > 0.0) return x / n;
  Vec e = Vec::Zero(x.size());
  e(0) = 1.0;
  return e;
}

Vec branch_flux(double t, const Vec& U, const Vec& x, const MaterialPair& m,
                Law law) {
  const Vec u1 = U - (1.0 - t) * x;
  const Vec u0 = U + t * x;
  if (law == Law::linear) {
    return t * m.alpha1() * u1 + (1.0 - t) * m.alpha0() * u0;
  }
  return t * m.alpha1() * u1.squaredNorm() * u1 +
         (1.0 - t) * m.alpha0() * u0.squaredNorm() * u0;
}

PhaseAtom make_atom(Phase phase, const Vec& u, const MaterialPair& m,
                    Law law) {
  const double a = m.alpha(phase);
  Vec v = law == Law::linear ? Vec(a * u) : Vec(a * u.squaredNorm() * u);
  return PhaseAtom{0.0, phase, u, std::move(v)};
}

}  // namespace

LaminateNode LaminateNode::leaf(int atom_index) {
  LaminateNode n;
  n.atom = atom_index;
  return n;
}

LaminateNode LaminateNode::split(double fraction, Vec direction,
                                 LaminateNode first, LaminateNode second) {
  LaminateNode n;
  n.fraction = fraction;
  n.direction = std::move(direction);
  n.children.push_back(std::move(first));
  n.children.push_back(std::move(second));
  return n;
}

Laminate::Laminate(MaterialPair materials, Law law,
                   std::vector<PhaseAtom> atoms, LaminateNode tree)
    : materials_(materials),
      law_(law),
      atoms_(std::move(atoms)),
      tree_(std::move(tree)) {
  if (atoms_.empty()) throw InvalidInput("laminate needs at least one atom");
  const Eigen::Index dim = atoms_.front().u.size();
  for (const auto& a : atoms_) {
    if (a.u.size() != dim || a.v.size() != dim) {
      throw InvalidInput("laminate atoms must share one dimension");
    }
  }
  check_directions(tree_, dim);
  std::vector<int> seen(atoms_.size(), 0);
  assign_weights(tree_, 1.0, atoms_, seen);
  if (std::find(seen.begin(), seen.end(), 0) != seen.end()) {
    throw InvalidInput("laminate has atoms not reachable from the tree");
  }
}

double Laminate::tree_weight_sum() const { return tree_sum(tree_); }

double Laminate::atom_weight_sum() const {
  double s = 0.0;
  for (const auto& a : atoms_) s += a.weight;
  return s;
}

Vec Laminate::law_flux(const PhaseAtom& atom) const {
  const double a = materials_.alpha(atom.phase);
  if (law_ == Law::linear) return a * atom.u;
  return a * atom.u.squaredNorm() * atom.u;
}

Laminate dirac_laminate(Phase phase, const Vec& u, const MaterialPair& m,
                        Law law) {
  return Laminate(m, law, {make_atom(phase, u, m, law)}, LaminateNode::leaf(0));
}

Laminate first_order_laminate(double t, const Vec& U, const Vec& x,
                              const MaterialPair& m, Law law) {
  require_fraction(t);
  require_same_dim(U, x, "first_order_laminate");
  if (t == 1.0) return dirac_laminate(Phase::one, U, m, law);
  if (t == 0.0) return dirac_laminate(Phase::zero, U, m, law);
  std::vector<PhaseAtom> atoms{make_atom(Phase::one, U - (1.0 - t) * x, m, law),
                               make_atom(Phase::zero, U + t * x, m, law)};
  auto tree = LaminateNode::split(t, unit_or_e1(x), LaminateNode::leaf(0),
                                  LaminateNode::leaf(1));
  return Laminate(m, law, std::move(atoms), std::move(tree));
}

Laminate second_order_laminate(double t, const Vec& U, double r,
                               const Vec& x1, const Vec& x0,
                               const MaterialPair& m, Law law) {
  require_fraction(t);
  require_same_dim(U, x1, "second_order_laminate");
  require_same_dim(U, x0, "second_order_laminate");
  if (!(r >= 0.0 && r <= 1.0)) {
    throw InvalidInput("second-order fraction r must lie in [0,1]");
  }
  if (t == 1.0) return dirac_laminate(Phase::one, U, m, law);
  if (t == 0.0) return dirac_laminate(Phase::zero, U, m, law);
  if (r == 1.0) return first_order_laminate(t, U, x1, m, law);
  if (r == 0.0) return first_order_laminate(t, U, x0, m, law);

  std::vector<PhaseAtom> atoms{
      make_atom(Phase::one, U - (1.0 - t) * x1, m, law),
      make_atom(Phase::zero, U + t * x1, m, law),
      make_atom(Phase::one, U - (1.0 - t) * x0, m, law),
      make_atom(Phase::zero, U + t * x0, m, law)};
  const Vec top = orthogonal_unit(branch_flux(t, U, x1, m, law) -
                                  branch_flux(t, U, x0, m, law));
  auto first = LaminateNode::split(t, unit_or_e1(x1), LaminateNode::leaf(0),
                                   LaminateNode::leaf(1));
  auto second = LaminateNode::split(t, unit_or_e1(x0), LaminateNode::leaf(2),
                                    LaminateNode::leaf(3));
  auto tree = LaminateNode::split(r, top, std::move(first), std::move(second));
  return Laminate(m, law, std::move(atoms), std::move(tree));
}

Vec orthogonal_unit(const Vec& w) {
  const Eigen::Index n = w.size();
  Vec e = Vec::Zero(n);
  const double norm = w.norm();
  if (norm == 0.0 || n < 2) {
    e(0) = 1.0;
    return e;
  }
  if (n == 2) {
    e << -w(1) / norm, w(0) / norm;
    return e;
  }
  Eigen::HouseholderQR<Mat> qr(w / norm);
  const Mat q = qr.householderQ();
  return q.col(1);
}

LaminateMoments laminate_moments(const Laminate& lam, const Tolerances& tol) {
  const auto& atoms = lam.atoms();
  const Eigen::Index n = lam.dim();
  LaminateMoments mom;
  mom.U = Vec::Zero(n);
  mom.V = Vec::Zero(n);
  double mass0 = 0.0;
  for (std::size_t k = 0; k < atoms.size(); ++k) {
    const PhaseAtom& a = atoms[k];
    if (!(a.weight > 0.0)) {
      throw InvariantViolation("atom " + std::to_string(k) +
                                   " has a non-positive weight",
                               k);
    }
    const Vec expected = lam.law_flux(a);
    const double denom = std::max(expected.norm(), a.v.norm());
    if (denom > 0.0 && (a.v - expected).norm() / denom > tol.manifold) {
      throw InvariantViolation(
          "atom " + std::to_string(k) + " is off its phase manifold", k);
    }
    mom.U += a.weight * a.u;
    mom.V += a.weight * a.v;
    mom.product_moment += a.weight * a.u.dot(a.v);
    const double q = law_exponent_norm(lam.law(), a.u);
    if (a.phase == Phase::one) {
      mom.t += a.weight;
      mom.q1 += a.weight * q;
    } else {
      mass0 += a.weight;
      mom.q0 += a.weight * q;
    }
  }
  if (mom.t > 0.0) mom.q1 /= mom.t;
  if (mass0 > 0.0) mom.q0 /= mass0;
  return mom;
}

double divcurl_check(const Laminate& lam) {
  const Eigen::Index n = lam.dim();
  Vec U = Vec::Zero(n);
  Vec V = Vec::Zero(n);
  double product = 0.0;
  for (const auto& a : lam.atoms()) {
    U += a.weight * a.u;
    V += a.weight * a.v;
    product += a.weight * a.u.dot(a.v);
  }
  const double uv = U.dot(V);
  return std::abs(product - uv) / std::max(1.0, std::abs(uv));
}

std::vector<LevelResidual> jump_check(const Laminate& lam) {
  std::vector<LevelResidual> levels;
  accumulate(lam.tree(), lam.atoms(), &levels, 0);
  // accumulate() appends children before parents; report top level first.
  std::stable_sort(levels.begin(), levels.end(),
                   [](const LevelResidual& a, const LevelResidual& b) {
                     return a.depth < b.depth;
                   });
  return levels;
}

LaminateReport verify_laminate(const Laminate& lam, const Tolerances& tol,
                               const std::optional<ExpectedMoments>& expected,
                               const std::vector<double>& stored_weights) {
  LaminateReport rep;
  const auto& atoms = lam.atoms();

  rep.tree_weight_sum = lam.tree_weight_sum();
  for (std::size_t k = 0; k < stored_weights.size() && k < atoms.size(); ++k) {
    rep.weight_consistency = std::max(
        rep.weight_consistency, std::abs(stored_weights[k] - atoms[k].weight));
  }
  rep.weights_ok = rep.tree_weight_sum == 1.0 &&
                   std::abs(lam.atom_weight_sum() - 1.0) <= 1e-15 &&
                   rep.weight_consistency <= tol.phase_mass;

  for (std::size_t k = 0; k < atoms.size(); ++k) {
    const Vec expected_v = lam.law_flux(atoms[k]);
    const double denom = std::max(expected_v.norm(), atoms[k].v.norm());
    const double res =
        denom > 0.0 ? (atoms[k].v - expected_v).norm() / denom : 0.0;
    if (res > rep.manifold_max) {
      rep.manifold_max = res;
      rep.manifold_worst_atom = k;
    }
  }
  rep.manifold_ok = rep.manifold_max <= tol.manifold;

  for (const auto& level : jump_check(lam)) {
    rep.jump_max = std::max(rep.jump_max, level.residual);
  }
  rep.jump_ok = rep.jump_max <= tol.jump;

  rep.divcurl = divcurl_check(lam);
  rep.divcurl_ok = rep.divcurl <= tol.divcurl;

  // Moments without the manifold throw, so broken files still get a report.
  const Eigen::Index n = lam.dim();
  rep.moments.U = Vec::Zero(n);
  rep.moments.V = Vec::Zero(n);
  double mass0 = 0.0;
  for (const auto& a : atoms) {
    rep.moments.U += a.weight * a.u;
    rep.moments.V += a.weight * a.v;
    rep.moments.product_moment += a.weight * a.u.dot(a.v);
    const double q = law_exponent_norm(lam.law(), a.u);
    if (a.phase == Phase::one) {
      rep.moments.t += a.weight;
      rep.moments.q1 += a.weight * q;
    } else {
      mass0 += a.weight;
      rep.moments.q0 += a.weight * q;
    }
  }
  if (rep.moments.t > 0.0) rep.moments.q1 /= rep.moments.t;
  if (mass0 > 0.0) rep.moments.q0 /= mass0;
  rep.phase_mass = rep.moments.t;

  if (expected) {
    rep.phase_mass_error = std::abs(rep.moments.t - expected->t);
    rep.mean_u_error = (rep.moments.U - expected->U).norm() /
                       std::max(1.0, expected->U.norm());
    rep.mean_v_error = (rep.moments.V - expected->V).norm() /
                       std::max(1.0, expected->V.norm());
    rep.expected_ok = *rep.phase_mass_error <= tol.phase_mass &&
                      *rep.mean_u_error <= tol.mean &&
                      *rep.mean_v_error <= tol.mean;
  }

  rep.pass = rep.weights_ok && rep.manifold_ok && rep.jump_ok &&
             rep.divcurl_ok && rep.expected_ok;
  return rep;
}

}  // namespace weaklim
