#include "weaklim/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace weaklim {

namespace {

void dump_value(const Json& j, int indent, int depth, std::string& out) {
  const auto newline = [&](int d) {
    if (indent < 0) return;
    out += '\n';
    out.append(static_cast<std::size_t>(indent * d), ' ');
  };
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {  // std::map: sorted
        if (!first) out += ',';
        first = false;
        newline(depth + 1);
        out += Json(it.key()).dump();
        out += indent < 0 ? ":" : ": ";
        dump_value(it.value(), indent, depth + 1, out);
      }
      newline(depth);
      out += '}';
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      const bool flat = std::all_of(j.begin(), j.end(), [](const Json& e) {
        return e.is_number() || e.is_boolean() || e.is_null();
      });
      out += '[';
      bool first = true;
      for (const Json& e : j) {
        if (!first) out += flat && indent >= 0 ? ", " : ",";
        first = false;
        if (!flat) newline(depth + 1);
        dump_value(e, indent, depth + 1, out);
      }
      if (!flat) newline(depth);
      out += ']';
      return;
    }
    case Json::value_t::number_float: {
      const double x = j.get<double>();
      out += std::isfinite(x) ? format_number(x) : "null";
      return;
    }
    default:
      out += j.dump();
  }
}

double number_field(const Json& j, const char* key) {
  if (!j.contains(key)) throw InvalidInput(std::string("missing field '") + key + "'");
  const Json& v = j.at(key);
  if (!v.is_number()) throw InvalidInput(std::string("field '") + key + "' must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw InvalidInput(std::string("field '") + key + "' must be finite");
  return x;
}

const Json& object_field(const Json& j, const char* key) {
  if (!j.contains(key)) throw InvalidInput(std::string("missing field '") + key + "'");
  const Json& v = j.at(key);
  if (!v.is_object()) throw InvalidInput(std::string("field '") + key + "' must be an object");
  return v;
}

Json equality_list(const std::vector<ConstraintResidual>& eqs) {
  Json arr = Json::array();
  for (const auto& e : eqs) {
    arr.push_back({{"name", e.name}, {"residual", e.residual}, {"ok", e.ok}});
  }
  return arr;
}

Json matrix_json(const Mat& M) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index k = 0; k < M.cols(); ++k) row.push_back(M(i, k));
    rows.push_back(row);
  }
  return rows;
}

Json block_json(const PhaseBlock& b) {
  return {{"Q11", matrix_json(b.Q11)}, {"Q12", to_json(b.Q12)}, {"Q22", b.Q22},
          {"U", to_json(b.U)},     {"s", b.s},              {"u", to_json(b.u)},
          {"sigma", b.sigma},      {"gamma", b.gamma}};
}

Json node_to_json(const LaminateNode& n) {
  if (n.is_leaf()) return {{"atom", n.atom}};
  Json children = Json::array();
  for (const auto& c : n.children) children.push_back(node_to_json(c));
  return {{"fraction", n.fraction},
          {"direction", to_json(n.direction)},
          {"children", children}};
}

LaminateNode node_from_json(const Json& j) {
  if (!j.is_object()) throw InvalidInput("laminate tree nodes must be objects");
  if (j.contains("atom")) {
    const Json& a = j.at("atom");
    if (!a.is_number_integer()) throw InvalidInput("leaf 'atom' must be an integer index");
    return LaminateNode::leaf(a.get<int>());
  }
  if (!j.contains("children") || !j.at("children").is_array()) {
    throw InvalidInput("internal laminate nodes need a 'children' array");
  }
  const Json& ch = j.at("children");
  if (ch.size() != 2) throw InvalidInput("laminate tree nodes must have exactly two children");
  if (!j.contains("direction")) throw InvalidInput("internal laminate nodes need a 'direction'");
  return LaminateNode::split(number_field(j, "fraction"),
                             vec_from_json(j.at("direction"), "direction"),
                             node_from_json(ch[0]), node_from_json(ch[1]));
}

}  // namespace

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string dump_json(const Json& j, int indent) {
  std::string out;
  dump_value(j, indent, 0, out);
  return out;
}

Json to_json(const Vec& v) {
  Json arr = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

Vec vec_from_json(const Json& j, std::string_view what) {
  if (!j.is_array()) {
    throw InvalidInput("field '" + std::string(what) + "' must be an array");
  }
  Vec v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number() || !std::isfinite(j[i].get<double>())) {
      throw InvalidInput("field '" + std::string(what) +
                         "' must contain finite numbers");
    }
    v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  return v;
}

Triplet ProblemSpec::triplet() const {
  if (!V) throw InvalidInput("this command needs 'V' in the problem file");
  return Triplet(t, U, *V);
}

ProblemSpec parse_problem(const Json& j) {
  if (!j.is_object()) throw InvalidInput("problem file must be a JSON object");
  ProblemSpec p;
  p.t = number_field(j, "t");
  require_fraction(p.t);
  if (!j.contains("U")) throw InvalidInput("missing field 'U'");
  p.U = vec_from_json(j.at("U"), "U");
  p.alpha1 = number_field(j, "alpha1");
  p.alpha0 = number_field(j, "alpha0");
  (void)p.materials();  // validates alpha1 > alpha0 > 0
  if (j.contains("dim")) {
    if (!j.at("dim").is_number_integer()) throw InvalidInput("'dim' must be an integer");
    p.dim = j.at("dim").get<int>();
  } else {
    p.dim = static_cast<int>(p.U.size());
  }
  if (p.dim < 2) throw InvalidInput("'dim' must be at least 2");
  auto check_len = [&](const Vec& v, const char* name) {
    if (v.size() != p.dim) {
      std::ostringstream os;
      os << "field '" << name << "' has length " << v.size() << ", expected dim = "
         << p.dim;
      throw InvalidInput(os.str());
    }
  };
  check_len(p.U, "U");
  for (const char* key : {"V", "x", "a"}) {
    if (!j.contains(key)) continue;
    Vec v = vec_from_json(j.at(key), key);
    check_len(v, key);
    if (key[0] == 'V') p.V = std::move(v);
    else if (key[0] == 'x') p.x = std::move(v);
    else p.a = std::move(v);
  }
  if (j.contains("c")) p.c = number_field(j, "c");
  if (j.contains("tolerances")) {
    const Json& tol = object_field(j, "tolerances");
    for (auto it = tol.begin(); it != tol.end(); ++it) {
      if (!it.value().is_number()) {
        throw InvalidInput("tolerance '" + it.key() + "' must be a number");
      }
      p.tol.set(it.key(), it.value().get<double>());
    }
  }
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned() && !(j.at("seed").is_number_integer() &&
                                                j.at("seed").get<long long>() >= 0)) {
      throw InvalidInput("'seed' must be a non-negative integer");
    }
    p.seed = j.at("seed").get<std::uint64_t>();
  }
  if (j.contains("window")) {
    const Json& w = object_field(j, "window");
    ScanWindow win;
    if (!w.contains("lo") || !w.contains("hi")) {
      throw InvalidInput("'window' needs 'lo' and 'hi' arrays");
    }
    win.lo = vec_from_json(w.at("lo"), "window.lo");
    win.hi = vec_from_json(w.at("hi"), "window.hi");
    const Json* res = w.contains("resolution") ? &w.at("resolution")
                      : j.contains("resolution") ? &j.at("resolution")
                                                 : nullptr;
    if (res == nullptr) throw InvalidInput("scan window needs 'resolution'");
    if (!res->is_number_integer()) throw InvalidInput("'resolution' must be an integer");
    win.resolution = res->get<int>();
    win.validate(p.dim);
    p.window = std::move(win);
  }
  return p;
}

ProblemSpec parse_problem_text(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw InvalidInput(std::string("malformed JSON: ") + e.what());
  }
  return parse_problem(j);
}

Json to_json(const MaterialPair& m) {
  return {{"alpha1", m.alpha1()}, {"alpha0", m.alpha0()}};
}

Json to_json(const Laminate& lam) {
  Json atoms = Json::array();
  for (const PhaseAtom& a : lam.atoms()) {
    atoms.push_back({{"weight", a.weight},
                     {"phase", to_int(a.phase)},
                     {"u", to_json(a.u)},
                     {"v", to_json(a.v)}});
  }
  return {{"materials", to_json(lam.materials())},
          {"law", std::string(to_string(lam.law()))},
          {"tree", node_to_json(lam.tree())},
          {"atoms", atoms}};
}

LoadedLaminate laminate_from_json(const Json& j) {
  if (!j.is_object()) throw InvalidInput("laminate file must be a JSON object");
  const Json& mat = object_field(j, "materials");
  const MaterialPair m(number_field(mat, "alpha1"), number_field(mat, "alpha0"));
  Law law = Law::quartic;
  if (j.contains("law")) {
    if (!j.at("law").is_string()) throw InvalidInput("'law' must be a string");
    law = law_from_string(j.at("law").get<std::string>());
  }
  if (!j.contains("atoms") || !j.at("atoms").is_array()) {
    throw InvalidInput("laminate file needs an 'atoms' array");
  }
  std::vector<PhaseAtom> atoms;
  std::vector<double> stored;
  bool all_weights = true;
  for (const Json& a : j.at("atoms")) {
    if (!a.is_object()) throw InvalidInput("atoms must be objects");
    PhaseAtom atom;
    if (!a.contains("phase") || !a.at("phase").is_number_integer()) {
      throw InvalidInput("atom 'phase' must be 0 or 1");
    }
    atom.phase = phase_from_int(a.at("phase").get<int>());
    if (!a.contains("u") || !a.contains("v")) throw InvalidInput("atoms need 'u' and 'v'");
    atom.u = vec_from_json(a.at("u"), "u");
    atom.v = vec_from_json(a.at("v"), "v");
    if (atom.u.size() != atom.v.size()) throw InvalidInput("atom 'u' and 'v' differ in length");
    if (a.contains("weight")) {
      atom.weight = number_field(a, "weight");
      stored.push_back(atom.weight);
    } else {
      all_weights = false;
    }
    atoms.push_back(std::move(atom));
  }
  if (!all_weights) stored.clear();
  LaminateNode tree = j.contains("tree") ? node_from_json(j.at("tree"))
                                         : LaminateNode::leaf(0);
  return {Laminate(m, law, std::move(atoms), std::move(tree)), std::move(stored)};
}

Json to_json(const LaminateReport& rep) {
  Json j = {{"tree_weight_sum", rep.tree_weight_sum},
            {"weight_consistency", rep.weight_consistency},
            {"phase_mass", rep.phase_mass},
            {"manifold_max", rep.manifold_max},
            {"manifold_worst_atom", rep.manifold_worst_atom},
            {"jump_max", rep.jump_max},
            {"divcurl", rep.divcurl},
            {"weights_ok", rep.weights_ok},
            {"manifold_ok", rep.manifold_ok},
            {"jump_ok", rep.jump_ok},
            {"divcurl_ok", rep.divcurl_ok},
            {"expected_ok", rep.expected_ok},
            {"pass", rep.pass}};
  j["moments"] = {{"t", rep.moments.t},
                  {"U", to_json(rep.moments.U)},
                  {"V", to_json(rep.moments.V)},
                  {"q1", rep.moments.q1},
                  {"q0", rep.moments.q0},
                  {"product_moment", rep.moments.product_moment}};
  if (rep.phase_mass_error) j["phase_mass_error"] = *rep.phase_mass_error;
  if (rep.mean_u_error) j["mean_u_error"] = *rep.mean_u_error;
  if (rep.mean_v_error) j["mean_v_error"] = *rep.mean_v_error;
  return j;
}

Json to_json(const ReachabilityReport& rep) {
  Json j = {{"reachable", rep.reachable},
            {"certified", rep.certified},
            {"method", rep.method},
            {"newton_found", rep.newton_found},
            {"anomaly", rep.anomaly}};
  if (rep.x_solution) j["x_solution"] = to_json(*rep.x_solution);
  if (rep.r) j["r"] = *rep.r;
  if (rep.x1) j["x1"] = to_json(*rep.x1);
  if (rep.x0) j["x0"] = to_json(*rep.x0);
  if (rep.flux_residual) j["flux_residual"] = *rep.flux_residual;
  if (rep.psi_value) j["psi_value"] = *rep.psi_value;
  if (rep.oracle_inside) j["oracle_inside"] = *rep.oracle_inside;
  if (rep.boundary_distance) j["boundary_distance"] = *rep.boundary_distance;
  return j;
}

Json to_json(const MomentCertificate& cert) {
  return {{"t", cert.t},
          {"phase1", block_json(cert.one)},
          {"phase0", block_json(cert.zero)},
          {"a", to_json(cert.a)},
          {"b", to_json(cert.b)},
          {"c", cert.c}};
}

Json to_json(const CertificateReport& rep) {
  return {{"equalities", equality_list(rep.equalities)},
          {"psd_phase1_mineig", rep.psd_one_mineig},
          {"psd_phase0_mineig", rep.psd_zero_mineig},
          {"psd_phase1_ok", rep.psd_one_ok},
          {"psd_phase0_ok", rep.psd_zero_ok},
          {"second_moment_ok", rep.second_moment_ok},
          {"pass", rep.pass}};
}

Json summary_json(const RegionScanReport& rep) {
  Json j = {{"t", rep.t},
            {"U", to_json(rep.U)},
            {"alpha1", rep.alpha1},
            {"alpha0", rep.alpha0},
            {"window",
             {{"lo", to_json(rep.window.lo)},
              {"hi", to_json(rep.window.hi)},
              {"resolution", rep.window.resolution}}},
            {"cells", rep.cells.size()},
            {"counts",
             {{"infeasible", rep.infeasible},
              {"necessary_only", rep.necessary_only},
              {"reachable", rep.reachable}}},
            {"gap_fraction", rep.gap_fraction},
            {"inclusion_violations", rep.inclusion_violations},
            {"margin_band", rep.margin_band},
            {"uncertified", rep.uncertified},
            {"anomalies", rep.anomalies}};
  if (rep.max_gap) {
    j["max_gap"] = {{"index", rep.max_gap->index},
                    {"V", to_json(rep.max_gap->V)},
                    {"necessary_margin", rep.max_gap->necessary_margin},
                    {"boundary_distance", rep.max_gap->boundary_distance}};
  } else {
    j["max_gap"] = nullptr;
  }
  if (rep.image_convex) j["image_convex"] = *rep.image_convex;
  return j;
}

}  // namespace weaklim
