#include "commands.hpp"

#include "weaklim/core.hpp"
#include "weaklim/io.hpp"
#include "weaklim/laminate.hpp"
#include "weaklim/linear_reference.hpp"
#include "weaklim/necessity.hpp"
#include "weaklim/region_scan.hpp"
#include "weaklim/sufficiency.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

namespace weaklim::cli {

namespace {

struct Options {
  std::string problem;
  std::string format = "json";
  std::vector<std::string> tol;
  std::optional<std::uint64_t> seed;
  unsigned jobs = 0;
  std::string x;
  std::string a;
  std::optional<double> c;
  std::string lo;
  std::string hi;
  int resolution = 0;
  std::string csv_path;
  std::string expect;
  bool emit_laminate = false;
};

std::string read_text(const std::string& path) {
  if (path == "-") {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json read_json(const std::string& path) {
  try {
    return Json::parse(read_text(path));
  } catch (const Json::parse_error& e) {
    throw InvalidInput("malformed JSON in '" + path + "': " + e.what());
  }
}

Vec parse_list(const std::string& text, const char* what) {
  std::vector<double> vals;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const double v = std::stod(item, &used);
      if (used != item.size() || !std::isfinite(v)) throw std::invalid_argument(item);
      vals.push_back(v);
    } catch (const std::exception&) {
      throw InvalidInput(std::string("--") + what + " expects comma-separated numbers");
    }
  }
  return Eigen::Map<Vec>(vals.data(), static_cast<Eigen::Index>(vals.size()));
}

void require_dim(const Vec& v, int dim, const char* what) {
  if (v.size() != dim) {
    std::ostringstream os;
    os << what << " has length " << v.size() << ", expected dim = " << dim;
    throw InvalidInput(os.str());
  }
}

ProblemSpec load_problem(const Options& o) {
  ProblemSpec p = parse_problem(read_json(o.problem));
  for (const std::string& kv : o.tol) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw InvalidInput("--tol expects KEY=VALUE");
    double value = 0.0;
    try {
      value = std::stod(kv.substr(eq + 1));
    } catch (const std::exception&) {
      throw InvalidInput("--tol value for '" + kv.substr(0, eq) + "' is not a number");
    }
    p.tol.set(kv.substr(0, eq), value);
  }
  if (o.seed) p.seed = *o.seed;
  if (!o.x.empty()) {
    p.x = parse_list(o.x, "x");
    require_dim(*p.x, p.dim, "--x");
  }
  if (!o.a.empty()) {
    p.a = parse_list(o.a, "a");
    require_dim(*p.a, p.dim, "--a");
  }
  if (o.c) p.c = o.c;
  return p;
}

// Flattens nested objects into dotted keys; arrays become ';'-joined cells.
void flatten(const Json& j, const std::string& prefix,
             std::vector<std::pair<std::string, std::string>>& rows) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), rows);
    }
    return;
  }
  if (j.is_array() && std::all_of(j.begin(), j.end(),
                                  [](const Json& e) { return e.is_number(); })) {
    std::string cell;
    for (std::size_t i = 0; i < j.size(); ++i) {
      if (i) cell += ';';
      cell += format_number(j[i].get<double>());
    }
    rows.emplace_back(prefix, cell);
    return;
  }
  if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) {
      flatten(j[i], prefix + "." + std::to_string(i), rows);
    }
    return;
  }
  if (j.is_number_float()) {
    rows.emplace_back(prefix, format_number(j.get<double>()));
  } else if (j.is_string()) {
    rows.emplace_back(prefix, j.get<std::string>());
  } else {
    rows.emplace_back(prefix, j.dump());
  }
}

void emit(const Json& j, const Options& o, std::ostream& out) {
  if (o.format == "csv") {
    std::vector<std::pair<std::string, std::string>> rows;
    flatten(j, "", rows);
    out << "key,value\n";
    for (const auto& [k, v] : rows) out << k << ',' << v << '\n';
  } else {
    out << dump_json(j) << '\n';
  }
}

bool margin_passes(double margin, double scale, const Tolerances& tol) {
  return margin >= -tol.equality * std::max(1.0, std::abs(scale));
}

int cmd_check_necessary(const Options& o, std::ostream& out) {
  const ProblemSpec p = load_problem(o);
  const Triplet tr = p.triplet();
  const MaterialPair m = p.materials();
  const double margin = necessary_margin(tr, m);
  const bool ok = margin_passes(margin, tr.U.dot(tr.V), p.tol);
  emit({{"margin", margin}, {"pass", ok}, {"gamma", gamma(tr.t, m)}}, o, out);
  return ok ? pass : math_failure;
}

int cmd_check_reachable(const Options& o, std::ostream& out) {
  const ProblemSpec p = load_problem(o);
  const Triplet tr = p.triplet();
  const MaterialPair m = p.materials();
  const ReachabilityReport rep = reachable(tr, m, p.tol, nullptr, p.seed);
  Json j = to_json(rep);
  const double margin = necessary_margin(tr, m);
  j["necessary_margin"] = margin;
  j["necessary_pass"] = margin_passes(margin, tr.U.dot(tr.V), p.tol);
  emit(j, o, out);
  return rep.reachable ? pass : math_failure;
}

int cmd_build_laminate(const Options& o, std::ostream& out) {
  const ProblemSpec p = load_problem(o);
  const MaterialPair m = p.materials();
  if (p.x) {
    emit(to_json(build_second_order_laminate(p.t, p.U, *p.x, m, p.tol)), o, out);
  } else if (p.V) {
    emit(to_json(build_laminate_for_flux(p.t, p.U, *p.V, m, p.tol)), o, out);
  } else {
    throw InvalidInput("build-laminate needs 'x' (or 'V') in the problem or --x");
  }
  return pass;
}

int cmd_verify_laminate(const Options& o, std::ostream& out) {
  const LoadedLaminate loaded = laminate_from_json(read_json(o.problem));
  Tolerances tol;
  std::optional<ExpectedMoments> expected;
  if (!o.expect.empty()) {
    const ProblemSpec p = parse_problem(read_json(o.expect));
    tol = p.tol;
    const Vec V = p.V ? *p.V
                      : (p.x ? phi_map(p.t, p.U, *p.x, p.materials())
                             : throw InvalidInput("--expect needs 'V' or 'x'"));
    expected = ExpectedMoments{p.t, p.U, V};
  }
  for (const std::string& kv : o.tol) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw InvalidInput("--tol expects KEY=VALUE");
    tol.set(kv.substr(0, eq), std::stod(kv.substr(eq + 1)));
  }
  const LaminateReport rep =
      verify_laminate(loaded.laminate, tol, expected, loaded.stored_weights);
  emit(to_json(rep), o, out);
  return rep.pass ? pass : math_failure;
}

int cmd_scan(const Options& o, std::ostream& out) {
  ProblemSpec p = load_problem(o);
  ScanWindow win;
  if (p.window) win = *p.window;
  if (!o.lo.empty()) win.lo = parse_list(o.lo, "lo");
  if (!o.hi.empty()) win.hi = parse_list(o.hi, "hi");
  if (o.resolution > 0) win.resolution = o.resolution;
  if (win.lo.size() == 0 || win.hi.size() == 0 || win.resolution == 0) {
    throw InvalidInput("scan needs a window (lo, hi) and a resolution");
  }
  win.validate(p.dim);
  const RegionScanReport rep =
      scan_region(p.t, p.U, p.materials(), win, p.tol, o.jobs, p.seed);
  if (o.format == "csv") {
    write_scan_csv(rep, out);
  } else {
    if (!o.csv_path.empty()) {
      std::ofstream f(o.csv_path);
      if (!f) throw InvalidInput("cannot write '" + o.csv_path + "'");
      write_scan_csv(rep, f);
    }
    out << dump_json(summary_json(rep)) << '\n';
  }
  return rep.inclusion_violations == 0 ? pass : math_failure;
}

int cmd_linear_check(const Options& o, std::ostream& out) {
  const ProblemSpec p = load_problem(o);
  const MaterialPair m = p.materials();
  if (!p.x) throw InvalidInput("linear-check needs 'x' in the problem or --x");
  const double margin = linear_condition_margin(p.t, p.U, *p.x, m);
  const double scale = std::max(1.0, p.U.norm() * p.x->norm());
  const bool feasible = margin >= -1e-12 * scale;
  Json j = {{"condition_margin", margin},
            {"feasible", feasible},
            {"linear_V", to_json(linear_V(p.t, p.U, *p.x, m))},
            {"linear_minimizer", to_json(linear_minimizer(p.t, p.U, m))}};
  if (p.V) j["necessary_margin"] = linear_necessary_margin(p.t, p.U, *p.V, m);
  if (o.emit_laminate && feasible) {
    const Laminate lam = linear_build_laminate(p.t, p.U, *p.x, m);
    j["laminate"] = to_json(lam);
    j["verification"] = to_json(verify_laminate(lam, p.tol));
  }
  emit(j, o, out);
  return feasible ? pass : math_failure;
}

int cmd_certificate(const Options& o, std::ostream& out, std::ostream& err) {
  const ProblemSpec p = load_problem(o);
  const Triplet tr = p.triplet();
  const MaterialPair m = p.materials();
  const Vec a = p.a ? *p.a : quartic_minimizer(tr.t, tr.U, m);
  const double c = p.c ? *p.c : balanced_c(tr, m, a);
  try {
    const MomentCertificate cert = build_certificate(tr, m, a, c, p.tol);
    const CertificateReport rep = verify_certificate(cert, tr, m, p.tol);
    emit({{"certificate", to_json(cert)},
          {"verification", to_json(rep)},
          {"pass", rep.pass}},
         o, out);
    return rep.pass ? pass : math_failure;
  } catch (const InfeasibleWitness& e) {
    err << "infeasible: " << e.what() << '\n';
    emit({{"pass", false}, {"error", e.what()}, {"a", to_json(a)}, {"c", c}}, o, out);
    return math_failure;
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Feasibility analysis for weak limits of two-phase p=4 mixtures", "weaklim"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub, const char* positional) {
    sub->add_option(positional, o.problem, "JSON input file ('-' for stdin)")
        ->required();
    sub->add_option("--format", o.format, "Output format")
        ->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--tol", o.tol, "Tolerance override KEY=VALUE (repeatable)");
  };
  auto problem = [&](CLI::App* sub) {
    common(sub, "problem");
    sub->add_option("--seed", o.seed, "Seed for multistart ordering");
  };

  std::map<CLI::App*, std::function<int()>> handlers;
  auto* nec = app.add_subcommand("check-necessary", "Test the gamma bound on V.U");
  problem(nec);
  handlers[nec] = [&] { return cmd_check_necessary(o, out); };

  auto* reach = app.add_subcommand("check-reachable", "Decide V in Phi(C)");
  problem(reach);
  handlers[reach] = [&] { return cmd_check_reachable(o, out); };

  auto* build = app.add_subcommand("build-laminate",
                                   "Emit a second-order laminate for x (or V)");
  problem(build);
  build->add_option("--x", o.x, "Lamination direction, comma-separated");
  handlers[build] = [&] { return cmd_build_laminate(o, out); };

  auto* verify = app.add_subcommand("verify-laminate", "Check a laminate file");
  common(verify, "laminate");
  verify->add_option("--expect", o.expect, "Problem file with target t, U, V (or x)");
  handlers[verify] = [&] { return cmd_verify_laminate(o, out); };

  auto* scan = app.add_subcommand("scan", "Classify a grid of fluxes V");
  problem(scan);
  scan->add_option("--lo", o.lo, "Window lower corner, comma-separated");
  scan->add_option("--hi", o.hi, "Window upper corner, comma-separated");
  scan->add_option("--resolution", o.resolution, "Cells per axis")
      ->check(CLI::PositiveNumber);
  scan->add_option("--jobs", o.jobs, "Worker threads (0 = all cores)");
  scan->add_option("--csv", o.csv_path, "Also write the cell CSV to this file");
  handlers[scan] = [&] { return cmd_scan(o, out); };

  auto* lin = app.add_subcommand("linear-check", "Linear-case margins for x");
  problem(lin);
  lin->add_option("--x", o.x, "Lamination direction, comma-separated");
  lin->add_flag("--emit-laminate", o.emit_laminate, "Include the linear laminate");
  handlers[lin] = [&] { return cmd_linear_check(o, out); };

  auto* cert = app.add_subcommand("certificate", "Build and verify a moment certificate");
  problem(cert);
  cert->add_option("--a", o.a, "Witness vector a, comma-separated");
  cert->add_option("--c", o.c, "Witness scalar c");
  handlers[cert] = [&] { return cmd_certificate(o, out, err); };

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(std::move(reversed));
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return pass;
    }
    app.exit(e, err, err);
    return input_error;
  }

  try {
    for (auto& [sub, run] : handlers) {
      if (sub->parsed()) return run();
    }
    return input_error;
  } catch (const InvalidInput& e) {
    err << "input error: " << e.what() << '\n';
    return input_error;
  } catch (const OutsideC& e) {
    err << "outside C: " << e.what() << '\n';
    return math_failure;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return math_failure;
  } catch (const Json::exception& e) {
    err << "input error: " << e.what() << '\n';
    return input_error;
  } catch (const std::invalid_argument& e) {
    err << "input error: " << e.what() << '\n';
    return input_error;
  }
}

}  // namespace weaklim::cli
