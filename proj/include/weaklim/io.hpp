// JSON problem files, laminate files and report serialisation. Objects are
// emitted with sorted keys and every number with 17 significant digits so
// that doubles round-trip exactly.
#pragma once

#include "weaklim/laminate.hpp"
#include "weaklim/necessity.hpp"
#include "weaklim/region_scan.hpp"
#include "weaklim/sufficiency.hpp"
#include "weaklim/types.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace weaklim {

using Json = nlohmann::json;

/// %.17g for finite values; "nan", "inf", "-inf" otherwise.
std::string format_number(double x);

/// Compact dump with sorted keys and %.17g numbers (null for non-finite).
std::string dump_json(const Json& j, int indent = 2);

Json to_json(const Vec& v);
/// Throws InvalidInput unless `j` is an array of finite numbers.
Vec vec_from_json(const Json& j, std::string_view what);

struct ProblemSpec {
  double t = 0.0;
  Vec U;
  std::optional<Vec> V;
  double alpha1 = 0.0;
  double alpha0 = 0.0;
  int dim = 2;
  Tolerances tol;
  std::uint64_t seed = 0;
  std::optional<Vec> x;
  std::optional<Vec> a;
  std::optional<double> c;
  std::optional<ScanWindow> window;

  MaterialPair materials() const { return {alpha1, alpha0}; }
  /// Throws InvalidInput when V is missing.
  Triplet triplet() const;
};

/// Parses and validates a problem file. Throws InvalidInput (or a subclass)
/// on any schema or range violation.
ProblemSpec parse_problem(const Json& j);
ProblemSpec parse_problem_text(const std::string& text);

Json to_json(const MaterialPair& m);
Json to_json(const Laminate& lam);

struct LoadedLaminate {
  Laminate laminate;
  std::vector<double> stored_weights;  // as written in the file (may be empty)
};
LoadedLaminate laminate_from_json(const Json& j);

Json to_json(const LaminateReport& rep);
Json to_json(const ReachabilityReport& rep);
Json to_json(const MomentCertificate& cert);
Json to_json(const CertificateReport& rep);
/// Summary only; cells go to CSV.
Json summary_json(const RegionScanReport& rep);

}  // namespace weaklim
