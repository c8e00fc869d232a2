#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "ptqm/scanner.hpp"
#include "ptqm/spectrum.hpp"

namespace ptqm {

inline constexpr const char* kToolVersion = "1.0.0";

struct RunConfig {
  std::string command;  ///< solve | expect | verify | scan
  std::string potential;
  std::vector<double> params;
  double lambda = 0.0;
  double grid_L = 10.0;
  std::size_t grid_N = 2001;
  int states = 4;
  /// start, end, step
  std::optional<std::array<double, 3>> lambda_range;
  std::vector<std::string> ops;        ///< empty means the full operator menu
  std::string definition = "both";     ///< hermitian | pt | both
  std::string format = "json";         ///< json | csv
  bool timestamp = true;
  Tolerances tol;
};

struct RunOutcome {
  int exit_status = 0;  ///< 0 all checks passed, 2 check failures, 1 configuration/solver error
  std::string output;   ///< serialized report (empty on error)
  std::string diagnostics;
  nlohmann::json envelope;
};

/// Validates the config, runs the requested pipeline and serializes the report.
/// Never throws; errors become exit status 1 with a diagnostic.
RunOutcome run(const RunConfig& config);

/// One spectrum row of the CSV/JSON report. Norms refer to the state scaled
/// to unit Hermitian norm; the optional fields are absent for broken states.
struct SpectrumRow {
  int n = 0;
  cplx energy;
  Classification classification = Classification::real;
  double n_hermitian = 1.0;
  cplx n_pt;
  std::optional<double> parity_residual0;
  std::optional<double> parity_residual1;
};

std::string export_csv(std::span<const SpectrumRow> rows);
std::string export_csv(const ScanResult& scan);

/// Lexicographically ordered keys, two-space indent, trailing newline.
std::string export_json(const nlohmann::json& envelope);

/// 17 significant digits; exact zero renders as "0.0".
std::string format_decimal(double v);

/// {"re": ..., "im": ...}
nlohmann::json complex_json(cplx z);

}  // namespace ptqm
