#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ptqm/grid.hpp"
#include "ptqm/potential.hpp"
#include "ptqm/spectrum.hpp"

namespace ptqm {

struct ScanRequest {
  PTPotential potential;  ///< lambda is ignored; the scan sets it
  GridPtr grid;
  double lambda_start = 0.0;
  double lambda_end = 1.0;
  double step = 0.05;
  int state_count = 2;
  Tolerances tol;
  /// Worker threads for the coarse pass; 0 picks hardware concurrency.
  unsigned threads = 0;
};

struct ScanSample {
  double lambda = 0.0;
  bool refinement = false;  ///< added by the threshold bisection
  std::vector<cplx> energies;
  std::vector<Classification> classification;
  std::vector<std::optional<int>> partner;
  /// |int (PT psi) psi| / int |psi|^2 per state.
  std::vector<double> abs_pt_norm;

  bool all_real() const;
};

struct PairingEntry {
  int a = 0;
  int b = 0;
  cplx energy_a;
  cplx energy_b;
  double mismatch = 0.0;  ///< |E_a - conj(E_b)| / max(1, |E_a|)
  double self_overlap_a = 0.0;
  double self_overlap_b = 0.0;
};

struct ScanResult {
  std::string potential;
  int state_count = 0;
  double step = 0.0;
  std::vector<ScanSample> samples;  ///< sorted by lambda
  bool threshold_found = false;
  double bracket_lo = 0.0;  ///< last all-real lambda
  double bracket_hi = 0.0;  ///< first lambda with a conjugate pair
  /// Pairs present at bracket_hi.
  std::vector<PairingEntry> pairing;
  /// max over ordered state pairs (a, b) at bracket_hi of
  /// |(conj(E_a) - E_b) int (PT psi_a) psi_b| / max(1, |E|).
  double general_orthogonality = 0.0;

  std::optional<double> lambda_c() const {
    if (!threshold_found) return std::nullopt;
    return 0.5 * (bracket_lo + bracket_hi);
  }
  double bracket_width() const { return bracket_hi - bracket_lo; }
};

/// Solves at each coarse lambda (in parallel), then bisects the first
/// real-to-complex transition down to step/32. A scan whose spectrum never
/// breaks returns threshold_found = false. Throws ConfigError if the first
/// sample is already broken or the range is empty.
ScanResult scan_lambda(const ScanRequest& req);

/// Spectrum summary at one lambda (with eigenvectors, for the PT norms).
ScanSample scan_sample(const ScanRequest& req, double lambda);

struct NormTrajectory {
  int state = 0;
  std::vector<std::pair<double, double>> approach;  ///< (lambda, |N'|) over the last coarse step below threshold
  double start_value = 0.0;
  double bracket_value = 0.0;  ///< |N'| at bracket_hi
  double ratio = 0.0;          ///< bracket_value / start_value
  bool monotone = false;
  bool vanishes = false;        ///< ratio < 1e-3
  bool self_orthogonal = false; ///< bracket_value <= 1e-4
  std::string warning;
};

/// Norm trajectories of the states that coalesce at the threshold.
/// Throws ConfigError if the scan found no threshold.
std::vector<NormTrajectory> self_orthogonality_report(const ScanResult& result);

}  // namespace ptqm
