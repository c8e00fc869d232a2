#pragma once

#include <span>
#include <vector>

#include "ptqm/grid.hpp"
#include "ptqm/spectrum.hpp"

namespace ptqm {

/// Psi_n = psi0 + i psi1 with psi0 of parity (-1)^n and psi1 of parity (-1)^(n+1).
struct AnsatzParts {
  GridPtr grid;
  int n = 0;
  std::vector<double> psi0;
  std::vector<double> psi1;
  double parity_residual0 = 0.0;
  double parity_residual1 = 0.0;
  double pt_eigen_residual = 0.0;
  /// Sign changes of psi0 in the interior; informational only.
  int psi0_nodes = 0;

  GridFunction reassemble() const;
};

/// max_i |f_(N-1-i) - sign f_i| / max_i |f_i|, and 0 for f == 0.
double parity_residual(std::span<const double> f, int sign);

/// max_i |(PT psi)_i - sign psi_i| / max_i |psi_i|, with (PT psi)_i = conj(psi_(N-1-i)).
double pt_eigen_residual(const GridFunction& psi, int sign);

/// Rotates the eigenvector's phase so that PT psi = (-1)^n psi, then fixes the
/// remaining sign so psi0(0) > 0 (even n) or psi0'(0) > 0 (odd n).
/// Throws NotPTEigenstateError if the rotated state is not a PT eigenstate.
EigenState canonicalize_phase(const EigenState& s, const Tolerances& tol = {});

/// Splits a canonical state into its real components and checks their parity.
/// Throws AnsatzViolationError if either parity residual exceeds tol_parity.
AnsatzParts decompose(const EigenState& s, const Tolerances& tol = {});

/// Builds parts directly from two real component arrays (no checks beyond sizes).
AnsatzParts make_parts(GridPtr grid, int n, std::vector<double> psi0, std::vector<double> psi1);

}  // namespace ptqm
