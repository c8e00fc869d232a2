#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ptqm/grid.hpp"
#include "ptqm/potential.hpp"

namespace ptqm {

/// Numerical knobs shared by the solver and the downstream analysis.
struct Tolerances {
  double tol_real = 1e-8;      ///< |Im E| <= tol_real * max(1, |Re E|) means "real"
  double tol_residual = 1e-8;  ///< ||H psi - E psi|| <= tol * ||psi|| * max(1, |E|)
  double tol_newton = 1e-12;   ///< relative step size that ends a Newton iteration
  double dlambda = 0.05;       ///< nominal continuation step
  double tol_pt = 1e-6;        ///< PT-eigenstate residual accepted by canonicalization
  double tol_parity = 1e-6;    ///< ansatz parity residual
  double tol_pair = 1e-6;      ///< |E_m - conj(E_n)| <= tol_pair * max(1, |E|) for a pair
  int max_newton = 80;
};

/// Discretized H = -d^2/dx^2 + V_c on the interior points of a Grid, with
/// Dirichlet walls at +-L. Complex symmetric: a single constant off-diagonal.
class TridiagonalOperator {
 public:
  TridiagonalOperator(GridPtr grid, std::vector<cplx> diagonal);

  const GridPtr& grid_ptr() const noexcept { return grid_; }
  const Grid& grid() const noexcept { return *grid_; }
  std::size_t dimension() const noexcept { return diag_.size(); }
  std::span<const cplx> diagonal() const noexcept { return diag_; }
  double off_diagonal() const noexcept { return off_; }
  bool is_real() const noexcept;
  /// Infinity-norm bound max|d_i| + 2|e|.
  double norm_bound() const noexcept;

  /// y = H v on interior vectors.
  std::vector<cplx> apply(std::span<const cplx> v) const;
  /// H applied to a wall-padded grid function; the result is zero at the walls.
  GridFunction apply(const GridFunction& psi) const;

  /// d/dE log det(H - E), computed with the three-term leading-minor
  /// recurrence rescaled at every step.
  cplx log_det_derivative(cplx energy) const;

  /// Number of eigenvalues strictly below x (real operators only).
  std::size_t sturm_count(double x) const;

 private:
  GridPtr grid_;
  std::vector<cplx> diag_;
  double off_;
};

TridiagonalOperator build_matrix(const PTPotential& p, const GridPtr& grid);

enum class Classification { real, conjugate_pair };

std::string to_string(Classification c);

struct EigenState {
  int index = 0;
  cplx energy;
  /// Eigenvector padded with zeros at the walls, unit discrete 2-norm.
  GridFunction psi;
  Classification classification = Classification::real;
  std::optional<int> partner;
  bool phase_canonical = false;
  /// ||H psi - E psi|| / (||psi|| * max(1, |E|)).
  double residual = 0.0;
};

struct SpectrumRequest {
  PTPotential potential;
  GridPtr grid;
  int state_count = 1;
  Tolerances tol;
};

/// Lowest K eigenpairs of a real symmetric operator by Sturm bisection and
/// inverse iteration. Throws ConfigError if K exceeds the dimension or the
/// operator is complex, SolverError on near-degenerate levels.
std::vector<EigenState> solve_real_base(const TridiagonalOperator& op, int count,
                                        const Tolerances& tol = {});

/// Tracks the lowest K levels from lambda = 0 to the potential's lambda and
/// returns them ordered by Re E and classified.
std::vector<EigenState> continue_spectrum(const SpectrumRequest& req);

/// Eigenvalue-only continuation; used by the scanner's inner loop.
std::vector<cplx> continue_eigenvalues(const SpectrumRequest& req);

struct ClassificationResult {
  Classification kind;
  std::optional<int> partner;
};

/// Real if |Im E| <= tol_real * max(1, |Re E|); otherwise finds the member
/// of `spectrum` nearest to conj(E). Throws ConsistencyError if there is none
/// within tol_pair.
ClassificationResult classify_state(cplx energy, int self, std::span<const cplx> spectrum,
                                    const Tolerances& tol = {});

/// Eigenvector for a known eigenvalue by inverse iteration with a pivoted
/// LU of the shifted operator. Unit discrete 2-norm, zero at the walls.
GridFunction inverse_iteration(const TridiagonalOperator& op, cplx energy, int iterations = 3);

double residual_norm(const TridiagonalOperator& op, cplx energy, const GridFunction& psi);

}  // namespace ptqm
