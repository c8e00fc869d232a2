#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ptqm/ansatz.hpp"
#include "ptqm/grid.hpp"
#include "ptqm/potential.hpp"
#include "ptqm/spectrum.hpp"

namespace ptqm {

/// Potential, grid and discrete Hamiltonian sampled once and shared by every
/// expectation and identity evaluation.
struct System {
  PTPotential potential;
  GridPtr grid;
  TridiagonalOperator hamiltonian;
  GridFunction vc;
  std::vector<double> v0;
  std::vector<double> v1;

  static System make(const PTPotential& p, const GridPtr& grid);
};

/// A canonicalized eigenstate together with its ansatz components.
struct AnalyzedState {
  EigenState state;
  AnsatzParts parts;
};

/// Solve, canonicalize and decompose the lowest K states. Every returned
/// state must be unbroken; anything else throws from canonicalize_phase.
std::vector<AnalyzedState> analyze_unbroken(const System& sys, int count, const Tolerances& tol = {});
AnalyzedState analyze(const EigenState& s, const Tolerances& tol = {});

// ---------------------------------------------------------------------------

struct OperatorSpec {
  enum class Kind { power_x, momentum, momentum_squared, potential_vc, hamiltonian, multiply_by };

  Kind kind = Kind::power_x;
  int power = 1;
  std::string label;
  std::function<cplx(double)> multiplier;

  static OperatorSpec x_power(int k);
  static OperatorSpec momentum();
  static OperatorSpec momentum_squared();
  static OperatorSpec potential();
  static OperatorSpec hamiltonian();
  static OperatorSpec multiply_by(std::string label, std::function<cplx(double)> f);
  static OperatorSpec ix();
  static OperatorSpec exp_ix();

  /// CLI names: x, x2, x3, ..., p, p2, V, H, ix, exp_ix.
  static OperatorSpec parse(const std::string& name);
};

enum class Definition { hermitian, pt };
enum class Structure { real, imaginary, zero, real_equal_energy, unconstrained };

std::string to_string(Definition d);
std::string to_string(Structure s);

struct NormPair {
  int n = 0;
  double hermitian = 0.0;   ///< N = int psi0^2 + psi1^2
  double pt = 0.0;          ///< N' = int psi0^2 - psi1^2
  cplx bilinear;            ///< int Psi Psi computed directly
  double bilinear_discrepancy = 0.0;
  bool near_self_orthogonal = false;  ///< |N'| < 1e-10 N
};

NormPair norm_pair(const AnsatzParts& parts);

enum class OverlapMode { hermitian, pt_bilinear, pt_general };

/// hermitian: int conj(a) b; pt_bilinear: int a b; pt_general: int (PT a) b.
cplx overlap(const GridFunction& a, const GridFunction& b, OverlapMode mode);
cplx overlap(const EigenState& a, const EigenState& b, OverlapMode mode);

struct ExpectationResult {
  OperatorSpec op;
  Definition definition = Definition::hermitian;
  int n = 0;
  cplx value;
  Structure predicted = Structure::unconstrained;
  double structure_residual = 0.0;
  double scale = 1.0;
  /// p^2 by second differences, next to the (E - V_c) substitution.
  std::optional<cplx> cross_check;
  /// <p> normalized by N' instead of N.
  std::optional<cplx> alternative;
};

/// Throws SelfOrthogonalError when the PT norm vanishes under Definition::pt.
ExpectationResult expectation(const AnalyzedState& s, const OperatorSpec& op, Definition def,
                              const System& sys);

Structure predict_structure(const OperatorSpec& op, Definition def, const Grid& grid);

// ---------------------------------------------------------------------------

struct IdentityEntry {
  int m = -1;
  int n = -1;
  cplx lhs;
  cplx rhs;
  double raw_residual = 0.0;
  double residual = 0.0;
  double tol = 0.0;
  bool pass = false;
  std::string note;
};

struct IdentityReport {
  /// Keyed by tag: "eq7", "eq8", ..., "eq32", "index_parity".
  std::map<std::string, std::vector<IdentityEntry>> entries;
  std::map<std::string, std::string> metadata;

  bool all_pass() const;
  bool pass(const std::string& tag) const;
  double worst(const std::string& tag) const;
  /// Tags with at least one failing entry.
  std::vector<std::string> failing() const;
};

struct IdentityTolerances {
  double norm = 1e-12;               ///< overlap bookkeeping, Hermitian norm
  double pt_norm_imag = 1e-10;       ///< imaginary part of the PT norm
  double momentum = 1e-9;            ///< <p> against its component form
  double energy = 1e-8;              ///< <H> = (H) = E, relative to max(1, |E|)
  double pt_orthogonality = 1e-8;    ///< int Psi_m Psi_n, m != n
  double hermitian_overlap = 1e-7;   ///< (E_n - E_m)<m|n> against the V1 commutator
  double components = 1e-7;          ///< cross-component integrals
  double self_orthogonality = 1e-10; ///< lower bound on |N'| / N
  double index_parity = 1e-10;       ///< integrals with an odd index sum
};

IdentityReport verify_identities(const std::vector<AnalyzedState>& states, const System& sys,
                                 const IdentityTolerances& tol = {});

/// Cross-component identities int a0 b0 = int a1 b1 and int a0 b1 = -int a1 b0.
std::pair<IdentityEntry, IdentityEntry> component_identities(const AnsatzParts& a,
                                                             const AnsatzParts& b,
                                                             const IdentityTolerances& tol = {});

}  // namespace ptqm
