#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ptqm/grid.hpp"

namespace ptqm {

/// V_c(x) = v0(x) + i*lambda*v1(x) with v0 even and v1 odd.
///
/// Keeping the two real parts separate is what lets the parity contract be
/// checked; an arbitrary complex V(x) cannot be expressed here.
struct PTPotential {
  std::string name;
  std::function<double(double)> v0;
  std::function<double(double)> v1;
  double lambda = 0.0;

  PTPotential with_lambda(double l) const {
    PTPotential p = *this;
    p.lambda = l;
    return p;
  }
};

struct CatalogEntry {
  std::string name;
  std::vector<double> params;
  /// Closed-form energy of the n-th level (0-based) at strength lambda.
  std::function<double(int n, double lambda)> oracle;
  /// Where the oracle comes from.
  std::string oracle_source;
  std::optional<double> breaking_threshold;
  std::string threshold_note;

  bool has_oracle() const noexcept { return static_cast<bool>(oracle); }
};

/// Complex samples v0(x_i) + i*lambda*v1(x_i). Throws DomainError on a
/// non-finite sample.
GridFunction sample_potential(const PTPotential& p, const GridPtr& grid);

/// Sampled real part only (v0) and odd part only (v1), without lambda.
std::vector<double> sample_v0(const PTPotential& p, const Grid& grid);
std::vector<double> sample_v1(const PTPotential& p, const Grid& grid);

struct ParityResiduals {
  double even;  ///< max |v0(x) - v0(-x)|
  double odd;   ///< max |v1(x) + v1(-x)|
};

ParityResiduals validate_pt_symmetry(const PTPotential& p, const Grid& grid);

/// Names accepted by catalog_get.
const std::vector<std::string>& catalog_names();

/// Builds a catalog potential. Throws ConfigError for an unknown name or a
/// parameter list of the wrong length.
///
///   box               []    or [L]    V = 0; oracle uses L (default 1)
///   harmonic          []              V = x^2
///   shifted_harmonic  []              V = x^2 + i*lambda*x
///   ix_cubed          []    or [c]    V = c*x^2 + i*lambda*x^3 (c default 0)
///   pt_square_well    [a]             V = i*lambda*sign(x) on |x| < a
///   scarf2            [V1]            V = -V1 sech^2 x + i*lambda sech x tanh x
std::pair<PTPotential, CatalogEntry> catalog_get(const std::string& name,
                                                 const std::vector<double>& params,
                                                 double lambda = 0.0);

}  // namespace ptqm
