#include "ptqm/potential.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "ptqm/errors.hpp"

namespace ptqm {

namespace {

std::vector<double> sample_real(const std::function<double(double)>& f, const Grid& grid,
                                const std::string& name, const char* part) {
  std::vector<double> out(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    out[i] = f(grid.x(i));
    if (!std::isfinite(out[i])) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "potential '" << name << "': non-finite " << part << " sample at x = " << grid.x(i);
      throw DomainError(msg.str());
    }
  }
  return out;
}

void require_arity(const std::string& name, const std::vector<double>& params, std::size_t lo,
                   std::size_t hi) {
  if (params.size() < lo || params.size() > hi) {
    std::ostringstream msg;
    msg << "potential '" << name << "' takes ";
    if (lo == hi)
      msg << lo;
    else
      msg << lo << " to " << hi;
    msg << " parameter(s), got " << params.size();
    throw ConfigError(msg.str());
  }
}

double sech(double x) { return 1.0 / std::cosh(x); }

}  // namespace

std::vector<double> sample_v0(const PTPotential& p, const Grid& grid) {
  return sample_real(p.v0, grid, p.name, "v0");
}

std::vector<double> sample_v1(const PTPotential& p, const Grid& grid) {
  return sample_real(p.v1, grid, p.name, "v1");
}

GridFunction sample_potential(const PTPotential& p, const GridPtr& grid) {
  if (!std::isfinite(p.lambda)) throw DomainError("potential '" + p.name + "': lambda is not finite");
  const auto v0 = sample_v0(p, *grid);
  const auto v1 = sample_v1(p, *grid);
  GridFunction out(grid);
  for (std::size_t i = 0; i < grid->size(); ++i) out[i] = cplx(v0[i], p.lambda * v1[i]);
  return out;
}

ParityResiduals validate_pt_symmetry(const PTPotential& p, const Grid& grid) {
  const auto v0 = sample_v0(p, grid);
  const auto v1 = sample_v1(p, grid);
  ParityResiduals r{0.0, 0.0};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const std::size_t j = grid.mirror(i);
    r.even = std::max(r.even, std::abs(v0[i] - v0[j]));
    r.odd = std::max(r.odd, std::abs(v1[i] + v1[j]));
  }
  return r;
}

const std::vector<std::string>& catalog_names() {
  static const std::vector<std::string> names = {"box",           "harmonic",       "shifted_harmonic",
                                                 "ix_cubed",      "pt_square_well", "scarf2"};
  return names;
}

std::pair<PTPotential, CatalogEntry> catalog_get(const std::string& name,
                                                 const std::vector<double>& params,
                                                 double lambda) {
  for (double v : params)
    if (!std::isfinite(v)) throw ConfigError("potential '" + name + "': non-finite parameter");
  if (!std::isfinite(lambda)) throw ConfigError("lambda must be finite");

  PTPotential p;
  p.name = name;
  p.lambda = lambda;
  CatalogEntry e;
  e.name = name;
  e.params = params;
  const auto zero = [](double) { return 0.0; };

  if (name == "box") {
    require_arity(name, params, 0, 1);
    const double L = params.empty() ? 1.0 : params[0];
    if (!(L > 0.0)) throw ConfigError("box: half-width must be positive");
    p.v0 = zero;
    p.v1 = zero;
    e.oracle = [L](int n, double) {
      const double k = n + 1;
      return std::pow(k * std::numbers::pi / (2.0 * L), 2);
    };
    e.oracle_source = "Dirichlet box on [-L, L]: E_k = (k pi / 2L)^2, k = n + 1";
  } else if (name == "harmonic") {
    require_arity(name, params, 0, 0);
    p.v0 = [](double x) { return x * x; };
    p.v1 = zero;
    e.oracle = [](int n, double) { return 2.0 * n + 1.0; };
    e.oracle_source = "Hermite functions of -d2/dx2 + x^2: E_n = 2n + 1";
  } else if (name == "shifted_harmonic") {
    require_arity(name, params, 0, 0);
    p.v0 = [](double x) { return x * x; };
    p.v1 = [](double x) { return x; };
    e.oracle = [](int n, double l) { return 2.0 * n + 1.0 + 0.25 * l * l; };
    e.oracle_source =
        "x^2 + i lambda x = (x + i lambda/2)^2 + lambda^2/4: E_n = 2n + 1 + lambda^2/4";
  } else if (name == "ix_cubed") {
    require_arity(name, params, 0, 1);
    const double c = params.empty() ? 0.0 : params[0];
    p.v0 = [c](double x) { return c * x * x; };
    p.v1 = [](double x) { return x * x * x; };
  } else if (name == "pt_square_well") {
    require_arity(name, params, 1, 1);
    const double a = params[0];
    if (!(a > 0.0)) throw ConfigError("pt_square_well: well half-width must be positive");
    p.v0 = zero;
    p.v1 = [a](double x) {
      if (x == 0.0 || std::abs(x) >= a) return 0.0;
      return x > 0.0 ? 1.0 : -1.0;
    };
  } else if (name == "scarf2") {
    require_arity(name, params, 1, 1);
    const double depth = params[0];
    p.v0 = [depth](double x) {
      const double s = sech(x);
      return -depth * s * s;
    };
    p.v1 = [](double x) { return sech(x) * std::tanh(x); };
    e.breaking_threshold = depth + 0.25;
    e.threshold_note = "literature-derived |lambda| <= V1 + 1/4, to be confirmed numerically";
  } else {
    std::string known;
    for (const auto& n : catalog_names()) known += (known.empty() ? "" : ", ") + n;
    throw ConfigError("unknown potential '" + name + "' (known: " + known + ")");
  }
  return {std::move(p), std::move(e)};
}

}  // namespace ptqm
