#include "ptqm/ansatz.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "ptqm/errors.hpp"

namespace ptqm {

namespace {

int parity_sign(int n) { return n % 2 == 0 ? 1 : -1; }

int count_nodes(std::span<const double> f) {
  double peak = 0.0;
  for (double v : f) peak = std::max(peak, std::abs(v));
  const double cut = 1e-8 * peak;
  int nodes = 0;
  double last = 0.0;
  for (double v : f) {
    if (std::abs(v) <= cut) continue;
    if (last != 0.0 && (v > 0.0) != (last > 0.0)) ++nodes;
    last = v;
  }
  return nodes;
}

// Real component whose sign fixes the overall gauge: psi0 at the center for
// even n, its central difference for odd n. Falls back to the largest
// sample on x >= 0 when that value is negligible.
double sign_anchor(const GridFunction& psi, int n) {
  const Grid& g = psi.grid();
  const std::size_t c = g.center();
  const double peak = psi.max_abs();
  double v = n % 2 == 0 ? psi[c].real() : (psi[c + 1].real() - psi[c - 1].real());
  const double scale = n % 2 == 0 ? peak : peak * 2.0 * g.spacing();
  if (std::abs(v) > 1e-6 * scale) return v;
  double best = 0.0;
  for (std::size_t i = c; i < psi.size(); ++i)
    if (std::abs(psi[i].real()) > std::abs(best)) best = psi[i].real();
  return best;
}

}  // namespace

GridFunction AnsatzParts::reassemble() const {
  GridFunction out(grid);
  for (std::size_t i = 0; i < psi0.size(); ++i) out[i] = cplx(psi0[i], psi1[i]);
  return out;
}

double parity_residual(std::span<const double> f, int sign) {
  double peak = 0.0, worst = 0.0;
  const std::size_t n = f.size();
  for (std::size_t i = 0; i < n; ++i) {
    peak = std::max(peak, std::abs(f[i]));
    worst = std::max(worst, std::abs(f[n - 1 - i] - sign * f[i]));
  }
  return peak == 0.0 ? 0.0 : worst / peak;
}

double pt_eigen_residual(const GridFunction& psi, int sign) {
  const std::size_t n = psi.size();
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    worst = std::max(worst, std::abs(std::conj(psi[n - 1 - i]) - static_cast<double>(sign) * psi[i]));
  const double peak = psi.max_abs();
  return peak == 0.0 ? 0.0 : worst / peak;
}

EigenState canonicalize_phase(const EigenState& s, const Tolerances& tol) {
  const GridFunction& psi = s.psi;
  const std::size_t n = psi.size();
  // PT psi = e^{i alpha} psi for an exact PT eigenstate; alpha from the
  // Hermitian overlap of psi with its PT image.
  cplx overlap = 0.0;
  double norm = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    overlap += std::conj(psi[i]) * std::conj(psi[n - 1 - i]);
    norm += std::norm(psi[i]);
  }
  if (norm == 0.0) throw NotPTEigenstateError("zero eigenvector cannot be canonicalized", 1.0);
  const double alpha = std::arg(overlap / norm);
  const int sign = parity_sign(s.index);
  const double target = sign > 0 ? 0.0 : std::numbers::pi;
  const double theta = 0.5 * (alpha - target);

  EigenState out = s;
  out.psi = std::polar(1.0, theta) * psi;
  if (sign_anchor(out.psi, s.index) < 0.0) out.psi *= -1.0;
  const double residual = pt_eigen_residual(out.psi, sign);
  if (!(residual <= tol.tol_pt)) {
    std::ostringstream msg;
    msg << "state " << s.index << " is not a PT eigenstate after phase canonicalization (residual "
        << residual << " > " << tol.tol_pt << ")";
    throw NotPTEigenstateError(msg.str(), residual);
  }
  out.phase_canonical = true;
  return out;
}

AnsatzParts make_parts(GridPtr grid, int n, std::vector<double> psi0, std::vector<double> psi1) {
  if (psi0.size() != grid->size() || psi1.size() != grid->size())
    throw ConfigError("ansatz component length does not match grid");
  AnsatzParts p;
  p.grid = std::move(grid);
  p.n = n;
  p.psi0 = std::move(psi0);
  p.psi1 = std::move(psi1);
  const int sign = parity_sign(n);
  p.parity_residual0 = parity_residual(p.psi0, sign);
  p.parity_residual1 = parity_residual(p.psi1, -sign);
  p.pt_eigen_residual = pt_eigen_residual(p.reassemble(), sign);
  p.psi0_nodes = count_nodes(p.psi0);
  return p;
}

AnsatzParts decompose(const EigenState& s, const Tolerances& tol) {
  if (!s.phase_canonical)
    throw ConfigError("decompose requires a phase-canonical state (call canonicalize_phase first)");
  auto parts = make_parts(s.psi.grid_ptr(), s.index, s.psi.real_part(), s.psi.imag_part());
  if (parts.parity_residual0 > tol.tol_parity || parts.parity_residual1 > tol.tol_parity) {
    std::ostringstream msg;
    msg << "state " << s.index << " violates the parity ansatz: residuals " << parts.parity_residual0
        << ", " << parts.parity_residual1 << " (tol " << tol.tol_parity << ")";
    throw AnsatzViolationError(msg.str());
  }
  return parts;
}

}  // namespace ptqm
