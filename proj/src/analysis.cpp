#include "ptqm/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "ptqm/errors.hpp"

namespace ptqm {

namespace {

double scale_of(cplx z) { return std::max(1.0, std::abs(z)); }

int parity_sign(int n) { return n % 2 == 0 ? 1 : -1; }

// Trapezoid integral of a pointwise product of two real arrays.
double integrate_product(const Grid& g, std::span<const double> a, std::span<const double> b) {
  std::vector<double> f(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) f[i] = a[i] * b[i];
  return integrate(g, f);
}

double integrate_product(const Grid& g, std::span<const double> w, std::span<const double> a,
                         std::span<const double> b) {
  std::vector<double> f(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) f[i] = w[i] * a[i] * b[i];
  return integrate(g, f);
}

IdentityEntry judged(int m, int n, cplx lhs, cplx rhs, double raw, double scale, double tol,
                     std::string note = {}) {
  IdentityEntry e;
  e.m = m;
  e.n = n;
  e.lhs = lhs;
  e.rhs = rhs;
  e.raw_residual = raw;
  e.residual = scale > 0.0 ? raw / scale : raw;
  e.tol = tol;
  e.pass = std::isfinite(e.residual) && e.residual <= tol;
  e.note = std::move(note);
  return e;
}

}  // namespace

// ---------------------------------------------------------------------------

System System::make(const PTPotential& p, const GridPtr& grid) {
  auto op = build_matrix(p, grid);
  return System{p, grid, std::move(op), sample_potential(p, grid), sample_v0(p, *grid),
                sample_v1(p, *grid)};
}

AnalyzedState analyze(const EigenState& s, const Tolerances& tol) {
  auto canonical = canonicalize_phase(s, tol);
  auto parts = decompose(canonical, tol);
  return {std::move(canonical), std::move(parts)};
}

std::vector<AnalyzedState> analyze_unbroken(const System& sys, int count, const Tolerances& tol) {
  SpectrumRequest req{sys.potential, sys.grid, count, tol};
  const auto states = continue_spectrum(req);
  std::vector<AnalyzedState> out;
  for (int i = 0; i < count; ++i) out.push_back(analyze(states[static_cast<std::size_t>(i)], tol));
  return out;
}

// ---------------------------------------------------------------------------

OperatorSpec OperatorSpec::x_power(int k) {
  if (k < 1) throw ConfigError("power of x must be >= 1");
  OperatorSpec op;
  op.kind = Kind::power_x;
  op.power = k;
  op.label = k == 1 ? "x" : "x" + std::to_string(k);
  return op;
}

OperatorSpec OperatorSpec::momentum() { return {Kind::momentum, 1, "p", {}}; }
OperatorSpec OperatorSpec::momentum_squared() { return {Kind::momentum_squared, 1, "p2", {}}; }
OperatorSpec OperatorSpec::potential() { return {Kind::potential_vc, 1, "V", {}}; }
OperatorSpec OperatorSpec::hamiltonian() { return {Kind::hamiltonian, 1, "H", {}}; }

OperatorSpec OperatorSpec::multiply_by(std::string label, std::function<cplx(double)> f) {
  return {Kind::multiply_by, 1, std::move(label), std::move(f)};
}

OperatorSpec OperatorSpec::ix() {
  return multiply_by("ix", [](double x) { return cplx(0.0, x); });
}

OperatorSpec OperatorSpec::exp_ix() {
  return multiply_by("exp_ix", [](double x) { return std::polar(1.0, x); });
}

OperatorSpec OperatorSpec::parse(const std::string& name) {
  if (name == "p") return momentum();
  if (name == "p2") return momentum_squared();
  if (name == "V") return potential();
  if (name == "H") return hamiltonian();
  if (name == "ix") return ix();
  if (name == "exp_ix") return exp_ix();
  if (!name.empty() && name[0] == 'x') {
    if (name.size() == 1) return x_power(1);
    const auto digits = name.substr(1);
    if (std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; }) &&
        digits.size() < 4)
      return x_power(std::stoi(digits));
  }
  throw ConfigError("unknown operator '" + name + "' (expected x, x<k>, p, p2, V, H, ix, exp_ix)");
}

std::string to_string(Definition d) { return d == Definition::hermitian ? "hermitian" : "pt"; }

std::string to_string(Structure s) {
  switch (s) {
    case Structure::real: return "real";
    case Structure::imaginary: return "imaginary";
    case Structure::zero: return "zero";
    case Structure::real_equal_energy: return "real_equal_energy";
    case Structure::unconstrained: return "unconstrained";
  }
  return "unconstrained";
}

// ---------------------------------------------------------------------------

NormPair norm_pair(const AnsatzParts& parts) {
  const Grid& g = *parts.grid;
  NormPair out;
  out.n = parts.n;
  const double a = integrate_product(g, parts.psi0, parts.psi0);
  const double b = integrate_product(g, parts.psi1, parts.psi1);
  out.hermitian = a + b;
  out.pt = a - b;
  const auto psi = parts.reassemble();
  out.bilinear = integrate(psi * psi);
  out.bilinear_discrepancy = std::abs(out.bilinear - out.pt);
  out.near_self_orthogonal = std::abs(out.pt) < 1e-10 * out.hermitian;
  return out;
}

cplx overlap(const GridFunction& a, const GridFunction& b, OverlapMode mode) {
  if (!a.grid().same_as(b.grid())) throw ConfigError("overlap of functions on different grids");
  switch (mode) {
    case OverlapMode::hermitian: return integrate(a.conj() * b);
    case OverlapMode::pt_bilinear: return integrate(a * b);
    case OverlapMode::pt_general: return integrate(reflect(a).conj() * b);
  }
  return 0.0;
}

cplx overlap(const EigenState& a, const EigenState& b, OverlapMode mode) {
  return overlap(a.psi, b.psi, mode);
}

// ---------------------------------------------------------------------------

namespace {

double max_deviation(const Grid& g, const std::function<cplx(double)>& f,
                     const std::function<cplx(cplx at_x, cplx at_minus_x)>& defect) {
  double worst = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i)
    worst = std::max(worst, std::abs(defect(f(g.x(i)), f(g.x(g.mirror(i))))));
  return worst;
}

Structure predict_multiplier(const std::function<cplx(double)>& f, Definition def, const Grid& g) {
  double peak = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) peak = std::max(peak, std::abs(f(g.x(i))));
  const double tol = 1e-12 * std::max(peak, 1e-300);
  if (def == Definition::pt) {
    // Real iff f is PT-symmetric: conj(f(-x)) = f(x).
    if (max_deviation(g, f, [](cplx a, cplx b) { return std::conj(b) - a; }) <= tol)
      return Structure::real;
    if (max_deviation(g, f, [](cplx a, cplx b) { return std::conj(b) + a; }) <= tol)
      return Structure::imaginary;
    return Structure::unconstrained;
  }
  // |Psi|^2 is even, so only the even part of f survives.
  const auto even_part = [](cplx a, cplx b) { return 0.5 * (a + b); };
  if (max_deviation(g, f, even_part) <= tol) return Structure::zero;
  if (max_deviation(g, f, [&](cplx a, cplx b) { return even_part(a, b).imag(); }) <= tol)
    return Structure::real;
  if (max_deviation(g, f, [&](cplx a, cplx b) { return even_part(a, b).real(); }) <= tol)
    return Structure::imaginary;
  return Structure::unconstrained;
}

}  // namespace

Structure predict_structure(const OperatorSpec& op, Definition def, const Grid& grid) {
  using K = OperatorSpec::Kind;
  const bool herm = def == Definition::hermitian;
  switch (op.kind) {
    case K::power_x:
      if (op.power % 2 == 0) return Structure::real;
      return herm ? Structure::zero : Structure::imaginary;
    case K::momentum: return herm ? Structure::real : Structure::zero;
    case K::momentum_squared: return Structure::real;
    case K::potential_vc: return Structure::real;
    case K::hamiltonian: return Structure::real_equal_energy;
    case K::multiply_by: return predict_multiplier(op.multiplier, def, grid);
  }
  return Structure::unconstrained;
}

namespace {

double structure_distance(cplx v, Structure s, cplx energy) {
  switch (s) {
    case Structure::real: return std::abs(v.imag());
    case Structure::imaginary: return std::abs(v.real());
    case Structure::zero: return std::abs(v);
    case Structure::real_equal_energy: return std::abs(v - energy);
    case Structure::unconstrained: return 0.0;
  }
  return 0.0;
}

}  // namespace

ExpectationResult expectation(const AnalyzedState& s, const OperatorSpec& op, Definition def,
                              const System& sys) {
  const GridFunction& psi = s.state.psi;
  if (!psi.grid().same_as(*sys.grid)) throw ConfigError("state and system live on different grids");
  if (def == Definition::pt && !s.state.phase_canonical)
    throw ConfigError("PT expectation requires a phase-canonical state");
  const GridPtr& g = sys.grid;
  const cplx energy = s.state.energy;

  using K = OperatorSpec::Kind;
  GridFunction opsi(g);
  std::optional<GridFunction> cross;
  switch (op.kind) {
    case K::power_x:
      opsi = GridFunction::from(g, [k = op.power](double x) { return std::pow(x, k); }) * psi;
      break;
    case K::momentum: opsi = cplx(0.0, -1.0) * differentiate(psi); break;
    case K::momentum_squared: {
      // (E - V_c) psi, with the bare second difference as a cross-check.
      GridFunction shifted(g);
      for (std::size_t i = 0; i < psi.size(); ++i) shifted[i] = (energy - sys.vc[i]) * psi[i];
      opsi = shifted;
      cross = sys.hamiltonian.apply(psi) - sys.vc * psi;
      break;
    }
    case K::potential_vc: opsi = sys.vc * psi; break;
    case K::hamiltonian: opsi = sys.hamiltonian.apply(psi); break;
    case K::multiply_by: opsi = GridFunction::from(g, op.multiplier) * psi; break;
  }

  const NormPair norms = norm_pair(s.parts);
  const bool herm = def == Definition::hermitian;
  if (!herm && std::abs(norms.pt) < 1e-10 * norms.hermitian)
    throw SelfOrthogonalError("PT norm of state " + std::to_string(s.state.index) +
                              " vanishes; the PT expectation value is undefined");
  const double norm = herm ? norms.hermitian : norms.pt;
  const GridFunction bra = herm ? psi.conj() : psi;

  ExpectationResult r;
  r.op = op;
  r.definition = def;
  r.n = s.state.index;
  r.value = integrate(bra * opsi) / norm;
  if (cross) r.cross_check = integrate(bra * *cross) / norm;
  if (op.kind == K::momentum && herm) r.alternative = r.value * (norms.hermitian / norms.pt);

  double weight = 0.0;
  {
    std::vector<double> f(psi.size());
    for (std::size_t i = 0; i < psi.size(); ++i) f[i] = std::abs(psi[i]) * std::abs(opsi[i]);
    weight = integrate(*g, f) / std::abs(norm);
  }
  r.predicted = predict_structure(op, def, *g);
  if (r.predicted == Structure::real_equal_energy) {
    r.scale = scale_of(energy);
  } else {
    r.scale = weight > 0.0 ? weight : 1.0;
  }
  r.structure_residual = structure_distance(r.value, r.predicted, energy) / r.scale;
  return r;
}

// ---------------------------------------------------------------------------

bool IdentityReport::all_pass() const {
  for (const auto& [tag, list] : entries)
    for (const auto& e : list)
      if (!e.pass) return false;
  return true;
}

bool IdentityReport::pass(const std::string& tag) const {
  const auto it = entries.find(tag);
  if (it == entries.end()) return true;
  return std::all_of(it->second.begin(), it->second.end(), [](const IdentityEntry& e) { return e.pass; });
}

double IdentityReport::worst(const std::string& tag) const {
  double w = 0.0;
  const auto it = entries.find(tag);
  if (it == entries.end()) return w;
  for (const auto& e : it->second) w = std::max(w, e.residual);
  return w;
}

std::vector<std::string> IdentityReport::failing() const {
  std::vector<std::string> out;
  for (const auto& [tag, list] : entries)
    if (!pass(tag)) out.push_back(tag);
  return out;
}

std::pair<IdentityEntry, IdentityEntry> component_identities(const AnsatzParts& a,
                                                             const AnsatzParts& b,
                                                             const IdentityTolerances& tol) {
  const Grid& g = *a.grid;
  const double scale = std::sqrt(norm_pair(a).hermitian * norm_pair(b).hermitian);
  const double a0b0 = integrate_product(g, a.psi0, b.psi0);
  const double a1b1 = integrate_product(g, a.psi1, b.psi1);
  const double a0b1 = integrate_product(g, a.psi0, b.psi1);
  const double a1b0 = integrate_product(g, a.psi1, b.psi0);
  return {judged(a.n, b.n, a0b0, a1b1, std::abs(a0b0 - a1b1), scale, tol.components),
          judged(a.n, b.n, a0b1, -a1b0, std::abs(a0b1 + a1b0), scale, tol.components)};
}

IdentityReport verify_identities(const std::vector<AnalyzedState>& states, const System& sys,
                                 const IdentityTolerances& tol) {
  IdentityReport rep;
  const Grid& g = *sys.grid;
  const double lambda = sys.potential.lambda;
  rep.metadata["potential"] = sys.potential.name;
  rep.metadata["momentum_normalization"] =
      "<p> is normalized by the Hermitian norm N; the value normalized by N' is reported as "
      "'alternative'";
  rep.metadata["momentum_sign"] =
      "with p = -i d/dx the component form is <p> = -(2/N) int psi0' psi1";

  std::vector<NormPair> norms;
  for (const auto& s : states) norms.push_back(norm_pair(s.parts));
  std::vector<double> lam_v1(sys.v1.size());
  for (std::size_t i = 0; i < lam_v1.size(); ++i) lam_v1[i] = lambda * sys.v1[i];

  for (std::size_t k = 0; k < states.size(); ++k) {
    const auto& s = states[k];
    const auto& p = s.parts;
    const int n = s.state.index;
    const double N = norms[k].hermitian;
    const cplx E = s.state.energy;

    const cplx direct = overlap(s.state, s.state, OverlapMode::hermitian);
    {
      auto e = judged(n, n, direct, N, std::abs(direct - N), N, tol.norm);
      e.pass = e.pass && N > 0.0;
      rep.entries["eq7"].push_back(e);
    }
    rep.entries["eq8"].push_back(judged(n, n, norms[k].bilinear, norms[k].pt,
                                        std::abs(norms[k].bilinear.imag()), N, tol.pt_norm_imag));

    {
      const auto d0 = differentiate(g, p.psi0);
      const double component = -2.0 * integrate_product(g, d0, p.psi1) / N;
      const auto r = expectation(s, OperatorSpec::momentum(), Definition::hermitian, sys);
      auto e = judged(n, n, r.value, component, std::abs(r.value - component),
                      std::max(1.0, r.scale), tol.momentum);
      std::ostringstream note;
      note.precision(17);
      note << "N'-normalized reading: " << r.alternative->real();
      e.note = note.str();
      rep.entries["eq13"].push_back(e);
    }

    {
      const auto h = expectation(s, OperatorSpec::hamiltonian(), Definition::hermitian, sys);
      const auto hp = expectation(s, OperatorSpec::hamiltonian(), Definition::pt, sys);
      const double raw = std::max({std::abs(h.value - hp.value), std::abs(h.value - E),
                                   std::abs(hp.value - E)});
      rep.entries["eq19"].push_back(judged(n, n, h.value, hp.value, raw, scale_of(E), tol.energy));
    }

    {
      const double margin = std::abs(norms[k].pt) / N;
      auto e = judged(n, n, integrate_product(g, p.psi0, p.psi0), integrate_product(g, p.psi1, p.psi1),
                      margin, 1.0, tol.self_orthogonality);
      e.pass = margin > tol.self_orthogonality;
      e.note = "residual is the margin |N'|/N, which must stay above tol";
      rep.entries["eq29"].push_back(e);
    }

    {
      const cplx general = overlap(s.state, s.state, OverlapMode::pt_general);
      const cplx expected = static_cast<double>(parity_sign(n)) * norms[k].bilinear;
      rep.entries["eq32"].push_back(
          judged(n, n, general, expected, std::abs(general - expected), N, tol.pt_norm_imag));
    }
  }

  for (std::size_t a = 0; a < states.size(); ++a) {
    for (std::size_t b = 0; b < states.size(); ++b) {
      const auto& sm = states[a];
      const auto& sn = states[b];
      const auto& pm = sm.parts;
      const auto& pn = sn.parts;
      const int m = sm.state.index, n = sn.state.index;
      const double scale = std::sqrt(norms[a].hermitian * norms[b].hermitian);
      const cplx Em = sm.state.energy, En = sn.state.energy;

      const double m0n0 = integrate_product(g, pm.psi0, pn.psi0);
      const double m1n1 = integrate_product(g, pm.psi1, pn.psi1);
      const double m0n1 = integrate_product(g, pm.psi0, pn.psi1);
      const double m1n0 = integrate_product(g, pm.psi1, pn.psi0);

      // Integrals whose total index parity is odd must vanish.
      const bool even_sum = (m + n) % 2 == 0;
      auto vanish = [&](double v, const char* what) {
        rep.entries["index_parity"].push_back(
            judged(m, n, v, 0.0, std::abs(v), scale, tol.index_parity, what));
      };
      if (even_sum) {
        vanish(m0n1, "int psi_m0 psi_n1");
        vanish(m1n0, "int psi_m1 psi_n0");
      } else {
        vanish(m0n0, "int psi_m0 psi_n0");
        vanish(m1n1, "int psi_m1 psi_n1");
      }

      if (a >= b) continue;

      const cplx herm = overlap(sm.state, sn.state, OverlapMode::hermitian);
      const cplx bil = overlap(sm.state, sn.state, OverlapMode::pt_bilinear);
      const cplx herm_parts(m0n0 + m1n1, m0n1 - m1n0);
      const cplx bil_parts(m0n0 - m1n1, m0n1 + m1n0);
      rep.entries["eq25"].push_back(
          judged(m, n, herm, herm_parts, std::abs(herm - herm_parts), scale, tol.norm));
      rep.entries["eq26"].push_back(
          judged(m, n, bil, bil_parts, std::abs(bil - bil_parts), scale, tol.norm));

      const double escale = std::max({1.0, std::abs(Em), std::abs(En)});
      rep.entries["eq23"].push_back(judged(m, n, (Em - En) * bil, 0.0, std::abs((Em - En) * bil),
                                           scale * escale, tol.pt_orthogonality));

      {
        GridFunction weighted(sys.grid);
        for (std::size_t i = 0; i < g.size(); ++i) weighted[i] = lam_v1[i] * sn.state.psi[i];
        const cplx lhs = (En - Em) * herm;
        const cplx rhs = cplx(0.0, 2.0) * overlap(sm.state.psi, weighted, OverlapMode::hermitian);
        cplx branch;
        std::string which;
        if (even_sum) {
          branch = 2.0 * (integrate_product(g, lam_v1, pm.psi1, pn.psi0) -
                          integrate_product(g, lam_v1, pm.psi0, pn.psi1));
          which = "real branch (m+n even)";
        } else {
          branch = cplx(0.0, 2.0 * (integrate_product(g, lam_v1, pm.psi0, pn.psi0) +
                                    integrate_product(g, lam_v1, pm.psi1, pn.psi1)));
          which = "imaginary branch (m+n odd)";
        }
        const double raw = std::max(std::abs(lhs - rhs), std::abs(lhs - branch));
        rep.entries["eq24"].push_back(judged(m, n, lhs, rhs, raw, scale * escale,
                                             tol.hermitian_overlap, which));
      }

      auto [e27, e28] = component_identities(pm, pn, tol);
      rep.entries["eq27"].push_back(e27);
      rep.entries["eq28"].push_back(e28);
    }
  }
  return rep;
}

}  // namespace ptqm
