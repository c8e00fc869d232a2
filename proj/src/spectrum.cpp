#include "ptqm/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "ptqm/errors.hpp"

namespace ptqm {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

double scale_of(cplx z) { return std::max(1.0, std::abs(z)); }

// |re| + |im|; cheaper than abs() and good enough for rescaling.
double l1(cplx z) { return std::abs(z.real()) + std::abs(z.imag()); }

}  // namespace

// ---------------------------------------------------------------------------
// TridiagonalOperator

TridiagonalOperator::TridiagonalOperator(GridPtr grid, std::vector<cplx> diagonal)
    : grid_(std::move(grid)), diag_(std::move(diagonal)) {
  const double h = grid_->spacing();
  off_ = -1.0 / (h * h);
  if (diag_.size() + 2 != grid_->size())
    throw ConfigError("operator dimension must equal the number of interior grid points");
}

bool TridiagonalOperator::is_real() const noexcept {
  return std::all_of(diag_.begin(), diag_.end(), [](cplx d) { return d.imag() == 0.0; });
}

double TridiagonalOperator::norm_bound() const noexcept {
  double m = 0.0;
  for (const auto& d : diag_) m = std::max(m, std::abs(d));
  return m + 2.0 * std::abs(off_);
}

std::vector<cplx> TridiagonalOperator::apply(std::span<const cplx> v) const {
  const std::size_t n = diag_.size();
  if (v.size() != n) throw ConfigError("vector length does not match operator dimension");
  std::vector<cplx> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    cplx acc = diag_[i] * v[i];
    if (i > 0) acc += off_ * v[i - 1];
    if (i + 1 < n) acc += off_ * v[i + 1];
    y[i] = acc;
  }
  return y;
}

GridFunction TridiagonalOperator::apply(const GridFunction& psi) const {
  if (!psi.grid().same_as(*grid_)) throw ConfigError("grid mismatch applying operator");
  const std::size_t n = diag_.size();
  auto y = apply(psi.values().subspan(1, n));
  GridFunction out(grid_);
  std::copy(y.begin(), y.end(), out.values().begin() + 1);
  return out;
}

cplx TridiagonalOperator::log_det_derivative(cplx energy) const {
  const double e2 = off_ * off_;
  const std::size_t n = diag_.size();
  // p_k = det of leading k x k block of (H - E), q_k = dp_k/dE.
  cplx p_prev = 1.0, q_prev = 0.0;
  cplx p = diag_[0] - energy, q = -1.0;
  for (std::size_t k = 1; k < n; ++k) {
    const cplx a = diag_[k] - energy;
    const cplx p_next = a * p - e2 * p_prev;
    const cplx q_next = -p + a * q - e2 * q_prev;
    p_prev = p;
    q_prev = q;
    p = p_next;
    q = q_next;
    const double s = std::max(l1(p), l1(p_prev));
    if (s > 0.0) {
      const double inv = 1.0 / s;
      p *= inv;
      p_prev *= inv;
      q *= inv;
      q_prev *= inv;
    }
  }
  if (p == cplx(0.0)) return {std::numeric_limits<double>::infinity(), 0.0};
  return q / p;
}

std::size_t TridiagonalOperator::sturm_count(double x) const {
  const double e2 = off_ * off_;
  const double tiny = kEps * std::abs(off_) + std::numeric_limits<double>::min();
  std::size_t count = 0;
  double q = diag_[0].real() - x;
  for (std::size_t k = 0;; ++k) {
    if (q == 0.0) q = -tiny;
    if (q < 0.0) ++count;
    if (k + 1 == diag_.size()) break;
    q = diag_[k + 1].real() - x - e2 / q;
  }
  return count;
}

TridiagonalOperator build_matrix(const PTPotential& p, const GridPtr& grid) {
  const auto v = sample_potential(p, grid);
  const double h = grid->spacing();
  const std::size_t n = grid->size() - 2;
  std::vector<cplx> diag(n);
  for (std::size_t i = 0; i < n; ++i) diag[i] = 2.0 / (h * h) + v[i + 1];
  return TridiagonalOperator(grid, std::move(diag));
}

std::string to_string(Classification c) {
  return c == Classification::real ? "real" : "conjugate_pair";
}

// ---------------------------------------------------------------------------
// Inverse iteration

namespace {

// Pivoted LU of a complex tridiagonal matrix (LAPACK gttrf/gttrs layout).
class TridiagonalLU {
 public:
  TridiagonalLU(const TridiagonalOperator& op, cplx shift) {
    const std::size_t n = op.dimension();
    d_.assign(op.diagonal().begin(), op.diagonal().end());
    for (auto& x : d_) x -= shift;
    dl_.assign(n > 0 ? n - 1 : 0, op.off_diagonal());
    du_.assign(n > 0 ? n - 1 : 0, op.off_diagonal());
    du2_.assign(n > 1 ? n - 2 : 0, 0.0);
    swapped_.assign(n > 0 ? n - 1 : 0, false);
    const double floor = kEps * op.norm_bound();

    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (std::abs(d_[i]) >= std::abs(dl_[i])) {
        if (d_[i] == cplx(0.0)) d_[i] = floor;
        const cplx fact = dl_[i] / d_[i];
        dl_[i] = fact;
        d_[i + 1] -= fact * du_[i];
      } else {
        const cplx fact = d_[i] / dl_[i];
        d_[i] = dl_[i];
        dl_[i] = fact;
        const cplx temp = du_[i];
        du_[i] = d_[i + 1];
        d_[i + 1] = temp - fact * d_[i + 1];
        if (i + 2 < n) {
          du2_[i] = du_[i + 1];
          du_[i + 1] = -fact * du_[i + 1];
        }
        swapped_[i] = true;
      }
    }
    if (n > 0 && d_[n - 1] == cplx(0.0)) d_[n - 1] = floor;
  }

  void solve(std::vector<cplx>& b) const {
    const std::size_t n = d_.size();
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (!swapped_[i]) {
        b[i + 1] -= dl_[i] * b[i];
      } else {
        const cplx temp = b[i];
        b[i] = b[i + 1];
        b[i + 1] = temp - dl_[i] * b[i];
      }
    }
    b[n - 1] /= d_[n - 1];
    if (n > 1) b[n - 2] = (b[n - 2] - du_[n - 2] * b[n - 1]) / d_[n - 2];
    for (std::size_t i = n >= 2 ? n - 2 : 0; i-- > 0;)
      b[i] = (b[i] - du_[i] * b[i + 1] - du2_[i] * b[i + 2]) / d_[i];
  }

 private:
  std::vector<cplx> d_, dl_, du_, du2_;
  std::vector<bool> swapped_;
};

void normalize(std::vector<cplx>& v) {
  double s = 0.0;
  for (const auto& x : v) s += std::norm(x);
  const double inv = 1.0 / std::sqrt(s);
  for (auto& x : v) x *= inv;
}

}  // namespace

GridFunction inverse_iteration(const TridiagonalOperator& op, cplx energy, int iterations) {
  const std::size_t n = op.dimension();
  // mt19937 output is fully specified, so the start vector is reproducible.
  std::mt19937 gen(20240611u);
  std::vector<cplx> v(n);
  for (auto& x : v) x = static_cast<double>(gen()) / 4294967296.0 + 0.5;

  const TridiagonalLU lu(op, energy);
  for (int it = 0; it < iterations; ++it) {
    lu.solve(v);
    for (const auto& x : v)
      if (!std::isfinite(x.real()) || !std::isfinite(x.imag()))
        throw SolverError("inverse iteration produced a non-finite vector");
    normalize(v);
  }
  GridFunction psi(op.grid_ptr());
  std::copy(v.begin(), v.end(), psi.values().begin() + 1);
  return psi;
}

double residual_norm(const TridiagonalOperator& op, cplx energy, const GridFunction& psi) {
  const auto hpsi = op.apply(psi);
  double r = 0.0, s = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    r += std::norm(hpsi[i] - energy * psi[i]);
    s += std::norm(psi[i]);
  }
  return std::sqrt(r) / (std::sqrt(s) * scale_of(energy));
}

// ---------------------------------------------------------------------------
// Hermitian anchor

namespace {

std::vector<double> bisect_lowest(const TridiagonalOperator& op, int count, const Tolerances& tol) {
  double lo = std::numeric_limits<double>::max(), hi = std::numeric_limits<double>::lowest();
  for (const auto& d : op.diagonal()) {
    lo = std::min(lo, d.real());
    hi = std::max(hi, d.real());
  }
  const double r = 2.0 * std::abs(op.off_diagonal());
  lo -= r;
  hi += r;
  const double floor = 4.0 * kEps * op.norm_bound();

  std::vector<double> out(static_cast<std::size_t>(count));
  double left = lo;
  for (int k = 0; k < count; ++k) {
    double a = left, b = hi;
    if (op.sturm_count(a) > static_cast<std::size_t>(k) ||
        op.sturm_count(b) < static_cast<std::size_t>(k) + 1)
      throw SolverError("Sturm bisection bracket failure for level " + std::to_string(k) +
                        "; the grid is probably too coarse");
    while (true) {
      const double mid = 0.5 * (a + b);
      if (b - a <= std::max(tol.tol_newton * std::max(1.0, std::abs(mid)), floor) || mid <= a ||
          mid >= b)
        break;
      if (op.sturm_count(mid) >= static_cast<std::size_t>(k) + 1)
        b = mid;
      else
        a = mid;
    }
    out[static_cast<std::size_t>(k)] = 0.5 * (a + b);
    left = a;
  }

  for (int k = 1; k < count; ++k) {
    const double gap = out[static_cast<std::size_t>(k)] - out[static_cast<std::size_t>(k - 1)];
    if (gap <= 1e3 * std::max(tol.tol_newton * std::max(1.0, std::abs(out[static_cast<std::size_t>(k)])), floor)) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "levels " << k - 1 << " and " << k << " are numerically degenerate at lambda = 0 (E = "
          << out[static_cast<std::size_t>(k)] << ")";
      throw SolverError(msg.str());
    }
  }
  return out;
}

EigenState make_state(const TridiagonalOperator& op, int index, cplx energy, const Tolerances& tol) {
  EigenState s;
  s.index = index;
  s.energy = energy;
  s.psi = inverse_iteration(op, energy);
  s.residual = residual_norm(op, energy, s.psi);
  if (!(s.residual <= tol.tol_residual)) {
    std::ostringstream msg;
    msg << "eigenpair " << index << " fails the residual contract: " << s.residual << " > "
        << tol.tol_residual;
    throw SolverError(msg.str());
  }
  return s;
}

}  // namespace

std::vector<EigenState> solve_real_base(const TridiagonalOperator& op, int count,
                                        const Tolerances& tol) {
  if (count < 1 || static_cast<std::size_t>(count) > op.dimension())
    throw ConfigError("requested " + std::to_string(count) + " states from an operator of dimension " +
                      std::to_string(op.dimension()));
  if (!op.is_real()) throw ConfigError("solve_real_base requires a real symmetric operator");
  const auto energies = bisect_lowest(op, count, tol);
  std::vector<EigenState> out;
  out.reserve(energies.size());
  for (int k = 0; k < count; ++k) out.push_back(make_state(op, k, energies[static_cast<std::size_t>(k)], tol));
  return out;
}

// ---------------------------------------------------------------------------
// Classification

ClassificationResult classify_state(cplx energy, int self, std::span<const cplx> spectrum,
                                    const Tolerances& tol) {
  if (std::abs(energy.imag()) <= tol.tol_real * std::max(1.0, std::abs(energy.real())))
    return {Classification::real, std::nullopt};
  int best = -1;
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < spectrum.size(); ++j) {
    if (static_cast<int>(j) == self) continue;
    const double d = std::abs(spectrum[j] - std::conj(energy));
    if (d < best_dist) {
      best_dist = d;
      best = static_cast<int>(j);
    }
  }
  if (best < 0 || best_dist > tol.tol_pair * scale_of(energy)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "complex eigenvalue " << energy.real() << (energy.imag() < 0 ? " - " : " + ")
        << std::abs(energy.imag()) << "i has no conjugate partner (nearest distance " << best_dist
        << ")";
    throw ConsistencyError(msg.str());
  }
  return {Classification::conjugate_pair, best};
}

// ---------------------------------------------------------------------------
// Continuation in lambda

namespace {

struct Correction {
  std::vector<cplx> roots;
  std::vector<int> bad;  // indices that failed to converge or validate
};

// Newton on det(H - E) for every tracked root, each deflated by the current
// estimates of the others (Maehly), sweeping Gauss-Seidel style.
Correction correct(const TridiagonalOperator& op, std::vector<cplx> z, const Tolerances& tol) {
  const std::size_t m = z.size();
  const double floor = 32.0 * kEps * op.norm_bound();
  std::vector<bool> done(m, false);
  std::vector<bool> failed(m, false);
  for (int it = 0; it < tol.max_newton; ++it) {
    bool all = true;
    for (std::size_t i = 0; i < m; ++i) {
      if (done[i] || failed[i]) continue;
      cplx g = op.log_det_derivative(z[i]);
      cplx dz = 0.0;
      if (std::isfinite(g.real()) && std::isfinite(g.imag())) {
        for (std::size_t j = 0; j < m; ++j)
          if (j != i) g -= 1.0 / (z[i] - z[j]);
        if (!std::isfinite(g.real()) || !std::isfinite(g.imag()) || g == cplx(0.0)) {
          failed[i] = true;
          continue;
        }
        dz = -1.0 / g;
      }
      z[i] += dz;
      if (std::abs(dz) <= std::max(tol.tol_newton * scale_of(z[i]), floor))
        done[i] = true;
      else
        all = false;
    }
    if (all) break;
  }
  Correction out{std::move(z), {}};
  for (std::size_t i = 0; i < m; ++i)
    if (!done[i]) out.bad.push_back(static_cast<int>(i));
  return out;
}

// Accepts a correction only if every root stayed close to its prediction
// (relative to its distance from the other predictions) and no two roots merged.
void validate(Correction& c, const std::vector<cplx>& pred, const Tolerances& tol) {
  const std::size_t m = pred.size();
  std::vector<bool> bad(m, false);
  for (int i : c.bad) bad[static_cast<std::size_t>(i)] = true;
  for (std::size_t i = 0; i < m; ++i) {
    double sep = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < m; ++j)
      if (j != i) sep = std::min(sep, std::abs(pred[i] - pred[j]));
    if (!std::isfinite(sep)) sep = 1.0;
    if (std::abs(c.roots[i] - pred[i]) > 0.45 * sep) bad[i] = true;
    for (std::size_t j = i + 1; j < m; ++j) {
      const double coll = 10.0 * tol.tol_newton * scale_of(c.roots[i]);
      if (std::abs(c.roots[i] - c.roots[j]) <= coll) bad[i] = bad[j] = true;
    }
  }
  c.bad.clear();
  for (std::size_t i = 0; i < m; ++i)
    if (bad[i]) c.bad.push_back(static_cast<int>(i));
}

std::pair<std::size_t, std::size_t> closest_pair(const std::vector<cplx>& z) {
  std::pair<std::size_t, std::size_t> best{0, 1};
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < z.size(); ++i)
    for (std::size_t j = i + 1; j < z.size(); ++j)
      if (std::abs(z[i] - z[j]) < d) {
        d = std::abs(z[i] - z[j]);
        best = {i, j};
      }
  return best;
}

// Orders by Re E; members of a conjugate pair (equal real parts up to
// tolerance) put the one with positive imaginary part first.
std::vector<std::size_t> energy_order(const std::vector<cplx>& z, const Tolerances& tol) {
  std::vector<std::size_t> idx(z.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    const double tie = tol.tol_pair * std::max(scale_of(z[a]), scale_of(z[b]));
    if (std::abs(z[a].real() - z[b].real()) > tie) return z[a].real() < z[b].real();
    return z[a].imag() > z[b].imag();
  });
  return idx;
}

struct Tracked {
  std::vector<cplx> energies;  // energy-ordered
  int requested;
};

Tracked track(const SpectrumRequest& req) {
  if (req.state_count < 1) throw ConfigError("state count must be >= 1");
  if (!(req.tol.dlambda > 0.0)) throw ConfigError("continuation step must be positive");
  const double target = req.potential.lambda;
  if (!std::isfinite(target)) throw ConfigError("lambda must be finite");

  const auto base = build_matrix(req.potential.with_lambda(0.0), req.grid);
  const std::size_t dim = base.dimension();
  if (static_cast<std::size_t>(req.state_count) > dim)
    throw ConfigError("requested " + std::to_string(req.state_count) +
                      " states from an operator of dimension " + std::to_string(dim));
  // Two guard levels above the requested ones catch partners and crossings.
  const int tracked = static_cast<int>(std::min<std::size_t>(req.state_count + 2, dim));
  const auto e0 = bisect_lowest(base, tracked, req.tol);
  std::vector<cplx> z(e0.begin(), e0.end());
  if (target == 0.0) return {z, req.state_count};

  const double dir = target > 0.0 ? 1.0 : -1.0;
  const double nominal = req.tol.dlambda;
  const double min_step = nominal * std::ldexp(1.0, -40);
  double lam = 0.0, lam_prev = 0.0, step = nominal;
  std::vector<cplx> z_prev;
  bool have_prev = false;

  while (lam != target) {
    double lam_new = lam + dir * step;
    if (dir * (lam_new - target) >= -1e-12 * nominal) lam_new = target;
    const auto op = build_matrix(req.potential.with_lambda(lam_new), req.grid);

    std::vector<cplx> pred = z;
    double t = 0.0;
    if (have_prev) {
      t = (lam_new - lam) / (lam - lam_prev);
      for (std::size_t i = 0; i < z.size(); ++i) pred[i] = z[i] + (z[i] - z_prev[i]) * t;
    }
    auto c = correct(op, pred, req.tol);
    validate(c, pred, req.tol);

    if (!c.bad.empty() && have_prev && z.size() >= 2) {
      // Retry with the closest pair predicted through its mean and squared
      // splitting, both of which stay smooth across an exceptional point.
      const auto [a, b] = closest_pair(z);
      const cplx mean = 0.5 * (z[a] + z[b]), mean_prev = 0.5 * (z_prev[a] + z_prev[b]);
      const cplx split = z[a] - z[b];
      const cplx sq = split * split, sq_prev = (z_prev[a] - z_prev[b]) * (z_prev[a] - z_prev[b]);
      const cplx mean_new = mean + (mean - mean_prev) * t;
      cplx split_new = std::sqrt(sq + (sq - sq_prev) * t);
      if ((std::conj(split) * split_new).real() < 0.0) split_new = -split_new;
      auto pred2 = pred;
      pred2[a] = mean_new + 0.5 * split_new;
      pred2[b] = mean_new - 0.5 * split_new;
      auto c2 = correct(op, pred2, req.tol);
      validate(c2, pred2, req.tol);
      if (c2.bad.empty()) c = std::move(c2);
    }

    if (c.bad.empty()) {
      z_prev = std::move(z);
      z = std::move(c.roots);
      lam_prev = lam;
      lam = lam_new;
      have_prev = true;
      step = std::min(nominal, 2.0 * step);
      continue;
    }

    const bool only_guards = std::all_of(c.bad.begin(), c.bad.end(),
                                         [&](int i) { return i >= req.state_count; });
    if (only_guards && step < nominal / 1024.0) {
      // Drop guard levels that cannot be followed; the requested ones are intact.
      for (auto it = c.bad.rbegin(); it != c.bad.rend(); ++it) {
        z.erase(z.begin() + *it);
        if (have_prev) z_prev.erase(z_prev.begin() + *it);
      }
      continue;
    }
    step *= 0.5;
    if (step < min_step) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "continuation stalled: Newton failed for " << c.bad.size() << " level(s) beyond lambda = "
          << lam;
      throw ContinuationError(msg.str(), lam);
    }
  }

  if (static_cast<int>(z.size()) < req.state_count)
    throw TrackingError("lost track of levels: " + std::to_string(z.size()) + " of " +
                        std::to_string(req.state_count) + " remain");
  const auto order = energy_order(z, req.tol);
  std::vector<cplx> sorted;
  for (auto i : order) sorted.push_back(z[i]);
  return {sorted, req.state_count};
}

}  // namespace

std::vector<cplx> continue_eigenvalues(const SpectrumRequest& req) {
  auto t = track(req);
  t.energies.resize(static_cast<std::size_t>(t.requested));
  return t.energies;
}

std::vector<EigenState> continue_spectrum(const SpectrumRequest& req) {
  const auto t = track(req);
  const auto& all = t.energies;
  const auto op = build_matrix(req.potential, req.grid);

  std::size_t keep = static_cast<std::size_t>(t.requested);
  std::vector<ClassificationResult> cls;
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (i >= keep) break;
    cls.push_back(classify_state(all[i], static_cast<int>(i), all, req.tol));
    // Keep a pair together even if it straddles the requested count.
    if (cls.back().partner && static_cast<std::size_t>(*cls.back().partner) >= keep)
      keep = static_cast<std::size_t>(*cls.back().partner) + 1;
  }

  std::vector<EigenState> out;
  for (std::size_t i = 0; i < keep; ++i) {
    auto s = make_state(op, static_cast<int>(i), all[i], req.tol);
    s.classification = cls[i].kind;
    s.partner = cls[i].partner;
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace ptqm
