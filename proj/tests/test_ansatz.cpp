#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ptqm/ansatz.hpp"
#include "ptqm/errors.hpp"

using namespace ptqm;

namespace {

std::vector<EigenState> solve(const std::string& name, std::vector<double> params, double lambda,
                              double L, std::size_t N, int K) {
  auto [p, e] = catalog_get(name, params, lambda);
  return continue_spectrum({p, Grid::make(L, N), K, {}});
}

double max_diff(const GridFunction& a, const GridFunction& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

EigenState rotated(EigenState s, double phase) {
  s.psi *= std::polar(1.0, phase);
  s.phase_canonical = false;
  return s;
}

}  // namespace

TEST_CASE("parity_residual") {
  const std::vector<double> even{1.0, 2.0, 1.0};
  const std::vector<double> odd{1.0, 0.0, -1.0};
  CHECK(parity_residual(even, 1) == 0.0);
  CHECK(parity_residual(odd, 1) == 2.0);
  CHECK(parity_residual(odd, -1) == 0.0);
  const std::vector<double> zero(5, 0.0);
  CHECK(parity_residual(zero, 1) == 0.0);
}

TEST_CASE("canonicalization of a real eigenvector") {
  const auto states = solve("harmonic", {}, 0.0, 8.0, 801, 2);
  for (const auto& s : states) {
    const auto c = canonicalize_phase(s);
    CHECK(c.phase_canonical);
    CHECK(c.energy == s.energy);
    CHECK(pt_eigen_residual(c.psi, s.index % 2 == 0 ? 1 : -1) < 1e-12);
    const auto parts = decompose(c);
    CHECK(parts.parity_residual0 < 1e-12);
    CHECK(parts.parity_residual1 < 1e-12);
    if (s.index % 2 == 0)
      CHECK(parts.psi0[parts.grid->center()] > 0.0);
    else
      CHECK(parts.psi0[parts.grid->center() + 1] > parts.psi0[parts.grid->center() - 1]);
  }
}

TEST_CASE("canonical form is independent of the input phase") {
  const auto states = solve("shifted_harmonic", {}, 1.0, 8.0, 801, 3);
  for (const auto& s : states) {
    const auto ref = canonicalize_phase(s);
    CHECK(max_diff(canonicalize_phase(rotated(s, 0.7)).psi, ref.psi) < 1e-12);
    for (int k = 0; k < 16; ++k) {
      const auto c = canonicalize_phase(rotated(s, 2.0 * std::numbers::pi * k / 16.0));
      CHECK(max_diff(c.psi, ref.psi) < 1e-12);
    }
    CHECK(max_diff(canonicalize_phase(ref).psi, ref.psi) < 1e-14);
  }
}

TEST_CASE("decompose and reassemble round trip") {
  const auto states = solve("ix_cubed", {1.0}, 1.0, 6.0, 801, 3);
  for (const auto& s : states) {
    const auto c = canonicalize_phase(s);
    const auto parts = decompose(c);
    CHECK(max_diff(parts.reassemble(), c.psi) == 0.0);
    CHECK(parts.pt_eigen_residual < 1e-6);
  }
}

TEST_CASE("shifted oscillator components match the closed form") {
  const auto states = solve("shifted_harmonic", {}, 1.0, 10.0, 2001, 1);
  const auto parts = decompose(canonicalize_phase(states[0]));
  const Grid& g = *parts.grid;
  const double c = parts.psi0[g.center()];
  REQUIRE(c > 0.0);
  double err = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double x = g.x(i);
    const double env = c * std::exp(-0.5 * x * x);
    err = std::max(err, std::abs(parts.psi0[i] - env * std::cos(0.5 * x)));
    err = std::max(err, std::abs(parts.psi1[i] + env * std::sin(0.5 * x)));
  }
  CHECK(err < 1e-4 * c);
  CHECK(parts.psi0_nodes == 2);
}

TEST_CASE("decompose requires a canonical state") {
  const auto states = solve("harmonic", {}, 0.0, 6.0, 401, 1);
  CHECK_THROWS_AS(decompose(states[0]), ConfigError);
}

TEST_CASE("broken eigenstates are rejected") {
  const auto states = solve("pt_square_well", {1.0}, 6.0, 1.0, 401, 2);
  REQUIRE(states[0].classification == Classification::conjugate_pair);
  CHECK_THROWS_AS(canonicalize_phase(states[0]), NotPTEigenstateError);
}

TEST_CASE("make_parts builds components without checks") {
  const auto g = Grid::make(1.0, 5);
  const auto parts = make_parts(g, 0, {0.0, 1.0, 2.0, 1.0, 0.0}, {0.0, 1.0, 0.0, -1.0, 0.0});
  const auto psi = parts.reassemble();
  CHECK(psi[1] == cplx(1.0, 1.0));
  CHECK(psi[3] == cplx(1.0, -1.0));
}
