#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ptqm/analysis.hpp"
#include "ptqm/errors.hpp"

using namespace ptqm;

namespace {

System shifted_system(double lambda, std::size_t N = 2001) {
  return System::make(catalog_get("shifted_harmonic", {}, lambda).first, Grid::make(10.0, N));
}

// Physicists' Hermite polynomial at a complex argument.
cplx hermite(int n, cplx z) {
  cplx a = 1.0, b = 2.0 * z;
  if (n == 0) return a;
  for (int k = 1; k < n; ++k) {
    const cplx c = 2.0 * z * b - 2.0 * k * a;
    a = b;
    b = c;
  }
  return b;
}

}  // namespace

TEST_CASE("norm_pair") {
  const auto g = Grid::make(1.0, 5);
  const auto parts = make_parts(g, 0, {0.0, 1.0, 2.0, 1.0, 0.0}, {0.0, 1.0, 0.0, -1.0, 0.0});
  const auto np = norm_pair(parts);
  // h = 0.5: int psi0^2 = 0.5 * (1 + 4 + 1) = 3, int psi1^2 = 1.
  CHECK(np.hermitian == doctest::Approx(4.0));
  CHECK(np.pt == doctest::Approx(2.0));
  CHECK(np.bilinear_discrepancy < 1e-15);
  CHECK_FALSE(np.near_self_orthogonal);

  const std::vector<double> f{0.0, 1.0, 2.0, 1.0, 0.0};
  const auto degenerate = norm_pair(make_parts(g, 0, f, f));
  CHECK(degenerate.pt == 0.0);
  CHECK(degenerate.near_self_orthogonal);
}

TEST_CASE("PT norm ratio of the shifted oscillator matches the closed form") {
  const double lambda = 1.0;
  const auto sys = shifted_system(lambda);
  const auto states = analyze_unbroken(sys, 4);
  for (int n = 0; n < 4; ++n) {
    const auto np = norm_pair(states[n].parts);
    // Closed form: int Psi_n^2 = 2^n n! sqrt(pi); N from a fine independent quadrature.
    const double pt = std::ldexp(std::tgamma(n + 1.0), n) * std::sqrt(std::numbers::pi);
    const int M = 200001;
    const double a = 12.0, h = 2.0 * a / (M - 1);
    double herm = 0.0;
    for (int i = 0; i < M; ++i) {
      const double x = -a + i * h;
      const cplx z(x, 0.5 * lambda);
      const double w = (i == 0 || i == M - 1) ? 0.5 : 1.0;
      herm += w * std::norm(hermite(n, z) * std::exp(-0.5 * z * z));
    }
    herm *= h;
    CHECK(np.pt / np.hermitian == doctest::Approx(pt / herm).epsilon(1e-5));
    CHECK(np.bilinear_discrepancy < 1e-12 * np.hermitian);
  }
}

TEST_CASE("overlap modes") {
  const auto g = Grid::make(1.0, 5);
  const auto a = GridFunction::from(g, [](double x) { return cplx(0.0, x); });
  const auto b = GridFunction::from(g, [](double x) { return x; });
  CHECK(std::abs(overlap(a, b, OverlapMode::hermitian) - cplx(0.0, -0.75)) < 1e-15);
  CHECK(std::abs(overlap(a, b, OverlapMode::pt_bilinear) - cplx(0.0, 0.75)) < 1e-15);
  CHECK(std::abs(overlap(a, b, OverlapMode::pt_general) - cplx(0.0, 0.75)) < 1e-15);
  CHECK_THROWS_AS(overlap(a, GridFunction(Grid::make(2.0, 5)), OverlapMode::hermitian), ConfigError);
}

TEST_CASE("operator parsing") {
  CHECK(OperatorSpec::parse("x").power == 1);
  CHECK(OperatorSpec::parse("x3").power == 3);
  CHECK(OperatorSpec::parse("p2").kind == OperatorSpec::Kind::momentum_squared);
  CHECK(OperatorSpec::parse("exp_ix").kind == OperatorSpec::Kind::multiply_by);
  CHECK_THROWS_AS(OperatorSpec::parse("q"), ConfigError);
}

TEST_CASE("predicted structure") {
  const auto g = Grid::make(5.0, 101);
  const auto H = Definition::hermitian, P = Definition::pt;
  CHECK(predict_structure(OperatorSpec::x_power(1), H, *g) == Structure::zero);
  CHECK(predict_structure(OperatorSpec::x_power(1), P, *g) == Structure::imaginary);
  CHECK(predict_structure(OperatorSpec::x_power(2), H, *g) == Structure::real);
  CHECK(predict_structure(OperatorSpec::x_power(2), P, *g) == Structure::real);
  CHECK(predict_structure(OperatorSpec::momentum(), H, *g) == Structure::real);
  CHECK(predict_structure(OperatorSpec::momentum(), P, *g) == Structure::zero);
  CHECK(predict_structure(OperatorSpec::hamiltonian(), P, *g) == Structure::real_equal_energy);
  CHECK(predict_structure(OperatorSpec::ix(), P, *g) == Structure::real);
  CHECK(predict_structure(OperatorSpec::ix(), H, *g) == Structure::zero);
  CHECK(predict_structure(OperatorSpec::exp_ix(), P, *g) == Structure::real);
  CHECK(predict_structure(OperatorSpec::multiply_by("x^2+x", [](double x) { return x * x + x; }),
                          P, *g) == Structure::unconstrained);
}

TEST_CASE("expectation values of the shifted oscillator ground state") {
  const auto sys = shifted_system(1.0);
  const auto states = analyze_unbroken(sys, 2);
  const auto& s = states[0];
  const auto x_pt = expectation(s, OperatorSpec::x_power(1), Definition::pt, sys);
  CHECK(std::abs(x_pt.value - cplx(0.0, -0.5)) < 1e-4);
  CHECK(x_pt.structure_residual < 1e-10);

  const auto x_h = expectation(s, OperatorSpec::x_power(1), Definition::hermitian, sys);
  CHECK(std::abs(x_h.value) < 1e-12);

  const auto x2 = expectation(s, OperatorSpec::x_power(2), Definition::pt, sys);
  CHECK(std::abs(x2.value - 0.25) < 1e-4);

  const auto p_h = expectation(s, OperatorSpec::momentum(), Definition::hermitian, sys);
  CHECK(std::abs(p_h.value - (-0.5)) < 1e-4);
  REQUIRE(p_h.alternative.has_value());

  const auto p_pt = expectation(s, OperatorSpec::momentum(), Definition::pt, sys);
  CHECK(std::abs(p_pt.value) < 1e-10);

  const auto p2 = expectation(s, OperatorSpec::momentum_squared(), Definition::pt, sys);
  REQUIRE(p2.cross_check.has_value());
  CHECK(std::abs(p2.value - *p2.cross_check) < 1e-8);

  for (auto def : {Definition::hermitian, Definition::pt}) {
    const auto h = expectation(s, OperatorSpec::hamiltonian(), def, sys);
    CHECK(std::abs(h.value - s.state.energy) < 1e-8);
  }
}

TEST_CASE("identity reports") {
  SUBCASE("Hermitian limit") {
    const auto sys = System::make(catalog_get("harmonic", {}).first, Grid::make(10.0, 2001));
    const auto rep = verify_identities(analyze_unbroken(sys, 5), sys);
    CHECK(rep.all_pass());
    CHECK(rep.failing().empty());
    CHECK(rep.worst("eq23") < 1e-8);
  }
  SUBCASE("shifted oscillator") {
    const auto sys = shifted_system(1.0);
    const auto rep = verify_identities(analyze_unbroken(sys, 5), sys);
    for (const auto& tag : rep.failing()) MESSAGE("failing: " << tag);
    CHECK(rep.all_pass());
    for (const char* tag : {"eq7", "eq8", "eq13", "eq19", "eq23", "eq24", "eq25", "eq26", "eq27",
                            "eq28", "eq29", "eq32", "index_parity"})
      CHECK(rep.entries.count(tag) == 1);
    CHECK(rep.entries.at("eq23").size() == 10);
  }
  SUBCASE("cubic oscillator") {
    const auto sys = System::make(catalog_get("ix_cubed", {1.0}, 1.0).first, Grid::make(6.0, 1201));
    CHECK(verify_identities(analyze_unbroken(sys, 3), sys).all_pass());
  }
}

TEST_CASE("a broken component identity is detected") {
  const auto sys = shifted_system(1.0, 801);
  const auto states = analyze_unbroken(sys, 2);
  auto tampered = states[1].parts;
  for (auto& v : tampered.psi1) v = -v;
  const auto [ok27, ok28] = component_identities(states[0].parts, states[1].parts);
  CHECK(ok27.pass);
  CHECK(ok28.pass);
  const auto [e27, e28] = component_identities(states[0].parts, tampered);
  CHECK(e27.pass);
  CHECK_FALSE(e28.pass);
}

TEST_CASE("PT expectation of a self-orthogonal state is undefined") {
  const auto sys = System::make(catalog_get("harmonic", {}).first, Grid::make(1.0, 5));
  const std::vector<double> f{0.0, 1.0, 2.0, 1.0, 0.0};
  AnalyzedState s;
  s.parts = make_parts(sys.grid, 0, f, f);
  s.state.psi = s.parts.reassemble();
  s.state.energy = 1.0;
  s.state.phase_canonical = true;
  CHECK_THROWS_AS(expectation(s, OperatorSpec::x_power(2), Definition::pt, sys), SelfOrthogonalError);
  CHECK_NOTHROW(expectation(s, OperatorSpec::x_power(2), Definition::hermitian, sys));
}
