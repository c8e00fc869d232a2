// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any fail.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>

#include "ptqm/analysis.hpp"
#include "ptqm/report.hpp"
#include "ptqm/scanner.hpp"

using namespace ptqm;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

int failures = 0;

void criterion(const char* name, const std::function<void(Outcome&)>& body) {
  Outcome o;
  o.detail.precision(4);
  try {
    body(o);
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail << " [exception: " << e.what() << "]";
  }
  if (!o.pass) ++failures;
  std::printf("%s  %s%s\n", o.pass ? "PASS" : "FAIL", name, o.detail.str().c_str());
  std::fflush(stdout);
}

std::vector<EigenState> spectrum(const PTPotential& p, double L, std::size_t N, int K) {
  return continue_spectrum({p, Grid::make(L, N), K, {}});
}

const std::vector<OperatorSpec>& operator_menu() {
  static const std::vector<OperatorSpec> ops = {
      OperatorSpec::x_power(1), OperatorSpec::x_power(2), OperatorSpec::x_power(3),
      OperatorSpec::momentum(), OperatorSpec::momentum_squared(), OperatorSpec::potential(),
      OperatorSpec::hamiltonian(), OperatorSpec::ix(), OperatorSpec::exp_ix()};
  return ops;
}

double worst_structure(const System& sys, int K) {
  double worst = 0.0;
  for (const auto& s : analyze_unbroken(sys, K))
    for (const auto& op : operator_menu())
      for (auto def : {Definition::hermitian, Definition::pt})
        worst = std::max(worst, expectation(s, op, def, sys).structure_residual);
  return worst;
}

System shifted(double lambda, std::size_t N = 2001) {
  return System::make(catalog_get("shifted_harmonic", {}, lambda).first, Grid::make(10.0, N));
}

}  // namespace

int main() {
  criterion("box oracle", [](Outcome& o) {
    const auto [p, e] = catalog_get("box", {1.0});
    const auto states = spectrum(p, 1.0, 2001, 3);
    double worst = 0.0;
    for (int n = 0; n < 3; ++n) {
      const double k = n + 1;
      const double exact = std::pow(k * std::numbers::pi / 2.0, 2);
      worst = std::max(worst, std::abs(states[n].energy.real() - exact) / exact);
    }
    o.detail << " max rel err " << worst;
    o.require(worst < 1e-5, "relative error");
  });

  criterion("harmonic oracle", [](Outcome& o) {
    const auto p = catalog_get("harmonic", {}).first;
    const auto fine = spectrum(p, 10.0, 2001, 6);
    const auto coarse = spectrum(p, 10.0, 1001, 6);
    double worst = 0.0, lo = 1e300, hi = 0.0;
    for (int n = 0; n < 6; ++n) {
      const double ef = std::abs(fine[n].energy.real() - (2 * n + 1));
      const double ec = std::abs(coarse[n].energy.real() - (2 * n + 1));
      worst = std::max(worst, ef);
      lo = std::min(lo, ec / ef);
      hi = std::max(hi, ec / ef);
    }
    o.detail << " max abs err " << worst << ", refinement ratio " << lo << ".." << hi;
    o.require(worst < 5e-3, "absolute error");
    o.require(lo > 3.5 && hi < 4.5, "second-order convergence");
  });

  criterion("shifted complex oscillator", [](Outcome& o) {
    const auto sys = shifted(1.0);
    const auto raw = continue_spectrum({sys.potential, sys.grid, 4, {}});
    double imag = 0.0, err = 0.0;
    for (int n = 0; n < 4; ++n) {
      imag = std::max(imag, std::abs(raw[n].energy.imag()));
      err = std::max(err, std::abs(raw[n].energy.real() - (2 * n + 1.25)));
    }
    const auto states = analyze_unbroken(sys, 4);
    const auto x = expectation(states[0], OperatorSpec::x_power(1), Definition::pt, sys);
    double pt_imag = 0.0;
    for (const auto& s : states) {
      const auto np = norm_pair(s.parts);
      pt_imag = std::max(pt_imag, std::abs(np.bilinear.imag()) / np.hermitian);
    }
    o.detail << " max|Im E| " << imag << ", max energy err " << err << ", (0|x|0) = " << x.value.real()
              << (x.value.imag() < 0 ? " - " : " + ") << std::abs(x.value.imag()) << "i";
    o.require(imag < 1e-8, "real spectrum");
    o.require(err < 5e-3, "energy oracle");
    o.require(std::abs(x.value - cplx(0.0, -0.5)) < 2e-3, "(0|x|0)");
    o.require(pt_imag < 1e-10, "real PT norm");
  });

  criterion("ansatz conformance", [](Outcome& o) {
    struct Case {
      const char* name;
      std::vector<double> params;
      double lambda, L;
    };
    const std::vector<Case> cases = {{"box", {1.0}, 0.0, 1.0},
                                     {"harmonic", {}, 0.0, 10.0},
                                     {"shifted_harmonic", {}, 1.0, 10.0},
                                     {"ix_cubed", {}, 1.0, 6.0},
                                     {"ix_cubed", {1.0}, 1.0, 6.0},
                                     {"pt_square_well", {1.0}, 2.0, 1.0},
                                     {"scarf2", {4.0}, 2.0, 10.0}};
    double parity = 0.0, gauge = 0.0;
    int checked = 0;
    for (const auto& c : cases) {
      const auto p = catalog_get(c.name, c.params, c.lambda).first;
      for (const auto& s : spectrum(p, c.L, 2001, 6)) {
        if (s.classification != Classification::real || s.index > 5) continue;
        const auto ref = canonicalize_phase(s);
        const auto parts = decompose(ref);
        parity = std::max({parity, parts.parity_residual0, parts.parity_residual1});
        for (int k = 0; k < 16; ++k) {
          EigenState r = s;
          r.psi *= std::polar(1.0, 2.0 * std::numbers::pi * (k + 0.37) / 16.0);
          const auto c2 = canonicalize_phase(r);
          double d = 0.0, m = 0.0;
          for (std::size_t i = 0; i < ref.psi.size(); ++i) {
            d = std::max(d, std::abs(c2.psi[i] - ref.psi[i]));
            m = std::max(m, std::abs(ref.psi[i]));
          }
          gauge = std::max(gauge, d / m);
        }
        ++checked;
      }
    }
    o.detail << " states " << checked << ", max parity residual " << parity << ", max gauge spread "
              << gauge;
    o.require(parity <= 1e-6, "parity residual");
    o.require(gauge <= 1e-12, "gauge invariance");
  });

  criterion("identity ledger", [](Outcome& o) {
    const auto sys = shifted(1.0);
    const auto rep = verify_identities(analyze_unbroken(sys, 4), sys);
    for (const char* tag : {"eq19", "eq23", "eq24", "eq27", "eq28", "eq29"})
      o.require(rep.pass(tag) && !rep.entries.at(tag).empty(), tag);
    for (const auto& tag : rep.failing()) o.require(false, tag);
    const auto fine = shifted(1.0, 4001);
    const auto rep2 = verify_identities(analyze_unbroken(fine, 4), fine);
    double drift = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
      const double a = rep.entries.at("eq29")[i].residual;
      const double b = rep2.entries.at("eq29")[i].residual;
      o.require(a > 0.0 && b > 0.0, "positive margin");
      drift = std::max(drift, std::abs(a - b) / b);
    }
    o.detail << " worst eq19 " << rep.worst("eq19") << ", eq23 " << rep.worst("eq23") << ", eq24 "
              << rep.worst("eq24") << ", eq27 " << rep.worst("eq27") << ", eq28 " << rep.worst("eq28")
              << ", margin drift " << drift;
    o.require(drift <= 0.1, "margin stability");
  });

  criterion("structure table", [](Outcome& o) {
    const auto harm = System::make(catalog_get("harmonic", {}).first, Grid::make(10.0, 2001));
    const double a = worst_structure(harm, 6);
    const double b = worst_structure(shifted(1.0), 6);
    o.detail << " worst residual harmonic " << a << ", shifted " << b;
    o.require(a <= 1e-7 && b <= 1e-7, "structure residual");
  });

  criterion("breaking transition", [](Outcome& o) {
    ScanRequest req;
    req.potential = catalog_get("pt_square_well", {1.0}).first;
    req.grid = Grid::make(1.0, 801);
    req.lambda_start = 0.0;
    req.lambda_end = 6.0;
    req.state_count = 2;
    req.step = 0.05;
    const auto a = scan_lambda(req);
    req.step = 0.025;
    const auto b = scan_lambda(req);
    o.require(a.threshold_found && b.threshold_found, "square well threshold");
    if (!a.threshold_found || !b.threshold_found) return;
    const bool stable = a.bracket_lo <= b.bracket_hi && b.bracket_lo <= a.bracket_hi;
    o.detail << " square well [" << a.bracket_lo << ", " << a.bracket_hi << "] vs [" << b.bracket_lo
              << ", " << b.bracket_hi << "]";
    o.require(stable, "bracket stability under step halving");
    for (const auto* r : {&a, &b}) {
      o.require(!r->pairing.empty(), "conjugate pairs above threshold");
      for (const auto& p : r->pairing) {
        o.require(p.mismatch <= 1e-6, "pair mismatch");
        o.require(std::max(p.self_overlap_a, p.self_overlap_b) <= 1e-4, "self-overlap");
      }
    }

    ScanRequest s;
    s.potential = catalog_get("scarf2", {4.0}).first;
    s.lambda_start = 3.5;
    s.lambda_end = 5.0;
    s.step = 0.05;
    s.state_count = 2;
    for (std::size_t N : {2001u, 4001u}) {
      s.grid = Grid::make(10.0, N);
      const auto r = scan_lambda(s);
      o.require(r.threshold_found, "scarf threshold");
      if (!r.threshold_found) continue;
      o.detail << ", scarf N=" << N << " lambda_c " << *r.lambda_c();
      o.require(std::abs(*r.lambda_c() - 4.25) <= 0.1, "scarf threshold location");
    }
  });

  criterion("Hermitian limit", [](Outcome& o) {
    const auto sys = shifted(0.0);
    const auto states = analyze_unbroken(sys, 6);
    double norm_gap = 0.0, rhs = 0.0, imag = 0.0;
    for (const auto& s : states) {
      const auto np = norm_pair(s.parts);
      norm_gap = std::max(norm_gap, std::abs(np.pt - np.hermitian) / np.hermitian);
      imag = std::max(imag, std::abs(s.state.energy.imag()));
    }
    const auto rep = verify_identities(states, sys);
    for (const auto& e : rep.entries.at("eq24")) rhs = std::max(rhs, std::abs(e.rhs));
    const auto harm = System::make(catalog_get("harmonic", {}).first, sys.grid);
    const auto h = continue_spectrum({harm.potential, harm.grid, 6, {}});
    bool same = true;
    for (int n = 0; n < 6; ++n) same = same && h[n].energy == states[n].state.energy;
    o.detail << " max |N'-N|/N " << norm_gap << ", max eq24 rhs " << rhs << ", worst structure "
              << worst_structure(sys, 6);
    o.require(norm_gap <= 1e-10, "N' = N");
    o.require(rhs == 0.0, "vanishing commutator side");
    o.require(imag == 0.0, "real spectrum");
    o.require(rep.all_pass(), "identity ledger");
    o.require(same, "matches the Hermitian oscillator");
    o.require(worst_structure(sys, 6) <= 1e-7, "structure table");
  });

  criterion("determinism", [](Outcome& o) {
    auto base = [] {
      RunConfig c;
      c.potential = "shifted_harmonic";
      c.lambda = 1.0;
      c.grid_L = 8.0;
      c.grid_N = 801;
      c.states = 3;
      c.timestamp = false;
      return c;
    };
    int compared = 0;
    for (const char* cmd : {"solve", "expect", "verify"}) {
      for (const char* fmt : {"json", "csv"}) {
        if (std::string(fmt) == "csv" && std::string(cmd) != "solve") continue;
        auto c = base();
        c.command = cmd;
        c.format = fmt;
        const auto x = run(c), y = run(c);
        o.require(x.exit_status == 0 && x.output == y.output && !x.output.empty(),
                  std::string(cmd) + "/" + fmt);
        ++compared;
      }
    }
    for (const char* fmt : {"json", "csv"}) {
      RunConfig c;
      c.command = "scan";
      c.potential = "pt_square_well";
      c.params = {1.0};
      c.grid_L = 1.0;
      c.grid_N = 201;
      c.states = 2;
      c.lambda_range = std::array<double, 3>{3.0, 5.0, 0.25};
      c.format = fmt;
      c.timestamp = false;
      const auto x = run(c), y = run(c);
      o.require(x.exit_status != 1 && x.output == y.output && !x.output.empty(),
                std::string("scan/") + fmt);
      ++compared;
    }
    o.detail << " " << compared << " byte-identical report pairs";
  });

  return failures == 0 ? 0 : 1;
}
