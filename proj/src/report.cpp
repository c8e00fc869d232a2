#include "ptqm/report.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <sstream>

#include "ptqm/analysis.hpp"
#include "ptqm/ansatz.hpp"
#include "ptqm/errors.hpp"
#include "ptqm/potential.hpp"

namespace ptqm {

using nlohmann::json;

std::string format_decimal(double v) {
  if (v == 0.0) return "0.0";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%#.17g", v);
  return buf;
}

json complex_json(cplx z) { return json{{"re", z.real()}, {"im", z.imag()}}; }

std::string export_json(const json& envelope) { return envelope.dump(2) + "\n"; }

std::string export_csv(std::span<const SpectrumRow> rows) {
  std::string out =
      "n,re_E,im_E,classification,N_hermitian,re_N_pt,im_N_pt,parity_residual_0,parity_residual_1\n";
  for (const auto& r : rows) {
    out += std::to_string(r.n) + ',' + format_decimal(r.energy.real()) + ',' +
           format_decimal(r.energy.imag()) + ',' + to_string(r.classification) + ',' +
           format_decimal(r.n_hermitian) + ',' + format_decimal(r.n_pt.real()) + ',' +
           format_decimal(r.n_pt.imag()) + ',' +
           (r.parity_residual0 ? format_decimal(*r.parity_residual0) : "") + ',' +
           (r.parity_residual1 ? format_decimal(*r.parity_residual1) : "") + '\n';
  }
  return out;
}

std::string export_csv(const ScanResult& scan) {
  std::string out = "lambda,n,re_E,im_E,abs_pt_norm,classification\n";
  for (const auto& s : scan.samples)
    for (std::size_t i = 0; i < s.energies.size(); ++i)
      out += format_decimal(s.lambda) + ',' + std::to_string(i) + ',' +
             format_decimal(s.energies[i].real()) + ',' + format_decimal(s.energies[i].imag()) + ',' +
             format_decimal(s.abs_pt_norm[i]) + ',' + to_string(s.classification[i]) + '\n';
  return out;
}

namespace {

// Accumulates judged checks for the envelope's rollup.
class Checks {
 public:
  void add(std::string name, double value, double tol, bool pass) {
    list_.push_back({{"name", std::move(name)}, {"value", value}, {"tol", tol}, {"pass", pass}});
    failed_ += pass ? 0 : 1;
  }
  void add_max(std::string name, double value, double tol) { add(std::move(name), value, tol, value <= tol); }
  bool ok() const { return failed_ == 0; }
  json summary() const {
    json worst = json::object();
    for (const auto& c : list_) {
      const auto& name = c["name"].get_ref<const std::string&>();
      const double v = c["value"].get<double>();
      if (!worst.contains(name) || worst[name].get<double>() < v) worst[name] = v;
    }
    return {{"checks", list_.size()}, {"failed", failed_}, {"worst", worst}};
  }
  const json& list() const { return list_; }

 private:
  json list_ = json::array();
  std::size_t failed_ = 0;
};

json tolerances_json(const Tolerances& t) {
  return {{"tol_real", t.tol_real},     {"tol_residual", t.tol_residual}, {"tol_newton", t.tol_newton},
          {"dlambda", t.dlambda},       {"tol_pt", t.tol_pt},             {"tol_parity", t.tol_parity},
          {"tol_pair", t.tol_pair},     {"max_newton", t.max_newton}};
}

json config_json(const RunConfig& c) {
  json j = {{"command", c.command},
            {"potential", {{"name", c.potential}, {"params", c.params}, {"lambda", c.lambda}}},
            {"grid", {{"L", c.grid_L}, {"N", c.grid_N}}},
            {"states", c.states},
            {"definition", c.definition},
            {"format", c.format},
            {"ops", c.ops},
            {"tolerances", tolerances_json(c.tol)}};
  if (c.lambda_range)
    j["lambda_range"] = {{"start", (*c.lambda_range)[0]}, {"end", (*c.lambda_range)[1]},
                         {"step", (*c.lambda_range)[2]}};
  return j;
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void validate(const RunConfig& c) {
  static const std::vector<std::string> commands = {"solve", "expect", "verify", "scan"};
  if (std::find(commands.begin(), commands.end(), c.command) == commands.end())
    throw ConfigError("unknown command '" + c.command + "' (expected solve, expect, verify, scan)");
  if (c.format != "json" && c.format != "csv")
    throw ConfigError("format must be json or csv, got '" + c.format + "'");
  if (c.definition != "hermitian" && c.definition != "pt" && c.definition != "both")
    throw ConfigError("definition must be hermitian, pt or both, got '" + c.definition + "'");
  if (c.format == "csv" && (c.command == "expect" || c.command == "verify"))
    throw ConfigError("CSV export supports spectrum (solve) and scan payloads only");
  if (c.states < 1) throw ConfigError("--states must be >= 1");
  if (c.command == "scan" && !c.lambda_range) throw ConfigError("scan requires --lambda-range a:b:step");
  const auto& t = c.tol;
  if (!(t.tol_real > 0 && t.tol_residual > 0 && t.tol_newton > 0 && t.dlambda > 0 && t.tol_pt > 0 &&
        t.tol_parity > 0 && t.tol_pair > 0 && t.max_newton > 0))
    throw ConfigError("tolerances and the continuation step must be positive");
  catalog_get(c.potential, c.params, c.lambda);
  Grid::make(c.grid_L, c.grid_N);
}

std::vector<Definition> definitions(const std::string& d) {
  if (d == "hermitian") return {Definition::hermitian};
  if (d == "pt") return {Definition::pt};
  return {Definition::hermitian, Definition::pt};
}

// ---------------------------------------------------------------------------

struct Payload {
  json results = json::object();
  std::string csv;
};

Payload run_solve(const RunConfig& c, const PTPotential& p, const GridPtr& grid, Checks& checks) {
  const auto states = continue_spectrum({p, grid, c.states, c.tol});
  std::vector<SpectrumRow> rows;
  json list = json::array();
  for (const auto& s : states) {
    SpectrumRow row;
    row.n = s.index;
    row.energy = s.energy;
    row.classification = s.classification;
    const double norm = std::real(overlap(s, s, OverlapMode::hermitian));
    row.n_hermitian = 1.0;
    row.n_pt = overlap(s, s, OverlapMode::pt_bilinear) / norm;
    json j = {{"n", s.index},
              {"energy", complex_json(s.energy)},
              {"classification", to_string(s.classification)},
              {"residual", s.residual},
              {"residual_tol", c.tol.tol_residual},
              {"N_hermitian", row.n_hermitian}};
    if (s.partner) j["partner"] = *s.partner;
    if (s.classification == Classification::real) {
      const auto a = analyze(s, c.tol);
      const auto np = norm_pair(a.parts);
      row.n_pt = cplx(np.pt / np.hermitian, np.bilinear.imag() / np.hermitian);
      row.parity_residual0 = a.parts.parity_residual0;
      row.parity_residual1 = a.parts.parity_residual1;
      j["parity_residual_0"] = a.parts.parity_residual0;
      j["parity_residual_1"] = a.parts.parity_residual1;
      j["parity_tol"] = c.tol.tol_parity;
      j["pt_eigen_residual"] = a.parts.pt_eigen_residual;
      j["psi0_nodes"] = a.parts.psi0_nodes;
      if (a.parts.psi0_nodes != s.index) j["node_warning"] = "psi0 node count differs from n";
      checks.add_max("parity_residual", std::max(a.parts.parity_residual0, a.parts.parity_residual1),
                     c.tol.tol_parity);
    } else {
      const auto& q = states[static_cast<std::size_t>(*s.partner)];
      checks.add_max("pair_mismatch", std::abs(s.energy - std::conj(q.energy)) / std::max(1.0, std::abs(s.energy)),
                     c.tol.tol_pair);
    }
    j["N_pt"] = complex_json(row.n_pt);
    checks.add_max("eigen_residual", s.residual, c.tol.tol_residual);
    list.push_back(j);
    rows.push_back(row);
  }
  return {{{"spectrum", list}}, export_csv(rows)};
}

Payload run_expect(const RunConfig& c, const System& sys, Checks& checks) {
  constexpr double structure_tol = 1e-7;
  std::vector<std::string> ops = c.ops;
  if (ops.empty()) ops = {"x", "x2", "x3", "p", "p2", "V", "H", "ix", "exp_ix"};
  std::vector<OperatorSpec> specs;
  for (const auto& o : ops) specs.push_back(OperatorSpec::parse(o));
  const auto states = analyze_unbroken(sys, c.states, c.tol);
  json list = json::array();
  for (const auto& s : states) {
    for (const auto& op : specs) {
      for (auto def : definitions(c.definition)) {
        const auto r = expectation(s, op, def, sys);
        const bool pass = r.structure_residual <= structure_tol;
        json j = {{"n", r.n},
                  {"op", op.label},
                  {"definition", to_string(def)},
                  {"value", complex_json(r.value)},
                  {"predicted", to_string(r.predicted)},
                  {"structure_residual", r.structure_residual},
                  {"scale", r.scale},
                  {"tol", structure_tol},
                  {"pass", pass}};
        if (r.cross_check) j["second_difference_value"] = complex_json(*r.cross_check);
        if (r.alternative) j["alternative_pt_normalized"] = complex_json(*r.alternative);
        checks.add("structure_residual", r.structure_residual, structure_tol, pass);
        list.push_back(j);
      }
    }
  }
  return {{{"expectations", list}}, {}};
}

json entry_json(const IdentityEntry& e) {
  json j = {{"m", e.m},           {"n", e.n},           {"lhs", complex_json(e.lhs)},
            {"rhs", complex_json(e.rhs)}, {"raw_residual", e.raw_residual}, {"residual", e.residual},
            {"tol", e.tol},       {"pass", e.pass}};
  if (!e.note.empty()) j["note"] = e.note;
  return j;
}

Payload run_verify(const RunConfig& c, const System& sys, Checks& checks) {
  const auto states = analyze_unbroken(sys, c.states, c.tol);
  const auto rep = verify_identities(states, sys);
  json ids = json::object();
  for (const auto& [tag, list] : rep.entries) {
    if (list.empty()) continue;
    // Headline fields come from the worst entry (for the margin check, the smallest margin).
    const bool margin = tag == "eq29";
    std::size_t w = 0;
    for (std::size_t i = 1; i < list.size(); ++i) {
      const bool worse = margin ? list[i].residual < list[w].residual : list[i].residual > list[w].residual;
      if (worse) w = i;
    }
    json j = entry_json(list[w]);
    j["pass"] = rep.pass(tag);
    json entries = json::array();
    for (const auto& e : list) entries.push_back(entry_json(e));
    j["entries"] = entries;
    ids[tag] = j;
    checks.add(tag, list[w].residual, list[w].tol, rep.pass(tag));
  }
  json meta = json::object();
  for (const auto& [k, v] : rep.metadata) meta[k] = v;
  return {{{"identities", ids}, {"metadata", meta}}, {}};
}

Payload run_scan(const RunConfig& c, const PTPotential& p, const CatalogEntry& entry,
                 const GridPtr& grid, Checks& checks) {
  const auto& range = *c.lambda_range;
  ScanRequest req{p, grid, range[0], range[1], range[2], c.states, c.tol, 0};
  const auto r = scan_lambda(req);
  json samples = json::array();
  for (const auto& s : r.samples) {
    json st = json::array();
    for (std::size_t i = 0; i < s.energies.size(); ++i) {
      json e = {{"n", i},
                {"energy", complex_json(s.energies[i])},
                {"classification", to_string(s.classification[i])},
                {"abs_pt_norm", s.abs_pt_norm[i]}};
      if (s.partner[i]) e["partner"] = *s.partner[i];
      st.push_back(e);
    }
    samples.push_back({{"lambda", s.lambda}, {"refinement", s.refinement}, {"states", st}});
  }
  json out = {{"threshold_found", r.threshold_found}, {"samples", samples}, {"step", r.step}};
  if (entry.breaking_threshold) {
    out["reference_threshold"] = *entry.breaking_threshold;
    out["reference_threshold_note"] = entry.threshold_note;
  }
  if (r.threshold_found) {
    out["lambda_c"] = *r.lambda_c();
    out["bracket"] = {r.bracket_lo, r.bracket_hi};
    out["bracket_width"] = r.bracket_width();
    out["general_orthogonality"] = r.general_orthogonality;
    json pairs = json::array();
    for (const auto& e : r.pairing) {
      pairs.push_back({{"a", e.a},
                       {"b", e.b},
                       {"energy_a", complex_json(e.energy_a)},
                       {"energy_b", complex_json(e.energy_b)},
                       {"mismatch", e.mismatch},
                       {"mismatch_tol", c.tol.tol_pair},
                       {"self_overlap_a", e.self_overlap_a},
                       {"self_overlap_b", e.self_overlap_b},
                       {"self_overlap_tol", 1e-4}});
      checks.add_max("pair_mismatch", e.mismatch, c.tol.tol_pair);
      checks.add_max("self_overlap", std::max(e.self_overlap_a, e.self_overlap_b), 1e-4);
    }
    out["pairing"] = pairs;
    checks.add_max("general_orthogonality", r.general_orthogonality, 1e-8);
    json traj = json::array();
    for (const auto& t : self_orthogonality_report(r)) {
      json a = json::array();
      for (const auto& [l, v] : t.approach) a.push_back({l, v});
      json j = {{"state", t.state},         {"start_value", t.start_value},
                {"bracket_value", t.bracket_value}, {"ratio", t.ratio},
                {"ratio_tol", 1e-3},        {"monotone", t.monotone},
                {"vanishes", t.vanishes},   {"self_orthogonal", t.self_orthogonal},
                {"approach", a}};
      if (!t.warning.empty()) j["warning"] = t.warning;
      traj.push_back(j);
      checks.add_max("pt_norm_ratio", t.ratio, 1e-3);
    }
    out["self_orthogonality"] = traj;
  }
  return {{{"scan", out}}, export_csv(r)};
}

}  // namespace

RunOutcome run(const RunConfig& c) {
  RunOutcome outcome;
  try {
    validate(c);
    auto [potential, entry] = catalog_get(c.potential, c.params, c.lambda);
    const auto grid = Grid::make(c.grid_L, c.grid_N);
    const auto parity = validate_pt_symmetry(potential, *grid);
    if (parity.even > 1e-12 || parity.odd > 1e-12)
      throw ConfigError("potential violates the PT parity contract on this grid");

    Checks checks;
    Payload payload;
    if (c.command == "solve") {
      payload = run_solve(c, potential, grid, checks);
    } else if (c.command == "scan") {
      payload = run_scan(c, potential, entry, grid, checks);
    } else {
      const auto sys = System::make(potential, grid);
      payload = c.command == "expect" ? run_expect(c, sys, checks) : run_verify(c, sys, checks);
    }

    json env = {{"tool", "ptqm"},
                {"version", kToolVersion},
                {"config", config_json(c)},
                {"results", payload.results},
                {"checks", checks.list()},
                {"residual_summary", checks.summary()},
                {"pass", checks.ok()}};
    if (c.timestamp) env["timestamp"] = utc_timestamp();
    outcome.envelope = env;
    outcome.output = c.format == "csv" ? payload.csv : export_json(env);
    outcome.exit_status = checks.ok() ? 0 : 2;
    if (!checks.ok()) outcome.diagnostics = "one or more checks failed\n";
  } catch (const std::exception& e) {
    outcome.exit_status = 1;
    outcome.diagnostics = std::string("ptqm: error: ") + e.what() + "\n";
    outcome.output.clear();
  }
  return outcome;
}

}  // namespace ptqm
