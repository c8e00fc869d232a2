#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "ptqm/report.hpp"

namespace {

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    out.push_back(std::stod(item, &used));
    if (used != item.size()) throw std::invalid_argument("bad number '" + item + "'");
  }
  return out;
}

std::array<double, 3> parse_range(const std::string& s) {
  std::array<double, 3> r{};
  std::stringstream ss(s);
  std::string item;
  std::size_t k = 0;
  while (std::getline(ss, item, ':')) {
    if (k == 3) throw std::invalid_argument("lambda range takes start:end:step");
    std::size_t used = 0;
    r[k++] = std::stod(item, &used);
    if (used != item.size()) throw std::invalid_argument("bad number '" + item + "'");
  }
  if (k != 3) throw std::invalid_argument("lambda range takes start:end:step");
  return r;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectra, ansatz decomposition and identity checks for 1D PT-symmetric Hamiltonians"};
  app.require_subcommand(1);

  ptqm::RunConfig cfg;
  std::string params, range, out_path;
  app.add_option("--potential", cfg.potential, "catalog name")->required();
  app.add_option("--params", params, "comma-separated potential parameters");
  app.add_option("--lambda", cfg.lambda, "strength of the odd imaginary part");
  app.add_option("--grid-L", cfg.grid_L, "grid half-width");
  app.add_option("--grid-N", cfg.grid_N, "odd number of grid points");
  app.add_option("--states", cfg.states, "number of levels");
  app.add_option("--lambda-range", range, "scan range start:end:step");
  app.add_option("--op", cfg.ops, "x|x2|x3|p|p2|V|H|ix|exp_ix (repeatable)");
  app.add_option("--definition", cfg.definition, "hermitian|pt|both");
  app.add_option("--format", cfg.format, "json|csv");
  app.add_option("--out", out_path, "output path (default stdout)");
  bool no_timestamp = false;
  app.add_flag("--no-timestamp", no_timestamp, "omit the timestamp for byte-stable output");
  app.add_option("--tol-real", cfg.tol.tol_real);
  app.add_option("--tol-residual", cfg.tol.tol_residual);
  app.add_option("--tol-newton", cfg.tol.tol_newton);
  app.add_option("--tol-pt", cfg.tol.tol_pt);
  app.add_option("--tol-parity", cfg.tol.tol_parity);
  app.add_option("--tol-pair", cfg.tol.tol_pair);
  app.add_option("--dlambda", cfg.tol.dlambda, "continuation step");
  app.add_option("--max-newton", cfg.tol.max_newton);

  for (const char* name : {"solve", "expect", "verify", "scan"})
    app.add_subcommand(name)->fallthrough();

  try {
    app.parse(argc, argv);
    cfg.command = app.get_subcommands().front()->get_name();
    cfg.params = parse_list(params);
    if (!range.empty()) cfg.lambda_range = parse_range(range);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "ptqm: error: " << e.what() << "\n";
    return 1;
  }
  cfg.timestamp = !no_timestamp;

  const auto outcome = ptqm::run(cfg);
  std::cerr << outcome.diagnostics;
  if (outcome.exit_status == 1) return 1;
  if (out_path.empty()) {
    std::cout << outcome.output;
  } else {
    std::ofstream f(out_path, std::ios::binary);
    if (!f) {
      std::cerr << "ptqm: error: cannot open " << out_path << "\n";
      return 1;
    }
    f << outcome.output;
  }
  return outcome.exit_status;
}
