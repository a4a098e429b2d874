// Batch front end: one subcommand per check, reports as JSON or CSV.
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "cspi/error.hpp"
#include "cspi/lab.hpp"

int main(int argc, char** argv) {
  using cspi::lab::RunConfig;
  RunConfig config;
  std::string command;
  std::string scheme_flag;
  bool no_timing = false;

  CLI::App app{"cspi_lab: coherent-state path integral checks"};
  app.set_config("--config", "", "key = value config file; flags override it");
  app.add_option("command", command, "subcommand")
      ->required()
      ->check(CLI::IsMember(cspi::lab::commands()));
  app.add_option("--beta", config.beta, "inverse temperature")->capture_default_str();
  app.add_option("--mu", config.mu, "chemical potential")->capture_default_str();
  app.add_option("--u,--U", config.u, "on-site interaction")->capture_default_str();
  app.add_option("--N", config.n_values, "slice counts")->delimiter(',');
  app.add_option("--s", config.s_values, "ordering indices in [-1, 1]")->delimiter(',');
  app.add_option("--scheme", config.scheme,
                 "exact-product | naive-exponential | ito-corrected")
      ->capture_default_str();
  app.add_option("--n-max", config.n_max, "transfer truncation")->capture_default_str();
  app.add_option("--tol", config.tol, "series tolerance")->capture_default_str();
  app.add_flag("--high-precision", config.high_precision, "50-digit transfer eigenvalues");
  app.add_option("--nodes", config.nodes, "Gauss-Hermite nodes")->capture_default_str();
  app.add_option("--fock-n", config.fock_n, "Fock block checked by ordering-check")
      ->capture_default_str();
  app.add_option("--samples", config.samples, "Monte Carlo samples")->capture_default_str();
  app.add_option("--seed", config.seed, "Monte Carlo seed")->capture_default_str();
  app.add_flag("--allow-unsafe-contour", config.allow_unsafe_contour,
               "run HS evaluations where the real noise contour is not safe");
  app.add_option("--format", config.format, "json | csv")->capture_default_str();
  app.add_option("--out", config.path, "output file (default stdout)");
  app.add_flag("--no-timing", no_timing, "write wall_ms = 0 for reproducible output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }
  config.timing = !no_timing;

  try {
    const auto report = cspi::lab::run(command, config);
    cspi::lab::write_report(report);
    for (const auto& e : report.errors) std::cerr << "cspi_lab: " << e << '\n';
    if (!report.pass) std::cerr << "cspi_lab: " << command << ": tolerance gate failed\n";
    return report.pass ? 0 : 1;
  } catch (const cspi::LabError& e) {
    std::cerr << "cspi_lab: " << command << ": " << e.what() << '\n';
    return 2;
  }
}
