#include <iostream>

#include "CLI11.hpp"

#include "dfrc/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Joint design of OFDM radar-communication transmit codes and receive filters"};
  app.require_subcommand(1);

  dfrc::SolveArgs solve;
  auto* s = app.add_subcommand("solve", "run one design and write trace, beampatterns and result.json");
  s->add_option("config", solve.config, "scenario config (JSON)")->required();
  s->add_option("--merit", solve.merit, "merit override, e.g. power-mean:p=-20");
  s->add_option("--seed", solve.seed, "instance and start-point seed");
  s->add_option("--out", solve.out, "output directory")->capture_default_str();

  dfrc::SweepArgs sweep;
  auto* w = app.add_subcommand("sweep", "run a parameter sweep and write sweep.csv and sweep_summary.csv");
  w->add_option("spec", sweep.spec, "sweep spec (JSON)")->required();
  w->add_option("--out", sweep.out, "output directory")->capture_default_str();
  w->add_option("--jobs", sweep.jobs, "worker threads (0: all cores)")->check(CLI::NonNegativeNumber);

  std::filesystem::path validate_path;
  auto* v = app.add_subcommand("validate", "check a scenario config");
  v->add_option("config", validate_path, "scenario config (JSON)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : dfrc::kExitConfig;
  }

  try {
    if (*s) return dfrc::cmd_solve(solve);
    if (*w) return dfrc::cmd_sweep(sweep);
    return dfrc::cmd_validate(validate_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return dfrc::kExitConfig;
  }
}
