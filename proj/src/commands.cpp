#include "dfrc/commands.hpp"

#include <charconv>
#include <chrono>
#include <iostream>

#include "dfrc/errors.hpp"
#include "dfrc/report.hpp"
#include "dfrc/sweep.hpp"

namespace dfrc {

Json parse_merit_flag(const std::string& flag) {
  Json m;
  const auto colon = flag.find(':');
  m["kind"] = flag.substr(0, colon);
  if (colon == std::string::npos) return m;
  std::string rest = flag.substr(colon + 1);
  std::size_t pos = 0;
  while (pos <= rest.size()) {
    const auto comma = rest.find(',', pos);
    const std::string item = rest.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("--merit", "expected key=value, got '" + item + "'");
    const std::string key = item.substr(0, eq);
    const std::string val = item.substr(eq + 1);
    double d = 0.0;
    const auto res = std::from_chars(val.data(), val.data() + val.size(), d);
    if (res.ec == std::errc() && res.ptr == val.data() + val.size()) {
      m[key] = d;
    } else {
      m[key] = val;
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return m;
}

namespace {

std::string describe(const Scenario& s) {
  return "K=" + std::to_string(s.num_subcarriers()) + " Nt=" + std::to_string(s.tx_array.num_elements) +
         " users=" + std::to_string(s.num_users()) + " clutter=" + std::to_string(s.clutter.size()) +
         " protected=" + std::to_string(s.protected_directions.size());
}

}  // namespace

int cmd_solve(const SolveArgs& args) {
  ScenarioConfig cfg;
  MeritFunction merit = MeritFunction::power_mean(1.0, MeritFunction::uniform_weights(1));
  DesignOptions opts;
  try {
    cfg = load_scenario_config(args.config);
    if (args.seed && cfg.generator) {
      cfg.generator_seed = *args.seed;
      cfg.scenario = random_instance(*cfg.generator, cfg.generator_seed);
      require_valid(cfg.scenario);
    }
    const int kk = cfg.scenario.num_subcarriers();
    if (args.merit) {
      merit = merit_from_json(parse_merit_flag(*args.merit), kk, "--merit");
    } else if (!cfg.merit.is_null()) {
      merit = merit_from_json(cfg.merit, kk);
    } else {
      merit = MeritFunction::power_mean(1.0, MeritFunction::uniform_weights(kk));
    }
    opts = design_options_from_json(cfg.design);
    if (args.seed) opts.rng_seed = *args.seed;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }

  log(LogLevel::Info, "scenario " + describe(cfg.scenario) + ", merit " + to_string(merit.kind()));
  const Problem problem = make_problem(cfg.scenario);
  const auto t0 = std::chrono::steady_clock::now();
  DesignResult result;
  try {
    result = design(problem, merit, opts);
  } catch (const NoFeasibleStartError& e) {
    std::cerr << e.what() << '\n';
    return kExitInfeasible;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  try {
    write_design_outputs(args.out, result, problem, to_string(merit.kind()));
  } catch (const std::exception& e) {
    std::cerr << "output error: " << e.what() << '\n';
    return kExitConfig;
  }
  std::cout << "objective " << format_number(result.objective()) << " after " << result.iterations()
            << " iteration(s), " << to_string(result.termination) << ", " << format_number(secs) << " s\n";
  return kExitOk;
}

int cmd_sweep(const SweepArgs& args) {
  SweepSpec spec;
  try {
    spec = load_sweep_spec(args.spec);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  log(LogLevel::Info, "sweep over " + to_string(spec.axis) + ": " + std::to_string(spec.values.size()) +
                          " value(s) x " + std::to_string(spec.seeds.size()) + " seed(s)");
  const std::vector<RunRecord> rows = run_sweep(spec, args.jobs);
  try {
    std::filesystem::create_directories(args.out);
    sweep_table(rows, spec.base.scenario.num_subcarriers()).write(args.out / "sweep.csv");
    summary_table(rows, spec.values).write(args.out / "sweep_summary.csv");
    timing_table(rows).write(args.out / "timing.csv");
  } catch (const std::exception& e) {
    std::cerr << "output error: " << e.what() << '\n';
    return kExitConfig;
  }
  int ok = 0;
  for (const auto& r : rows) ok += r.status == "ok";
  std::cout << ok << " of " << rows.size() << " run(s) succeeded\n";
  return kExitOk;
}

int cmd_validate(const std::filesystem::path& config) {
  try {
    const ScenarioConfig cfg = load_scenario_config(config);
    const int kk = cfg.scenario.num_subcarriers();
    if (!cfg.merit.is_null()) (void)merit_from_json(cfg.merit, kk);
    (void)design_options_from_json(cfg.design);
    std::cout << "valid: " << describe(cfg.scenario) << '\n';
    return kExitOk;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
}

}  // namespace dfrc
