// Parameter sweeps: one design per (axis value, seed), run by a bounded
// worker pool, collected in a fixed row order.

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dfrc/config.hpp"
#include "dfrc/report.hpp"

namespace dfrc {

enum class SweepAxis { Epsilon, Delta, Scr, NumUsers, PowerMeanP };

std::string to_string(SweepAxis axis);

struct SweepSpec {
  SweepAxis axis = SweepAxis::Epsilon;
  std::vector<double> values;
  std::vector<std::uint64_t> seeds;
  ScenarioConfig base;
  Json merit;  // null means the arithmetic mean
  DesignOptions design;
  /// Instance draws tried per seed before the seed is reported infeasible;
  /// only generated scenarios can be redrawn.
  int max_draws = 1;
};

/// `base_dir` resolves a relative "scenario" path.
SweepSpec sweep_spec_from_json(const Json& j, const std::filesystem::path& base_dir);
SweepSpec load_sweep_spec(const std::filesystem::path& path);

struct RunRecord {
  double value = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t instance_seed = 0;
  int draws = 0;
  std::string status;  // ok | no-feasible-start | error
  std::string message;
  double f = 0.0;
  int iterations = 0;
  std::string termination;
  bool monotone = false;
  bool power_ok = false;
  bool protected_ok = false;
  bool snr_ok = false;
  std::vector<double> sinr;  // per subcarrier, linear
  double start_margin = 0.0;
  double wall_seconds = 0.0;
};

/// Scenario for one axis value (the power-mean axis leaves it unchanged).
Scenario apply_axis(const Scenario& base, SweepAxis axis, double value);
MeritFunction sweep_merit(const SweepSpec& spec, double value, int num_subcarriers);

/// Instance seed for draw `attempt` of sweep seed `seed`; attempt 0 is the seed itself.
std::uint64_t instance_seed(std::uint64_t seed, int attempt);

/// Rows ordered by value, then seed, whatever the number of jobs.
std::vector<RunRecord> run_sweep(const SweepSpec& spec, int jobs);

CsvTable sweep_table(const std::vector<RunRecord>& rows, int num_subcarriers);
CsvTable summary_table(const std::vector<RunRecord>& rows, const std::vector<double>& values);
CsvTable timing_table(const std::vector<RunRecord>& rows);

double median(std::vector<double> v);

}  // namespace dfrc
