// Alternating design of transmit codes, radar filter and user filters:
// start-point search followed by cyclic block updates until the relative
// improvement of the merit drops below eta_acc.

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "dfrc/codeupdate.hpp"
#include "dfrc/merit.hpp"
#include "dfrc/scenario.hpp"

namespace dfrc {

enum class FilterOrder { RadarFirst, UsersFirst };

struct DesignOptions {
  double eta_acc = 1e-4;
  int i_max = 2000;
  int mm_inner_steps = 1;
  std::uint64_t rng_seed = 1;
  int init_restarts = 5;
  int start_rounds = 50;
  FilterOrder filter_order = FilterOrder::RadarFirst;
  SolverOptions solver;

  /// Throws std::invalid_argument when eta_acc <= 0, i_max < 1 and so on.
  void check() const;
};

struct StartPoint {
  std::vector<CVector> codes;
  std::vector<std::vector<CVector>> user_filters;
  std::vector<std::vector<LinkMode>> user_modes;
};

struct StartReport {
  bool feasible = false;
  double best_margin = 0.0;  // min SNR/ρ of the best point found
  int restarts = 0;
  int rounds = 0;
  StartPoint point;          // best point found (feasible or not)
  std::string diagnostic;
};

/// Alternates margin maximization over the codes with user-filter updates
/// from random normalized codes; reports the best margin when none of the
/// restarts reaches 1.
StartReport find_start(const Problem& problem, const DesignOptions& options);

class NoFeasibleStartError : public std::runtime_error {
 public:
  explicit NoFeasibleStartError(StartReport report)
      : std::runtime_error("no feasible starting point: " + report.diagnostic), report_(std::move(report)) {}
  const StartReport& report() const { return report_; }

 private:
  StartReport report_;
};

struct IterationRecord {
  int iteration = 0;
  double f = 0.0;
  std::vector<double> sinr;              // [k]
  std::vector<std::vector<double>> snr;  // [k][m]
  double power_ratio = 0.0;              // (1/T Σ‖u‖²) / P
  double protected_ratio = 0.0;          // max Δ / (δ N_t P)
  double snr_margin = 0.0;               // min SNR / ρ
  bool code_kept = false;
  int newton_steps = 0;
};

enum class Termination { Converged, IterationCap };

std::string to_string(Termination t);

struct DesignResult {
  std::vector<CVector> codes;
  std::vector<CVector> radar_filters;
  std::vector<std::vector<CVector>> user_filters;
  std::vector<std::vector<LinkMode>> user_modes;
  std::vector<IterationRecord> trace;
  Termination termination = Termination::IterationCap;
  bool monotone = true;  // f never fell by more than 1e-12 relative
  StartReport start;

  double objective() const { return trace.empty() ? 0.0 : trace.back().f; }
  int iterations() const { return trace.empty() ? 0 : trace.back().iteration; }
};

/// Runs from a supplied feasible point.
DesignResult design(const Problem& problem, const MeritFunction& merit, const DesignOptions& options,
                    const StartPoint& start);

/// Searches a starting point first; throws NoFeasibleStartError when none is found.
DesignResult design(const Problem& problem, const MeritFunction& merit, const DesignOptions& options);

}  // namespace dfrc
