#include "dfrc/driver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "dfrc/userfilter.hpp"

namespace dfrc {

void DesignOptions::check() const {
  if (!(eta_acc > 0.0)) throw std::invalid_argument("eta_acc must be positive");
  if (i_max < 1) throw std::invalid_argument("i_max must be at least 1");
  if (mm_inner_steps < 1) throw std::invalid_argument("mm_inner_steps must be at least 1");
  if (init_restarts < 1) throw std::invalid_argument("init_restarts must be at least 1");
  if (start_rounds < 1) throw std::invalid_argument("start_rounds must be at least 1");
}

std::string to_string(Termination t) { return t == Termination::Converged ? "converged" : "iteration-cap"; }

namespace {

CVector unit_radar_filter(const CVector& u, const RadarChannel& ch) {
  CVector w = optimal_radar_filter(u, ch);
  const double nrm = w.norm();
  return nrm > 0.0 ? CVector(w / nrm) : w;
}

CodeUpdateState state_from(const StartPoint& p, const Problem& problem) {
  CodeUpdateState s;
  s.codes = p.codes;
  s.user_filters = p.user_filters;
  s.user_modes = p.user_modes;
  for (int k = 0; k < problem.num_subcarriers(); ++k) {
    s.radar_filters.push_back(unit_radar_filter(s.codes[k], problem.radar[k]));
  }
  refresh_state(s, problem);
  return s;
}

std::vector<CVector> random_codes(const Problem& problem, std::mt19937_64& rng) {
  const Scenario& sc = problem.scenario;
  const int nt = sc.tx_array.num_elements;
  std::normal_distribution<double> normal;
  std::vector<CVector> codes;
  double total = 0.0;
  for (int k = 0; k < sc.num_subcarriers(); ++k) {
    std::vector<CVector> span;
    for (const auto& d : sc.protected_directions) {
      if (d.subcarrier == k) span.push_back(steering(sc.tx_array, sc.subcarriers[k], d.angle).conjugate());
    }
    const CMatrix proj = projector_complement<double>(span, nt);
    CMatrix code(nt, sc.num_slots);
    for (Index i = 0; i < code.size(); ++i) code(i) = {normal(rng), normal(rng)};
    code = proj * code;
    codes.emplace_back(Eigen::Map<const CVector>(code.data(), code.size()));
    total += codes.back().squaredNorm();
  }
  const double scale = total > 0.0 ? std::sqrt(sc.power_budget * sc.num_slots / total) : 0.0;
  for (auto& u : codes) u *= scale;
  return codes;
}

void initial_user_filters(const Problem& problem, std::mt19937_64& rng, StartPoint& p) {
  const int kk = problem.num_subcarriers();
  p.user_filters.assign(kk, {});
  p.user_modes.assign(kk, {});
  std::bernoulli_distribution coin(0.5);
  for (int k = 0; k < kk; ++k) {
    for (const auto& link : problem.users[k]) {
      const auto modes = allowed_modes(link);
      if (modes.empty()) {
        throw UnservableUserError("user " + std::to_string(link.user) + " has no usable receive mode");
      }
      const LinkMode mode = modes.size() == 2 && coin(rng) ? modes[1] : modes[0];
      p.user_filters[k].push_back(initial_filter(link, mode));
      p.user_modes[k].push_back(mode);
    }
  }
}

// Eigen-filter update; an infeasible choice replaces the old filter only when
// `allow_infeasible` is set (the start search, which maximizes the margin).
void update_user_filters(CodeUpdateState& s, const Problem& problem, bool allow_infeasible) {
  for (int k = 0; k < problem.num_subcarriers(); ++k) {
    for (std::size_t m = 0; m < problem.users[k].size(); ++m) {
      const auto cands = filter_candidates(problem.users[k][m], s.codes[k], problem.scenario.constellation_size);
      const FilterCandidate pick = select_filter(cands);
      if (pick.feasible || allow_infeasible) {
        s.user_filters[k][m] = pick.w;
        s.user_modes[k][m] = pick.mode;
      }
    }
  }
}

void update_radar_filters(CodeUpdateState& s, const Problem& problem) {
  for (int k = 0; k < problem.num_subcarriers(); ++k) {
    s.radar_filters[k] = unit_radar_filter(s.codes[k], problem.radar[k]);
  }
}

IterationRecord record(int iteration, const CodeUpdateState& s, const MeritFunction& merit, const Problem& problem) {
  IterationRecord r;
  r.iteration = iteration;
  r.sinr = s.aux;
  r.f = merit.value(Eigen::Map<const RVector>(r.sinr.data(), static_cast<Index>(r.sinr.size())));
  r.snr.resize(problem.num_subcarriers());
  for (int k = 0; k < problem.num_subcarriers(); ++k) {
    for (std::size_t m = 0; m < problem.users[k].size(); ++m) {
      r.snr[k].push_back(snr(s.codes[k], s.user_filters[k][m], problem.users[k][m]));
    }
  }
  r.power_ratio = power_ratio(s.codes, problem);
  r.protected_ratio = max_protected_ratio(s.codes, problem);
  r.snr_margin = min_snr_margin(s.codes, s, problem);
  return r;
}

}  // namespace

StartReport find_start(const Problem& problem, const DesignOptions& options) {
  options.check();
  StartReport report;
  report.best_margin = -std::numeric_limits<double>::infinity();
  for (int restart = 0; restart < options.init_restarts; ++restart) {
    std::seed_seq seq{static_cast<std::uint32_t>(options.rng_seed), static_cast<std::uint32_t>(options.rng_seed >> 32),
                      static_cast<std::uint32_t>(restart)};
    std::mt19937_64 rng(seq);
    StartPoint p;
    p.codes = random_codes(problem, rng);
    initial_user_filters(problem, rng, p);
    CodeUpdateState s = state_from(p, problem);
    double margin = min_snr_margin(s.codes, s, problem);
    report.restarts = restart + 1;

    for (int round = 0; round < options.start_rounds && margin < 1.0; ++round) {
      ++report.rounds;
      const MarginStep step = maximize_margin(s, problem, options.solver);
      s.codes = step.codes;
      update_user_filters(s, problem, true);
      update_radar_filters(s, problem);
      refresh_state(s, problem);
      const double next = min_snr_margin(s.codes, s, problem);
      const bool stuck = !(next > margin * (1.0 + 1e-9) + 1e-300);
      margin = std::max(margin, next);
      if (stuck && next < 1.0) break;
    }
    if (margin > report.best_margin) {
      report.best_margin = margin;
      report.point = {s.codes, s.user_filters, s.user_modes};
    }
    if (margin >= 1.0) {
      report.feasible = true;
      break;
    }
  }
  std::ostringstream diag;
  diag << (report.feasible ? "feasible" : "infeasible") << " start, best min SNR/rho = " << report.best_margin
       << " after " << report.restarts << " restart(s), " << report.rounds << " round(s)";
  report.diagnostic = diag.str();
  return report;
}

DesignResult design(const Problem& problem, const MeritFunction& merit, const DesignOptions& options,
                    const StartPoint& start) {
  options.check();
  if (merit.size() != problem.num_subcarriers()) {
    throw std::invalid_argument("design: merit dimension does not match the number of subcarriers");
  }
  CodeUpdateState s = state_from(start, problem);
  if (min_snr_margin(s.codes, s, problem) < 1.0 - 1e-8 || power_ratio(s.codes, problem) > 1.0 + 1e-8 ||
      max_protected_ratio(s.codes, problem) > 1.0 + 1e-8) {
    throw InfeasibleStartError("start point", min_snr_margin(s.codes, s, problem));
  }

  DesignResult result;
  result.trace.push_back(record(0, s, merit, problem));
  const CodeUpdateOptions cu{options.mm_inner_steps, options.solver};
  result.termination = Termination::IterationCap;
  for (int i = 1; i <= options.i_max; ++i) {
    const CodeUpdateResult upd = update_codes(s, merit, problem, cu);
    s.codes = upd.codes;
    if (options.filter_order == FilterOrder::RadarFirst) {
      update_radar_filters(s, problem);
      update_user_filters(s, problem, false);
    } else {
      update_user_filters(s, problem, false);
      update_radar_filters(s, problem);
    }
    refresh_state(s, problem);

    IterationRecord r = record(i, s, merit, problem);
    r.code_kept = upd.kept_previous;
    r.newton_steps = upd.newton_steps;
    const double prev = result.trace.back().f;
    if (r.f < prev - 1e-12 * std::abs(prev)) result.monotone = false;
    result.trace.push_back(std::move(r));
    const double cur = result.trace.back().f;
    if (cur - prev < options.eta_acc * std::max(cur, 1e-300)) {
      result.termination = Termination::Converged;
      break;
    }
  }
  result.codes = s.codes;
  result.radar_filters = s.radar_filters;
  result.user_filters = s.user_filters;
  result.user_modes = s.user_modes;
  return result;
}

DesignResult design(const Problem& problem, const MeritFunction& merit, const DesignOptions& options) {
  StartReport start = find_start(problem, options);
  if (!start.feasible) throw NoFeasibleStartError(std::move(start));
  DesignResult result = design(problem, merit, options, start.point);
  result.start = std::move(start);
  return result;
}

}  // namespace dfrc
