#include "dfrc/codeupdate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace dfrc {

Problem make_problem(const Scenario& scenario) {
  Problem p;
  p.scenario = scenario;
  const int kk = scenario.num_subcarriers();
  p.radar.reserve(kk);
  p.users.resize(kk);
  p.protect.resize(kk);
  for (int k = 0; k < kk; ++k) {
    p.radar.push_back(build_radar_channel(scenario, k));
    for (int m = 0; m < scenario.num_users(); ++m) p.users[k].push_back(build_user_link(scenario, k, m));
  }
  for (const auto& d : scenario.protected_directions) {
    const CMatrix form = beampattern_form(scenario.tx_array, scenario.subcarriers.at(d.subcarrier), d.angle,
                                          scenario.num_slots);
    p.protect.at(d.subcarrier).push_back({d.angle, d.delta, form, lift_complex(form)});
  }
  return p;
}

void refresh_state(CodeUpdateState& state, const Problem& problem) {
  const int kk = problem.num_subcarriers();
  state.psi.clear();
  state.upsilon.assign(kk, {});
  state.rho.assign(kk, {});
  state.aux.assign(kk, 0.0);
  for (int k = 0; k < kk; ++k) {
    state.psi.push_back(psi_matrices(state.radar_filters[k], problem.radar[k]));
    state.aux[k] = sinr(state.codes[k], state.radar_filters[k], problem.radar[k]);
    for (std::size_t m = 0; m < problem.users[k].size(); ++m) {
      const UserLink& link = problem.users[k][m];
      state.upsilon[k].push_back(upsilon_matrix(link, state.user_filters[k][m]));
      state.rho[k].push_back(
          rho_threshold(link.error_target, state.user_modes[k][m], problem.scenario.constellation_size).rho);
    }
  }
}

double C3Restriction::lhs(const CVector& u) const { return 2.0 * std::real(a.dot(u)) - offset; }

C3Restriction build_c3r(const CodeUpdateState& state, int k, int m) {
  const CMatrix& ups = state.upsilon.at(k).at(m);
  const CVector& ut = state.codes.at(k);
  C3Restriction r;
  r.a = ups * ut;
  r.offset = std::real(ut.dot(r.a));
  r.rho = state.rho.at(k).at(m);
  return r;
}

double C5Restriction::lhs(const CVector& u, double x) const {
  if (pinned) return 0.0;
  return 2.0 / aux * std::real(b.dot(u)) - x / (aux * aux) * beta;
}

double C5Restriction::rhs(const CVector& u) const {
  return std::real(u.dot(psi2 * u)) + noise;
}

C5Restriction build_c5r(const CodeUpdateState& state, const Problem& problem, int k) {
  C5Restriction r;
  r.aux = state.aux.at(k);
  r.pinned = !(r.aux > 0.0);
  const PsiPair& psi = state.psi.at(k);
  const CVector& ut = state.codes.at(k);
  r.b = psi.target * ut;
  r.beta = std::real(ut.dot(r.b));
  r.psi2 = psi.clutter;
  r.noise = problem.radar.at(k).noise_power * state.radar_filters.at(k).squaredNorm();
  return r;
}

double power_ratio(const std::vector<CVector>& codes, const Problem& problem) {
  double total = 0.0;
  for (const auto& u : codes) total += u.squaredNorm();
  return total / problem.scenario.num_slots / problem.scenario.power_budget;
}

double max_protected_ratio(const std::vector<CVector>& codes, const Problem& problem) {
  const double cap = problem.scenario.tx_array.num_elements * problem.scenario.power_budget;
  double worst = 0.0;
  for (int k = 0; k < problem.num_subcarriers(); ++k) {
    for (const auto& pf : problem.protect[k]) {
      const double delta_k = std::real(codes[k].dot(pf.form * codes[k])) / problem.scenario.num_slots;
      worst = std::max(worst, delta_k / (pf.delta * cap));
    }
  }
  return worst;
}

double min_snr_margin(const std::vector<CVector>& codes, const CodeUpdateState& state, const Problem& problem) {
  double worst = std::numeric_limits<double>::infinity();
  for (int k = 0; k < problem.num_subcarriers(); ++k) {
    for (std::size_t m = 0; m < problem.users[k].size(); ++m) {
      const double v = snr(codes[k], state.user_filters[k][m], problem.users[k][m]);
      worst = std::min(worst, v / state.rho[k][m]);
    }
  }
  return worst;
}

std::vector<double> radar_sinrs(const std::vector<CVector>& codes, const std::vector<CVector>& filters,
                                const Problem& problem) {
  std::vector<double> out;
  out.reserve(codes.size());
  for (int k = 0; k < problem.num_subcarriers(); ++k) out.push_back(sinr(codes[k], filters[k], problem.radar[k]));
  return out;
}

namespace {

constexpr double kMinDelta = 1e-12;

// Real variables: [Re v_0; Im v_0; ...; Re v_{K-1}; Im v_{K-1}; tail...]
// with u_k = sqrt(P T) v_k.
struct Layout {
  int num_subcarriers;
  Index code_length;  // complex entries per subcarrier

  Index block() const { return 2 * code_length; }
  Index codes_end() const { return num_subcarriers * block(); }
  Index tail(int j) const { return codes_end() + j; }

  std::vector<Index> code_support(int k) const {
    std::vector<Index> s(static_cast<std::size_t>(block()));
    for (Index i = 0; i < block(); ++i) s[i] = k * block() + i;
    return s;
  }
  std::vector<Index> all_codes() const {
    std::vector<Index> s(static_cast<std::size_t>(codes_end()));
    for (Index i = 0; i < codes_end(); ++i) s[i] = i;
    return s;
  }
};

double code_scale(const Problem& problem) {
  return std::sqrt(problem.scenario.power_budget * problem.scenario.num_slots);
}

void add_power_and_protect(ConvexProgram& prog, const Problem& problem, const Layout& lay) {
  prog.constraints.push_back(Constraint::quadratic(lay.all_codes(), RMatrix::Identity(lay.codes_end(), lay.codes_end()),
                                                   RVector::Zero(lay.codes_end()), -1.0, "C1 power budget"));
  const double nt = problem.scenario.tx_array.num_elements;
  for (int k = 0; k < problem.num_subcarriers(); ++k) {
    for (const auto& pf : problem.protect[k]) {
      const double scale = 1.0 / (std::max(pf.delta, kMinDelta) * nt);
      prog.constraints.push_back(Constraint::quadratic(
          lay.code_support(k), scale * pf.lifted, RVector::Zero(lay.block()), -1.0,
          "C2 protected direction k=" + std::to_string(k) + " angle=" + std::to_string(rad_to_deg(pf.angle))));
    }
  }
}

// −(2σ/ρ) Re{aᴴ v} + offset/ρ + extra ≤ 0, where `extra` is 1 or the margin variable.
RVector c3r_coefficients(const C3Restriction& r, double sigma) {
  return -(2.0 * sigma / r.rho) * lift_linear(r.a);
}

RVector stack_codes(const std::vector<CVector>& codes, const Layout& lay, double sigma, Index dim) {
  RVector z = RVector::Zero(dim);
  for (int k = 0; k < lay.num_subcarriers; ++k) z.segment(k * lay.block(), lay.block()) = to_real(codes[k] / sigma);
  return z;
}

std::vector<CVector> unstack_codes(const RVector& z, const Layout& lay, double sigma) {
  std::vector<CVector> out;
  for (int k = 0; k < lay.num_subcarriers; ++k) out.push_back(sigma * to_complex(z.segment(k * lay.block(), lay.block())));
  return out;
}

// f(x̃ ⊙ y) / scale on the tail coordinates.
SmoothOracle aux_objective(SmoothOracle f, RVector xt, Index first, Index dim, double scale) {
  const Index kk = xt.size();
  SmoothOracle out;
  out.value = [=](const RVector& z) { return f.value(xt.cwiseProduct(z.segment(first, kk))) / scale; };
  out.gradient = [=](const RVector& z) {
    RVector g = RVector::Zero(dim);
    g.segment(first, kk) = xt.cwiseProduct(f.gradient(xt.cwiseProduct(z.segment(first, kk)))) / scale;
    return g;
  };
  out.hessian = [=](const RVector& z) {
    RMatrix h = RMatrix::Zero(dim, dim);
    h.block(first, first, kk, kk) =
        xt.asDiagonal() * f.hessian(xt.cwiseProduct(z.segment(first, kk))) * xt.asDiagonal() / scale;
    return h;
  };
  return out;
}

bool feasible_for_original(const std::vector<CVector>& codes, const CodeUpdateState& state, const Problem& problem) {
  if (power_ratio(codes, problem) > 1.0 + 1e-8) return false;
  if (max_protected_ratio(codes, problem) > 1.0 + 1e-8) return false;
  return min_snr_margin(codes, state, problem) >= 1.0 - 1e-8;
}

}  // namespace

CodeUpdateResult update_codes(const CodeUpdateState& state, const MeritFunction& merit, const Problem& problem,
                              const CodeUpdateOptions& options) {
  const int kk = problem.num_subcarriers();
  const Layout lay{kk, problem.code_length()};
  const double sigma = code_scale(problem);
  const Index dim = lay.codes_end() + kk;

  ConvexProgram prog;
  prog.dimension = dim;
  add_power_and_protect(prog, problem, lay);
  for (int k = 0; k < kk; ++k) {
    for (std::size_t m = 0; m < problem.users[k].size(); ++m) {
      const C3Restriction r = build_c3r(state, k, static_cast<int>(m));
      prog.constraints.push_back(Constraint::linear(lay.code_support(k), c3r_coefficients(r, sigma),
                                                    r.offset / r.rho + 1.0,
                                                    "C3R k=" + std::to_string(k) + " m=" + std::to_string(m)));
    }
  }
  RVector xt(kk);
  for (int k = 0; k < kk; ++k) {
    const C5Restriction r = build_c5r(state, problem, k);
    xt(k) = r.aux;
    const Index y = lay.tail(k);
    if (r.pinned) {
      prog.pins.push_back({y, 0.0});
      continue;
    }
    const double denom = r.noise + std::real(state.codes[k].dot(r.psi2 * state.codes[k]));
    std::vector<Index> support = lay.code_support(k);
    support.push_back(y);
    const Index n = lay.block();
    RMatrix quad = RMatrix::Zero(n + 1, n + 1);
    quad.topLeftCorner(n, n) = (sigma * sigma / denom) * lift_complex(r.psi2);
    RVector q(n + 1);
    q << -(sigma / (r.aux * denom)) * lift_linear(r.b), r.beta / (2.0 * r.aux * denom);
    prog.constraints.push_back(Constraint::quadratic(std::move(support), std::move(quad), std::move(q),
                                                     r.noise / denom, "C5R k=" + std::to_string(k)));
    prog.constraints.push_back(Constraint::linear({y}, RVector::Constant(1, -1.0), 0.0,
                                                  "aux nonnegative k=" + std::to_string(k)));
  }

  CodeUpdateResult result;
  result.previous = merit.value(Eigen::Map<const RVector>(
      radar_sinrs(state.codes, state.radar_filters, problem).data(), kk));
  result.codes = state.codes;
  result.aux = state.aux;
  result.objective = result.previous;

  // Shrinking the codes by (1 - τ) keeps C3R strict while the slack of every
  // link exceeds 2τ, and lowering the auxiliaries by 4τ makes C5R strict.
  const double margin = min_snr_margin(state.codes, state, problem);
  const double tau = std::isfinite(margin) ? std::clamp(0.25 * (1.0 - 1.0 / margin), 0.0, 1e-3) : 1e-3;
  RVector z = stack_codes(state.codes, lay, sigma, dim) * (1.0 - tau);
  z.tail(kk).setConstant(1.0 - 4.0 * tau);
  prog.start = z;
  prog.objective.value = [](const RVector&) { return 0.0; };
  const auto start = find_strictly_feasible(prog, options.solver);
  if (!start) {
    throw std::logic_error("code update: restricted problem has no interior point at the current codes");
  }
  z = *start;

  const double fx = merit.value(xt);
  const double scale = fx > 0.0 ? fx : 1.0;
  const int steps = merit.is_concave() ? 1 : std::max(1, options.mm_inner_steps);
  RVector x_mm = xt;
  for (int j = 0; j < steps; ++j) {
    const SmoothOracle f = merit.is_concave() ? merit.oracle() : merit.minorizer_at(x_mm);
    prog.objective = aux_objective(f, xt, lay.codes_end(), dim, scale);
    prog.start = z;
    const SolveReport rep = solve(prog, options.solver);
    ++result.solves;
    result.newton_steps += rep.newton_steps;
    result.stalled = result.stalled || rep.stalled;
    z = rep.solution;
    x_mm = xt.cwiseProduct(z.tail(kk));
  }

  std::vector<CVector> codes = unstack_codes(z, lay, sigma);
  if (!feasible_for_original(codes, state, problem)) {
    result.kept_previous = true;
    return result;
  }
  const std::vector<double> s = radar_sinrs(codes, state.radar_filters, problem);
  const double f_new = merit.value(Eigen::Map<const RVector>(s.data(), kk));
  if (!(f_new >= result.previous)) {
    result.kept_previous = true;
    return result;
  }
  result.codes = std::move(codes);
  result.aux.assign(x_mm.data(), x_mm.data() + kk);
  result.objective = f_new;
  return result;
}

MarginStep maximize_margin(const CodeUpdateState& state, const Problem& problem, const SolverOptions& options) {
  MarginStep out;
  out.codes = state.codes;
  out.margin = min_snr_margin(state.codes, state, problem);
  if (!std::isfinite(out.margin)) return out;

  const int kk = problem.num_subcarriers();
  const Layout lay{kk, problem.code_length()};
  const double sigma = code_scale(problem);
  const Index dim = lay.codes_end() + 1;
  const Index t_idx = lay.tail(0);

  ConvexProgram prog;
  prog.dimension = dim;
  add_power_and_protect(prog, problem, lay);
  for (int k = 0; k < kk; ++k) {
    for (std::size_t m = 0; m < problem.users[k].size(); ++m) {
      const C3Restriction r = build_c3r(state, k, static_cast<int>(m));
      std::vector<Index> support = lay.code_support(k);
      support.push_back(t_idx);
      RVector a(lay.block() + 1);
      a << c3r_coefficients(r, sigma), 1.0;
      prog.constraints.push_back(Constraint::linear(std::move(support), a, r.offset / r.rho,
                                                    "C3 margin k=" + std::to_string(k) + " m=" + std::to_string(m)));
    }
  }
  prog.objective.value = [t_idx](const RVector& z) { return z(t_idx); };
  prog.objective.gradient = [t_idx, dim](const RVector&) {
    RVector g = RVector::Zero(dim);
    g(t_idx) = 1.0;
    return g;
  };
  prog.objective.hessian = [dim](const RVector&) { return RMatrix::Zero(dim, dim); };
  // Shrinking the codes slightly makes C1 and C2 strict; the margin
  // variable then starts just below the smallest linearized ratio.
  const double shrink = 1.0 - 1e-6;
  prog.start = stack_codes(state.codes, lay, sigma, dim) * shrink;
  prog.start(t_idx) = (2.0 * shrink - 1.0) * out.margin - 1e-3 * std::max(out.margin, 1e-6);

  const auto start = find_strictly_feasible(prog, options);
  if (!start) return out;
  prog.start = *start;
  const SolveReport rep = solve(prog, options);
  out.newton_steps = rep.newton_steps;

  std::vector<CVector> codes = unstack_codes(rep.solution, lay, sigma);
  if (power_ratio(codes, problem) > 1.0 + 1e-8 || max_protected_ratio(codes, problem) > 1.0 + 1e-8) return out;
  const double margin = min_snr_margin(codes, state, problem);
  if (margin > out.margin) {
    out.codes = std::move(codes);
    out.margin = margin;
  }
  return out;
}

}  // namespace dfrc
