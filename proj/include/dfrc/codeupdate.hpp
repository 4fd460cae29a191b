// Transmit-code block update: convex restrictions of the SNR and SINR
// constraints around the current codes, posed to the barrier solver on the
// real-lifted variables, with inner minorization-maximization for merits
// that are not concave.

#pragma once

#include <vector>

#include "dfrc/commlink.hpp"
#include "dfrc/cvxsolver.hpp"
#include "dfrc/merit.hpp"
#include "dfrc/radarlink.hpp"
#include "dfrc/scenario.hpp"

namespace dfrc {

struct ProtectedForm {
  double angle;
  double delta;
  CMatrix form;   // I_T ⊗ s* sᵀ
  RMatrix lifted;
};

/// Channel objects derived once from a scenario.
struct Problem {
  Scenario scenario;
  std::vector<RadarChannel> radar;                 // [k]
  std::vector<std::vector<UserLink>> users;        // [k][m]
  std::vector<std::vector<ProtectedForm>> protect; // [k]

  int num_subcarriers() const { return scenario.num_subcarriers(); }
  int num_users() const { return scenario.num_users(); }
  Index code_length() const { return scenario.code_length(); }
};

Problem make_problem(const Scenario& scenario);

struct CodeUpdateState {
  std::vector<CVector> codes;                      // ũ_k
  std::vector<double> aux;                         // x̃_k
  std::vector<CVector> radar_filters;              // w_k
  std::vector<std::vector<CVector>> user_filters;  // w_{k,m}
  std::vector<std::vector<LinkMode>> user_modes;
  std::vector<PsiPair> psi;                        // [k]
  std::vector<std::vector<CMatrix>> upsilon;       // [k][m]
  std::vector<std::vector<double>> rho;            // [k][m]
};

/// Fills the Ψ/Υ/ρ caches from the filters and sets x̃_k = SINR_k(ũ_k, w_k).
void refresh_state(CodeUpdateState& state, const Problem& problem);

/// 2 Re{aᴴ u} − offset ≥ rho with a = Υ ũ and offset = ũᴴ Υ ũ.
struct C3Restriction {
  CVector a;
  double offset = 0.0;
  double rho = 0.0;

  double lhs(const CVector& u) const;
};

C3Restriction build_c3r(const CodeUpdateState& state, int k, int m);

/// (2/x̃) Re{bᴴ u} − (x/x̃²) β ≥ uᴴ Ψ₂ u + noise, with b = Ψ₁ ũ and
/// β = ũᴴ Ψ₁ ũ; `pinned` replaces the whole constraint by x = 0.
struct C5Restriction {
  bool pinned = false;
  double aux = 0.0;
  CVector b;
  double beta = 0.0;
  CMatrix psi2;
  double noise = 0.0;

  double lhs(const CVector& u, double x) const;
  double rhs(const CVector& u) const;
};

C5Restriction build_c5r(const CodeUpdateState& state, const Problem& problem, int k);

struct CodeUpdateOptions {
  int mm_inner_steps = 1;
  SolverOptions solver;
};

struct CodeUpdateResult {
  std::vector<CVector> codes;
  std::vector<double> aux;
  double objective = 0.0;   // f of the true SINRs under the incoming radar filters
  double previous = 0.0;    // same quantity at the incoming codes
  bool kept_previous = false;
  bool stalled = false;
  int solves = 0;
  int newton_steps = 0;
};

/// One code update with radar and user filters held fixed.
CodeUpdateResult update_codes(const CodeUpdateState& state, const MeritFunction& merit,
                              const Problem& problem, const CodeUpdateOptions& options = {});

struct MarginStep {
  std::vector<CVector> codes;
  double margin = 0.0;  // min over served links of SNR/ρ at the new codes
  int newton_steps = 0;
};

/// Start-point variant: maximize t subject to C1, C2 and
/// 2 Re{ũᴴΥu} − ũᴴΥũ ≥ t ρ for every served link.
MarginStep maximize_margin(const CodeUpdateState& state, const Problem& problem,
                           const SolverOptions& options = {});

/// Feasibility checks on the original constraints.
double power_ratio(const std::vector<CVector>& codes, const Problem& problem);   // (1/T Σ‖u‖²) / P
double max_protected_ratio(const std::vector<CVector>& codes, const Problem& problem);  // max Δ / (δ N_t P)
double min_snr_margin(const std::vector<CVector>& codes, const CodeUpdateState& state,
                      const Problem& problem);  // min SNR/ρ, +inf without users

std::vector<double> radar_sinrs(const std::vector<CVector>& codes, const std::vector<CVector>& filters,
                                const Problem& problem);

}  // namespace dfrc
