// Receive filters of the communication users: the two zero-forcing
// eigen-filters (line-of-sight only and scattered paths only), the choice
// between them, and the cheap feasibility screens for the SNR constraint.

#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dfrc/commlink.hpp"
#include "dfrc/linalg.hpp"

namespace dfrc {

struct FilterCandidate {
  CVector w;  // unit norm
  LinkMode mode = LinkMode::Direct;
  double achieved_snr = 0.0;
  double rho = 0.0;
  double error_prob = 0.5;
  bool feasible = false;
};

/// No receive filter can be built for the user in its allowed modes.
class UnservableUserError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Ξ = Σ_paths power/σ² G u uᴴ Gᴴ, so wᴴ Ξ w = ν(u, w) / σ².
CMatrix xi_matrix(const UserLink& link, const CVector& u);

/// Πᵈ: complement of the indirect arrival steering vectors (I if there are none).
CMatrix direct_projector(const UserLink& link);

/// Πⁱ: complement of the direct arrival steering vector (I if there is none).
CMatrix indirect_projector(const UserLink& link);

/// (I_T ⊗ Π) Ξ (I_T ⊗ Π).
CMatrix project_xi(const CMatrix& xi, const CMatrix& proj, int num_slots);

bool direct_mode_available(const UserLink& link);
bool indirect_mode_available(const UserLink& link);

/// Modes allowed by both the path structure and the user's kappa_mode.
std::vector<LinkMode> allowed_modes(const UserLink& link);

/// One candidate per allowed mode, each the top eigenvector of the projected
/// Ξ. Throws std::invalid_argument for u = 0 and UnservableUserError when no
/// mode is available.
std::vector<FilterCandidate> filter_candidates(const UserLink& link, const CVector& u,
                                               int constellation_size);

/// Both feasible: lower error probability, direct on ties. One feasible:
/// that one. None: the larger SNR/ρ, left flagged infeasible.
FilterCandidate select_filter(const std::vector<FilterCandidate>& candidates);

/// Unit-norm 1_T ⊗ Π g(arrival), using the direct arrival in direct mode and
/// the strongest indirect arrival in indirect mode.
CVector initial_filter(const UserLink& link, LinkMode mode);

/// ‖Uᴴ s*(φ)‖ > 0 for the direct departure (direct mode) or for at least one
/// indirect departure (indirect mode). `code` is N_t × T.
bool c3_necessary(const UserLink& link, const CMatrix& code, LinkMode mode);

enum class Sufficiency { Pass, Inconclusive };

/// λ_min(U Uᴴ) ≥ (ρ σ² / N_t) / (power gᴴ Π g), testable only when U has rank N_t.
Sufficiency c3_sufficient(const UserLink& link, const CMatrix& code, double rho, LinkMode mode);

/// Lower and upper bounds on λ_max(Ξⁱ): the largest and the sum of the
/// per-path terms power/σ² gᴴΠⁱg ‖sᵀU‖².
std::pair<double, double> indirect_eigen_bounds(const UserLink& link, const CMatrix& code);

}  // namespace dfrc
