// Communication-side quantities for one (subcarrier, user) link: Rician
// parameters, SNR, DPSK error probability and the SNR thresholds that turn
// an error-rate target into a quadratic constraint on the code.

#pragma once

#include <limits>
#include <vector>

#include "dfrc/linalg.hpp"
#include "dfrc/scenario.hpp"

namespace dfrc {

/// Space-time response of one user path on one subcarrier.
struct PathResponse {
  PathKind kind;
  double power;
  CVector rx_steer;  // g_{k,m}(arrival)
  CVector tx_steer;  // s_k(departure)
  CMatrix response;  // I_T ⊗ g s^T
};

/// Everything needed to evaluate user m on subcarrier k.
struct UserLink {
  int subcarrier = 0;
  int user = 0;
  int num_slots = 2;
  int rx_elements = 1;
  double noise_power = 1.0;
  double error_target = 0.1;
  KappaMode kappa_mode = KappaMode::Auto;
  std::vector<PathResponse> paths;

  bool has_direct() const;
  bool has_indirect() const;
  int num_indirect() const;
};

UserLink build_user_link(const Scenario& scenario, int k, int m);

/// Rician factor κ ∈ [0, ∞]; ∞ is an explicit state rather than a large float.
class RicianFactor {
 public:
  static RicianFactor infinite() { return RicianFactor(0.0, true); }
  static RicianFactor finite(double v) { return RicianFactor(v, false); }

  bool is_infinite() const { return infinite_; }
  double value() const { return infinite_ ? std::numeric_limits<double>::infinity() : value_; }

 private:
  RicianFactor(double v, bool inf) : value_(v), infinite_(inf) {}
  double value_;
  bool infinite_;
};

struct RicianParams {
  double nu = 0.0;
  RicianFactor kappa = RicianFactor::finite(0.0);
  double direct_power = 0.0;    // |β0|² |wᴴ G0 u|²
  double indirect_power = 0.0;  // Σ σ²_q |wᴴ Gq u|²
  bool degenerate = false;      // both terms vanish
};

enum class LinkMode { Direct, Indirect };

RicianParams rician_params(const CVector& u, const CVector& w, const UserLink& link);

/// ν / (σ² ‖w‖²); throws std::invalid_argument for a zero filter.
double snr(const CVector& u, const CVector& w, const UserLink& link);

/// Binary DPSK error probability over a Rician link.
double error_prob_d2(RicianFactor kappa, double snr);

/// Error probability in a forced mode (κ = ∞ for Direct, κ = 0 for
/// Indirect): exact for D = 2, nearest-neighbor approximation (direct) or
/// upper bound (indirect) for D > 2.
double error_prob(LinkMode mode, double snr, int constellation_size);

struct SnrThreshold {
  double rho;
  LinkMode mode;
};

/// Minimum SNR meeting error target `epsilon` in the given mode.
SnrThreshold rho_threshold(double epsilon, LinkMode mode, int constellation_size);

/// Q⁻¹ by bisection on erfc.
double inverse_q(double p);

/// Υ with uᴴ Υ u = SNR(u, w) for every u.
CMatrix upsilon_matrix(const UserLink& link, const CVector& w);

}  // namespace dfrc
