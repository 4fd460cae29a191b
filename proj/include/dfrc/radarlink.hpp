// Radar-side quantities on one subcarrier: SINR, clutter-plus-noise
// covariance, the MVDR receive filter, beampatterns and the Ψ matrices the
// code update linearizes around.

#pragma once

#include <utility>
#include <vector>

#include "dfrc/linalg.hpp"
#include "dfrc/scenario.hpp"

namespace dfrc {

struct ClutterResponse {
  double power;
  CMatrix response;  // G_k(θ_j)
};

struct RadarChannel {
  int subcarrier = 0;
  int num_slots = 2;
  double target_power = 1.0;
  double noise_power = 1.0;
  CMatrix target;  // G_k(ψ_k)
  std::vector<ClutterResponse> clutter;
};

RadarChannel build_radar_channel(const Scenario& scenario, int k);

double sinr(const CVector& u, const CVector& w, const RadarChannel& ch);

/// Φ(u) = Σ σ²_α G(θ) u uᴴ G(θ)ᴴ + σ²_z I.
CMatrix phi(const CVector& u, const RadarChannel& ch);

/// w = Φ(u)⁻¹ G(ψ) u, the SINR-maximizing filter for code u.
CVector optimal_radar_filter(const CVector& u, const RadarChannel& ch);

/// σ²_η uᴴ G(ψ)ᴴ Φ(u)⁻¹ G(ψ) u, the SINR the optimal filter attains.
double sinr_upper_bound(const CVector& u, const RadarChannel& ch);

/// I_T ⊗ s*(angle) sᵀ(angle), so that Δ = uᴴ A u / T.
CMatrix beampattern_form(const ArrayGeometry& tx_array, double freq, double angle, int num_slots);

/// Power radiated towards `angle`, ‖sᵀ U‖² / T.
double transmit_beampattern(const CVector& u, const ArrayGeometry& tx_array, double freq,
                            double angle, int num_slots);

/// ‖Wᴴ g(angle)‖² / T for a receive filter matrix W (N_rx × T).
double receive_beampattern(const CMatrix& filter, const ArrayGeometry& rx_array, double freq,
                           double angle);

struct PsiPair {
  CMatrix target;   // Ψ₁ = σ²_η G(ψ)ᴴ w wᴴ G(ψ)
  CMatrix clutter;  // Ψ₂ = Σ σ²_α G(θ)ᴴ w wᴴ G(θ)
};

PsiPair psi_matrices(const CVector& w, const RadarChannel& ch);

}  // namespace dfrc
