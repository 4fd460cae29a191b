// Helpers shared by the unit and acceptance tests.

#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "dfrc/codeupdate.hpp"
#include "dfrc/linalg.hpp"
#include "dfrc/scenario.hpp"

namespace dfrc::testing {

inline CVector random_cvector(Index n, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  CVector v(n);
  for (Index i = 0; i < n; ++i) v(i) = {normal(rng), normal(rng)};
  return v;
}

inline CMatrix random_cmatrix(Index r, Index c, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  CMatrix m(r, c);
  for (Index i = 0; i < m.size(); ++i) m(i) = {normal(rng), normal(rng)};
  return m;
}

inline CMatrix random_hermitian(Index n, std::mt19937_64& rng) {
  const CMatrix m = random_cmatrix(n, n, rng);
  return (m + m.adjoint()) / 2.0;
}

inline CMatrix random_psd(Index n, std::mt19937_64& rng) {
  const CMatrix m = random_cmatrix(n, n, rng);
  return m.adjoint() * m;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

/// Scenario with the reference array sizes, scaled down or up by `params`.
inline Scenario small_instance(std::uint64_t seed, double epsilon = 1e-2, double delta = 1e-3) {
  InstanceParams p;
  p.tx_elements = 6;
  p.num_subcarriers = 2;
  p.num_direct_users = 1;
  p.num_indirect_users = 1;
  p.num_clutter = 2;
  p.num_protected = 2;
  p.epsilon = epsilon;
  p.delta = delta;
  return random_instance(p, seed);
}

/// Single subcarrier, no users, clutter or protected directions.
inline Scenario toy_scenario(int nt = 4, int nr = 4, double target_deg = 10.0) {
  Scenario s;
  s.subcarriers = {2e9};
  s.tx_array = {nt, kSpeedOfLight / (2 * 2e9)};
  s.radar_rx_array = {nr, kSpeedOfLight / (2 * 2e9)};
  s.num_slots = 2;
  s.constellation_size = 2;
  s.power_budget = db_to_linear(20.0);
  s.target_direction = {deg_to_rad(target_deg)};
  s.target_power = {db_to_linear(-160.0)};
  s.radar_noise = {db_to_linear(-150.0)};
  return s;
}

/// σ²_η N_t P T ‖g(ψ)‖² / σ²_z for a single-subcarrier scenario.
inline double matched_bound(const Scenario& s) {
  return s.target_power[0] * s.tx_array.num_elements * s.power_budget * s.num_slots *
         s.radar_rx_array.num_elements / s.radar_noise[0];
}

}  // namespace dfrc::testing
