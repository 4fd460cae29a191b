#include "dfrc/radarlink.hpp"

#include <stdexcept>

namespace dfrc {

RadarChannel build_radar_channel(const Scenario& s, int k) {
  const double f = s.subcarriers.at(k);
  RadarChannel ch;
  ch.subcarrier = k;
  ch.num_slots = s.num_slots;
  ch.target_power = s.target_power.at(k);
  ch.noise_power = s.radar_noise.at(k);
  const double psi = s.target_direction.at(k);
  ch.target = g_matrix(steering(s.radar_rx_array, f, psi), steering(s.tx_array, f, psi), s.num_slots);
  for (const auto& c : s.clutter) {
    ch.clutter.push_back({c.power.at(k), g_matrix(steering(s.radar_rx_array, f, c.angle),
                                                  steering(s.tx_array, f, c.angle), s.num_slots)});
  }
  return ch;
}

double sinr(const CVector& u, const CVector& w, const RadarChannel& ch) {
  const double wn = w.squaredNorm();
  if (wn == 0.0) throw std::invalid_argument("sinr: receive filter is zero");
  const double signal = ch.target_power * std::norm(w.dot(ch.target * u));
  double interference = ch.noise_power * wn;
  for (const auto& c : ch.clutter) interference += c.power * std::norm(w.dot(c.response * u));
  return signal / interference;
}

CMatrix phi(const CVector& u, const RadarChannel& ch) {
  const Index n = ch.target.rows();
  CMatrix out = ch.noise_power * CMatrix::Identity(n, n);
  for (const auto& c : ch.clutter) {
    const CVector a = c.response * u;
    out.noalias() += c.power * (a * a.adjoint());
  }
  return out;
}

CVector optimal_radar_filter(const CVector& u, const RadarChannel& ch) {
  return solve_hpd<double>(phi(u, ch), ch.target * u);
}

double sinr_upper_bound(const CVector& u, const RadarChannel& ch) {
  const CVector gu = ch.target * u;
  return ch.target_power * std::real(gu.dot(solve_hpd<double>(phi(u, ch), gu)));
}

CMatrix beampattern_form(const ArrayGeometry& tx_array, double freq, double angle, int num_slots) {
  const CVector s = steering(tx_array, freq, angle);
  const CMatrix block = s.conjugate() * s.transpose();
  const Index n = block.rows();
  CMatrix out = CMatrix::Zero(num_slots * n, num_slots * n);
  for (int t = 0; t < num_slots; ++t) out.block(t * n, t * n, n, n) = block;
  return out;
}

double transmit_beampattern(const CVector& u, const ArrayGeometry& tx_array, double freq,
                            double angle, int num_slots) {
  const CVector s = steering(tx_array, freq, angle);
  const CMatrix code = unvec<double>(u, tx_array.num_elements);
  return (s.transpose() * code).squaredNorm() / num_slots;
}

double receive_beampattern(const CMatrix& filter, const ArrayGeometry& rx_array, double freq,
                           double angle) {
  const CVector g = steering(rx_array, freq, angle);
  return (filter.adjoint() * g).squaredNorm() / double(filter.cols());
}

PsiPair psi_matrices(const CVector& w, const RadarChannel& ch) {
  const Index n = ch.target.cols();
  PsiPair out{CMatrix::Zero(n, n), CMatrix::Zero(n, n)};
  const CVector a = ch.target.adjoint() * w;
  out.target = ch.target_power * (a * a.adjoint());
  for (const auto& c : ch.clutter) {
    const CVector b = c.response.adjoint() * w;
    out.clutter.noalias() += c.power * (b * b.adjoint());
  }
  return out;
}

}  // namespace dfrc
