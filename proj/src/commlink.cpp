#include "dfrc/commlink.hpp"

#include <cmath>
#include <stdexcept>

namespace dfrc {

bool UserLink::has_direct() const {
  for (const auto& p : paths) {
    if (p.kind == PathKind::Direct) return true;
  }
  return false;
}

bool UserLink::has_indirect() const { return num_indirect() > 0; }

int UserLink::num_indirect() const {
  int n = 0;
  for (const auto& p : paths) n += p.kind == PathKind::Indirect ? 1 : 0;
  return n;
}

UserLink build_user_link(const Scenario& s, int k, int m) {
  const User& user = s.users.at(m);
  const double f = s.subcarriers.at(k);
  UserLink link;
  link.subcarrier = k;
  link.user = m;
  link.num_slots = s.num_slots;
  link.rx_elements = user.array.num_elements;
  link.noise_power = user.noise_power.at(k);
  link.error_target = user.error_target.at(k);
  link.kappa_mode = user.kappa_mode;
  for (const auto& p : user.paths) {
    PathResponse r{p.kind, p.power, steering(user.array, f, p.arrival),
                   steering(s.tx_array, f, p.departure), {}};
    r.response = g_matrix(r.rx_steer, r.tx_steer, s.num_slots);
    link.paths.push_back(std::move(r));
  }
  return link;
}

RicianParams rician_params(const CVector& u, const CVector& w, const UserLink& link) {
  RicianParams out;
  for (const auto& p : link.paths) {
    const double proj = std::norm(w.dot(p.response * u));
    if (p.kind == PathKind::Direct) {
      out.direct_power += p.power * proj;
    } else {
      out.indirect_power += p.power * proj;
    }
  }
  out.nu = out.direct_power + out.indirect_power;
  if (out.direct_power == 0.0) {
    out.kappa = RicianFactor::finite(0.0);
    out.degenerate = out.indirect_power == 0.0;
  } else if (out.indirect_power == 0.0) {
    out.kappa = RicianFactor::infinite();
  } else {
    out.kappa = RicianFactor::finite(out.direct_power / out.indirect_power);
  }
  return out;
}

double snr(const CVector& u, const CVector& w, const UserLink& link) {
  const double wn = w.squaredNorm();
  if (wn == 0.0) throw std::invalid_argument("snr: receive filter is zero");
  return rician_params(u, w, link).nu / (link.noise_power * wn);
}

double error_prob_d2(RicianFactor kappa, double snr) {
  if (kappa.is_infinite()) return 0.5 * std::exp(-snr);
  const double k = kappa.value();
  if (k == 0.0) return 1.0 / (2.0 * (1.0 + snr));
  return (1.0 + k) / (2.0 * (1.0 + k + snr)) * std::exp(-k * snr / (k + snr));
}

namespace {

double q_function(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

}  // namespace

double inverse_q(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("inverse_q: argument must lie in (0, 1)");
  double lo = -40.0;
  double hi = 40.0;
  // Q is decreasing: Q(lo) ≈ 1, Q(hi) ≈ 0.
  for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (q_function(mid) > p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double error_prob(LinkMode mode, double snr, int d) {
  if (d == 2) {
    return error_prob_d2(mode == LinkMode::Direct ? RicianFactor::infinite() : RicianFactor::finite(0.0), snr);
  }
  const double s2 = std::pow(std::sin(kPi / d), 2);
  if (mode == LinkMode::Direct) return 2.0 * q_function(std::sqrt(snr * s2));
  const double num = 2.0 * kPi - 2.0 * kPi / d + std::sin(2.0 * kPi / d);
  return std::min(1.0, num / (2.0 * kPi * snr * s2));
}

SnrThreshold rho_threshold(double epsilon, LinkMode mode, int d) {
  if (!(epsilon > 0.0 && epsilon < 0.5)) throw std::invalid_argument("rho_threshold: epsilon outside (0, 1/2)");
  if (d < 2) throw std::invalid_argument("rho_threshold: constellation size must be >= 2");
  if (d == 2) {
    if (mode == LinkMode::Direct) return {std::log(1.0 / (2.0 * epsilon)), mode};
    return {1.0 / (2.0 * epsilon) - 1.0, mode};
  }
  const double s2 = std::pow(std::sin(kPi / d), 2);
  if (mode == LinkMode::Direct) {
    const double q = inverse_q(epsilon / 2.0);
    return {q * q / s2, mode};
  }
  const double num = 2.0 * kPi - 2.0 * kPi / d + std::sin(2.0 * kPi / d);
  return {num / (2.0 * kPi * epsilon * s2), mode};
}

CMatrix upsilon_matrix(const UserLink& link, const CVector& w) {
  const double wn = w.squaredNorm();
  if (wn == 0.0) throw std::invalid_argument("upsilon_matrix: receive filter is zero");
  const Index n = link.paths.empty() ? 0 : link.paths.front().response.cols();
  CMatrix out = CMatrix::Zero(n, n);
  for (const auto& p : link.paths) {
    const CVector a = p.response.adjoint() * w;  // Gᴴ w
    out.noalias() += (p.power / (link.noise_power * wn)) * (a * a.adjoint());
  }
  return out;
}

}  // namespace dfrc
