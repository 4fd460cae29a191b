#include "dfrc/userfilter.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>

namespace dfrc {

namespace {

const PathResponse* direct_path(const UserLink& link) {
  for (const auto& p : link.paths) {
    if (p.kind == PathKind::Direct) return &p;
  }
  return nullptr;
}

const PathResponse* strongest_indirect(const UserLink& link) {
  const PathResponse* best = nullptr;
  for (const auto& p : link.paths) {
    if (p.kind == PathKind::Indirect && (!best || p.power > best->power)) best = &p;
  }
  return best;
}

CMatrix slot_projector(const CMatrix& proj, int num_slots) {
  return kron(CMatrix::Identity(num_slots, num_slots), proj);
}

}  // namespace

CMatrix xi_matrix(const UserLink& link, const CVector& u) {
  const Index n = Index(link.num_slots) * link.rx_elements;
  CMatrix out = CMatrix::Zero(n, n);
  for (const auto& p : link.paths) {
    const CVector a = p.response * u;
    out.noalias() += (p.power / link.noise_power) * (a * a.adjoint());
  }
  return out;
}

CMatrix direct_projector(const UserLink& link) {
  std::vector<CVector> span;
  for (const auto& p : link.paths) {
    if (p.kind == PathKind::Indirect) span.push_back(p.rx_steer);
  }
  return projector_complement<double>(span, link.rx_elements);
}

CMatrix indirect_projector(const UserLink& link) {
  std::vector<CVector> span;
  if (const auto* d = direct_path(link)) span.push_back(d->rx_steer);
  return projector_complement<double>(span, link.rx_elements);
}

CMatrix project_xi(const CMatrix& xi, const CMatrix& proj, int num_slots) {
  const CMatrix p = slot_projector(proj, num_slots);
  return p * xi * p;
}

bool direct_mode_available(const UserLink& link) {
  if (!link.has_direct()) return false;
  const int q = link.num_indirect();
  return q == 0 || link.rx_elements > q;
}

bool indirect_mode_available(const UserLink& link) {
  if (!link.has_indirect()) return false;
  return !link.has_direct() || link.rx_elements >= 2;
}

std::vector<LinkMode> allowed_modes(const UserLink& link) {
  std::vector<LinkMode> out;
  if (link.kappa_mode != KappaMode::ForceIndirect && direct_mode_available(link)) {
    out.push_back(LinkMode::Direct);
  }
  if (link.kappa_mode != KappaMode::ForceDirect && indirect_mode_available(link)) {
    out.push_back(LinkMode::Indirect);
  }
  return out;
}

CVector initial_filter(const UserLink& link, LinkMode mode) {
  const PathResponse* path = mode == LinkMode::Direct ? direct_path(link) : strongest_indirect(link);
  if (!path) throw UnservableUserError("initial_filter: user has no path of the requested kind");
  const CMatrix proj = mode == LinkMode::Direct ? direct_projector(link) : indirect_projector(link);
  const CVector g = proj * path->rx_steer;
  CVector w = kron(CVector::Ones(link.num_slots), g);
  const double nrm = w.norm();
  if (nrm == 0.0) throw UnservableUserError("initial_filter: projected steering vector vanishes");
  return w / nrm;
}

std::vector<FilterCandidate> filter_candidates(const UserLink& link, const CVector& u,
                                               int constellation_size) {
  if (u.squaredNorm() == 0.0) throw std::invalid_argument("filter_candidates: code is zero");
  const auto modes = allowed_modes(link);
  if (modes.empty()) {
    throw UnservableUserError("user " + std::to_string(link.user) + " on subcarrier " +
                              std::to_string(link.subcarrier) + " has no usable receive mode");
  }
  const CMatrix xi = xi_matrix(link, u);
  std::vector<FilterCandidate> out;
  for (LinkMode mode : modes) {
    const CMatrix proj = mode == LinkMode::Direct ? direct_projector(link) : indirect_projector(link);
    const CMatrix slots = slot_projector(proj, link.num_slots);
    const CMatrix h = slots * xi * slots;
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(0.5 * (h + h.adjoint()));
    if (eig.info() != Eigen::Success) throw NumericalError("filter_candidates: eigensolver failed");
    const Index top = h.rows() - 1;

    FilterCandidate c;
    c.mode = mode;
    c.w = slots * eig.eigenvectors().col(top);
    if (c.w.norm() <= 1e-12) {
      c.w = initial_filter(link, mode);
    } else {
      c.w.normalize();
    }
    c.achieved_snr = std::max(0.0, std::real(c.w.dot(xi * c.w)));
    c.rho = rho_threshold(link.error_target, mode, constellation_size).rho;
    c.error_prob = error_prob(mode, c.achieved_snr, constellation_size);
    c.feasible = c.achieved_snr >= c.rho;
    out.push_back(std::move(c));
  }
  return out;
}

FilterCandidate select_filter(const std::vector<FilterCandidate>& candidates) {
  if (candidates.empty()) throw std::invalid_argument("select_filter: no candidates");
  const FilterCandidate* best = nullptr;
  for (const auto& c : candidates) {
    if (!c.feasible) continue;
    if (!best || c.error_prob < best->error_prob ||
        (c.error_prob == best->error_prob && c.mode == LinkMode::Direct)) {
      best = &c;
    }
  }
  if (best) return *best;
  for (const auto& c : candidates) {
    if (!best || c.achieved_snr / c.rho > best->achieved_snr / best->rho) best = &c;
  }
  return *best;
}

bool c3_necessary(const UserLink& link, const CMatrix& code, LinkMode mode) {
  const double tol = 1e-12 * std::max(code.norm(), 1e-300);
  for (const auto& p : link.paths) {
    const bool relevant = mode == LinkMode::Direct ? p.kind == PathKind::Direct : p.kind == PathKind::Indirect;
    if (!relevant) continue;
    const double proj = (code.adjoint() * p.tx_steer.conjugate()).norm() / p.tx_steer.norm();
    if (proj > tol) return true;
  }
  return false;
}

Sufficiency c3_sufficient(const UserLink& link, const CMatrix& code, double rho, LinkMode mode) {
  const Index nt = code.rows();
  Eigen::JacobiSVD<CMatrix> svd(code);
  const auto& sv = svd.singularValues();
  if (sv.size() < nt || sv(0) == 0.0 || sv(nt - 1) <= 1e-10 * sv(0)) return Sufficiency::Inconclusive;
  const double lambda_min = sv(nt - 1) * sv(nt - 1);

  const CMatrix proj = mode == LinkMode::Direct ? direct_projector(link) : indirect_projector(link);
  double gain = 0.0;
  for (const auto& p : link.paths) {
    const bool relevant = mode == LinkMode::Direct ? p.kind == PathKind::Direct : p.kind == PathKind::Indirect;
    if (!relevant) continue;
    gain = std::max(gain, p.power * std::real(p.rx_steer.dot(proj * p.rx_steer)));
  }
  if (gain <= 0.0) return Sufficiency::Inconclusive;
  const double bound = rho * link.noise_power / double(nt) / gain;
  return lambda_min >= bound ? Sufficiency::Pass : Sufficiency::Inconclusive;
}

std::pair<double, double> indirect_eigen_bounds(const UserLink& link, const CMatrix& code) {
  const CMatrix proj = indirect_projector(link);
  double lo = 0.0;
  double hi = 0.0;
  for (const auto& p : link.paths) {
    if (p.kind != PathKind::Indirect) continue;
    const double gpg = std::real(p.rx_steer.dot(proj * p.rx_steer));
    const double term = p.power / link.noise_power * gpg * (p.tx_steer.transpose() * code).squaredNorm();
    lo = std::max(lo, term);
    hi += term;
  }
  return {lo, hi};
}

}  // namespace dfrc
