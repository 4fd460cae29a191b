#include "doctest.h"

#include <Eigen/Eigenvalues>

#include "dfrc/userfilter.hpp"
#include "support.hpp"

using namespace dfrc;
using namespace dfrc::testing;

namespace {

UserLink link_with(int nt, double eps = 1e-3, KappaMode mode = KappaMode::Auto) {
  Scenario s = small_instance(3);
  s.tx_array.num_elements = nt;
  User u;
  u.array = {4, s.tx_array.element_spacing};
  u.paths = {{PathKind::Direct, 0.3, -0.2, 1e-13},
             {PathKind::Indirect, -0.6, 0.5, 4e-14},
             {PathKind::Indirect, 0.9, 1.1, 2e-14}};
  u.noise_power.assign(s.num_subcarriers(), 1e-15);
  u.error_target.assign(s.num_subcarriers(), eps);
  u.kappa_mode = mode;
  s.users = {u};
  return build_user_link(s, 0, 0);
}

double path_power(const UserLink& link, const CVector& u, const CVector& w, PathKind kind) {
  double out = 0.0;
  for (const auto& p : link.paths) {
    if (p.kind == kind) out += p.power * std::norm(w.dot(p.response * u));
  }
  return out;
}

double lambda_max(const CMatrix& h) {
  return Eigen::SelfAdjointEigenSolver<CMatrix>(0.5 * (h + h.adjoint())).eigenvalues().maxCoeff();
}

FilterCandidate candidate(LinkMode mode, double snr_value, double rho, double pe) {
  FilterCandidate c;
  c.mode = mode;
  c.achieved_snr = snr_value;
  c.rho = rho;
  c.error_prob = pe;
  c.feasible = snr_value >= rho;
  return c;
}

}  // namespace

TEST_SUITE("userfilter") {
  TEST_CASE("xi matrix reproduces the SNR") {
    const UserLink link = link_with(6);
    std::mt19937_64 rng(1);
    const Index n = link.paths[0].response.cols();
    const CVector u = random_cvector(n, rng);
    const CMatrix xi = xi_matrix(link, u);
    CHECK(is_hermitian(xi, 1e-12));
    const auto ev = Eigen::SelfAdjointEigenSolver<CMatrix>(xi).eigenvalues();
    CHECK(ev.minCoeff() >= -1e-10 * ev.maxCoeff());
    int rank = 0;
    for (Index i = 0; i < ev.size(); ++i) rank += ev(i) > 1e-9 * ev.maxCoeff();
    CHECK(rank <= 3);
    for (int t = 0; t < 20; ++t) {
      const CVector w = random_cvector(xi.rows(), rng);
      CHECK(std::real(w.dot(xi * w)) / w.squaredNorm() == doctest::Approx(snr(u, w, link)).epsilon(1e-12));
    }
  }

  TEST_CASE("candidates zero-force the other path class") {
    const UserLink link = link_with(6);
    std::mt19937_64 rng(2);
    for (int t = 0; t < 10; ++t) {
      const CVector u = random_cvector(link.paths[0].response.cols(), rng);
      const auto cands = filter_candidates(link, u, 2);
      REQUIRE(cands.size() == 2);
      for (const auto& c : cands) {
        CHECK(c.w.norm() == doctest::Approx(1.0).epsilon(1e-12));
        const double nu = path_power(link, u, c.w, PathKind::Direct) + path_power(link, u, c.w, PathKind::Indirect);
        const PathKind other = c.mode == LinkMode::Direct ? PathKind::Indirect : PathKind::Direct;
        CHECK(path_power(link, u, c.w, other) <= 1e-10 * nu);
        CHECK(c.achieved_snr == doctest::Approx(snr(u, c.w, link)).epsilon(1e-10));
        CHECK(c.rho == rho_threshold(link.error_target, c.mode, 2).rho);
      }
    }
    CHECK_THROWS_AS(filter_candidates(link, CVector::Zero(link.paths[0].response.cols()), 2), std::invalid_argument);
  }

  TEST_CASE("eigen-filter beats random filters in the same subspace") {
    const UserLink link = link_with(6);
    std::mt19937_64 rng(3);
    const CVector u = random_cvector(link.paths[0].response.cols(), rng);
    const CMatrix xi = xi_matrix(link, u);
    for (const auto& c : filter_candidates(link, u, 2)) {
      const CMatrix proj = c.mode == LinkMode::Direct ? direct_projector(link) : indirect_projector(link);
      const CMatrix slots = kron(CMatrix::Identity(link.num_slots, link.num_slots), proj);
      const double top = lambda_max(project_xi(xi, proj, link.num_slots));
      CHECK(c.achieved_snr == doctest::Approx(top).epsilon(1e-10));
      double best = 0.0;
      for (int s = 0; s < 10000; ++s) {
        const CVector w = (slots * random_cvector(xi.rows(), rng)).normalized();
        const double v = std::real(w.dot(xi * w));
        best = std::max(best, v);
        CHECK(v <= c.achieved_snr * (1 + 1e-10));
      }
      CHECK(best <= c.achieved_snr * (1 + 1e-3));
      CHECK(best > 0.0);
    }
  }

  TEST_CASE("kappa_mode restricts the candidates") {
    CHECK(filter_candidates(link_with(6, 1e-3, KappaMode::ForceDirect), CVector::Ones(12), 2).size() == 1);
    const auto ind = filter_candidates(link_with(6, 1e-3, KappaMode::ForceIndirect), CVector::Ones(12), 2);
    REQUIRE(ind.size() == 1);
    CHECK(ind[0].mode == LinkMode::Indirect);

    UserLink none = link_with(6, 1e-3, KappaMode::ForceDirect);
    none.paths.erase(none.paths.begin());
    CHECK(allowed_modes(none).empty());
    CHECK_THROWS_AS(filter_candidates(none, CVector::Ones(12), 2), UnservableUserError);
  }

  TEST_CASE("select_filter rules") {
    const auto d = candidate(LinkMode::Direct, 20.0, 10.0, 1e-5);
    const auto i = candidate(LinkMode::Indirect, 40.0, 30.0, 1e-6);
    CHECK(select_filter({d, i}).mode == LinkMode::Indirect);
    CHECK(select_filter({candidate(LinkMode::Indirect, 40.0, 30.0, 1e-5), d}).mode == LinkMode::Direct);
    CHECK(select_filter({d, candidate(LinkMode::Indirect, 20.0, 30.0, 1e-2)}).mode == LinkMode::Direct);
    CHECK(select_filter({candidate(LinkMode::Direct, 5.0, 10.0, 1e-2), i}).mode == LinkMode::Indirect);
    const auto none = select_filter({candidate(LinkMode::Direct, 5.0, 10.0, 1e-2),
                                     candidate(LinkMode::Indirect, 24.0, 30.0, 1e-2)});
    CHECK(none.mode == LinkMode::Indirect);
    CHECK_FALSE(none.feasible);
    CHECK_THROWS(select_filter({}));
  }

  TEST_CASE("initial filter") {
    const UserLink link = link_with(6);
    const CVector wd = initial_filter(link, LinkMode::Direct);
    CHECK(wd.norm() == doctest::Approx(1.0).epsilon(1e-14));
    const CVector one = CVector::Ones(link.paths[0].response.cols());
    CHECK(path_power(link, one, wd, PathKind::Indirect) <= 1e-10 * path_power(link, one, wd, PathKind::Direct));
    const CVector wi = initial_filter(link, LinkMode::Indirect);
    CHECK(path_power(link, one, wi, PathKind::Direct) <= 1e-10 * path_power(link, one, wi, PathKind::Indirect));
  }

  TEST_CASE("C3 necessary and sufficient screens") {
    const UserLink link = link_with(2, 1e-3);
    std::mt19937_64 rng(4);
    const CVector sd = link.paths[0].tx_steer;
    // columns orthogonal to s*(φ_direct)
    const CMatrix blind = (CMatrix::Identity(2, 2) - sd.conjugate() * sd.transpose() / sd.squaredNorm()) *
                          random_cmatrix(2, 2, rng);
    CHECK_FALSE(c3_necessary(link, blind, LinkMode::Direct));
    CHECK(c3_necessary(link, blind, LinkMode::Indirect));
    CHECK(c3_necessary(link, random_cmatrix(2, 2, rng), LinkMode::Direct));
    // SNR is zero whatever the filter when the necessary condition fails
    const CVector u = Eigen::Map<const CVector>(blind.data(), blind.size());
    UserLink direct_only = link;
    direct_only.paths.resize(1);
    CHECK(lambda_max(xi_matrix(direct_only, u)) <= 1e-20);

    for (LinkMode mode : {LinkMode::Direct, LinkMode::Indirect}) {
      const double rho = rho_threshold(link.error_target, mode, 2).rho;
      int passes = 0;
      for (int t = 0; t < 50; ++t) {
        const CMatrix code = random_cmatrix(2, 2, rng) * std::exp(uniform(rng, -1.0, 4.0));
        if (c3_sufficient(link, code, rho, mode) != Sufficiency::Pass) continue;
        ++passes;
        const CVector v = Eigen::Map<const CVector>(code.data(), code.size());
        const auto cands = filter_candidates(link, v, 2);
        const auto it = std::find_if(cands.begin(), cands.end(), [&](const auto& c) { return c.mode == mode; });
        REQUIRE(it != cands.end());
        CHECK(it->achieved_snr >= rho);
      }
      CHECK(passes > 0);
      // rank-deficient codes are untestable
      CMatrix r1 = random_cmatrix(2, 1, rng) * random_cmatrix(1, 2, rng) * 1e6;
      CHECK(c3_sufficient(link, r1, rho, mode) == Sufficiency::Inconclusive);
    }
    CHECK(c3_sufficient(link_with(6), random_cmatrix(6, 2, rng), 1.0, LinkMode::Direct) ==
          Sufficiency::Inconclusive);
  }

  TEST_CASE("indirect eigenvalue sandwich") {
    const UserLink link = link_with(6);
    std::mt19937_64 rng(5);
    for (int t = 0; t < 50; ++t) {
      const CMatrix code = random_cmatrix(6, 2, rng);
      const CVector u = Eigen::Map<const CVector>(code.data(), code.size());
      const auto [lo, hi] = indirect_eigen_bounds(link, code);
      const double lam = lambda_max(project_xi(xi_matrix(link, u), indirect_projector(link), link.num_slots));
      CHECK(lo <= lam * (1 + 1e-10));
      CHECK(lam <= hi * (1 + 1e-10));
    }
  }
}
