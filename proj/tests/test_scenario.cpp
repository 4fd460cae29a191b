#include "doctest.h"

#include <algorithm>

#include "dfrc/scenario.hpp"
#include "support.hpp"

using namespace dfrc;
using namespace dfrc::testing;

namespace {

bool has_violation(const Scenario& s, const std::string& path, const std::string& text) {
  const auto v = validate(s);
  return std::any_of(v.begin(), v.end(), [&](const Violation& x) {
    return x.path == path && x.message.find(text) != std::string::npos;
  });
}

}  // namespace

TEST_SUITE("scenario") {
  TEST_CASE("steering vector") {
    const ArrayGeometry a{5, 0.07};
    const CVector s0 = steering(a, 2e9, 0.0);
    CHECK((s0 - CVector::Ones(5)).norm() == 0.0);

    // f b / c = 1/2
    const ArrayGeometry half{2, kSpeedOfLight / (2 * 1e9)};
    const CVector s = steering(half, 1e9, kPi / 2);
    CHECK(std::abs(s(0) - std::complex<double>(1, 0)) < 1e-15);
    CHECK(std::abs(s(1) - std::exp(std::complex<double>(0, -kPi))) < 1e-12);

    std::mt19937_64 rng(2);
    for (int t = 0; t < 20; ++t) {
      const double ang = uniform(rng, -1.5, 1.5);
      const CVector v = steering(a, 2e9 + t * 1e5, ang);
      for (Index i = 0; i < v.size(); ++i) CHECK(std::abs(v(i)) == doctest::Approx(1.0).epsilon(1e-14));
      CHECK((steering(a, 2e9 + t * 1e5, -ang) - v.conjugate()).norm() < 1e-12);
    }
  }

  TEST_CASE("g_matrix") {
    std::mt19937_64 rng(5);
    const CVector g = random_cvector(3, rng);
    const CVector s = random_cvector(4, rng);
    CHECK((g_matrix(g, s, 1) - g * s.transpose()).norm() < 1e-15);

    CVector e_rx = CVector::Zero(3), e_tx = CVector::Zero(4);
    e_rx(0) = 1;
    e_tx(0) = 1;
    const CMatrix unit = g_matrix(e_rx, e_tx, 2);
    REQUIRE(unit.rows() == 6);
    REQUIRE(unit.cols() == 8);
    CHECK(unit(0, 0) == std::complex<double>(1, 0));
    CHECK(unit(3, 4) == std::complex<double>(1, 0));
    CHECK(unit.cwiseAbs().sum() == doctest::Approx(2.0));

    const CMatrix gm = g_matrix(g, s, 3);
    Eigen::JacobiSVD<CMatrix> svd(gm);
    const auto sv = svd.singularValues();
    int rank = 0;
    for (Index i = 0; i < sv.size(); ++i) rank += sv(i) > 1e-10 * sv(0);
    CHECK(rank == 3);

    const CVector x = random_cvector(4, rng);
    const CVector lhs = gm * kron(CVector::Ones(3), x);
    const CVector rhs = kron(CVector::Ones(3), CVector(g * s.transpose() * x));
    CHECK((lhs - rhs).norm() < 1e-12 * rhs.norm());
  }

  TEST_CASE("scr_calibrate") {
    CHECK(scr_calibrate(1.0, 4.0, 4) == 1.0);
    CHECK(scr_calibrate(db_to_linear(-20.0), 1e-16, 4) == doctest::Approx(2.5e-15).epsilon(1e-12));
    CHECK(scr_calibrate(0.5, 3.0, 1) == 6.0);
    const double scr = 0.0123, eta = 7e-3;
    const double each = scr_calibrate(scr, eta, 3);
    CHECK(eta / (3 * each) == doctest::Approx(scr).epsilon(1e-15));
    CHECK_THROWS(scr_calibrate(1.0, 1.0, 0));
  }

  TEST_CASE("validate") {
    const Scenario table1 = random_instance(InstanceParams{}, 1);
    CHECK(validate(table1).empty());
    CHECK(table1.num_subcarriers() == 4);
    CHECK(table1.tx_array.num_elements == 11);
    CHECK(table1.protected_directions.size() == 24);
    // half-wavelength spacing at the highest subcarrier
    CHECK(table1.tx_array.element_spacing ==
          doctest::Approx(kSpeedOfLight / (2 * table1.subcarriers.back())).epsilon(1e-14));

    Scenario eps = table1;
    eps.users[0].error_target[1] = 0.7;
    CHECK(has_violation(eps, "users[0].error_target[1]", "error_target outside (0, 1/2)"));

    Scenario cl = table1;
    cl.clutter[2].angle = cl.target_direction[0];
    CHECK(has_violation(cl, "clutter[2].angle", "clutter coincides with target direction"));

    Scenario many = table1;
    many.num_slots = 1;
    many.protected_directions[0].delta = 1.5;
    many.power_budget = 0.0;
    const auto v = validate(many);
    CHECK(v.size() >= 3);
    CHECK(has_violation(many, "num_slots", "at least 2"));
    CHECK(has_violation(many, "protected[0].delta", "delta outside"));
  }

  TEST_CASE("random_instance is deterministic") {
    const Scenario a = random_instance(InstanceParams{}, 42);
    const Scenario b = random_instance(InstanceParams{}, 42);
    const Scenario c = random_instance(InstanceParams{}, 43);
    CHECK(a.users[0].paths[0].departure == b.users[0].paths[0].departure);
    CHECK(a.users[0].paths[0].departure != c.users[0].paths[0].departure);
    for (const auto& u : a.users) {
      for (const auto& p : u.paths) CHECK(std::abs(p.departure) <= kPi / 3);
    }
    double total = 0;
    for (const auto& cs : a.clutter) total += cs.power[0];
    CHECK(a.target_power[0] / total == doctest::Approx(db_to_linear(-20.0)).epsilon(1e-12));
  }
}
