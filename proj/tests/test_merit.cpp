#include "doctest.h"

#include <cmath>

#include "dfrc/merit.hpp"
#include "support.hpp"

using namespace dfrc;
using namespace dfrc::testing;

namespace {

RVector vec(std::initializer_list<double> v) {
  RVector x(static_cast<Index>(v.size()));
  Index i = 0;
  for (double d : v) x(i++) = d;
  return x;
}

RVector fd_gradient(const std::function<double(const RVector&)>& f, const RVector& x) {
  RVector g(x.size());
  for (Index i = 0; i < x.size(); ++i) {
    const double h = 1e-6 * (1.0 + std::abs(x(i)));
    RVector a = x, b = x;
    a(i) += h;
    b(i) -= h;
    g(i) = (f(a) - f(b)) / (2 * h);
  }
  return g;
}

std::vector<MeritFunction> all_variants(Index k) {
  const RVector mu = MeritFunction::uniform_weights(k);
  return {MeritFunction::power_mean(1.0, mu),
          MeritFunction::power_mean(-2.0, mu),
          MeritFunction::quasi_arithmetic(Generator::exponential(0.5), mu),
          MeritFunction::mutual_information(mu),
          MeritFunction::fisher_information(mu),
          MeritFunction::detection_probability(mu, RVector::Constant(k, 1e-4)),
          MeritFunction::relative_entropy(mu, RVector::Constant(k, 0.2)),
          MeritFunction::relative_entropy(mu, RVector::Constant(k, 0.7))};
}

}  // namespace

TEST_SUITE("merit") {
  TEST_CASE("value examples") {
    CHECK(MeritFunction::power_mean(1.0, MeritFunction::uniform_weights(4)).value(vec({1, 2, 3, 4})) == 2.5);
    CHECK(MeritFunction::power_mean(-1.0, vec({0.5, 0.5})).value(vec({1, 4})) == doctest::Approx(1.6).epsilon(1e-15));
    CHECK(MeritFunction::detection_probability(MeritFunction::uniform_weights(3), RVector::Constant(3, 1e-4))
              .value(RVector::Zero(3)) == doctest::Approx(1e-4).epsilon(1e-14));
    CHECK(MeritFunction::relative_entropy(MeritFunction::uniform_weights(2), RVector::Zero(2)).value(RVector::Zero(2)) ==
          0.0);
    CHECK(MeritFunction::mutual_information(MeritFunction::uniform_weights(4))
              .value(RVector::Constant(4, std::exp(1.0) - 1.0)) == doctest::Approx(1.0).epsilon(1e-15));
  }

  TEST_CASE("power-mean conventions and limits") {
    const RVector mu = MeritFunction::uniform_weights(3);
    const auto h = MeritFunction::power_mean(-1.0, mu);
    CHECK(h.value(vec({0.0, 1.0, 2.0})) == 0.0);
    CHECK(h.at_domain_boundary(vec({0.0, 1.0, 2.0})));
    CHECK_THROWS_AS(h.gradient(vec({0.0, 1.0, 2.0})), DomainError);

    const RVector x = vec({3.0, 7.0, 11.0});
    CHECK(MeritFunction::power_mean(-100.0, mu).value(x) == doctest::Approx(3.0).epsilon(0.01));
    const double geo = std::cbrt(3.0 * 7.0 * 11.0);
    CHECK(MeritFunction::power_mean(1e-9, mu).value(x) == doctest::Approx(geo).epsilon(1e-7));
    CHECK(MeritFunction::power_mean(0.0, mu).value(x) == doctest::Approx(geo).epsilon(1e-14));
    CHECK(MeritFunction::quasi_arithmetic(Generator::log(), mu).value(x) == doctest::Approx(geo).epsilon(1e-14));
    CHECK_THROWS(MeritFunction::power_mean(2.0, mu));
  }

  TEST_CASE("gradient examples") {
    const auto mi = MeritFunction::mutual_information(MeritFunction::uniform_weights(4));
    CHECK((mi.gradient(RVector::Zero(4)) - RVector::Constant(4, 0.25)).norm() < 1e-15);

    const auto fi = MeritFunction::fisher_information(vec({1.0}));
    CHECK(fi.gradient(vec({1.0}))(0) == doctest::Approx(0.75).epsilon(1e-14));
    CHECK(fd_gradient([&](const RVector& x) { return fi.value(x); }, vec({1.0}))(0) ==
          doctest::Approx(0.75).epsilon(1e-8));

    const RVector mu = vec({0.2, 0.3, 0.5});
    CHECK((MeritFunction::power_mean(1.0, mu).gradient(vec({4, 5, 6})) - mu).norm() == 0.0);
  }

  TEST_CASE("gradients and Hessians match finite differences for every variant") {
    std::mt19937_64 rng(17);
    for (const auto& f : all_variants(4)) {
      CAPTURE(to_string(f.kind()));
      for (int t = 0; t < 50; ++t) {
        RVector x(4);
        for (Index i = 0; i < 4; ++i) x(i) = uniform(rng, 0.05, 40.0);
        const RVector g = f.gradient(x);
        const RVector gfd = fd_gradient([&](const RVector& y) { return f.value(y); }, x);
        CHECK((g - gfd).lpNorm<Eigen::Infinity>() <= 1e-5 * g.lpNorm<Eigen::Infinity>());
        const RMatrix h = f.hessian(x);
        for (Index i = 0; i < 4; ++i) {
          const RVector row = fd_gradient([&](const RVector& y) { return f.gradient(y)(i); }, x);
          CHECK((h.row(i).transpose() - row).lpNorm<Eigen::Infinity>() <=
                1e-5 * h.lpNorm<Eigen::Infinity>() + 1e-9 * g.lpNorm<Eigen::Infinity>());
        }
      }
    }
  }

  TEST_CASE("monotone in every argument") {
    std::mt19937_64 rng(21);
    for (const auto& f : all_variants(3)) {
      for (int t = 0; t < 100; ++t) {
        RVector x(3), y(3);
        for (Index i = 0; i < 3; ++i) {
          x(i) = uniform(rng, 0.01, 30.0);
          y(i) = x(i) + uniform(rng, 0.0, 10.0);
        }
        CHECK(f.value(x) <= f.value(y) + 1e-12 * std::abs(f.value(y)));
      }
    }
  }

  TEST_CASE("concave variants have negative semidefinite Hessians") {
    std::mt19937_64 rng(23);
    const RVector mu = MeritFunction::uniform_weights(3);
    for (const auto& f : {MeritFunction::power_mean(1.0, mu), MeritFunction::power_mean(-5.0, mu),
                          MeritFunction::power_mean(0.5, mu),
                          MeritFunction::quasi_arithmetic(Generator::exponential(0.5), mu),
                          MeritFunction::mutual_information(mu)}) {
      REQUIRE(f.is_concave());
      for (int t = 0; t < 100; ++t) {
        RVector x(3);
        for (Index i = 0; i < 3; ++i) x(i) = uniform(rng, 0.1, 20.0);
        RMatrix h(3, 3);
        for (Index i = 0; i < 3; ++i) {
          h.row(i) = fd_gradient([&](const RVector& y) { return f.gradient(y)(i); }, x).transpose();
        }
        h = (h + h.transpose()) / 2;
        const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
        CHECK(Eigen::SelfAdjointEigenSolver<RMatrix>(h).eigenvalues().maxCoeff() <= 1e-6 * scale);
      }
    }
  }

  TEST_CASE("minorizer examples") {
    const RVector mu = MeritFunction::uniform_weights(4);
    std::mt19937_64 rng(29);

    const auto mi = MeritFunction::mutual_information(mu);
    const auto z = mi.minorizer_at(RVector::Constant(4, 2.0));
    for (int t = 0; t < 20; ++t) {
      RVector x(4);
      for (Index i = 0; i < 4; ++i) x(i) = uniform(rng, 0.0, 50.0);
      CHECK(z.value(x) == mi.value(x));
    }

    const auto fi = MeritFunction::fisher_information(mu);
    const RVector ones = RVector::Ones(4);
    const auto zf = fi.minorizer_at(ones);
    CHECK(zf.value(ones) == doctest::Approx(fi.value(ones)).epsilon(1e-15));
    CHECK((zf.gradient(RVector::Constant(4, 9.0)) - RVector::Constant(4, 0.75 / 4)).norm() < 1e-15);
    for (int t = 0; t < 1000; ++t) {
      RVector x(4);
      for (Index i = 0; i < 4; ++i) x(i) = uniform(rng, 0.0, 50.0);
      CHECK(zf.value(x) <= fi.value(x) + 1e-10);
    }

    const double pfa = 1e-6;
    const auto dp = MeritFunction::detection_probability(mu, RVector::Constant(4, pfa));
    const double r3 = std::sqrt(3.0);
    const double c = std::pow(r3 - 3, 4) * std::exp(r3 - 3) / (2 * r3 * std::log(pfa) * std::log(pfa));
    CHECK(dp.surrogate_curvature()(0) == doctest::Approx(c).epsilon(1e-14));
    const RVector x0 = RVector::Constant(4, 12.0);
    const auto zd = dp.minorizer_at(x0);
    CHECK(zd.value(x0) == doctest::Approx(dp.value(x0)).epsilon(1e-14));
    for (int t = 0; t < 1000; ++t) {
      RVector x(4);
      for (Index i = 0; i < 4; ++i) x(i) = uniform(rng, 0.0, 100.0);
      CHECK(zd.value(x) <= dp.value(x) + 1e-10);
    }

    const auto re = MeritFunction::relative_entropy(mu, RVector::Constant(4, 0.6));
    CHECK(re.surrogate_curvature().norm() == 0.0);
    CHECK(re.minorizer_at(ones).hessian(ones).norm() == 0.0);
  }

  TEST_CASE("concavity test for quasi-arithmetic generators") {
    const auto grid = default_concavity_grid();
    CHECK(prop1_concavity_test(Generator::exponential(0.5), grid).verdict == Concavity::Concave);
    std::vector<double> g2;
    for (int i = 0; i < 40; ++i) g2.push_back(0.1 * std::pow(100.0, i / 39.0));
    CHECK(prop1_concavity_test(Generator::radical(2.0), g2).verdict != Concavity::Inconclusive);
    // a^x with a > 1 has γ'γ'' > 0: outside the sign pattern
    CHECK(prop1_concavity_test(Generator::exponential(2.0), grid).verdict == Concavity::Inconclusive);

    // γ(x) = x³ has γ'/γ'' = x/2 (convex) but γ'γ'' > 0
    Generator cube;
    cube.name = "cube";
    cube.gamma = [](double x) { return x * x * x; };
    cube.d1 = [](double x) { return 3 * x * x; };
    cube.d2 = [](double x) { return 6 * x; };
    cube.inverse = [](double y) { return std::cbrt(y); };
    cube.ratio = [](double x) { return x / 2; };
    CHECK(prop1_concavity_test(cube, grid).verdict != Concavity::Concave);

    const auto qa = MeritFunction::quasi_arithmetic(Generator::exponential(0.5), MeritFunction::uniform_weights(2));
    CHECK(qa.is_concave());
    // the exponential mean lies between min and arithmetic mean
    const RVector x = vec({1.0, 5.0});
    CHECK(qa.value(x) >= 1.0);
    CHECK(qa.value(x) <= 3.0);
  }
}
