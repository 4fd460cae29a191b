#include "doctest.h"

#include <cmath>

#include "dfrc/cvxsolver.hpp"
#include "support.hpp"

using namespace dfrc;
using namespace dfrc::testing;

namespace {

SmoothOracle linear_objective(const RVector& c) {
  return {[c](const RVector& x) { return c.dot(x); }, [c](const RVector&) { return c; },
          [c](const RVector&) { return RMatrix(RMatrix::Zero(c.size(), c.size())); }};
}

// -xᵀAx + bᵀx
SmoothOracle quadratic_objective(const RMatrix& a, const RVector& b) {
  return {[a, b](const RVector& x) { return -x.dot(a * x) + b.dot(x); },
          [a, b](const RVector& x) -> RVector { return -2.0 * a * x + b; },
          [a](const RVector&) -> RMatrix { return -2.0 * a; }};
}

Constraint ball(Index n, double r2) {
  std::vector<Index> sup(n);
  for (Index i = 0; i < n; ++i) sup[i] = i;
  return Constraint::quadratic(sup, RMatrix::Identity(n, n), RVector::Zero(n), -r2, "ball");
}

}  // namespace

TEST_SUITE("cvxsolver") {
  TEST_CASE("lift_complex") {
    CHECK((lift_complex(CMatrix::Identity(3, 3)) - RMatrix::Identity(6, 6)).norm() == 0.0);
    CMatrix two(1, 1);
    two(0, 0) = 2.0;
    const RVector x = to_real(CVector::Constant(1, {1.0, 1.0}));
    CHECK(x.dot(lift_complex(two) * x) == doctest::Approx(4.0));

    std::mt19937_64 rng(1);
    const CMatrix a = random_hermitian(5, rng);
    const RMatrix la = lift_complex(a);
    CHECK((la - la.transpose()).norm() == 0.0);
    for (int t = 0; t < 100; ++t) {
      const CVector u = random_cvector(5, rng);
      const RVector xr = to_real(u);
      CHECK(std::abs(xr.dot(la * xr) - u.dot(a * u).real()) <= 1e-12 * std::max(1.0, u.squaredNorm() * a.norm()));
      const CVector c = random_cvector(5, rng);
      CHECK(lift_linear(c).dot(xr) == doctest::Approx(c.dot(u).real()).epsilon(1e-13));
      CHECK((to_complex(xr) - u).norm() == 0.0);
    }
    const CMatrix p = random_psd(4, rng);
    const RMatrix lp = lift_complex(p);
    CHECK(Eigen::SelfAdjointEigenSolver<RMatrix>(lp).eigenvalues().minCoeff() >= -1e-10 * lp.norm());

    CMatrix nh = CMatrix::Zero(2, 2);
    nh(0, 1) = 1.0;
    CHECK_THROWS(lift_complex(nh));
  }

  TEST_CASE("unconstrained quadratic") {
    ConvexProgram p;
    p.dimension = 3;
    p.objective = quadratic_objective(RMatrix::Identity(3, 3), RVector::Zero(3));
    p.start = RVector::Constant(3, 0.7);
    const SolveReport r = solve(p);
    CHECK(r.solution.norm() <= 1e-6);
    CHECK(r.objective >= p.objective.value(p.start));
  }

  TEST_CASE("linear objective over a ball") {
    for (Index n : {2, 5}) {
      ConvexProgram p;
      p.dimension = n;
      RVector c = RVector::Zero(n);
      c(0) = 1.0;
      p.objective = linear_objective(c);
      p.constraints = {ball(n, 1.0)};
      p.start = RVector::Zero(n);
      SolverOptions o;
      o.tol = 1e-9;
      const SolveReport r = solve(p, o);
      CHECK(r.objective == doctest::Approx(1.0).epsilon(1e-7));
      CHECK(std::abs(r.objective - 1.0) <= 1e-7);
      CHECK((r.solution - c).norm() <= 1e-3);
      CHECK(r.max_violation <= 1e-8);
      CHECK(r.gap <= o.tol);
      for (std::size_t s = 1; s < r.stage_objectives.size(); ++s) {
        CHECK(r.stage_objectives[s] >= r.stage_objectives[s - 1] - 1e-12);
      }
    }
  }

  TEST_CASE("log utility with a budget") {
    ConvexProgram p;
    p.dimension = 2;
    p.objective = {[](const RVector& x) { return std::log1p(x(0)) + std::log1p(x(1)); },
                   [](const RVector& x) -> RVector {
                     RVector g(2);
                     g << 1 / (1 + x(0)), 1 / (1 + x(1));
                     return g;
                   },
                   [](const RVector& x) -> RMatrix {
                     RMatrix h = RMatrix::Zero(2, 2);
                     h(0, 0) = -1 / ((1 + x(0)) * (1 + x(0)));
                     h(1, 1) = -1 / ((1 + x(1)) * (1 + x(1)));
                     return h;
                   }};
    p.constraints = {Constraint::linear({0, 1}, RVector::Ones(2), -2.0, "budget"),
                     Constraint::linear({0}, RVector::Constant(1, -1.0), 0.0, "x0>=0"),
                     Constraint::linear({1}, RVector::Constant(1, -1.0), 0.0, "x1>=0")};
    p.start = RVector::Constant(2, 0.1);
    const SolveReport r = solve(p);
    CHECK(r.solution(0) == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(r.solution(1) == doctest::Approx(1.0).epsilon(1e-4));

    // grid oracle at 1e-3 resolution
    double best = -1e300;
    for (int i = 0; i <= 2000; ++i) {
      for (int j = 0; i + j <= 2000; ++j) best = std::max(best, std::log1p(i * 1e-3) + std::log1p(j * 1e-3));
    }
    CHECK(std::abs(r.objective - best) <= 2e-3);
  }

  TEST_CASE("pins are eliminated") {
    ConvexProgram p;
    p.dimension = 3;
    RVector c(3);
    c << 1.0, 1.0, 5.0;
    p.objective = linear_objective(c);
    p.constraints = {ball(3, 2.0)};
    p.pins = {{2, 0.0}};
    p.start = RVector::Zero(3);
    const SolveReport r = solve(p);
    CHECK(r.solution(2) == 0.0);
    CHECK(r.objective == doctest::Approx(2.0).epsilon(1e-6));
  }

  TEST_CASE("infeasible start and phase I") {
    ConvexProgram p;
    p.dimension = 2;
    p.objective = linear_objective(RVector::Ones(2));
    p.constraints = {ball(2, 1.0)};
    p.start = RVector::Constant(2, 3.0);
    try {
      solve(p);
      FAIL("expected InfeasibleStartError");
    } catch (const InfeasibleStartError& e) {
      CHECK(e.label() == "ball");
    }
    const auto x = find_strictly_feasible(p);
    REQUIRE(x.has_value());
    CHECK(max_constraint_value(p, *x) < 0.0);
    p.start = *x;
    CHECK(solve(p).objective == doctest::Approx(std::sqrt(2.0)).epsilon(1e-6));

    // two disjoint balls
    ConvexProgram q = p;
    RVector shift(2);
    shift << -5.0, 0.0;
    q.constraints.push_back(
        Constraint::quadratic({0, 1}, RMatrix::Identity(2, 2), shift, shift.squaredNorm() - 1.0, "far ball"));
    q.start = RVector::Zero(2);
    CHECK_FALSE(find_strictly_feasible(q).has_value());
  }

  TEST_CASE("random 2-D QCQPs against grid search") {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 10; ++trial) {
      CAPTURE(trial);
      RMatrix a = RMatrix::Zero(2, 2);
      if (trial % 2) {
        RMatrix m(2, 2);
        for (Index i = 0; i < 4; ++i) m(i) = uniform(rng, -0.4, 0.4);
        a = m.transpose() * m;
      }
      RVector b(2);
      b << uniform(rng, -1, 1), uniform(rng, -1, 1);
      ConvexProgram p;
      p.dimension = 2;
      p.objective = quadratic_objective(a, b);
      p.start = RVector::Zero(2);
      for (int c = 0; c < 2; ++c) {
        RMatrix m(2, 2);
        for (Index i = 0; i < 4; ++i) m(i) = uniform(rng, -1, 1);
        const RMatrix q = m.transpose() * m + 0.3 * RMatrix::Identity(2, 2);
        RVector ctr(2);
        ctr << uniform(rng, -0.5, 0.5), uniform(rng, -0.5, 0.5);
        const double r = ctr.dot(q * ctr) + uniform(rng, 0.2, 1.5);
        // (x-c)ᵀQ(x-c) ≤ r
        p.constraints.push_back(
            Constraint::quadratic({0, 1}, q, -q * ctr, ctr.dot(q * ctr) - r, "ellipse " + std::to_string(c)));
      }
      const SolveReport rep = solve(p);
      CHECK(rep.max_violation <= 1e-8);

      // bounding box of the intersection, then a 1e-3 grid over it
      double lo[2] = {-1e300, -1e300}, hi[2] = {1e300, 1e300};
      for (const auto& c : p.constraints) {
        const RMatrix qi = c.quad.inverse();
        const RVector ctr = -qi * c.q;
        const double r = ctr.dot(c.quad * ctr) - c.c;
        for (int i = 0; i < 2; ++i) {
          lo[i] = std::max(lo[i], ctr(i) - std::sqrt(r * qi(i, i)));
          hi[i] = std::min(hi[i], ctr(i) + std::sqrt(r * qi(i, i)));
        }
      }
      double best = -1e300;
      const auto& c0 = p.constraints[0];
      const auto& c1 = p.constraints[1];
      for (double x0 = lo[0]; x0 <= hi[0]; x0 += 1e-3) {
        for (double x1 = lo[1]; x1 <= hi[1]; x1 += 1e-3) {
          auto h = [&](const Constraint& c) {
            return c.quad(0, 0) * x0 * x0 + 2 * c.quad(0, 1) * x0 * x1 + c.quad(1, 1) * x1 * x1 +
                   2 * (c.q(0) * x0 + c.q(1) * x1) + c.c;
          };
          if (h(c0) > 0.0 || h(c1) > 0.0) continue;
          const double f = -(a(0, 0) * x0 * x0 + 2 * a(0, 1) * x0 * x1 + a(1, 1) * x1 * x1) + b(0) * x0 + b(1) * x1;
          best = std::max(best, f);
        }
      }
      CHECK(std::abs(rep.objective - best) <= 2e-3);
      CHECK(rep.objective >= best - 1e-9);
    }
  }
}
