// Feasible-start log-barrier Newton method for smooth concave maximization
// over convex quadratic and linear inequality constraints, plus the real
// embedding used to pose complex quadratic forms to it.

#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dfrc/linalg.hpp"
#include "dfrc/merit.hpp"

namespace dfrc {

/// h(x) = sᵀ Q s + 2 qᵀ s + c ≤ 0 with s = x restricted to `support`.
struct Constraint {
  std::vector<Index> support;
  RMatrix quad;  // |support| × |support| PSD, or empty for a linear constraint
  RVector q;
  double c = 0.0;
  std::string label;

  static Constraint quadratic(std::vector<Index> support, RMatrix quad, RVector q, double c,
                              std::string label);
  /// aᵀ s + b ≤ 0.
  static Constraint linear(std::vector<Index> support, const RVector& a, double b, std::string label);

  bool is_linear() const { return quad.size() == 0; }
  double eval(const RVector& x) const;
};

/// Equality x_index = value, removed from the search space before solving.
struct Pin {
  Index index;
  double value;
};

struct ConvexProgram {
  Index dimension = 0;
  SmoothOracle objective;  // concave, maximized
  std::vector<Constraint> constraints;
  std::vector<Pin> pins;
  RVector start;  // must satisfy every inequality strictly
};

struct SolverOptions {
  double tol = 1e-7;          // stop once (#inequalities)/t <= tol
  double t0 = 1.0;
  double t_growth = 10.0;
  double armijo = 0.01;
  double shrink = 0.5;
  double newton_tol = 1e-8;   // half squared Newton decrement
  int max_newton_per_stage = 100;
  int max_stages = 60;
  /// Optional early exit checked after every centering step.
  std::function<bool(const RVector&)> stop_when;
};

struct SolveReport {
  RVector solution;
  double objective = 0.0;
  int outer_iterations = 0;
  int newton_steps = 0;
  double max_violation = 0.0;
  double gap = 0.0;  // m / t at exit
  bool stalled = false;
  std::vector<double> stage_objectives;
};

class InfeasibleStartError : public std::runtime_error {
 public:
  InfeasibleStartError(std::string label, double value)
      : std::runtime_error("start violates constraint '" + label + "' (h = " + std::to_string(value) + ")"),
        label_(std::move(label)) {}
  const std::string& label() const { return label_; }

 private:
  std::string label_;
};

SolveReport solve(const ConvexProgram& program, const SolverOptions& options = {});

/// Phase I: a point strictly inside every inequality (pins respected),
/// searched from `program.start`. Returns nullopt when the inequalities have
/// no common interior point.
std::optional<RVector> find_strictly_feasible(const ConvexProgram& program,
                                              const SolverOptions& options = {});

/// Largest constraint value at x (negative means strictly feasible).
double max_constraint_value(const ConvexProgram& program, const RVector& x, std::string* label = nullptr);

/// Real symmetric Ã with uᴴ A u = x̃ᵀ Ã x̃ for x̃ = (Re u; Im u).
RMatrix lift_complex(const CMatrix& a);

/// Real vector r with Re{cᴴ u} = rᵀ x̃.
RVector lift_linear(const CVector& c);

RVector to_real(const CVector& u);
CVector to_complex(const RVector& x);

}  // namespace dfrc
