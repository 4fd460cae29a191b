#include "dfrc/cvxsolver.hpp"

#include <cmath>
#include <limits>

namespace dfrc {

Constraint Constraint::quadratic(std::vector<Index> support, RMatrix quad, RVector q, double c,
                                 std::string label) {
  const auto n = static_cast<Index>(support.size());
  if (quad.rows() != n || quad.cols() != n || q.size() != n) {
    throw std::invalid_argument("Constraint::quadratic: size mismatch for '" + label + "'");
  }
  return Constraint{std::move(support), std::move(quad), std::move(q), c, std::move(label)};
}

Constraint Constraint::linear(std::vector<Index> support, const RVector& a, double b, std::string label) {
  if (a.size() != static_cast<Index>(support.size())) {
    throw std::invalid_argument("Constraint::linear: size mismatch for '" + label + "'");
  }
  return Constraint{std::move(support), RMatrix(), 0.5 * a, b, std::move(label)};
}

double Constraint::eval(const RVector& x) const {
  const RVector s = x(support);
  double v = 2.0 * q.dot(s) + c;
  if (!is_linear()) v += s.dot(quad * s);
  return v;
}

double max_constraint_value(const ConvexProgram& p, const RVector& x, std::string* label) {
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& c : p.constraints) {
    const double v = c.eval(x);
    if (v > worst || std::isnan(v)) {
      worst = v;
      if (label) *label = c.label;
    }
  }
  return worst;
}

namespace {

// Newton machinery over the free (non-pinned) coordinates.
class Barrier {
 public:
  Barrier(const ConvexProgram& p, const SolverOptions& o) : p_(p), o_(o) {
    reduced_.assign(static_cast<std::size_t>(p.dimension), 0);
    std::vector<bool> pinned(static_cast<std::size_t>(p.dimension), false);
    for (const auto& pin : p.pins) pinned.at(static_cast<std::size_t>(pin.index)) = true;
    for (Index i = 0; i < p.dimension; ++i) {
      if (pinned[i]) {
        reduced_[i] = -1;
      } else {
        reduced_[i] = static_cast<Index>(free_.size());
        free_.push_back(i);
      }
    }
    local_.resize(p.constraints.size());
    for (std::size_t j = 0; j < p.constraints.size(); ++j) {
      for (Index s : p.constraints[j].support) local_[j].push_back(reduced_.at(s));
    }
  }

  Index num_free() const { return static_cast<Index>(free_.size()); }

  // F(x) = -t f(x) - Σ log(-h_i); +inf outside the domain.
  double merit(const RVector& x, double t) const {
    double acc = 0.0;
    for (const auto& c : p_.constraints) {
      const double h = c.eval(x);
      if (!(h < 0.0)) return std::numeric_limits<double>::infinity();
      acc -= std::log(-h);
    }
    const double f = p_.objective.value(x);
    if (!std::isfinite(f)) return std::numeric_limits<double>::infinity();
    return acc - t * f;
  }

  // Gradient and Hessian of F restricted to the free coordinates.
  void derivatives(const RVector& x, double t, RVector& g, RMatrix& h) const {
    const Index nf = num_free();
    const RVector fg = p_.objective.gradient(x);
    const RMatrix fh = p_.objective.hessian(x);
    g = -t * fg(free_);
    h = -t * fh(free_, free_);
    for (std::size_t j = 0; j < p_.constraints.size(); ++j) {
      const auto& c = p_.constraints[j];
      const RVector s = x(c.support);
      RVector grad = 2.0 * c.q;
      if (!c.is_linear()) grad.noalias() += 2.0 * c.quad * s;
      const double hv = c.eval(x);
      const double inv = -1.0 / hv;  // > 0
      const auto& loc = local_[j];
      const auto n = static_cast<Index>(loc.size());
      for (Index a = 0; a < n; ++a) {
        const Index ra = loc[a];
        if (ra < 0) continue;
        g(ra) += inv * grad(a);
        for (Index b = 0; b < n; ++b) {
          const Index rb = loc[b];
          if (rb < 0) continue;
          double v = inv * inv * grad(a) * grad(b);
          if (!c.is_linear()) v += 2.0 * inv * c.quad(a, b);
          h(ra, rb) += v;
        }
      }
    }
    (void)nf;
  }

  RVector newton_direction(const RVector& g, RMatrix h) const {
    Eigen::LLT<RMatrix> llt(h);
    if (llt.info() == Eigen::Success) return llt.solve(-g);
    const double scale = std::max(std::abs(h.trace()) / double(std::max<Index>(1, h.rows())), 1e-300);
    double lambda = 1e-10 * scale;
    for (int attempt = 0; attempt < 30; ++attempt) {
      RMatrix reg = h;
      reg.diagonal().array() += lambda;
      llt.compute(reg);
      if (llt.info() == Eigen::Success) return llt.solve(-g);
      lambda *= 10.0;
    }
    throw NumericalError("barrier Newton system could not be regularized");
  }

  RVector embed(const RVector& x, const RVector& step) const {
    RVector out = x;
    for (Index r = 0; r < num_free(); ++r) out(free_[r]) += step(r);
    return out;
  }

  // Damped Newton centering at barrier weight t. Returns false on stall.
  bool center(RVector& x, double t, int& newton_steps) const {
    for (int it = 0; it < o_.max_newton_per_stage; ++it) {
      RVector g;
      RMatrix h;
      derivatives(x, t, g, h);
      const RVector dx = newton_direction(g, h);
      const double slope = g.dot(dx);
      if (-slope / 2.0 <= o_.newton_tol) return true;
      const double f0 = merit(x, t);
      double step = 1.0;
      bool accepted = false;
      while (step > 1e-16) {
        const RVector trial = embed(x, step * dx);
        const double f1 = merit(trial, t);
        if (std::isfinite(f1) && f1 <= f0 + o_.armijo * step * slope) {
          x = trial;
          accepted = true;
          break;
        }
        step *= o_.shrink;
      }
      ++newton_steps;
      if (!accepted) {
        // A non-descent step at this scale means we are centered to round-off.
        return std::abs(slope) <= 1e-9 * (1.0 + std::abs(f0));
      }
      if (o_.stop_when && o_.stop_when(x)) return true;
      if (f0 - merit(x, t) <= 1e-14 * (1.0 + std::abs(f0))) return true;
    }
    return true;
  }

 private:
  const ConvexProgram& p_;
  const SolverOptions& o_;
  std::vector<Index> free_;
  std::vector<Index> reduced_;
  std::vector<std::vector<Index>> local_;
};

RVector apply_pins(const ConvexProgram& p, RVector x) {
  for (const auto& pin : p.pins) x(pin.index) = pin.value;
  return x;
}

}  // namespace

SolveReport solve(const ConvexProgram& program, const SolverOptions& options) {
  if (program.start.size() != program.dimension) throw std::invalid_argument("solve: start has wrong dimension");
  RVector x = apply_pins(program, program.start);
  std::string label;
  const double worst = max_constraint_value(program, x, &label);
  if (!program.constraints.empty() && !(worst < 0.0)) throw InfeasibleStartError(label, worst);

  Barrier barrier(program, options);
  SolveReport report;
  const auto m = static_cast<double>(program.constraints.size());
  double t = options.t0;
  for (int stage = 0; stage < options.max_stages; ++stage) {
    RVector candidate = x;
    bool ok = true;
    try {
      ok = barrier.center(candidate, t, report.newton_steps);
    } catch (const NumericalError&) {
      ok = false;
    }
    // Keep only strictly feasible, finite iterates.
    if (std::isfinite(barrier.merit(candidate, t))) x = candidate;
    ++report.outer_iterations;
    report.stage_objectives.push_back(program.objective.value(x));
    report.gap = m / t;
    if (!ok) {
      report.stalled = true;
      break;
    }
    if (options.stop_when && options.stop_when(x)) break;
    if (m == 0.0 || m / t <= options.tol) break;
    t *= options.t_growth;
  }
  report.solution = x;
  report.objective = program.objective.value(x);
  report.max_violation = program.constraints.empty() ? 0.0 : std::max(0.0, max_constraint_value(program, x));
  return report;
}

std::optional<RVector> find_strictly_feasible(const ConvexProgram& program, const SolverOptions& options) {
  RVector x0 = apply_pins(program, program.start);
  const double worst = max_constraint_value(program, x0);
  if (program.constraints.empty() || worst < 0.0) return x0;

  // minimize s subject to h_i(x) <= s and s >= -1, starting from s = max h + 1.
  const Index n = program.dimension;
  ConvexProgram phase1;
  phase1.dimension = n + 1;
  phase1.pins = program.pins;
  for (const auto& c : program.constraints) {
    Constraint e = c;
    e.support.push_back(n);
    const auto k = static_cast<Index>(e.support.size());
    RVector q(k);
    q << c.q, -0.5;
    e.q = q;
    if (!c.is_linear()) {
      RMatrix quad = RMatrix::Zero(k, k);
      quad.topLeftCorner(k - 1, k - 1) = c.quad;
      e.quad = quad;
    }
    phase1.constraints.push_back(std::move(e));
  }
  phase1.constraints.push_back(Constraint::linear({n}, RVector::Constant(1, -1.0), -1.0, "phase1-floor"));
  phase1.objective.value = [n](const RVector& z) { return -z(n); };
  phase1.objective.gradient = [n](const RVector& z) {
    RVector g = RVector::Zero(z.size());
    g(n) = -1.0;
    return g;
  };
  phase1.objective.hessian = [n](const RVector&) { return RMatrix::Zero(n + 1, n + 1); };
  phase1.start.resize(n + 1);
  phase1.start << x0, std::max(worst, -0.5) + 1.0;

  SolverOptions o = options;
  o.tol = 1e-9;
  o.stop_when = [n](const RVector& z) { return z(n) < 0.0; };
  const SolveReport r = solve(phase1, o);
  const RVector x = r.solution.head(n);
  if (max_constraint_value(program, x) < 0.0) return x;
  return std::nullopt;
}

RMatrix lift_complex(const CMatrix& a) {
  if (!is_hermitian(a, 1e-10)) throw std::invalid_argument("lift_complex: matrix is not Hermitian");
  const Index n = a.rows();
  RMatrix out(2 * n, 2 * n);
  const RMatrix re = a.real();
  const RMatrix im = a.imag();
  out.topLeftCorner(n, n) = re;
  out.topRightCorner(n, n) = -im;
  out.bottomLeftCorner(n, n) = im;
  out.bottomRightCorner(n, n) = re;
  return 0.5 * (out + out.transpose());
}

RVector lift_linear(const CVector& c) {
  RVector out(2 * c.size());
  out << c.real(), c.imag();
  return out;
}

RVector to_real(const CVector& u) {
  RVector out(2 * u.size());
  out << u.real(), u.imag();
  return out;
}

CVector to_complex(const RVector& x) {
  const Index n = x.size() / 2;
  CVector out(n);
  for (Index i = 0; i < n; ++i) out(i) = {x(i), x(n + i)};
  return out;
}

}  // namespace dfrc
