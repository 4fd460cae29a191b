// Radar merit functions f(SINR_1, ..., SINR_K) and their concave minorizers.
//
// Every variant is increasing on the non-negative orthant. Concave variants
// minorize themselves; the Fisher-information, detection-probability and
// relative-entropy variants carry tangent/quadratic surrogates whose
// curvature is fixed at construction.

#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dfrc/linalg.hpp"

namespace dfrc {

/// value / gradient / Hessian callbacks over a real vector.
struct SmoothOracle {
  std::function<double(const RVector&)> value;
  std::function<RVector(const RVector&)> gradient;
  std::function<RMatrix(const RVector&)> hessian;
};

/// Generator γ of a quasi-arithmetic mean γ⁻¹(Σ μ_k γ(x_k)).
struct Generator {
  enum class Kind { Exponential, Radical, Log, Power, Custom };

  Kind kind = Kind::Custom;
  double param = 0.0;  // a for the exponential/radical means, p for Power
  std::string name;
  std::function<double(double)> gamma;
  std::function<double(double)> d1;
  std::function<double(double)> d2;
  std::function<double(double)> inverse;
  std::function<double(double)> ratio;  // γ'/γ''

  static Generator exponential(double a);  // a^x, concave mean for a in (0, 1)
  static Generator radical(double a);      // a^{1/x}
  static Generator log();                  // ln x (geometric mean)
  static Generator power(double p);        // x^p
};

enum class Concavity { Concave, NotConcave, Inconclusive };

struct ConcavityVerdict {
  Concavity verdict;
  std::string diagnostic;
};

/// Numerical concavity certificate for a quasi-arithmetic mean: requires γ
/// strictly monotone with γ'γ'' < 0 on the grid, then checks that γ'/γ'' is
/// convex over every ordered triple of grid points.
ConcavityVerdict prop1_concavity_test(const Generator& gen, std::span<const double> grid,
                                      double tol = 1e-9);

/// Log-spaced grid used when a quasi-arithmetic mean is constructed.
std::vector<double> default_concavity_grid();

enum class MeritKind {
  PowerMean,
  QuasiArithmetic,
  MutualInformation,
  FisherInformation,
  DetectionProbability,
  RelativeEntropy,
};

std::string to_string(MeritKind kind);

class MeritFunction {
 public:
  static MeritFunction power_mean(double p, RVector weights);
  static MeritFunction quasi_arithmetic(Generator gen, RVector weights);
  static MeritFunction mutual_information(RVector weights);
  static MeritFunction fisher_information(RVector weights);
  static MeritFunction detection_probability(RVector weights, RVector pfa);
  static MeritFunction relative_entropy(RVector weights, RVector omega);

  /// Uniform weights 1/K.
  static RVector uniform_weights(Index k);

  MeritKind kind() const { return kind_; }
  Index size() const { return weights_.size(); }
  const RVector& weights() const { return weights_; }
  bool is_concave() const { return concave_; }
  double power() const { return p_; }
  const Generator* generator() const { return gen_ ? &*gen_ : nullptr; }
  const ConcavityVerdict& concavity() const { return verdict_; }

  double value(const RVector& x) const;
  RVector gradient(const RVector& x) const;
  RMatrix hessian(const RVector& x) const;

  /// True when x sits where the value is fixed by convention (a zero entry
  /// for a power mean with p <= 0).
  bool at_domain_boundary(const RVector& x) const;

  /// Concave ζ(·|x0) with ζ(x0|x0) = f(x0) and ζ ≤ f on the non-negative orthant.
  SmoothOracle minorizer_at(const RVector& x0) const;

  /// f itself as an oracle.
  SmoothOracle oracle() const;

  /// Per-k quadratic coefficient c_k of the surrogate (ζ contains −c_k (x_k − x0_k)²).
  const RVector& surrogate_curvature() const { return curvature_; }

 private:
  MeritFunction(MeritKind kind, RVector weights);

  double quasi_value(const RVector& x) const;
  RVector quasi_gradient(const RVector& x) const;
  RMatrix quasi_hessian(const RVector& x) const;

  MeritKind kind_;
  RVector weights_;
  double p_ = 1.0;
  std::optional<Generator> gen_;
  RVector pfa_;
  RVector omega_;
  RVector curvature_;
  bool concave_ = true;
  ConcavityVerdict verdict_{Concavity::Concave, ""};
};

}  // namespace dfrc
