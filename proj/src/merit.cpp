#include "dfrc/merit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace dfrc {

namespace {

constexpr double kGeometricCutoff = 1e-8;

double log_sum_exp(const RVector& a) {
  const double top = a.maxCoeff();
  if (!std::isfinite(top)) return top;
  return top + std::log((a.array() - top).exp().sum());
}

void check_weights(const RVector& w) {
  if (w.size() == 0) throw std::invalid_argument("merit: at least one subcarrier weight");
  if ((w.array() <= 0.0).any()) throw std::invalid_argument("merit: weights must be positive");
  if (std::abs(w.sum() - 1.0) > 1e-12) throw std::invalid_argument("merit: weights must sum to 1");
}

void check_size(const RVector& x, Index k) {
  if (x.size() != k) throw std::invalid_argument("merit: SINR vector has wrong length");
}

// Per-term pieces of the separable variants.
double fisher_term(double x) { return x * x / (1.0 + x); }
double fisher_d1(double x) { return (2.0 * x + x * x) / ((1.0 + x) * (1.0 + x)); }
double fisher_d2(double x) { return 2.0 / std::pow(1.0 + x, 3); }

double detection_term(double x, double log_pfa) { return std::exp(log_pfa / (1.0 + x)); }
double detection_d1(double x, double log_pfa) {
  const double s = 1.0 / (1.0 + x);
  return -detection_term(x, log_pfa) * log_pfa * s * s;
}
double detection_d2(double x, double log_pfa) {
  const double s = 1.0 / (1.0 + x);
  return detection_term(x, log_pfa) * (log_pfa * log_pfa * std::pow(s, 4) + 2.0 * log_pfa * std::pow(s, 3));
}

double entropy_term(double x, double w) {
  return (1.0 - 2.0 * w) * std::log1p(x) + x * (w * x - (1.0 - 2.0 * w)) / (1.0 + x);
}
double entropy_d1(double x, double w) { return x * (1.0 + w * x) / ((1.0 + x) * (1.0 + x)); }
double entropy_d2(double x, double w) { return (1.0 - (1.0 - 2.0 * w) * x) / std::pow(1.0 + x, 3); }

// Power mean (Σ μ x^p)^{1/p} for p <= 1, evaluated in the log domain so that
// very negative p does not underflow.
struct PowerMean {
  double p;
  const RVector& mu;

  bool geometric() const { return std::abs(p) < kGeometricCutoff; }

  double log_value(const RVector& x) const {
    if (geometric()) return (mu.array() * x.array().log()).sum();
    RVector a(x.size());
    Index used = 0;
    for (Index i = 0; i < x.size(); ++i) {
      if (x(i) > 0.0) a(used++) = std::log(mu(i)) + p * std::log(x(i));
    }
    return log_sum_exp(a.head(used)) / p;
  }

  double value(const RVector& x) const {
    if (p == 1.0) return mu.dot(x);
    if ((x.array() <= 0.0).any()) {
      if (p <= 0.0 || geometric()) return 0.0;
      if ((x.array() <= 0.0).all()) return 0.0;
    }
    return std::exp(log_value(x));
  }

  void require_interior(const RVector& x) const {
    if (p != 1.0 && (x.array() <= 0.0).any()) {
      throw DomainError("power mean: derivatives need strictly positive SINRs for p < 1");
    }
  }

  // g_i = μ_i (x_i/f)^{p-1}
  RVector gradient(const RVector& x) const {
    if (p == 1.0) return mu;
    require_interior(x);
    const double lf = log_value(x);
    RVector g(x.size());
    for (Index i = 0; i < x.size(); ++i) g(i) = mu(i) * std::exp((p - 1.0) * (std::log(x(i)) - lf));
    return g;
  }

  // (1-p)/f [g g^T - diag(μ_i (x_i/f)^{p-2})]
  RMatrix hessian(const RVector& x) const {
    const Index k = x.size();
    if (p == 1.0) return RMatrix::Zero(k, k);
    require_interior(x);
    const double lf = log_value(x);
    const double f = std::exp(lf);
    RVector g(k);
    RVector d(k);
    for (Index i = 0; i < k; ++i) {
      const double lr = std::log(x(i)) - lf;
      g(i) = mu(i) * std::exp((p - 1.0) * lr);
      d(i) = mu(i) * std::exp((p - 2.0) * lr);
    }
    RMatrix h = g * g.transpose();
    h.diagonal() -= d;
    return ((1.0 - p) / f) * h;
  }
};

}  // namespace

Generator Generator::exponential(double a) {
  if (!(a > 0.0) || a == 1.0) throw std::invalid_argument("exponential mean: a must be positive and != 1");
  const double l = std::log(a);
  Generator g;
  g.kind = Kind::Exponential;
  g.param = a;
  g.name = "exp-mean";
  g.gamma = [l](double x) { return std::exp(l * x); };
  g.d1 = [l](double x) { return l * std::exp(l * x); };
  g.d2 = [l](double x) { return l * l * std::exp(l * x); };
  g.inverse = [l](double y) { return std::log(y) / l; };
  g.ratio = [l](double) { return 1.0 / l; };
  return g;
}

Generator Generator::radical(double a) {
  if (!(a > 0.0) || a == 1.0) throw std::invalid_argument("radical mean: a must be positive and != 1");
  const double l = std::log(a);
  Generator g;
  g.kind = Kind::Radical;
  g.param = a;
  g.name = "radical-mean";
  g.gamma = [l](double x) { return std::exp(l / x); };
  g.d1 = [l](double x) { return -l / (x * x) * std::exp(l / x); };
  g.d2 = [l](double x) { return std::exp(l / x) * l * (l + 2.0 * x) / std::pow(x, 4); };
  g.inverse = [l](double y) { return l / std::log(y); };
  g.ratio = [l](double x) { return -x * x / (l + 2.0 * x); };
  return g;
}

Generator Generator::log() {
  Generator g;
  g.kind = Kind::Log;
  g.name = "log";
  g.gamma = [](double x) { return std::log(x); };
  g.d1 = [](double x) { return 1.0 / x; };
  g.d2 = [](double x) { return -1.0 / (x * x); };
  g.inverse = [](double y) { return std::exp(y); };
  g.ratio = [](double x) { return -x; };
  return g;
}

Generator Generator::power(double p) {
  if (p == 0.0) return log();
  Generator g;
  g.kind = Kind::Power;
  g.param = p;
  g.name = "power";
  g.gamma = [p](double x) { return std::pow(x, p); };
  g.d1 = [p](double x) { return p * std::pow(x, p - 1.0); };
  g.d2 = [p](double x) { return p * (p - 1.0) * std::pow(x, p - 2.0); };
  g.inverse = [p](double y) { return std::pow(y, 1.0 / p); };
  g.ratio = [p](double x) { return x / (p - 1.0); };
  return g;
}

std::vector<double> default_concavity_grid() {
  std::vector<double> grid;
  constexpr int n = 50;
  for (int i = 0; i < n; ++i) grid.push_back(std::pow(10.0, -1.0 + 3.0 * i / (n - 1)));
  return grid;
}

ConcavityVerdict prop1_concavity_test(const Generator& gen, std::span<const double> grid_in,
                                      double tol) {
  std::vector<double> grid(grid_in.begin(), grid_in.end());
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  if (grid.size() < 3) return {Concavity::Inconclusive, "grid needs at least three distinct points"};

  int sign = 0;
  std::vector<double> r(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = grid[i];
    const double a = gen.d1(x);
    const double b = gen.d2(x);
    int s = 0;
    if (a > 0.0 && b < 0.0) s = 1;
    if (a < 0.0 && b > 0.0) s = -1;
    if (s == 0 || !std::isfinite(a) || !std::isfinite(b) || (sign != 0 && s != sign)) {
      std::ostringstream os;
      os << "sign pattern violated at x=" << x << " (gamma'=" << a << ", gamma''=" << b << ")";
      return {Concavity::Inconclusive, os.str()};
    }
    sign = s;
    r[i] = gen.ratio(x);
  }

  double scale = 1.0;
  for (double v : r) scale = std::max(scale, std::abs(v));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (std::size_t j = i + 1; j < grid.size(); ++j) {
      for (std::size_t k = j + 1; k < grid.size(); ++k) {
        const double lam = (grid[k] - grid[j]) / (grid[k] - grid[i]);
        const double chord = lam * r[i] + (1.0 - lam) * r[k];
        if (r[j] > chord + tol * scale) {
          std::ostringstream os;
          os << "gamma'/gamma'' not convex: value " << r[j] << " at x=" << grid[j]
             << " exceeds chord " << chord << " between x=" << grid[i] << " and x=" << grid[k];
          return {Concavity::NotConcave, os.str()};
        }
      }
    }
  }
  return {Concavity::Concave, "gamma'/gamma'' convex on grid"};
}

std::string to_string(MeritKind kind) {
  switch (kind) {
    case MeritKind::PowerMean: return "power-mean";
    case MeritKind::QuasiArithmetic: return "quasi-arithmetic";
    case MeritKind::MutualInformation: return "mutual-info";
    case MeritKind::FisherInformation: return "fisher-info";
    case MeritKind::DetectionProbability: return "detection-prob";
    case MeritKind::RelativeEntropy: return "relative-entropy";
  }
  return "unknown";
}

MeritFunction::MeritFunction(MeritKind kind, RVector weights)
    : kind_(kind), weights_(std::move(weights)) {
  check_weights(weights_);
  curvature_ = RVector::Zero(weights_.size());
}

RVector MeritFunction::uniform_weights(Index k) { return RVector::Constant(k, 1.0 / double(k)); }

MeritFunction MeritFunction::power_mean(double p, RVector weights) {
  if (!(p <= 1.0)) throw std::invalid_argument("power mean: p must be <= 1 for concavity");
  MeritFunction f(MeritKind::PowerMean, std::move(weights));
  f.p_ = p;
  return f;
}

MeritFunction MeritFunction::quasi_arithmetic(Generator gen, RVector weights) {
  MeritFunction f(MeritKind::QuasiArithmetic, std::move(weights));
  switch (gen.kind) {
    case Generator::Kind::Log:
      f.p_ = 0.0;
      f.verdict_ = {Concavity::Concave, "geometric mean"};
      break;
    case Generator::Kind::Power:
      f.p_ = gen.param;
      f.verdict_ = gen.param <= 1.0 ? ConcavityVerdict{Concavity::Concave, "power mean with p <= 1"}
                                    : ConcavityVerdict{Concavity::NotConcave, "power mean with p > 1"};
      break;
    default: {
      const auto grid = default_concavity_grid();
      f.verdict_ = prop1_concavity_test(gen, grid);
      break;
    }
  }
  f.concave_ = f.verdict_.verdict == Concavity::Concave;
  f.gen_ = std::move(gen);
  return f;
}

MeritFunction MeritFunction::mutual_information(RVector weights) {
  return MeritFunction(MeritKind::MutualInformation, std::move(weights));
}

MeritFunction MeritFunction::fisher_information(RVector weights) {
  MeritFunction f(MeritKind::FisherInformation, std::move(weights));
  f.concave_ = false;
  return f;
}

MeritFunction MeritFunction::detection_probability(RVector weights, RVector pfa) {
  MeritFunction f(MeritKind::DetectionProbability, std::move(weights));
  if (pfa.size() != f.size()) throw std::invalid_argument("detection probability: one P_fa per subcarrier");
  if ((pfa.array() <= 0.0).any() || (pfa.array() >= 1.0).any()) {
    throw std::invalid_argument("detection probability: P_fa must lie in (0, 1)");
  }
  f.pfa_ = std::move(pfa);
  f.concave_ = false;
  const double r3 = std::sqrt(3.0);
  const double num = std::pow(r3 - 3.0, 4) * std::exp(r3 - 3.0);
  for (Index k = 0; k < f.size(); ++k) {
    const double l = std::log(f.pfa_(k));
    f.curvature_(k) = num / (2.0 * r3 * l * l);
  }
  return f;
}

MeritFunction MeritFunction::relative_entropy(RVector weights, RVector omega) {
  MeritFunction f(MeritKind::RelativeEntropy, std::move(weights));
  if (omega.size() != f.size()) throw std::invalid_argument("relative entropy: one omega per subcarrier");
  if ((omega.array() < 0.0).any() || (omega.array() > 1.0).any()) {
    throw std::invalid_argument("relative entropy: omega must lie in [0, 1]");
  }
  f.omega_ = std::move(omega);
  f.concave_ = false;
  for (Index k = 0; k < f.size(); ++k) {
    const double w = f.omega_(k);
    f.curvature_(k) = w < 0.5 ? std::pow(1.0 - 2.0 * w, 3) / (54.0 * (1.0 - w) * (1.0 - w)) : 0.0;
  }
  return f;
}

double MeritFunction::quasi_value(const RVector& x) const {
  const Generator& g = *gen_;
  if (g.kind == Generator::Kind::Log || g.kind == Generator::Kind::Power) {
    return PowerMean{p_, weights_}.value(x);
  }
  if (g.kind == Generator::Kind::Exponential) {
    const double l = std::log(g.param);
    const RVector a = weights_.array().log() + l * x.array();
    return log_sum_exp(a) / l;
  }
  double y = 0.0;
  for (Index i = 0; i < x.size(); ++i) y += weights_(i) * g.gamma(x(i));
  return g.inverse(y);
}

RVector MeritFunction::quasi_gradient(const RVector& x) const {
  const Generator& g = *gen_;
  if (g.kind == Generator::Kind::Log || g.kind == Generator::Kind::Power) {
    return PowerMean{p_, weights_}.gradient(x);
  }
  const double f = quasi_value(x);
  if (g.kind == Generator::Kind::Exponential) {
    const double l = std::log(g.param);
    return (weights_.array().log() + l * (x.array() - f)).exp();
  }
  RVector out(x.size());
  const double df = g.d1(f);
  for (Index i = 0; i < x.size(); ++i) out(i) = weights_(i) * g.d1(x(i)) / df;
  return out;
}

RMatrix MeritFunction::quasi_hessian(const RVector& x) const {
  const Generator& g = *gen_;
  if (g.kind == Generator::Kind::Log || g.kind == Generator::Kind::Power) {
    return PowerMean{p_, weights_}.hessian(x);
  }
  if (g.kind == Generator::Kind::Exponential) {
    const double l = std::log(g.param);
    const RVector grad = quasi_gradient(x);
    RMatrix h = -grad * grad.transpose();
    h.diagonal() += grad;
    return l * h;
  }
  const double f = quasi_value(x);
  const double d1f = g.d1(f);
  const double d2f = g.d2(f);
  RVector v(x.size());
  RVector diag(x.size());
  for (Index i = 0; i < x.size(); ++i) {
    v(i) = weights_(i) * g.d1(x(i));
    diag(i) = weights_(i) * g.d2(x(i)) / d1f;
  }
  RMatrix h = -(d2f / (d1f * d1f * d1f)) * v * v.transpose();
  h.diagonal() += diag;
  return h;
}

double MeritFunction::value(const RVector& x) const {
  check_size(x, size());
  const RVector& mu = weights_;
  double acc = 0.0;
  switch (kind_) {
    case MeritKind::PowerMean: return PowerMean{p_, mu}.value(x);
    case MeritKind::QuasiArithmetic: return quasi_value(x);
    case MeritKind::MutualInformation:
      for (Index i = 0; i < x.size(); ++i) acc += mu(i) * std::log1p(x(i));
      return acc;
    case MeritKind::FisherInformation:
      for (Index i = 0; i < x.size(); ++i) acc += mu(i) * fisher_term(x(i));
      return acc;
    case MeritKind::DetectionProbability:
      for (Index i = 0; i < x.size(); ++i) acc += mu(i) * detection_term(x(i), std::log(pfa_(i)));
      return acc;
    case MeritKind::RelativeEntropy:
      for (Index i = 0; i < x.size(); ++i) acc += mu(i) * entropy_term(x(i), omega_(i));
      return acc;
  }
  return acc;
}

RVector MeritFunction::gradient(const RVector& x) const {
  check_size(x, size());
  const RVector& mu = weights_;
  RVector g(x.size());
  switch (kind_) {
    case MeritKind::PowerMean: return PowerMean{p_, mu}.gradient(x);
    case MeritKind::QuasiArithmetic: return quasi_gradient(x);
    case MeritKind::MutualInformation:
      for (Index i = 0; i < x.size(); ++i) g(i) = mu(i) / (1.0 + x(i));
      break;
    case MeritKind::FisherInformation:
      for (Index i = 0; i < x.size(); ++i) g(i) = mu(i) * fisher_d1(x(i));
      break;
    case MeritKind::DetectionProbability:
      for (Index i = 0; i < x.size(); ++i) g(i) = mu(i) * detection_d1(x(i), std::log(pfa_(i)));
      break;
    case MeritKind::RelativeEntropy:
      for (Index i = 0; i < x.size(); ++i) g(i) = mu(i) * entropy_d1(x(i), omega_(i));
      break;
  }
  return g;
}

RMatrix MeritFunction::hessian(const RVector& x) const {
  check_size(x, size());
  const RVector& mu = weights_;
  RVector d(x.size());
  switch (kind_) {
    case MeritKind::PowerMean: return PowerMean{p_, mu}.hessian(x);
    case MeritKind::QuasiArithmetic: return quasi_hessian(x);
    case MeritKind::MutualInformation:
      for (Index i = 0; i < x.size(); ++i) d(i) = -mu(i) / ((1.0 + x(i)) * (1.0 + x(i)));
      break;
    case MeritKind::FisherInformation:
      for (Index i = 0; i < x.size(); ++i) d(i) = mu(i) * fisher_d2(x(i));
      break;
    case MeritKind::DetectionProbability:
      for (Index i = 0; i < x.size(); ++i) d(i) = mu(i) * detection_d2(x(i), std::log(pfa_(i)));
      break;
    case MeritKind::RelativeEntropy:
      for (Index i = 0; i < x.size(); ++i) d(i) = mu(i) * entropy_d2(x(i), omega_(i));
      break;
  }
  return d.asDiagonal();
}

bool MeritFunction::at_domain_boundary(const RVector& x) const {
  const bool pm = kind_ == MeritKind::PowerMean ||
                  (kind_ == MeritKind::QuasiArithmetic &&
                   (gen_->kind == Generator::Kind::Log || gen_->kind == Generator::Kind::Power));
  return pm && p_ <= 0.0 && (x.array() <= 0.0).any();
}

SmoothOracle MeritFunction::oracle() const {
  MeritFunction self = *this;
  return {[self](const RVector& x) { return self.value(x); },
          [self](const RVector& x) { return self.gradient(x); },
          [self](const RVector& x) { return self.hessian(x); }};
}

SmoothOracle MeritFunction::minorizer_at(const RVector& x0) const {
  check_size(x0, size());
  if (concave_) return oracle();
  if (kind_ == MeritKind::QuasiArithmetic) {
    throw DomainError("quasi-arithmetic mean with generator '" + gen_->name +
                      "' is not concave and has no concave minorizer: " + verdict_.diagnostic);
  }

  // ζ(x) = Σ μ_k [h_k(x0) + h_k'(x0)(x - x0) - c_k (x - x0)²]
  const Index k = size();
  RVector base(k);
  RVector slope(k);
  for (Index i = 0; i < k; ++i) {
    const double x = x0(i);
    switch (kind_) {
      case MeritKind::FisherInformation:
        base(i) = fisher_term(x);
        slope(i) = fisher_d1(x);
        break;
      case MeritKind::DetectionProbability:
        base(i) = detection_term(x, std::log(pfa_(i)));
        slope(i) = detection_d1(x, std::log(pfa_(i)));
        break;
      case MeritKind::RelativeEntropy:
        base(i) = entropy_term(x, omega_(i));
        slope(i) = entropy_d1(x, omega_(i));
        break;
      default: break;
    }
  }
  const RVector mu = weights_;
  const RVector c = curvature_;
  const RVector anchor = x0;
  auto value = [=](const RVector& x) {
    double acc = 0.0;
    for (Index i = 0; i < k; ++i) {
      const double d = x(i) - anchor(i);
      acc += mu(i) * (base(i) + slope(i) * d - c(i) * d * d);
    }
    return acc;
  };
  auto gradient = [=](const RVector& x) -> RVector {
    return mu.array() * (slope.array() - 2.0 * c.array() * (x - anchor).array());
  };
  auto hessian = [=](const RVector&) -> RMatrix { return RVector(-2.0 * mu.array() * c.array()).asDiagonal(); };
  return {value, gradient, hessian};
}

}  // namespace dfrc
