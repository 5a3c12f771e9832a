#pragma once

#include <limits>
#include <memory>
#include <vector>

#include "ceik/core.hpp"

namespace ceik {

// Annulus r_min <= |zeta| <= r_max on which a function is declared valid.
struct Ring {
  double r_min = 0.0;
  double r_max = std::numeric_limits<double>::infinity();

  bool contains(cplx zeta) const {
    const double r = std::abs(zeta);
    return r >= r_min && r <= r_max;
  }
};

struct LaurentTerm {
  int exponent = 0;
  cplx coeff{};
};

enum class BoundaryProfile {
  hinge,  // max(|t| - tau, 0)
};

double boundary_profile_value(BoundaryProfile profile, double tau, double t);

// Analytic seed function f(zeta).
//
// laurent:     finite sum of c_k zeta^k, k in Z.
// poisson:     zeta * g(zeta) where g is the Poisson integral whose real part on
//              the unit circle is the chosen boundary profile. The profile
//              vanishes for |t| < tau, so f is analytic off the closed arc
//              gamma = { e^{it} : tau <= |t| <= pi }.
// exponential: c exp(lambda zeta), used as a biholomorphic change of variable.
//
// Values are immutable after construction; evaluation is thread-safe.
class AnalyticFunction {
 public:
  enum class Kind { laurent, poisson, exponential };

  static AnalyticFunction laurent(std::vector<LaurentTerm> terms, Ring ring = {});
  static AnalyticFunction poisson(double tau, BoundaryProfile profile = BoundaryProfile::hinge,
                                  Ring ring = {});
  static AnalyticFunction exponential(cplx coeff, cplx rate, Ring ring = {});

  // Convenience: sum_k coeffs[k] zeta^k.
  static AnalyticFunction polynomial(const std::vector<cplx>& coeffs, Ring ring = {});

  Kind kind() const { return kind_; }
  const Ring& ring() const { return ring_; }

  // Sorted by exponent, no duplicates.
  const std::vector<LaurentTerm>& terms() const { return terms_; }
  double tau() const { return tau_; }
  BoundaryProfile profile() const { return profile_; }
  cplx exp_coeff() const { return exp_coeff_; }
  cplx exp_rate() const { return exp_rate_; }
  // 0 for f itself, 1 for f' (poisson kind only carries an order).
  int derivative_order() const { return order_; }

  // Laurent coefficient of zeta^k, zero if absent.
  cplx coefficient(int k) const;

  // True when zeta lies on the excluded arc gamma (poisson kind only).
  bool on_excluded_arc(cplx zeta, double tol = 1e-12) const;

  // Throws DomainError outside the ring or on gamma, ConvergenceError if the
  // quadrature error estimate exceeds its target.
  cplx eval(cplx zeta) const;
  cplx operator()(cplx zeta) const { return eval(zeta); }

  AnalyticFunction derivative() const;

  // Coefficient-wise conjugate: returns g with g(zeta) = conj(f(conj zeta)).
  AnalyticFunction conjugate_reflection() const;

  // Quadrature target for the poisson kind.
  static constexpr double kQuadratureTol = 1e-8;

 private:
  AnalyticFunction() = default;
  cplx eval_poisson(cplx zeta) const;

  Kind kind_ = Kind::laurent;
  Ring ring_{};
  std::vector<LaurentTerm> terms_;
  double tau_ = 0.0;
  BoundaryProfile profile_ = BoundaryProfile::hinge;
  cplx exp_coeff_{};
  cplx exp_rate_{};
  int order_ = 0;
};

// Evaluator for the primitive  P(zeta) = integral f(zeta)/zeta^2 dzeta.
//
// Laurent kind: termwise c_k zeta^{k-1}/(k-1), plus c_1 log(zeta) when the
// zeta^1 coefficient is nonzero (has_log()). The logarithm uses the branch
// whose cut is the ray at `cut_angle` (default: negative real axis).
//
// Other kinds: numerical path integration from the base point 1. The path runs
// radially from 1 to |zeta| and then along the circle |w| = |zeta| to arg zeta,
// with arg measured against the same cut. For the poisson kind this path only
// meets the unit circle at 1, so it never crosses gamma.
class ZetaSquaredPrimitive {
 public:
  explicit ZetaSquaredPrimitive(AnalyticFunction f, double cut_angle = kPi);

  cplx operator()(cplx zeta) const;
  bool has_log() const { return has_log_; }
  double cut_angle() const { return cut_; }

 private:
  cplx path_integral(cplx zeta) const;

  AnalyticFunction f_;
  double cut_;
  bool has_log_ = false;
};

ZetaSquaredPrimitive antiderivative_over_zeta_squared(const AnalyticFunction& f,
                                                      double cut_angle = kPi);

// Largest |f| over `samples` equally spaced points of the unit circle, skipping
// points where f cannot be evaluated. Used to scale zero tests on the circle.
double circle_scale(const AnalyticFunction& f, int samples = 256);

// Max |d f / d zetabar| by central differences over random points of the
// annulus [r_lo, r_hi] (analyticity check).
double max_dbar_defect(const AnalyticFunction& f, double r_lo, double r_hi, int samples,
                       unsigned seed, double h = 1e-5);

}  // namespace ceik
