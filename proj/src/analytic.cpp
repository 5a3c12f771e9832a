#include "ceik/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <fmt/format.h>

#include "ceik/wirtinger.hpp"

namespace ceik {

namespace {

using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
constexpr unsigned kMaxDepth = 20;

// One Gauss-Kronrod pass per piece with bisection until the local error
// meets its share of the target. Boost's own adaptive driver reports the
// error estimate in reference-interval units, so the scaling is done here.
template <class F>
cplx gk_bisect(F& fn, double a, double b, double tol, unsigned depth, double& err) {
  double e = 0.0;
  const cplx v = GK::integrate(fn, a, b, 0, 0.0, &e);
  e *= 0.5 * (b - a);
  if (e <= tol || depth == 0) {
    err += e;
    return v;
  }
  const double m = 0.5 * (a + b);
  return gk_bisect(fn, a, m, 0.5 * tol, depth - 1, err) +
         gk_bisect(fn, m, b, 0.5 * tol, depth - 1, err);
}

// Adaptive quadrature with an absolute error check.
template <class F>
cplx integrate_checked(F&& fn, double a, double b, double abs_tol, const char* what) {
  if (b <= a) return {};
  double err = 0.0;
  const cplx value = gk_bisect(fn, a, b, 0.01 * abs_tol, kMaxDepth, err);
  if (!(err <= abs_tol) || !std::isfinite(std::abs(value))) {
    throw ConvergenceError(fmt::format("{}: quadrature error estimate {:.3e} above target {:.1e}",
                                       what, err, abs_tol));
  }
  return value;
}

// Change of log(e^{is} - zeta) as s runs from a to b (a <= b) on the unit
// circle, zeta off that arc. The real part of the Schwarz kernel has a fixed
// sign inside and outside the disk, which pins the argument change to a
// window of width pi around (b - a)/2 +- pi/2.
cplx arc_log_change(cplx zeta, double a, double b) {
  if (b <= a) return {};
  const cplx ratio = (std::polar(1.0, b) - zeta) / (std::polar(1.0, a) - zeta);
  const double r = std::abs(zeta);
  const double mid = 0.5 * (b - a) + (r < 1.0 ? 0.5 * kPi : (r > 1.0 ? -0.5 * kPi : 0.0));
  double darg = std::arg(ratio);
  darg += 2.0 * kPi * std::round((mid - darg) / (2.0 * kPi));
  return {std::log(std::abs(ratio)), darg};
}

// Cut points on [a, b] graded geometrically towards `peak` from `width`.
std::vector<double> graded_cuts(double a, double b, double peak, double width) {
  std::vector<double> cuts{a, b, peak};
  for (double d = std::max(width, 1e-15); d < b - a; d *= 4.0) {
    if (peak - d > a) cuts.push_back(peak - d);
    if (peak + d < b) cuts.push_back(peak + d);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  return cuts;
}

template <class F>
cplx integrate_graded(F&& fn, double a, double b, double peak, double width) {
  const auto cuts = graded_cuts(a, b, peak, width);
  cplx sum{};
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    sum += integrate_checked(fn, cuts[i], cuts[i + 1], AnalyticFunction::kQuadratureTol, "poisson");
  }
  return sum;
}

// g = (1/2pi) [ (pi - tau) Phi+(pi) - int_tau^pi Phi+ + int_{-pi}^{-tau} Phi- ]
// for the hinge profile, with Phi+- the primitives of S started at tau, -pi.
template <class P, class M>
cplx poisson_schwarz(cplx zeta, double tau, P&& phi_plus, M&& phi_minus) {
  const double folded = std::abs(std::arg(zeta));
  const double near = std::clamp(folded, tau, kPi);
  const double width = std::abs(std::polar(std::abs(zeta), folded) - std::polar(1.0, near));
  const cplx ip = integrate_graded(phi_plus, tau, kPi, near, width);
  const cplx im = integrate_graded(phi_minus, -kPi, -tau, -near, width);
  return ((kPi - tau) * phi_plus(kPi) - ip + im) / (2.0 * kPi);
}

// Laurent sum, Horner in zeta for k >= 0 and in 1/zeta for k < 0.
cplx laurent_sum(const std::vector<LaurentTerm>& terms, cplx zeta) {
  if (terms.empty()) return {};
  const int kmin = terms.front().exponent;
  const int kmax = terms.back().exponent;
  cplx pos{}, neg{};
  if (kmax >= 0) {
    auto it = terms.rbegin();
    for (int k = kmax; k >= 0; --k) {
      pos *= zeta;
      if (it != terms.rend() && it->exponent == k) {
        pos += it->coeff;
        ++it;
      }
    }
  }
  if (kmin < 0) {
    const cplx inv = 1.0 / zeta;
    auto it = terms.begin();
    for (int k = kmin; k < 0; ++k) {
      if (it != terms.end() && it->exponent == k) {
        neg += it->coeff;
        ++it;
      }
      neg *= inv;
    }
  }
  return pos + neg;
}

}  // namespace

double boundary_profile_value(BoundaryProfile profile, double tau, double t) {
  switch (profile) {
    case BoundaryProfile::hinge:
      return std::max(std::abs(t) - tau, 0.0);
  }
  return 0.0;
}

AnalyticFunction AnalyticFunction::laurent(std::vector<LaurentTerm> terms, Ring ring) {
  if (!(ring.r_min < ring.r_max) || ring.r_min < 0.0) {
    throw DomainError("laurent: ring must satisfy 0 <= r_min < r_max");
  }
  std::sort(terms.begin(), terms.end(),
            [](const LaurentTerm& a, const LaurentTerm& b) { return a.exponent < b.exponent; });
  for (std::size_t i = 1; i < terms.size(); ++i) {
    if (terms[i].exponent == terms[i - 1].exponent) {
      throw DomainError(fmt::format("laurent: duplicate exponent {}", terms[i].exponent));
    }
  }
  AnalyticFunction f;
  f.kind_ = Kind::laurent;
  f.ring_ = ring;
  f.terms_ = std::move(terms);
  return f;
}

AnalyticFunction AnalyticFunction::polynomial(const std::vector<cplx>& coeffs, Ring ring) {
  std::vector<LaurentTerm> terms;
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    if (coeffs[k] != cplx{}) terms.push_back({static_cast<int>(k), coeffs[k]});
  }
  return laurent(std::move(terms), ring);
}

AnalyticFunction AnalyticFunction::poisson(double tau, BoundaryProfile profile, Ring ring) {
  if (!(tau > 0.0 && tau < kPi)) throw DomainError("poisson: tau must lie in (0, pi)");
  if (!(ring.r_min < ring.r_max) || ring.r_min < 0.0) {
    throw DomainError("poisson: ring must satisfy 0 <= r_min < r_max");
  }
  AnalyticFunction f;
  f.kind_ = Kind::poisson;
  f.ring_ = ring;
  f.tau_ = tau;
  f.profile_ = profile;
  return f;
}

AnalyticFunction AnalyticFunction::exponential(cplx coeff, cplx rate, Ring ring) {
  if (!(ring.r_min < ring.r_max) || ring.r_min < 0.0) {
    throw DomainError("exponential: ring must satisfy 0 <= r_min < r_max");
  }
  AnalyticFunction f;
  f.kind_ = Kind::exponential;
  f.ring_ = ring;
  f.exp_coeff_ = coeff;
  f.exp_rate_ = rate;
  return f;
}

cplx AnalyticFunction::coefficient(int k) const {
  for (const auto& t : terms_) {
    if (t.exponent == k) return t.coeff;
  }
  return {};
}

bool AnalyticFunction::on_excluded_arc(cplx zeta, double tol) const {
  if (kind_ != Kind::poisson) return false;
  if (std::abs(std::abs(zeta) - 1.0) > tol) return false;
  return std::abs(std::arg(zeta)) >= tau_ - tol;
}

cplx AnalyticFunction::eval(cplx zeta) const {
  if (!ring_.contains(zeta)) {
    throw DomainError(fmt::format("evaluation at |zeta| = {:.6g} outside ring [{:.6g}, {:.6g}]",
                                  std::abs(zeta), ring_.r_min, ring_.r_max));
  }
  switch (kind_) {
    case Kind::laurent:
      if (zeta == cplx{} && !terms_.empty() && terms_.front().exponent < 0) {
        throw DomainError("laurent: negative powers at zeta = 0");
      }
      return laurent_sum(terms_, zeta);
    case Kind::exponential:
      return exp_coeff_ * std::exp(exp_rate_ * zeta);
    case Kind::poisson:
      return eval_poisson(zeta);
  }
  return {};
}

cplx AnalyticFunction::eval_poisson(cplx zeta) const {
  if (on_excluded_arc(zeta)) {
    throw DomainError(fmt::format("poisson: zeta = ({:.6g}, {:.6g}) lies on the arc gamma",
                                  zeta.real(), zeta.imag()));
  }
  // f = zeta g with g the Schwarz integral (1/2pi) int h(s) S(zeta, s) ds,
  // S = (e^{is} + zeta)/(e^{is} - zeta). S has the primitive
  // -s - 2i log(e^{is} - zeta), so one integration by parts against the
  // piecewise linear profile leaves a log-singular integrand. The derivative
  // kernel integrates by parts against h' and adds only logarithms.
  const double tau = tau_;
  auto phi_plus = [&](double s) { return -(s - tau) - 2.0 * kI * arc_log_change(zeta, tau, s); };
  auto phi_minus = [&](double s) {
    return -(s + kPi) - 2.0 * kI * arc_log_change(zeta, -kPi, s);
  };
  if (order_ == 1) {
    const cplx g = poisson_schwarz(zeta, tau, phi_plus, phi_minus);
    return g - kI / (2.0 * kPi) * (phi_plus(kPi) - phi_minus(-tau));
  }
  return zeta * poisson_schwarz(zeta, tau, phi_plus, phi_minus);
}

AnalyticFunction AnalyticFunction::derivative() const {
  switch (kind_) {
    case Kind::laurent: {
      std::vector<LaurentTerm> d;
      for (const auto& t : terms_) {
        if (t.exponent != 0) d.push_back({t.exponent - 1, t.coeff * static_cast<double>(t.exponent)});
      }
      return laurent(std::move(d), ring_);
    }
    case Kind::exponential:
      return exponential(exp_coeff_ * exp_rate_, exp_rate_, ring_);
    case Kind::poisson: {
      if (order_ >= 1) {
        throw DomainError("poisson: only the first derivative kernel is available");
      }
      AnalyticFunction d = *this;
      d.order_ = order_ + 1;
      return d;
    }
  }
  return *this;
}

AnalyticFunction AnalyticFunction::conjugate_reflection() const {
  AnalyticFunction g = *this;
  for (auto& t : g.terms_) t.coeff = std::conj(t.coeff);
  g.exp_coeff_ = std::conj(exp_coeff_);
  g.exp_rate_ = std::conj(exp_rate_);
  // The poisson kernel has real coefficients and is already self-reflective.
  return g;
}

ZetaSquaredPrimitive::ZetaSquaredPrimitive(AnalyticFunction f, double cut_angle)
    : f_(std::move(f)), cut_(cut_angle) {
  if (f_.kind() == AnalyticFunction::Kind::laurent) {
    has_log_ = f_.coefficient(1) != cplx{};
  } else if (f_.kind() == AnalyticFunction::Kind::poisson) {
    // g = f/zeta has g(0) = (pi - tau)^2 / (2 pi) != 0, so f/zeta^2 has a simple pole.
    has_log_ = true;
  } else {
    has_log_ = f_.exp_coeff() != cplx{};
  }
}

cplx ZetaSquaredPrimitive::operator()(cplx zeta) const {
  if (zeta == cplx{}) throw DomainError("primitive of f/zeta^2 is singular at zeta = 0");
  if (f_.kind() != AnalyticFunction::Kind::laurent) return path_integral(zeta);
  if (!f_.ring().contains(zeta)) throw DomainError("primitive evaluated outside ring");
  cplx sum{};
  for (const auto& t : f_.terms()) {
    if (t.exponent == 1) {
      sum += t.coeff * log_with_cut(zeta, cut_);
    } else {
      const int p = t.exponent - 1;
      sum += t.coeff * std::pow(zeta, p) / static_cast<double>(p);
    }
  }
  return sum;
}

cplx ZetaSquaredPrimitive::path_integral(cplx zeta) const {
  const double r = std::abs(zeta);
  const double theta = arg_with_cut(zeta, cut_);
  if (f_.kind() == AnalyticFunction::Kind::poisson && std::abs(r - 1.0) <= 1e-12 &&
      std::abs(theta) >= f_.tau()) {
    throw DomainError("primitive: integration path along the unit circle crosses gamma");
  }
  constexpr double tol = 1e-10;
  // radial leg 1 -> r
  auto radial = [&](double rho) -> cplx { return f_.eval(cplx{rho, 0.0}) / (rho * rho); };
  cplx value{};
  if (r > 1.0) {
    value += integrate_checked(radial, 1.0, r, tol, "primitive (radial)");
  } else if (r < 1.0) {
    value -= integrate_checked(radial, r, 1.0, tol, "primitive (radial)");
  }
  // circular leg 0 -> theta at radius r; dw = i w dpsi
  auto circular = [&](double psi) -> cplx {
    const cplx w = std::polar(r, psi);
    return f_.eval(w) / (w * w) * kI * w;
  };
  if (theta > 0.0) {
    value += integrate_checked(circular, 0.0, theta, tol, "primitive (arc)");
  } else if (theta < 0.0) {
    value -= integrate_checked(circular, theta, 0.0, tol, "primitive (arc)");
  }
  return value;
}

ZetaSquaredPrimitive antiderivative_over_zeta_squared(const AnalyticFunction& f,
                                                      double cut_angle) {
  return ZetaSquaredPrimitive(f, cut_angle);
}

double circle_scale(const AnalyticFunction& f, int samples) {
  double m = 0.0;
  for (int j = 0; j < samples; ++j) {
    const double th = -kPi + 2.0 * kPi * (j + 0.5) / samples;
    try {
      m = std::max(m, std::abs(f.eval(std::polar(1.0, th))));
    } catch (const DomainError&) {
    }
  }
  return m;
}

double max_dbar_defect(const AnalyticFunction& f, double r_lo, double r_hi, int samples,
                       unsigned seed, double h) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ur(r_lo, r_hi);
  std::uniform_real_distribution<double> ut(-kPi, kPi);
  double worst = 0.0;
  for (int i = 0; i < samples; ++i) {
    const cplx at = std::polar(ur(rng), ut(rng));
    const auto w = central_wirtinger([&](cplx q) { return f.eval(q); }, at, h);
    worst = std::max(worst, std::abs(w.d_zeta_bar));
  }
  return worst;
}

}  // namespace ceik
