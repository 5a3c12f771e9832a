#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ceik/analytic.hpp"
#include "ceik/eikonal_constant.hpp"
#include "ceik/wirtinger.hpp"

namespace ceik {

// l = log n and its Wirtinger derivatives at one point.
struct LogIndexJet {
  double ell = 0.0;
  cplx ell_zeta{};
  cplx ell_zeta_bar{};
};

// Named profiles for l as a function of zeta.
//   constant: l = value
//   gaussian: l = value + amplitude * exp(-|zeta - center|^2 / width^2)
struct EllProfile {
  std::string name = "constant";
  double value = 0.0;
  double amplitude = 0.0;
  cplx center{};
  double width = 1.0;

  LogIndexJet operator()(cplx zeta) const;
};

// Index of refraction in one of three forms.
class RefractionField {
 public:
  enum class Kind { constant, mod_analytic, parametric_ell };

  static RefractionField constant(double n0);
  // n(z) = |w'(z)|
  static RefractionField mod_analytic(AnalyticFunction w);
  static RefractionField parametric_ell(EllProfile profile);

  Kind kind() const { return kind_; }
  double n0() const { return n0_; }
  const AnalyticFunction& w() const { return *w_; }
  const EllProfile& profile() const { return profile_; }

  // l over the zeta-plane. Defined for the constant and parametric kinds;
  // the mod_analytic kind depends on z, see ell_in_z.
  LogIndexJet ell_in_zeta(cplx zeta) const;

  // l and its derivatives with respect to z, zbar at a z-plane point.
  // For parametric_ell this is not defined and throws.
  LogIndexJet ell_in_z(cplx z) const;

 private:
  Kind kind_ = Kind::constant;
  double n0_ = 1.0;
  std::shared_ptr<AnalyticFunction> w_;
  EllProfile profile_{};
};

// l_zeta recomputed by the chain rule from l(z) and a map z(zeta); used to
// compare a design l(zeta) with what a z-plane index would induce.
LogIndexJet chain_rule_ell(const LogIndexJet& in_z, const WirtingerPair& z_of_zeta);

struct Abcd {
  cplx a, b, c, d;
};

struct ACoeffs {
  double a11 = 0, a12 = 0, a21 = 0, a22 = 0;
};

struct MuNu {
  cplx mu, nu;
};

struct BC {
  cplx B, C;
};

Abcd coeffs_abcd(cplx ell_zeta, cplx ell_zeta_bar, cplx zeta);
ACoeffs coeffs_A(const Abcd& k);
bool is_elliptic(const ACoeffs& A);

// The quotient formulas as printed for the reduced equation
// z_zetabar = mu z_zeta + nu conj(z)_zetabar.
MuNu mu_nu_literal(const ACoeffs& A);

// mu, nu obtained by solving the real system y_xi = A11 x_xi + A12 x_eta,
// -y_eta = A21 x_xi + A22 x_eta for z_zetabar in terms of z_zeta and
// conj(z)_zetabar.
MuNu mu_nu_rederived(const ACoeffs& A);

// The same pair straight from b z_zeta + a conj(z)_zetabar - c z_zetabar
// - d conj(z)_zeta = 0.
MuNu mu_nu_from_abcd(const Abcd& k);

cplx sigma_from_A(const ACoeffs& A);
cplx kappa_from(cplx mu, cplx nu, cplx sigma);

// Throws SingularError when |kappa| is within `guard` of 1.
BC coeffs_BC(cplx kappa, cplx kappa_chi_bar, double guard = 1e-12);

struct CoefficientPoint {
  cplx zeta{};
  LogIndexJet ell{};
  Abcd abcd{};
  ACoeffs A{};
  MuNu mn{};          // re-derived, used downstream
  MuNu mn_literal{};  // as printed, kept for comparison
  cplx sigma{};
  cplx kappa{};
  bool valid = false;     // A defined (metric non-degenerate)
  bool elliptic = false;
  bool moduli_ok = false; // |mu|+|nu| < 1, |sigma| < 1, |kappa| < 1 (slack 1e-12)
};

// Every coefficient at one zeta. Non-elliptic points get sigma = 0 and
// kappa from sigma = 0. Degenerate points come back with valid = false.
CoefficientPoint compute_coefficients(const LogIndexJet& ell, cplx zeta);

struct OracleReport {
  int samples = 0;
  double inverse_schwarz_max = 0.0;  // |zeta^2 conj(z)_zetabar - z_zetabar| / scale
  double literal_max = 0.0;          // reduced-equation residual with the printed mu, nu
  double rederived_max = 0.0;        // same with the re-derived mu, nu
  double literal_nu_at_2 = 0.0;      // nu at zeta = 2 from the printed formula (real part)
};

// Finite-difference audit of the reduced equation on the constant-index map
// z(zeta) of f, with l constant. Samples `count` points from the annuli
// [r_lo, r_hi] drawn with `seed`.
OracleReport coefficient_oracle(const AnalyticFunction& f, int count, unsigned seed,
                                double r_lo = 1.2, double r_hi = 2.5, double h = 1e-3);

// Reduction of n = |w'(z)| to the constant case: phi(z) = psi(w(z)) with psi
// a constant-index eikonal.
class ReducedEikonal {
 public:
  ReducedEikonal(AnalyticFunction w, ParametrizedEikonal psi);

  struct Sample {
    cplx zeta{};
    cplx z{};
    cplx w{};
    cplx phi{};
    cplx phi_z{}, phi_zbar{};
    double n = 0.0;
    double residual = 0.0;  // |4 phi_z phi_zbar - |w'(z)|^2|
  };

  // Point of the solution parametrized by zeta: w = psi's z(zeta), then z
  // solves w(z) = w by Newton from z_guess. Throws SingularError when w'
  // vanishes, ConvergenceError when Newton fails.
  Sample sample(cplx zeta, cplx z_guess) const;

  const AnalyticFunction& w() const { return w_; }
  const ParametrizedEikonal& psi() const { return psi_; }

 private:
  AnalyticFunction w_;
  AnalyticFunction dw_;
  ParametrizedEikonal psi_;
};

ReducedEikonal biholomorphic_reduction(const AnalyticFunction& w, const AnalyticFunction& f);

}  // namespace ceik
