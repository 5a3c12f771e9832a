#include "ceik/refraction.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <fmt/format.h>

namespace ceik {

LogIndexJet EllProfile::operator()(cplx zeta) const {
  LogIndexJet j;
  j.ell = value;
  if (name == "constant") return j;
  if (name == "gaussian") {
    const cplx d = zeta - center;
    const double g = amplitude * std::exp(-abs2(d) / (width * width));
    j.ell += g;
    j.ell_zeta = -g * std::conj(d) / (width * width);
    j.ell_zeta_bar = -g * d / (width * width);
    return j;
  }
  throw ConfigError(fmt::format("unknown l profile '{}'", name));
}

RefractionField RefractionField::constant(double n0) {
  if (!(n0 > 0.0)) throw ConfigError("constant index must be positive");
  RefractionField r;
  r.kind_ = Kind::constant;
  r.n0_ = n0;
  r.profile_.value = std::log(n0);
  return r;
}

RefractionField RefractionField::mod_analytic(AnalyticFunction w) {
  RefractionField r;
  r.kind_ = Kind::mod_analytic;
  r.w_ = std::make_shared<AnalyticFunction>(std::move(w));
  return r;
}

RefractionField RefractionField::parametric_ell(EllProfile profile) {
  if (profile.name != "constant" && profile.name != "gaussian") {
    throw ConfigError(fmt::format("unknown l profile '{}'", profile.name));
  }
  if (profile.name == "gaussian" && !(profile.width > 0.0)) {
    throw ConfigError("gaussian l profile needs width > 0");
  }
  RefractionField r;
  r.kind_ = Kind::parametric_ell;
  r.profile_ = std::move(profile);
  return r;
}

LogIndexJet RefractionField::ell_in_zeta(cplx zeta) const {
  switch (kind_) {
    case Kind::constant:
      return {std::log(n0_), {}, {}};
    case Kind::parametric_ell:
      return profile_(zeta);
    case Kind::mod_analytic:
      break;
  }
  throw DomainError("l of a |w'| index is a function of z, not of zeta");
}

LogIndexJet RefractionField::ell_in_z(cplx z) const {
  switch (kind_) {
    case Kind::constant:
      return {std::log(n0_), {}, {}};
    case Kind::mod_analytic: {
      const cplx d1 = w_->derivative()(z);
      if (d1 == cplx{}) throw SingularError("w' vanishes");
      const cplx d2 = w_->derivative().derivative()(z);
      LogIndexJet j;
      j.ell = std::log(std::abs(d1));
      j.ell_zeta = d2 / (2.0 * d1);
      j.ell_zeta_bar = std::conj(j.ell_zeta);
      return j;
    }
    case Kind::parametric_ell:
      break;
  }
  throw DomainError("a parametric l is given over zeta only");
}

LogIndexJet chain_rule_ell(const LogIndexJet& in_z, const WirtingerPair& z) {
  LogIndexJet j;
  j.ell = in_z.ell;
  j.ell_zeta = in_z.ell_zeta * z.d_zeta + in_z.ell_zeta_bar * std::conj(z.d_zeta_bar);
  j.ell_zeta_bar = in_z.ell_zeta * z.d_zeta_bar + in_z.ell_zeta_bar * std::conj(z.d_zeta);
  return j;
}

Abcd coeffs_abcd(cplx ell_zeta, cplx ell_zeta_bar, cplx zeta) {
  if (zeta == cplx{}) throw DomainError("coeffs_abcd: zeta = 0");
  return {1.0 + zeta * ell_zeta, -ell_zeta_bar / zeta, (1.0 - zeta * ell_zeta) / (zeta * zeta),
          zeta * ell_zeta_bar};
}

ACoeffs coeffs_A(const Abcd& k) {
  const double p = abs2(k.a + k.c);
  const double q = abs2(k.b + k.d);
  const double den = p - q;
  if (!(std::abs(den) > 1e-14 * (p + q))) {
    throw SingularError("coeffs_A: |a+c|^2 - |b+d|^2 vanishes");
  }
  ACoeffs A;
  A.a11 = 2.0 * ((k.a + k.b) * std::conj(k.c + k.d)).imag() / den;
  A.a12 = (abs2(k.a + k.d) - abs2(k.b + k.c)) / den;
  A.a21 = (abs2(k.a - k.d) - abs2(k.b - k.c)) / den;
  A.a22 = 2.0 * (std::conj(k.a - k.b) * (k.c - k.d)).imag() / den;
  return A;
}

bool is_elliptic(const ACoeffs& A) {
  const double s = A.a11 + A.a22;
  return 4.0 * A.a12 * A.a21 - s * s > 0.0 && A.a12 > 0.0;
}

MuNu mu_nu_literal(const ACoeffs& A) {
  const double den = 2.0 - (A.a12 + A.a21) + A.a12 * A.a21 - A.a11 * A.a22;
  if (den == 0.0) throw SingularError("mu_nu_literal: vanishing denominator");
  return {cplx{A.a11 + A.a22, A.a12 - A.a21} / den,
          cplx{1.0 + A.a11 * A.a22 - A.a12 * A.a21, -(A.a22 - A.a11)} / den};
}

MuNu mu_nu_rederived(const ACoeffs& A) {
  // With x_xi, x_eta free: z_zeta = p1 x_xi + p2 x_eta, z_zetabar = q1 x_xi
  // + q2 x_eta, conj(z)_zetabar = conj(p1) x_xi + conj(p2) x_eta.
  const cplx p1 = 0.5 * cplx{1.0 - A.a21, A.a11};
  const cplx p2 = 0.5 * cplx{-A.a22, A.a12 - 1.0};
  const cplx q1 = 0.5 * cplx{1.0 + A.a21, A.a11};
  const cplx q2 = 0.5 * cplx{A.a22, A.a12 + 1.0};
  const cplx det = p1 * std::conj(p2) - p2 * std::conj(p1);
  if (std::abs(det) < 1e-300) throw SingularError("mu_nu_rederived: singular system");
  return {(q1 * std::conj(p2) - q2 * std::conj(p1)) / det, (p1 * q2 - p2 * q1) / det};
}

MuNu mu_nu_from_abcd(const Abcd& k) {
  const double den = abs2(k.c) - abs2(k.d);
  if (den == 0.0) throw SingularError("mu_nu_from_abcd: |c| = |d|");
  return {(k.b * std::conj(k.c) - std::conj(k.a) * k.d) / den,
          (k.a * std::conj(k.c) - std::conj(k.b) * k.d) / den};
}

cplx sigma_from_A(const ACoeffs& A) {
  if (!is_elliptic(A)) throw DomainError("sigma: coefficients are not elliptic");
  const double s = A.a11 + A.a22;
  return cplx{A.a12 - A.a21, -s} / (A.a12 + A.a21 + std::sqrt(4.0 * A.a12 * A.a21 - s * s));
}

cplx kappa_from(cplx mu, cplx nu, cplx sigma) {
  const cplx den = 1.0 - mu * std::conj(sigma);
  if (std::abs(den) < 1e-14) throw SingularError("kappa: 1 - mu conj(sigma) vanishes");
  return nu / den;
}

BC coeffs_BC(cplx kappa, cplx kappa_chi_bar, double guard) {
  const double den = 1.0 - abs2(kappa);
  if (std::abs(den) < guard) throw SingularError("coeffs_BC: |kappa| = 1");
  const cplx C = -kappa_chi_bar / den;
  return {std::conj(kappa) * C, C};
}

CoefficientPoint compute_coefficients(const LogIndexJet& ell, cplx zeta) {
  CoefficientPoint p;
  p.zeta = zeta;
  p.ell = ell;
  if (zeta == cplx{}) return p;
  p.abcd = coeffs_abcd(ell.ell_zeta, ell.ell_zeta_bar, zeta);
  try {
    p.A = coeffs_A(p.abcd);
    p.mn = mu_nu_rederived(p.A);
    p.mn_literal = mu_nu_literal(p.A);
  } catch (const SingularError&) {
    return p;
  }
  p.elliptic = is_elliptic(p.A);
  p.sigma = p.elliptic ? sigma_from_A(p.A) : cplx{};
  try {
    p.kappa = kappa_from(p.mn.mu, p.mn.nu, p.sigma);
  } catch (const SingularError&) {
    return p;
  }
  p.valid = true;
  constexpr double slack = 1e-12;
  p.moduli_ok = p.elliptic && std::abs(p.mn.mu) + std::abs(p.mn.nu) < 1.0 + slack &&
                std::abs(p.sigma) < 1.0 + slack && std::abs(p.kappa) < 1.0 + slack;
  return p;
}

OracleReport coefficient_oracle(const AnalyticFunction& f, int count, unsigned seed, double r_lo,
                                double r_hi, double h) {
  const ParametrizedEikonal e(f);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ur(r_lo, r_hi);
  std::uniform_real_distribution<double> ut(-kPi, kPi);
  OracleReport rep;
  auto audit = [&](cplx zeta, bool record) {
    const WirtingerPair dz = central_wirtinger([&](cplx q) { return e.z(q); }, zeta, h, 4);
    const cplx zbar_zetabar = std::conj(dz.d_zeta);
    const double scale = std::max({std::abs(dz.d_zeta), std::abs(dz.d_zeta_bar), 1e-300});
    const double r1 = std::abs(zeta * zeta * zbar_zetabar - dz.d_zeta_bar) / scale;
    const ACoeffs A = coeffs_A(coeffs_abcd({}, {}, zeta));
    const MuNu lit = mu_nu_literal(A);
    const MuNu red = mu_nu_rederived(A);
    const double r_lit =
        std::abs(dz.d_zeta_bar - lit.mu * dz.d_zeta - lit.nu * zbar_zetabar) / scale;
    const double r_red =
        std::abs(dz.d_zeta_bar - red.mu * dz.d_zeta - red.nu * zbar_zetabar) / scale;
    if (record) {
      rep.inverse_schwarz_max = std::max(rep.inverse_schwarz_max, r1);
      rep.literal_max = std::max(rep.literal_max, r_lit);
      rep.rederived_max = std::max(rep.rederived_max, r_red);
      ++rep.samples;
    }
  };
  for (int i = 0; i < count; ++i) audit(std::polar(ur(rng), ut(rng)), true);
  rep.literal_nu_at_2 = mu_nu_literal(coeffs_A(coeffs_abcd({}, {}, 2.0))).nu.real();
  return rep;
}

ReducedEikonal::ReducedEikonal(AnalyticFunction w, ParametrizedEikonal psi)
    : w_(std::move(w)), dw_(w_.derivative()), psi_(std::move(psi)) {}

ReducedEikonal::Sample ReducedEikonal::sample(cplx zeta, cplx z_guess) const {
  Sample s;
  s.zeta = zeta;
  const ZJet jet = psi_.z_jet(zeta);
  s.w = jet.z;
  cplx z = z_guess;
  bool done = false;
  for (int it = 0; it < 100 && !done; ++it) {
    const cplx d = dw_(z);
    if (d == cplx{}) throw SingularError("biholomorphic reduction: w' vanishes");
    const cplx step = (w_(z) - s.w) / d;
    z -= step;
    done = std::abs(step) <= 1e-15 * (1.0 + std::abs(z));
  }
  if (!done || std::abs(w_(z) - s.w) > 1e-12 * (1.0 + std::abs(s.w))) {
    throw ConvergenceError("biholomorphic reduction: Newton for w(z) = w0 did not converge");
  }
  s.z = z;
  const cplx dw = dw_(z);
  if (dw == cplx{}) throw SingularError("biholomorphic reduction: w' vanishes");
  const WirtingerPair psi_w = legendre_invert(psi_.phi_wirtinger(zeta), jet.d);
  s.phi = psi_.phi(zeta);
  s.phi_z = psi_w.d_zeta * dw;
  s.phi_zbar = psi_w.d_zeta_bar * std::conj(dw);
  s.n = std::abs(dw);
  s.residual = std::abs(4.0 * s.phi_z * s.phi_zbar - s.n * s.n);
  return s;
}

ReducedEikonal biholomorphic_reduction(const AnalyticFunction& w, const AnalyticFunction& f) {
  return ReducedEikonal(w, ParametrizedEikonal(f));
}

}  // namespace ceik
