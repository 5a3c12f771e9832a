#include "ceik/eikonal_constant.hpp"

#include <cmath>

#include <fmt/format.h>

namespace ceik {

ParametrizedEikonal::ParametrizedEikonal(AnalyticFunction f, cplx phi_constant,
                                         double branch_cut)
    : f_(std::move(f)), df_(f_.derivative()), primitive_(f_, branch_cut), c_(phi_constant) {}

ParametrizedEikonal ParametrizedEikonal::with_constant(cplx c) const {
  ParametrizedEikonal e = *this;
  e.c_ = c;
  return e;
}

void ParametrizedEikonal::check_domain(cplx zeta, bool need_nonzero) const {
  const double r2 = abs2(zeta);
  if (std::abs(1.0 - r2 * r2) < kUnitCircleGuard) {
    throw DomainError(fmt::format("parametrization undefined on |zeta| = 1 (|zeta| = {:.17g})",
                                  std::sqrt(r2)));
  }
  if (need_nonzero && zeta == cplx{}) throw DomainError("phi is singular at zeta = 0");
}

cplx ParametrizedEikonal::z(cplx zeta) const {
  check_domain(zeta, false);
  const cplx fv = f_(zeta);
  const double r2 = abs2(zeta);
  return (fv + zeta * zeta * std::conj(fv)) / (1.0 - r2 * r2);
}

ZJet ParametrizedEikonal::z_jet(cplx zeta) const {
  check_domain(zeta, false);
  const cplx fv = f_(zeta);
  const cplx dfv = df_(zeta);
  const cplx zb = std::conj(zeta);
  const double r2 = abs2(zeta);
  const double den = 1.0 - r2 * r2;
  const cplx num = fv + zeta * zeta * std::conj(fv);
  ZJet jet;
  jet.z = num / den;
  jet.d.d_zeta = (dfv + 2.0 * zeta * std::conj(fv)) / den + num * (2.0 * zeta * zb * zb) / (den * den);
  jet.d.d_zeta_bar =
      zeta * zeta * std::conj(dfv) / den + num * (2.0 * zeta * zeta * zb) / (den * den);
  return jet;
}

cplx ParametrizedEikonal::phi(cplx zeta) const {
  check_domain(zeta, true);
  const cplx fv = f_(zeta);
  const double r2 = abs2(zeta);
  const double den = 1.0 - r2 * r2;
  return (zeta * std::conj(fv) + fv / zeta) / den - fv / (2.0 * zeta) + 0.5 * primitive_(zeta) + c_;
}

WirtingerPair ParametrizedEikonal::phi_wirtinger(cplx zeta) const {
  check_domain(zeta, true);
  const cplx fv = f_(zeta);
  const cplx dfv = df_(zeta);
  const cplx zb = std::conj(zeta);
  const double r2 = abs2(zeta);
  const double r4 = r2 * r2;
  const double den = 1.0 - r4;
  const double den2 = den * den;
  WirtingerPair w;
  w.d_zeta = (1.0 + r4) / den2 * (dfv / (2.0 * zeta) * den + zb * zb * fv + std::conj(fv));
  w.d_zeta_bar =
      2.0 * r2 / den2 * (std::conj(dfv) / (2.0 * zb) * den + zeta * zeta * std::conj(fv) + fv);
  return w;
}

ResidualReport ParametrizedEikonal::eikonal_residual(cplx zeta) const {
  const ZJet jet = z_jet(zeta);
  const WirtingerPair dphi = phi_wirtinger(zeta);
  ResidualReport rep;
  rep.jacobian = abs2(jet.d.d_zeta) - abs2(jet.d.d_zeta_bar);
  const double scale = abs2(jet.d.d_zeta) + abs2(jet.d.d_zeta_bar);
  if (!(std::abs(rep.jacobian) > kDegenerateRatio * scale) || !std::isfinite(rep.jacobian)) {
    rep.degenerate = true;
    rep.value = std::numeric_limits<double>::quiet_NaN();
    return rep;
  }
  const WirtingerPair dz = legendre_invert(dphi, jet.d);
  rep.value = std::abs(4.0 * dz.d_zeta * dz.d_zeta_bar - 1.0);
  return rep;
}

cplx ParametrizedEikonal::grad_v(cplx zeta) const {
  const ZJet jet = z_jet(zeta);
  const double jac = abs2(jet.d.d_zeta) - abs2(jet.d.d_zeta_bar);
  if (jac == 0.0 || jet.d.d_zeta == cplx{}) {
    throw SingularError("grad_v: vanishing Legendre jacobian");
  }
  // zeta_z = conj(z_zeta)/J and zeta_zbar = -z_zetabar/J, so
  // |zeta_z|^2 - |zeta_zbar|^2 = 1/J and |zeta_z|^2 = |z_zeta|^2 / J^2. Then
  // |zeta_z|^2 - |zeta_zbar|^2 = -2i conj(zeta) |zeta_z|^2 (|zeta|^2 + 1) (v_x + i v_y).
  const double zz2 = abs2(jet.d.d_zeta) / (jac * jac);
  const cplx lhs = 1.0 / jac;
  return lhs / (-2.0 * kI * std::conj(zeta) * zz2 * (abs2(zeta) + 1.0));
}

bool ParametrizedEikonal::segment_crosses_cut(cplx a, cplx b) const {
  if (!primitive_.has_log()) return false;
  const cplx rot = std::polar(1.0, -primitive_.cut_angle());
  const cplx ra = a * rot;
  const cplx rb = b * rot;
  if ((ra.imag() > 0.0) == (rb.imag() > 0.0) && ra.imag() != 0.0 && rb.imag() != 0.0) {
    return false;
  }
  const double dy = rb.imag() - ra.imag();
  if (dy == 0.0) return ra.imag() == 0.0 && (ra.real() > 0.0 || rb.real() > 0.0);
  const double s = -ra.imag() / dy;
  return ra.real() + s * (rb.real() - ra.real()) > 0.0;
}

cplx eval_z(const ParametrizedEikonal& e, cplx zeta) { return e.z(zeta); }
cplx eval_phi(const ParametrizedEikonal& e, cplx zeta) { return e.phi(zeta); }
WirtingerPair phi_wirtinger(const ParametrizedEikonal& e, cplx zeta) {
  return e.phi_wirtinger(zeta);
}
ResidualReport eikonal_residual(const ParametrizedEikonal& e, cplx zeta) {
  return e.eikonal_residual(zeta);
}
cplx grad_v(const ParametrizedEikonal& e, cplx zeta) { return e.grad_v(zeta); }

std::array<QuadraticBranch, 2> quadratic_closed_form(cplx f0, cplx f1, cplx f2, cplx z, cplx c) {
  const cplx lead = std::conj(z) + f2;
  if (lead == cplx{}) throw SingularError("quadratic_closed_form: conj(z) + f2 vanishes");
  const cplx radicand = f1 * f1 + 4.0 * (z - f0) * lead;
  const cplx root = std::sqrt(radicand);
  std::array<QuadraticBranch, 2> out;
  for (int b = 0; b < 2; ++b) {
    const cplx s = b == 0 ? root : -root;
    QuadraticBranch& q = out[b];
    q.root = s;
    q.zeta = (-f1 + s) / (2.0 * lead);
    q.phi = 0.5 * s + c;
    if (f1 != cplx{}) q.phi -= 0.5 * f1 * std::log((s + f1) / (z - f0));
  }
  return out;
}

}  // namespace ceik
