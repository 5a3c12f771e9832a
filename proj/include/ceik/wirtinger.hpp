#pragma once

#include <utility>

#include "ceik/core.hpp"

namespace ceik {

// Pair of Wirtinger derivatives (d/dzeta, d/dzeta-bar) of a function of one
// complex variable that need not be analytic.
struct WirtingerPair {
  cplx d_zeta{};
  cplx d_zeta_bar{};
};

// d/dx and d/dy combine as d = (dx - i dy)/2, dbar = (dx + i dy)/2.
inline WirtingerPair from_partials(cplx dx, cplx dy) {
  return {0.5 * (dx - kI * dy), 0.5 * (dx + kI * dy)};
}

// Central-difference Wirtinger derivatives. order 2 uses the 3-point stencil,
// order 4 the 5-point one.
template <class F>
WirtingerPair central_wirtinger(F&& fn, cplx at, double h, int order = 2) {
  const cplx hx{h, 0.0};
  const cplx hy{0.0, h};
  cplx dx, dy;
  if (order >= 4) {
    dx = (-fn(at + 2.0 * hx) + 8.0 * fn(at + hx) - 8.0 * fn(at - hx) + fn(at - 2.0 * hx)) /
         (12.0 * h);
    dy = (-fn(at + 2.0 * hy) + 8.0 * fn(at + hy) - 8.0 * fn(at - hy) + fn(at - 2.0 * hy)) /
         (12.0 * h);
  } else {
    dx = (fn(at + hx) - fn(at - hx)) / (2.0 * h);
    dy = (fn(at + hy) - fn(at - hy)) / (2.0 * h);
  }
  return from_partials(dx, dy);
}

// Solve the chain rule for a map zeta -> z given z_zeta and z_zetabar: returns
// the derivatives of an arbitrary g with respect to z and zbar from its
// derivatives with respect to zeta and zetabar. `jacobian` receives
// |z_zeta|^2 - |z_zetabar|^2.
inline WirtingerPair legendre_invert(const WirtingerPair& g, const WirtingerPair& z,
                                     double* jacobian = nullptr) {
  const double jac = abs2(z.d_zeta) - abs2(z.d_zeta_bar);
  if (jacobian) *jacobian = jac;
  // zeta_z = conj(z_zeta)/J, zetabar_z = -conj(z_zetabar)/J,
  // zeta_zbar = -z_zetabar/J, zetabar_zbar = z_zeta/J.
  const cplx gz = (g.d_zeta * std::conj(z.d_zeta) - g.d_zeta_bar * std::conj(z.d_zeta_bar)) / jac;
  const cplx gzb = (-g.d_zeta * z.d_zeta_bar + g.d_zeta_bar * z.d_zeta) / jac;
  return {gz, gzb};
}

}  // namespace ceik
