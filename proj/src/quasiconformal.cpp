#include "ceik/quasiconformal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "ceik/spectral.hpp"

namespace ceik {

double beltrami_residual(const CField& chi, const CField& sigma, const GridSpec& g,
                         const IndexBox& box) {
  const WirtingerFields d = wirtinger_fd(chi, g);
  double num = 0.0, den = 0.0;
  for (int j = box.j0; j < box.j1; ++j) {
    for (int i = box.i0; i < box.i1; ++i) {
      num += abs2(d.d_zeta_bar(i, j) - sigma(i, j) * d.d_zeta(i, j));
      den += abs2(d.d_zeta(i, j));
    }
  }
  return den > 0.0 ? std::sqrt(num / den) : 0.0;
}

QuasiconformalMap solve_beltrami(const CField& sigma, const GridSpec& g,
                                 const BeltramiOptions& opts) {
  if (sigma.nx() != g.nx || sigma.ny() != g.ny) throw DomainError("sigma field does not fit grid");
  double sup = 0.0;
  for (const cplx& s : sigma.values()) sup = std::max(sup, std::abs(s));
  if (!(sup < 1.0)) throw DomainError(fmt::format("sup |sigma| = {:.6g} is not below 1", sup));
  if (sup > opts.k_max) {
    throw DomainError(fmt::format("sup |sigma| = {:.6g} exceeds k_max = {:.6g}", sup, opts.k_max));
  }

  QuasiconformalMap map;
  map.grid = g;
  map.interior = interior_box(g, opts.margin, opts.pad);
  const RField w = taper_window(g, opts.margin);
  map.sigma_used = CField(g);
  for (std::size_t k = 0; k < sigma.size(); ++k) map.sigma_used[k] = sigma[k] * w[k];
  const CField& s = map.sigma_used;

  const PeriodicOps ops(g);
  // h = chi_zetabar solves h = sigma (1 + S h); a contraction with factor sup|sigma|.
  CField h = s;
  for (int it = 1; it <= opts.max_iter; ++it) {
    const CField sh = ops.beurling(h);
    double upd = 0.0, mag = 0.0;
    for (std::size_t k = 0; k < h.size(); ++k) {
      const cplx next = s[k] * (1.0 + sh[k]);
      upd = std::max(upd, std::abs(next - h[k]));
      mag = std::max(mag, std::abs(next));
      h[k] = next;
    }
    map.update_history.push_back(upd);
    map.iterations = it;
    if (upd <= opts.iter_tol * std::max(1.0, mag)) {
      map.converged = true;
      break;
    }
  }
  if (!map.converged) {
    throw ConvergenceError(fmt::format("Beltrami iteration stalled after {} steps (update {:.3e})",
                                       map.iterations, map.update_history.back()));
  }

  cplx beta;
  const CField u = ops.dbar_inverse(h, &beta);
  map.beta = beta;
  map.periodic = u;
  map.chi = CField(g);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const cplx z = g.node(i, j);
      map.chi(i, j) = z + beta * std::conj(z) + u(i, j);
    }
  }
  const cplx zc = g.node(g.ci(), g.cj());
  map.offset = zc - map.chi(g.ci(), g.cj());
  for (auto& c : map.chi.values()) c += map.offset;

  map.residual_l2 = beltrami_residual(map.chi, s, g, map.interior);
  const WirtingerFields d = wirtinger_fd(map.chi, g);
  map.jacobian_min = std::numeric_limits<double>::infinity();
  for (int j = map.interior.j0; j < map.interior.j1; ++j) {
    for (int i = map.interior.i0; i < map.interior.i1; ++i) {
      map.jacobian_min =
          std::min(map.jacobian_min, abs2(d.d_zeta(i, j)) - abs2(d.d_zeta_bar(i, j)));
    }
  }
  return map;
}

cplx QuasiconformalMap::eval(cplx zeta) const { return interp_bicubic(chi, grid, zeta); }

namespace {

// Newton on the bilinear interpolant; returns false if it leaves the lattice
// or does not converge.
bool newton_bilinear(const CField& chi, const GridSpec& g, cplx target, cplx& zeta) {
  const double scale = std::max({1.0, std::abs(target), g.hx(), g.hy()});
  for (int it = 0; it < 60; ++it) {
    const double fi = g.fi(zeta), fj = g.fj(zeta);
    if (!(fi >= -1e-9 && fi <= g.nx - 1 + 1e-9 && fj >= -1e-9 && fj <= g.ny - 1 + 1e-9)) {
      return false;
    }
    const int i = std::clamp(static_cast<int>(std::floor(fi)), 0, g.nx - 2);
    const int j = std::clamp(static_cast<int>(std::floor(fj)), 0, g.ny - 2);
    const double s = fi - i, t = fj - j;
    const cplx u00 = chi(i, j), u10 = chi(i + 1, j), u01 = chi(i, j + 1), u11 = chi(i + 1, j + 1);
    const cplx val = (1 - s) * (1 - t) * u00 + s * (1 - t) * u10 + (1 - s) * t * u01 + s * t * u11;
    const cplx r = val - target;
    if (std::abs(r) <= 1e-14 * scale) return true;
    const cplx fx = ((1 - t) * (u10 - u00) + t * (u11 - u01)) / g.hx();
    const cplx fy = ((1 - s) * (u01 - u00) + s * (u11 - u10)) / g.hy();
    const double det = fx.real() * fy.imag() - fy.real() * fx.imag();
    if (det == 0.0) return false;
    const double dx = (fy.imag() * r.real() - fy.real() * r.imag()) / det;
    const double dy = (-fx.imag() * r.real() + fx.real() * r.imag()) / det;
    zeta -= cplx{dx, dy};
    if (std::abs(dx) + std::abs(dy) <= 1e-15 * scale) {
      return std::abs(r) <= 1e-10 * scale;
    }
  }
  return false;
}

// Newton on the bicubic interpolant from a bilinear root; keeps the bilinear
// root if the polish leaves the lattice.
cplx polish_bicubic(const CField& chi, const GridSpec& g, cplx target, cplx zeta) {
  const double scale = std::max({1.0, std::abs(target), g.hx(), g.hy()});
  const double h = 1e-4 * std::min(g.hx(), g.hy());
  const cplx start = zeta;
  for (int it = 0; it < 20; ++it) {
    if (!in_lattice(g, zeta)) return start;
    const cplx r = interp_bicubic(chi, g, zeta) - target;
    if (std::abs(r) <= 1e-14 * scale) break;
    const cplx fx = (interp_bicubic(chi, g, zeta + h) - interp_bicubic(chi, g, zeta - h)) / (2.0 * h);
    const cplx fy = (interp_bicubic(chi, g, zeta + cplx{0, h}) -
                     interp_bicubic(chi, g, zeta - cplx{0, h})) / (2.0 * h);
    const double det = fx.real() * fy.imag() - fy.real() * fx.imag();
    if (det == 0.0) return start;
    const double dx = (fy.imag() * r.real() - fy.real() * r.imag()) / det;
    const double dy = (-fx.imag() * r.real() + fx.real() * r.imag()) / det;
    zeta -= cplx{dx, dy};
    if (std::abs(dx) + std::abs(dy) <= 1e-15 * scale) break;
  }
  return in_lattice(g, zeta) ? zeta : start;
}

}  // namespace

cplx QuasiconformalMap::invert(cplx target) const {
  // Affine part first: chi ~ zeta + beta conj(zeta) + offset.
  const cplx t = target - offset;
  cplx zeta = (t - beta * std::conj(t)) / (1.0 - abs2(beta));
  if (newton_bilinear(chi, grid, target, zeta)) return polish_bicubic(chi, grid, target, zeta);
  std::size_t best = 0;
  double bd = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < chi.size(); ++k) {
    const double d = abs2(chi[k] - target);
    if (d < bd) {
      bd = d;
      best = k;
    }
  }
  zeta = grid.node(static_cast<int>(best % grid.nx), static_cast<int>(best / grid.nx));
  if (newton_bilinear(chi, grid, target, zeta)) return polish_bicubic(chi, grid, target, zeta);
  throw DomainError(fmt::format("invert: ({:.6g}, {:.6g}) is outside the image of the lattice",
                                target.real(), target.imag()));
}

cplx QuasiconformalMap::eval_extended(cplx zeta) const {
  return zeta + beta * std::conj(zeta) + offset + interp_bicubic_periodic(periodic, grid, zeta);
}

cplx QuasiconformalMap::invert_extended(cplx target) const {
  const double scale = std::max({1.0, std::abs(target), grid.hx(), grid.hy()});
  const double h = 1e-3 * std::min(grid.hx(), grid.hy());
  const cplx t = target - offset;
  cplx zeta = (t - beta * std::conj(t)) / (1.0 - abs2(beta));
  for (int it = 0; it < 100; ++it) {
    const cplx r = eval_extended(zeta) - target;
    if (std::abs(r) <= 1e-14 * scale) return zeta;
    const cplx fx = (eval_extended(zeta + h) - eval_extended(zeta - h)) / (2.0 * h);
    const cplx fy = (eval_extended(zeta + cplx{0, h}) - eval_extended(zeta - cplx{0, h})) / (2.0 * h);
    const double det = fx.real() * fy.imag() - fy.real() * fx.imag();
    if (det <= 0.0) break;
    const double dx = (fy.imag() * r.real() - fy.real() * r.imag()) / det;
    const double dy = (-fx.imag() * r.real() + fx.real() * r.imag()) / det;
    zeta -= cplx{dx, dy};
    if (std::abs(dx) + std::abs(dy) <= 1e-15 * scale) {
      if (std::abs(eval_extended(zeta) - target) <= 1e-11 * scale) return zeta;
      break;
    }
  }
  throw ConvergenceError(fmt::format("invert_extended: Newton stalled at ({:.6g}, {:.6g})",
                                     target.real(), target.imag()));
}

}  // namespace ceik
