#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <functional>

#include "ceik/quasiconformal.hpp"
#include "ceik/spectral.hpp"
#include "oracles.hpp"

using namespace ceik;

namespace {

CField sample(const GridSpec& g, const std::function<cplx(cplx)>& fn) {
  CField u(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) u(i, j) = fn(g.node(i, j));
  return u;
}

}  // namespace

TEST_CASE("lattice layout") {
  const GridSpec g{-1, 1, -2, 2, 8, 16};
  CHECK(g.hx() == doctest::Approx(0.25));
  CHECK(g.node(g.ci(), g.cj()) == cplx{0.0, 0.0});
  CHECK(g.fi(g.node(3, 5)) == doctest::Approx(3.0));
}

TEST_CASE("fourth-order differences are exact on cubics") {
  const GridSpec g{-1, 1, -1, 1, 16, 16};
  const CField u = sample(g, [](cplx z) { return z * z * z + 2.0 * std::conj(z) * z; });
  const WirtingerFields d = wirtinger_fd(u, g);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const cplx z = g.node(i, j);
      CHECK(std::abs(d.d_zeta(i, j) - (3.0 * z * z + 2.0 * std::conj(z))) < 1e-11);
      CHECK(std::abs(d.d_zeta_bar(i, j) - 2.0 * z) < 1e-11);
    }
  }
}

TEST_CASE("interpolation") {
  const GridSpec g{-1, 1, -1, 1, 16, 16};
  const CField u = sample(g, [](cplx z) { return z * z + cplx{0, 1} * z; });
  CHECK(std::abs(interp_bicubic(u, g, g.node(3, 7)) - u(3, 7)) < 1e-15);
  const cplx p{0.13, -0.41};
  CHECK(std::abs(interp_bicubic(u, g, p) - (p * p + cplx{0, 1} * p)) < 1e-12);
  const double L = 2.0;
  const CField w = sample(g, [&](cplx z) { return cplx{std::sin(2 * oracle::pi * z.real() / L)}; });
  const cplx outside{1.3, 0.2};
  CHECK(std::abs(interp_bicubic_periodic(w, g, outside) -
                 interp_bicubic_periodic(w, g, outside - L)) < 1e-14);
  CHECK(in_lattice(g, {0.0, 0.0}));
  CHECK_FALSE(in_lattice(g, {0.99, 0.0}));
}

TEST_CASE("periodic dbar inverse and Beurling transform on a Fourier mode") {
  const GridSpec g{0, 2, 0, 1, 32, 16};
  const double kx = 2 * oracle::pi / 2.0, ky = 2 * oracle::pi * 2 / 1.0;
  auto mode = [&](cplx z) { return std::exp(cplx{0, kx * z.real() + ky * z.imag()}); };
  const CField u = sample(g, mode);
  // u_zetabar = (i kx - ky)/2 u, u_zeta = (i kx + ky)/2 u.
  const cplx dbar = 0.5 * cplx{-ky, kx}, d = 0.5 * cplx{ky, kx};
  CField h(g);
  for (std::size_t k = 0; k < g.size(); ++k) h[k] = dbar * u[k] + 0.25;
  PeriodicOps ops(g);
  cplx mean;
  const CField back = ops.dbar_inverse(h, &mean);
  CHECK(std::abs(mean - 0.25) < 1e-14);
  CField dh(g);
  for (std::size_t k = 0; k < g.size(); ++k) dh[k] = dbar * u[k];
  const CField bt = ops.beurling(dh);
  for (std::size_t k = 0; k < g.size(); ++k) {
    CHECK(std::abs(back[k] - u[k]) < 1e-12);
    CHECK(std::abs(bt[k] - d * u[k]) < 1e-12);
  }
}

TEST_CASE("taper and plateau box") {
  const GridSpec g{-1, 1, -1, 1, 64, 64};
  const RField w = taper_window(g, 0.1);
  const IndexBox b = interior_box(g, 0.1, 0);
  CHECK(w(0, 10) == doctest::Approx(0.0));
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      CHECK(w(i, j) >= 0.0);
      CHECK(w(i, j) <= 1.0);
      if (b.contains(i, j)) CHECK(w(i, j) == doctest::Approx(1.0).epsilon(1e-14));
    }
  }
}

TEST_CASE("constant sigma is solved by an affine map") {
  const GridSpec g{-1, 1, -1, 1, 32, 32};
  const cplx c{-0.2, 0.45};
  BeltramiOptions o;
  o.margin = 0.0;
  o.pad = 0;
  const QuasiconformalMap m = solve_beltrami(CField(g, c), g, o);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const cplx z = g.node(i, j);
      CHECK(std::abs(m.chi(i, j) - (z + c * std::conj(z))) < 1e-12);
    }
  CHECK(std::abs(m.beta - c) < 1e-14);
}

TEST_CASE("smooth sigma: residual, orientation and inversion") {
  const GridSpec g{-1, 1, -1, 1, 128, 128};
  const CField sigma =
      sample(g, [](cplx z) { return cplx{0.25, -0.2} * std::exp(-std::norm(z) / 0.15); });
  const QuasiconformalMap m = solve_beltrami(sigma, g);
  CHECK(m.converged);
  CHECK(m.residual_l2 < 1e-6);
  CHECK(m.jacobian_min > 0.0);

  // Second-order differences as an independent look at chi_zetabar / chi_zeta.
  double worst = 0.0;
  for (int j = m.interior.j0; j < m.interior.j1; j += 5) {
    for (int i = m.interior.i0; i < m.interior.i1; i += 5) {
      const cplx dx = (m.chi(i + 1, j) - m.chi(i - 1, j)) / (2 * g.hx());
      const cplx dy = (m.chi(i, j + 1) - m.chi(i, j - 1)) / (2 * g.hy());
      const cplx dz = 0.5 * (dx - cplx{0, 1} * dy), dzb = 0.5 * (dx + cplx{0, 1} * dy);
      worst = std::max(worst, std::abs(dzb / dz - sigma(i, j)));
    }
  }
  CHECK(worst < 1e-3);

  for (const cplx p : {cplx{0.1, 0.2}, cplx{-0.4, 0.3}, cplx{0.5, -0.5}}) {
    CHECK(std::abs(m.invert(m.eval(p)) - p) < 1e-10);
  }
  CHECK(std::abs(m.eval_extended(g.node(40, 50)) - m.chi(40, 50)) < 1e-13);
  const cplx far{1.4, -1.3};
  CHECK(std::abs(m.eval_extended(m.invert_extended(far)) - far) < 1e-12);
  CHECK_THROWS_AS(m.invert({5.0, 5.0}), DomainError);
}

TEST_CASE("sigma at or above one is refused") {
  const GridSpec g{-1, 1, -1, 1, 16, 16};
  CHECK_THROWS_AS(solve_beltrami(CField(g, cplx{1.0, 0.0}), g), DomainError);
  CHECK_THROWS_AS(solve_beltrami(CField(g, cplx{0.95, 0.0}), g), DomainError);
}
