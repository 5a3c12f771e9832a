#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ceik/eikonal_constant.hpp"
#include "oracles.hpp"

using namespace ceik;

namespace {

const oracle::Terms kTerms{{0, {0.4, -0.2}}, {1, {0.3, 0.1}}, {2, {-0.6, 0.5}}};

ParametrizedEikonal sample() {
  std::vector<LaurentTerm> v;
  for (const auto& [k, c] : kTerms) v.push_back({k, c});
  return ParametrizedEikonal(AnalyticFunction::laurent(v));
}

cplx z_direct(cplx zeta) {
  const cplx f = oracle::laurent_sum(kTerms, zeta);
  const double r2 = std::norm(zeta);
  return (f + zeta * zeta * std::conj(f)) / (1 - r2 * r2);
}

const cplx kPoints[] = {{0.3, 0.4}, {-0.5, 0.1}, {1.4, -0.8}, {-2.0, 1.1}, {0.1, -1.3}};

}  // namespace

TEST_CASE("z matches the direct hyperbola formula") {
  const ParametrizedEikonal e = sample();
  for (const cplx p : kPoints) CHECK(std::abs(e.z(p) - z_direct(p)) < 1e-13 * (1 + std::abs(e.z(p))));
}

TEST_CASE("z and phi derivatives match difference quotients") {
  const ParametrizedEikonal e = sample();
  for (const cplx p : kPoints) {
    const ZJet j = e.z_jet(p);
    const auto dz = oracle::wirtinger(z_direct, p, 1e-4);
    CHECK(std::abs(j.d.d_zeta - dz.first) < 1e-7 * (1 + std::abs(dz.first)));
    CHECK(std::abs(j.d.d_zeta_bar - dz.second) < 1e-7 * (1 + std::abs(dz.second)));
    const WirtingerPair dp = e.phi_wirtinger(p);
    const auto fd = oracle::wirtinger([&](cplx q) { return e.phi(q); }, p, 1e-4);
    CHECK(std::abs(dp.d_zeta - fd.first) < 1e-7 * (1 + std::abs(fd.first)));
    CHECK(std::abs(dp.d_zeta_bar - fd.second) < 1e-7 * (1 + std::abs(fd.second)));
  }
}

TEST_CASE("eikonal residual is at rounding level") {
  const ParametrizedEikonal e = sample();
  oracle::Rng rng(5);
  for (int k = 0; k < 500; ++k) {
    const cplx p = rng.complex(2.5);
    const double r2 = std::norm(p);
    if (std::abs(1 - r2 * r2) < 1e-2 || std::abs(p) < 1e-2) continue;
    const ResidualReport r = e.eikonal_residual(p);
    if (!r.degenerate) CHECK(r.value < 1e-9);
  }
}

TEST_CASE("distance function spot value") {
  const ParametrizedEikonal e(AnalyticFunction::polynomial({-1.0, 0.0, -1.0}));
  CHECK(std::abs(e.z(2.0) - 5.0 / 3.0) < 1e-12);
  CHECK(std::abs(e.phi(2.0) - 4.0 / 3.0) < 1e-12);
  CHECK(std::abs(e.with_constant({0.5, 1.0}).phi(2.0) - cplx{4.0 / 3.0 + 0.5, 1.0}) < 1e-12);
}

TEST_CASE("unit circle and origin are refused") {
  const ParametrizedEikonal e = sample();
  CHECK_THROWS_AS(e.z(std::polar(1.0, 0.3)), DomainError);
  CHECK_THROWS_AS(e.phi(0.0), DomainError);
}

TEST_CASE("grad v agrees with the Legendre inversion of difference quotients") {
  const ParametrizedEikonal e = sample();
  for (const cplx p : kPoints) {
    const auto dphi = oracle::wirtinger([&](cplx q) { return e.phi(q); }, p, 1e-4);
    const auto dz = oracle::wirtinger(z_direct, p, 1e-4);
    // [phi_zeta, phi_zetabar] = [[z_zeta, conj z_zetabar], [z_zetabar, conj z_zeta]] [phi_z, phi_zbar]
    const cplx a = dz.first, b = std::conj(dz.second), c = dz.second, d = std::conj(dz.first);
    const cplx det = a * d - b * c;
    const cplx pz = (dphi.first * d - b * dphi.second) / det;
    const cplx pzb = (a * dphi.second - c * dphi.first) / det;
    // v = (phi - conj phi) / 2i, so v_zbar = (phi_zbar - conj(phi_z)) / 2i.
    const cplx v_zbar = (pzb - std::conj(pz)) / (2.0 * kI);
    const cplx want = 2.0 * v_zbar;
    CHECK(std::abs(e.grad_v(p) - want) < 1e-6 * (1 + std::abs(want)));
  }
}

TEST_CASE("legendre inversion of a linear map") {
  const cplx a{0.2, 0.3};
  // z = zeta + a conj(zeta), g = zeta^2.
  const WirtingerPair dz{1.0, a};
  const cplx zeta{0.7, -0.4};
  const WirtingerPair dg{2.0 * zeta, 0.0};
  double jac = 0;
  const WirtingerPair inv = legendre_invert(dg, dz, &jac);
  CHECK(jac == doctest::Approx(1 - std::norm(a)));
  // zeta = (z - a conj z)/(1 - |a|^2): zeta_z = 1/(1-|a|^2), zeta_zbar = -a/(1-|a|^2).
  const double s = 1 - std::norm(a);
  CHECK(std::abs(inv.d_zeta - 2.0 * zeta / s) < 1e-14);
  CHECK(std::abs(inv.d_zeta_bar + 2.0 * zeta * a / s) < 1e-14);
}

TEST_CASE("quadratic closed form recovers zeta and phi up to a constant") {
  const cplx f0{0.4, -0.2}, f1{0.3, 0.1}, f2{-0.6, 0.5};
  const ParametrizedEikonal e = sample();
  cplx ref{};
  bool first = true;
  for (const cplx p : {cplx{1.5, 0.2}, cplx{1.8, 0.9}, cplx{1.3, -0.5}}) {
    const auto br = quadratic_closed_form(f0, f1, f2, e.z(p));
    const QuadraticBranch& b = std::abs(br[0].zeta - p) < std::abs(br[1].zeta - p) ? br[0] : br[1];
    CHECK(std::abs(b.zeta - p) < 1e-12);
    const cplx d = e.phi(p) - b.phi;
    if (first) ref = d;
    first = false;
    CHECK(std::abs(d - ref) < 1e-12);
  }
  CHECK_THROWS_AS(quadratic_closed_form(f0, f1, f2, -std::conj(f2)), SingularError);
}

TEST_CASE("segments crossing the log cut are detected") {
  const ParametrizedEikonal e = sample();
  CHECK(e.segment_crosses_cut({-1.0, 0.5}, {-1.0, -0.5}));
  CHECK_FALSE(e.segment_crosses_cut({1.0, 0.5}, {1.0, -0.5}));
}
