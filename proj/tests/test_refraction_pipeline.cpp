#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ceik/refraction.hpp"
#include "oracles.hpp"

using namespace ceik;

TEST_CASE("gaussian profile derivatives match difference quotients") {
  EllProfile p;
  p.name = "gaussian";
  p.value = 0.2;
  p.amplitude = 0.3;
  p.center = {0.5, -0.2};
  p.width = 0.7;
  for (const cplx z : {cplx{0.1, 0.4}, cplx{1.2, -0.3}}) {
    const LogIndexJet j = p(z);
    const auto fd = oracle::wirtinger([&](cplx q) { return cplx{p(q).ell, 0.0}; }, z, 1e-4);
    CHECK(std::abs(j.ell_zeta - fd.first) < 1e-9);
    CHECK(std::abs(j.ell_zeta_bar - fd.second) < 1e-9);
  }
  EllProfile bad;
  bad.name = "ramp";
  CHECK_THROWS_AS(bad(0.5), ConfigError);
}

TEST_CASE("refraction field kinds") {
  CHECK_THROWS_AS(RefractionField::constant(-1.0), ConfigError);
  const RefractionField c = RefractionField::constant(2.0);
  CHECK(c.ell_in_zeta({0.3, 0.1}).ell == doctest::Approx(std::log(2.0)));
  const RefractionField w =
      RefractionField::mod_analytic(AnalyticFunction::exponential(1.0, {0.5, 0.2}));
  const cplx z{0.4, -0.7};
  const LogIndexJet j = w.ell_in_z(z);
  auto ell = [](cplx q) {
    return cplx{std::log(std::abs(cplx{0.5, 0.2} * std::exp(cplx{0.5, 0.2} * q))), 0.0};
  };
  const auto fd = oracle::wirtinger(ell, z, 1e-4);
  CHECK(std::abs(j.ell_zeta - fd.first) < 1e-9);
  CHECK(std::abs(j.ell_zeta_bar - fd.second) < 1e-9);
  const RefractionField pe = RefractionField::parametric_ell({});
  CHECK_THROWS_AS(pe.ell_in_z(z), DomainError);
}

TEST_CASE("chain rule for the log index") {
  // z = 2 zeta: l_zeta = 2 l_z.
  const LogIndexJet in{0.1, {0.3, 0.2}, {0.3, -0.2}};
  const LogIndexJet out = chain_rule_ell(in, {2.0, 0.0});
  CHECK(std::abs(out.ell_zeta - 2.0 * in.ell_zeta) < 1e-15);
  CHECK(std::abs(out.ell_zeta_bar - 2.0 * in.ell_zeta_bar) < 1e-15);
}

TEST_CASE("constant log index gives sigma 0 and kappa zeta^2") {
  oracle::Rng rng(3);
  int elliptic = 0;
  for (int k = 0; k < 300; ++k) {
    const cplx z = rng.complex(2.5);
    const CoefficientPoint p = compute_coefficients({0.4, 0.0, 0.0}, z);
    if (!p.valid) continue;
    const Abcd& a = p.abcd;
    CHECK(std::abs(a.a - 1.0) < 1e-15);
    CHECK(std::abs(a.b) == 0.0);
    CHECK(std::abs(a.c - 1.0 / (z * z)) < 1e-14 * std::abs(a.c));
    if (p.elliptic) {
      ++elliptic;
      CHECK(std::abs(p.sigma) == 0.0);
      CHECK(std::abs(p.kappa - z * z) < 1e-12 * (1 + std::norm(z)));
    }
  }
  CHECK(elliptic > 0);
}

TEST_CASE("re-derived quotients agree with the direct solve from a, b, c, d") {
  oracle::Rng rng(9);
  int compared = 0;
  for (int k = 0; k < 300; ++k) {
    const cplx z = rng.in_annulus(0.3, 2.5);
    const cplx lz = rng.complex(0.4);
    const Abcd a = coeffs_abcd(lz, std::conj(lz), z);
    try {
      const MuNu r = mu_nu_rederived(coeffs_A(a));
      const MuNu d = mu_nu_from_abcd(a);
      const double s = 1 + std::abs(d.mu) + std::abs(d.nu);
      CHECK(std::abs(r.mu - d.mu) < 1e-9 * s);
      CHECK(std::abs(r.nu - d.nu) < 1e-9 * s);
      ++compared;
    } catch (const SingularError&) {
    }
  }
  CHECK(compared > 200);
}

TEST_CASE("sigma is a Beltrami coefficient inside the elliptic set") {
  oracle::Rng rng(4);
  for (int k = 0; k < 200; ++k) {
    const cplx z = rng.in_annulus(0.3, 2.5);
    const cplx lz = rng.complex(0.5);
    const CoefficientPoint p = compute_coefficients({0.0, lz, std::conj(lz)}, z);
    if (!p.valid) continue;
    if (p.elliptic) {
      CHECK(std::abs(p.sigma) < 1.0);
    } else {
      CHECK_THROWS_AS(sigma_from_A(p.A), DomainError);
    }
  }
}

TEST_CASE("kappa and B, C formulas") {
  const cplx mu{0.1, 0.2}, nu{0.3, -0.1}, s{0.2, 0.05};
  CHECK(std::abs(kappa_from(mu, nu, s) - nu / (1.0 - mu * std::conj(s))) < 1e-15);
  const cplx k{0.4, 0.3}, kcb{0.2, -0.6};
  const BC bc = coeffs_BC(k, kcb);
  const cplx C = -kcb / (1 - std::norm(k));
  CHECK(std::abs(bc.C - C) < 1e-15);
  CHECK(std::abs(bc.B - std::conj(k) * C) < 1e-15);
  CHECK_THROWS_AS(coeffs_BC(std::polar(1.0, 0.4), kcb), SingularError);
}

TEST_CASE("difference-quotient audit of the reduced equation") {
  const AnalyticFunction f = AnalyticFunction::polynomial({-1.0, 0.0, -1.0});
  const OracleReport r = coefficient_oracle(f, 200, 17);
  CHECK(r.samples == 200);
  CHECK(r.inverse_schwarz_max < 1e-8);
  CHECK(r.rederived_max < 1e-8);
  // The quotients as printed do not satisfy the reduced equation.
  CHECK(r.literal_max > 1e-3);
}

TEST_CASE("biholomorphic reduction solves the eikonal with n = |w'|") {
  const ReducedEikonal red = biholomorphic_reduction(AnalyticFunction::polynomial({0.0, 0.0, 1.0}),
                                                     AnalyticFunction::polynomial({0.5, 1.0}));
  for (const cplx zeta : {cplx{1.5, 0.4}, cplx{0.4, -0.5}, cplx{-2.0, 0.3}}) {
    const cplx w = red.psi().z(zeta);
    const ReducedEikonal::Sample s = red.sample(zeta, std::sqrt(w));
    CHECK(std::abs(s.z * s.z - w) < 1e-12 * (1 + std::abs(w)));
    CHECK(s.n == doctest::Approx(2 * std::abs(s.z)));
    CHECK(s.residual < 1e-10);
  }
}
