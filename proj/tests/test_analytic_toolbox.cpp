#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ceik/analytic.hpp"
#include "oracles.hpp"

using namespace ceik;

namespace {

const oracle::Terms kTerms{{-2, {0.3, -0.1}}, {0, {1.0, 0.5}}, {1, {-0.7, 0.2}}, {3, {0.1, 0.4}}};

AnalyticFunction sample_laurent(Ring ring = {}) {
  std::vector<LaurentTerm> v;
  for (const auto& [k, c] : kTerms) v.push_back({k, c});
  return AnalyticFunction::laurent(v, ring);
}

}  // namespace

TEST_CASE("laurent evaluation and derivative match a plain power sum") {
  const AnalyticFunction f = sample_laurent();
  const AnalyticFunction df = f.derivative();
  oracle::Rng rng(1);
  for (int k = 0; k < 200; ++k) {
    const cplx z = rng.in_annulus(0.2, 3.0);
    CHECK(std::abs(f(z) - oracle::laurent_sum(kTerms, z)) < 1e-12 * (1 + std::abs(f(z))));
    CHECK(std::abs(df(z) - oracle::laurent_derivative(kTerms, z)) <
          1e-12 * (1 + std::abs(df(z))));
  }
}

TEST_CASE("laurent terms are sorted and duplicates rejected") {
  const AnalyticFunction f = AnalyticFunction::laurent({{2, {1.0, 1.0}}, {-1, 2.0}});
  REQUIRE(f.terms().size() == 2);
  CHECK(f.terms()[0].exponent == -1);
  CHECK(f.coefficient(2) == cplx{1.0, 1.0});
  CHECK(f.coefficient(5) == cplx{});
  CHECK_THROWS_AS(AnalyticFunction::laurent({{2, 1.0}, {2, 3.0}}), DomainError);
}

TEST_CASE("evaluation outside the ring is refused") {
  const AnalyticFunction f = sample_laurent({0.5, 2.0});
  CHECK_NOTHROW(f(1.0));
  CHECK_THROWS_AS(f(0.25), DomainError);
  CHECK_THROWS_AS(f(cplx{0.0, 3.0}), DomainError);
}

TEST_CASE("conjugate reflection") {
  const AnalyticFunction f = sample_laurent();
  const AnalyticFunction g = f.conjugate_reflection();
  for (const cplx z : {cplx{0.4, 0.9}, cplx{-1.5, 0.2}}) {
    CHECK(std::abs(g(z) - std::conj(f(std::conj(z)))) < 1e-13);
  }
}

TEST_CASE("exponential kind") {
  const cplx c{0.5, -1.0}, r{0.3, 0.7};
  const AnalyticFunction f = AnalyticFunction::exponential(c, r);
  const cplx z{0.4, -1.1};
  CHECK(std::abs(f(z) - c * std::exp(r * z)) < 1e-14);
  CHECK(std::abs(f.derivative()(z) - c * r * std::exp(r * z)) < 1e-14);
}

TEST_CASE("poisson kind vanishes at the origin") {
  const AnalyticFunction f = AnalyticFunction::poisson(kPi / 2);
  CHECK(std::abs(f(0.0)) < 1e-15);
}

TEST_CASE("poisson kind agrees with direct kernel quadrature") {
  for (const double tau : {kPi / 3, kPi / 2, 2.5}) {
    const AnalyticFunction f = AnalyticFunction::poisson(tau);
    for (const cplx z : {cplx{0.3, 0.1}, cplx{-0.5, -0.6}, cplx{0.85, 0.0}, cplx{1.7, 0.9}}) {
      CHECK(std::abs(f(z) - oracle::poisson_hinge(tau, z)) < 1e-8);
    }
  }
}

TEST_CASE("poisson boundary data: zero off the arc, hinge on it") {
  const double tau = 1.2;
  const AnalyticFunction f = AnalyticFunction::poisson(tau);
  for (int k = 0; k < 40; ++k) {
    const double th = -tau + 2 * tau * (k + 0.5) / 40;
    const cplx e = std::polar(1.0, th);
    CHECK(std::abs((f(e) * std::conj(e)).real()) < 1e-8);
  }
  for (const double th : {1.5, 2.0, 3.0, -2.4}) {
    const cplx e = std::polar(1.0, th);
    CHECK((f((1 - 1e-10) * e) * std::conj(e)).real() ==
          doctest::Approx(std::abs(th) - tau).epsilon(1e-8));
  }
  CHECK(f.on_excluded_arc(std::polar(1.0, 2.0)));
  CHECK_FALSE(f.on_excluded_arc(std::polar(1.0, 0.5)));
  CHECK_THROWS_AS(f(std::polar(1.0, 2.0)), DomainError);
}

TEST_CASE("poisson derivative matches central differences") {
  const AnalyticFunction f = AnalyticFunction::poisson(kPi / 2);
  const AnalyticFunction df = f.derivative();
  CHECK(df.derivative_order() == 1);
  for (const cplx z : {cplx{0.4, 0.3}, cplx{-0.2, 0.7}, cplx{1.5, -0.2}}) {
    double prev = 1e300;
    for (const double h : {1e-2, 1e-3}) {
      const cplx fd = (f(z + h) - f(z - h)) / (2 * h);
      const double err = std::abs(df(z) - fd);
      CHECK(err < prev);
      prev = err;
    }
    CHECK(prev < 1e-6);
  }
}

TEST_CASE("primitive of f / zeta^2 differentiates back") {
  const AnalyticFunction f = sample_laurent();
  const ZetaSquaredPrimitive P = antiderivative_over_zeta_squared(f);
  CHECK(P.has_log());
  for (const cplx z : {cplx{0.8, 0.6}, cplx{-1.2, 0.5}, cplx{2.0, -1.0}}) {
    const cplx dP = oracle::wirtinger([&](cplx q) { return P(q); }, z, 1e-4).first;
    CHECK(std::abs(dP - f(z) / (z * z)) < 1e-8);
  }
  const AnalyticFunction g = AnalyticFunction::polynomial({1.0, 0.0, 2.0});
  CHECK_FALSE(antiderivative_over_zeta_squared(g).has_log());
}

TEST_CASE("log term jumps across its cut") {
  const AnalyticFunction f = AnalyticFunction::polynomial({0.0, 1.0});
  const ZetaSquaredPrimitive P(f, kPi);
  const cplx above{-1.0, 1e-9}, below{-1.0, -1e-9};
  CHECK(std::abs(P(above) - P(below) - cplx{0, 2 * kPi}) < 1e-6);
}

TEST_CASE("numerical primitive for the poisson kind") {
  const AnalyticFunction f = AnalyticFunction::poisson(kPi / 2);
  const ZetaSquaredPrimitive P(f);
  for (const cplx z : {cplx{0.5, 0.3}, cplx{1.6, 0.4}}) {
    const cplx dP = oracle::wirtinger([&](cplx q) { return P(q); }, z, 1e-3).first;
    CHECK(std::abs(dP - f(z) / (z * z)) < 1e-6);
  }
}

TEST_CASE("analyticity defect and circle scale") {
  const AnalyticFunction f = sample_laurent();
  CHECK(max_dbar_defect(f, 0.5, 2.0, 50, 3) < 1e-6);
  const AnalyticFunction g = AnalyticFunction::polynomial({0.0, 0.0, 3.0});
  CHECK(circle_scale(g) == doctest::Approx(3.0));
}
