#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ceik/field.hpp"
#include "oracles.hpp"

using namespace ceik;

TEST_CASE("leading term of the evanescent field") {
  const FieldSample s = field_sample({0.1, 0.2}, {0.7, -0.3}, 5.0, 0.1);
  CHECK(s.u == 0.7);
  CHECK(s.v == doctest::Approx(-0.4));
  CHECK(s.W_leading == doctest::Approx(std::exp(5.0 * -0.4) * std::cos(5.0 * 0.7)));
}

TEST_CASE("batch evaluation counts growing samples and checks its input") {
  const std::vector<cplx> z{{0, 0}, {1, 0}, {2, 0}};
  const std::vector<cplx> phi{{0.0, -1.0}, {0.5, 0.2}, {1.0, 0.05}};
  const FieldBatch b = eval_field(z, phi, 3.0, 0.1);
  REQUIRE(b.samples.size() == 3);
  CHECK(b.positive_v == 1);
  CHECK(b.samples[2].v == doctest::Approx(-0.05));
  CHECK_THROWS_AS(eval_field(z, {phi[0]}, 3.0), DomainError);
  CHECK_THROWS_AS(eval_field(z, phi, 0.0), DomainError);
  CHECK_THROWS_AS(eval_field(z, phi, -2.0), DomainError);
}

TEST_CASE("phi at a light limit point is the radial limit of phi") {
  const ParametrizedEikonal e(AnalyticFunction::polynomial({-1.0, 0.0, -1.0}));
  const double th = kPi / 2;
  const cplx lim = light_phi_limit(e, th);
  double prev = 1e300;
  for (const double eps : {1e-3, 1e-4, 1e-5}) {
    const double err = std::abs(e.phi((1 - eps) * std::polar(1.0, th)) - lim);
    CHECK(err < prev);
    prev = err;
  }
  CHECK(prev < 1e-3);
}

TEST_CASE("light samples over points and arcs") {
  const ParametrizedEikonal e(AnalyticFunction::polynomial({-1.0, 0.0, -1.0}));
  const SPhiSet s = find_S_phi(e.f());
  const auto light = light_samples(e, s, 4);
  CHECK(light.size() == s.points.size());
  double vmax = -1e300;
  for (const auto& l : light) {
    CHECK(std::abs(l.z - boundary_limit_point(e.f(), l.theta)) == 0.0);
    vmax = std::max(vmax, l.phi.imag());
  }
  CHECK(light_v_max(light) == vmax);
  CHECK(light_v_max({}) == 0.0);

  const ParametrizedEikonal p(AnalyticFunction::poisson(1.0));
  SPhiOptions o;
  o.resolution = 512;
  const SPhiSet sp = find_S_phi(p.f(), o);
  REQUIRE(sp.arcs.size() == 1);
  CHECK(light_samples(p, sp, 6).size() == sp.points.size() + 6);
}
