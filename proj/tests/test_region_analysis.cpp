#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "ceik/eikonal_constant.hpp"
#include "ceik/region.hpp"
#include "oracles.hpp"

using namespace ceik;

namespace {

AnalyticFunction hyperbola() { return AnalyticFunction::polynomial({-1.0, 0.0, -1.0}); }

}  // namespace

TEST_CASE("ray system: unique point, line and inconsistent cases") {
  const cplx k{0.3, -0.4};
  const cplx rhs{1.0, 2.0};
  const RaySolution p = solve_ray_system(k, rhs);
  REQUIRE(p.rank == RaySolution::Rank::point);
  CHECK(std::abs(p.point - k * std::conj(p.point) - rhs) < 1e-14);
  CHECK(p.smallest_singular == doctest::Approx(1 - std::abs(k)));

  const cplx u = std::polar(1.0, 0.8);
  // Z - u conj(Z) is i times a real multiple of e^{i 0.4}, so that rhs is consistent.
  const cplx ok_rhs = 1.7 * kI * std::polar(1.0, 0.4);
  const RaySolution l = solve_ray_system(u, ok_rhs);
  REQUIRE(l.rank == RaySolution::Rank::line);
  CHECK(std::abs(l.point - u * std::conj(l.point) - ok_rhs) < 1e-12);
  CHECK(std::abs(l.direction - u * std::conj(l.direction)) < 1e-12);
  CHECK(std::abs(l.direction) == doctest::Approx(1.0));

  const RaySolution bad = solve_ray_system(u, std::polar(1.0, 0.4));
  CHECK(bad.rank == RaySolution::Rank::inconsistent);
}

TEST_CASE("ray determinant") {
  CHECK(ray_determinant(0.5, 1.0) == doctest::Approx(1 - 0.0625));
  CHECK(ray_determinant(1.0, 2.0) == doctest::Approx(0.0));
}

TEST_CASE("condition on the circle") {
  const AnalyticFunction f = hyperbola();
  for (const double th : {0.0, 0.7, 2.0, -1.1}) {
    CHECK(condition(f, th) == doctest::Approx(-2 * std::cos(th)));
  }
}

TEST_CASE("zero set for the hyperbola seed") {
  const SPhiSet s = find_S_phi(hyperbola());
  REQUIRE(s.points.size() == 2);
  CHECK(s.arcs.empty());
  std::vector<double> p = s.points;
  std::sort(p.begin(), p.end());
  CHECK(std::abs(p[0] + kPi / 2) < 1e-10);
  CHECK(std::abs(p[1] - kPi / 2) < 1e-10);
  CHECK(find_S_phi(AnalyticFunction::polynomial({0.0, 1.0})).points.empty());
}

TEST_CASE("zero set for the poisson seed is the arc (-tau, tau)") {
  const double tau = 1.0;
  SPhiOptions o;
  o.resolution = 512;
  const SPhiSet s = find_S_phi(AnalyticFunction::poisson(tau), o);
  REQUIRE(s.arcs.size() == 1);
  CHECK(std::abs(s.arcs[0].lo + tau) < 2 * kPi / 512);
  CHECK(std::abs(s.arcs[0].hi - tau) < 2 * kPi / 512);
  CHECK(s.in_arc(0.3));
  CHECK_FALSE(s.in_arc(2.0));
}

TEST_CASE("light segments and limit points") {
  const AnalyticFunction f = hyperbola();
  const Line l = light_segment(f, kPi / 2);
  CHECK(std::abs(l.point.real()) < 1e-12);
  CHECK(std::abs(l.direction.real()) < 1e-12);
  CHECK_THROWS_AS(light_segment(f, 0.0), DomainError);
  CHECK(std::abs(boundary_limit_point(f, kPi / 2)) < 1e-12);

  // Radial limit for a seed with a non-trivial limit point.
  const AnalyticFunction g = AnalyticFunction::polynomial({0.0, {0.0, 1.0}, 0.5});
  const SPhiSet s = find_S_phi(g);
  REQUIRE_FALSE(s.points.empty());
  const double th = s.points.front();
  const ParametrizedEikonal e(g);
  const cplx lim = boundary_limit_point(g, th);
  const double err = std::abs(e.z((1 - 1e-6) * std::polar(1.0, th)) - lim);
  CHECK(err < 1e-4);
}

TEST_CASE("caustic points live inside arcs only") {
  const double tau = 1.0;
  const AnalyticFunction f = AnalyticFunction::poisson(tau);
  const SPhiSet s = find_S_phi(f, {512});
  const cplx e = std::polar(1.0, 0.2);
  const cplx want = f(e) - 0.5 * e * f.derivative()(e);
  CHECK(std::abs(caustic_point(f, 0.2, s) - want) < 1e-10);
  CHECK_THROWS_AS(caustic_point(f, 2.0, s), DomainError);
  const auto poly = caustic_polyline(f, s.arcs[0], 64);
  CHECK(poly.size() == 64);
}

TEST_CASE("line clipping") {
  const BBox box{-1, 1, -1, 1};
  const auto seg = clip_line({{0.0, 5.0}, {0.0, 1.0}}, box);
  REQUIRE(seg);
  CHECK(std::abs(std::min(seg->a.imag(), seg->b.imag()) + 1) < 1e-14);
  CHECK(std::abs(std::max(seg->a.imag(), seg->b.imag()) - 1) < 1e-14);
  CHECK_FALSE(clip_line({{3.0, 0.0}, {0.0, 1.0}}, box));
}

TEST_CASE("classification of single samples") {
  const AnalyticFunction f = hyperbola();
  const ClassifiedSample out = classify(f, {2.0, 0.5});
  CHECK(out.category == Category::shadow);
  CHECK_FALSE(out.inside_disk);
  CHECK(std::abs(out.z - ParametrizedEikonal(f).z({2.0, 0.5})) < 1e-13);
  CHECK(classify(f, {0.3, 0.2}).inside_disk);
  CHECK(classify(f, std::polar(1.0, kPi / 2)).category == Category::light_segment);
  CHECK(classify(f, std::polar(1.0, 0.3)).category == Category::maps_to_infinity);
  CHECK(std::string(category_name(Category::shadow)) == "shadow");
}

TEST_CASE("polyline side test") {
  const std::vector<cplx> poly{{-1, 0}, {0, 0}, {1, 0}};
  CHECK(side_of_polyline(poly, {0.2, 0.5}) == 1);
  CHECK(side_of_polyline(poly, {-0.3, -0.5}) == -1);
  CHECK(side_of_polyline(poly, {2.0, 0.1}) == 0);
}

TEST_CASE("light sweep stays inside the box") {
  const BBox box{-2, 2, -2, 2};
  const auto segs = sweep_light_segments(AnalyticFunction::poisson(1.0),
                                         find_S_phi(AnalyticFunction::poisson(1.0), {512}), 8, box);
  CHECK_FALSE(segs.empty());
  for (const Segment& s : segs) {
    CHECK(box.contains(s.a * (1 - 1e-12)));
    CHECK(box.contains(s.b * (1 - 1e-12)));
  }
}
