#pragma once

// Reference computations written without the library's own evaluators.

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <utility>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;
using Terms = std::vector<std::pair<int, cplx>>;

inline constexpr double pi = std::numbers::pi;

inline cplx laurent_sum(const Terms& terms, cplx z) {
  cplx acc{};
  for (const auto& [k, c] : terms) acc += c * std::pow(z, k);
  return acc;
}

inline cplx laurent_derivative(const Terms& terms, cplx z) {
  cplx acc{};
  for (const auto& [k, c] : terms) {
    if (k != 0) acc += static_cast<double>(k) * c * std::pow(z, k - 1);
  }
  return acc;
}

// d/dzeta and d/dzetabar by Richardson-extrapolated central differences.
template <class F>
std::pair<cplx, cplx> wirtinger(F&& fn, cplx z, double h) {
  auto partial = [&](cplx dir) {
    auto d = [&](double s) { return (fn(z + s * dir) - fn(z - s * dir)) / (2.0 * s); };
    return (4.0 * d(h / 2) - d(h)) / 3.0;
  };
  const cplx dx = partial({1.0, 0.0});
  const cplx dy = partial({0.0, 1.0});
  return {0.5 * (dx - cplx{0, 1} * dy), 0.5 * (dx + cplx{0, 1} * dy)};
}

// zeta times the Schwarz integral of the hinge profile max(|s| - tau, 0),
// composite Simpson on both halves of the arc. Only meant for zeta away from
// the unit circle.
inline cplx poisson_hinge(double tau, cplx zeta, int panels = 20000) {
  auto integrand = [&](double s) {
    const cplx e = std::polar(1.0, s);
    return (std::abs(s) - tau) * (e + zeta) / (e - zeta);
  };
  auto simpson = [&](double a, double b) {
    const double h = (b - a) / panels;
    cplx acc = integrand(a) + integrand(b);
    for (int k = 1; k < panels; ++k) acc += (k % 2 ? 4.0 : 2.0) * integrand(a + k * h);
    return acc * h / 3.0;
  };
  return zeta * (simpson(tau, pi) + simpson(-pi, -tau)) / (2.0 * pi);
}

struct Rng {
  explicit Rng(unsigned seed) : gen(seed) {}
  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(gen); }
  cplx complex(double scale) { return {uniform(-scale, scale), uniform(-scale, scale)}; }
  cplx in_annulus(double r0, double r1) {
    return std::polar(uniform(r0, r1), uniform(-pi, pi));
  }
  std::mt19937_64 gen;
};

}  // namespace oracle
