#include "ceik/grid.hpp"

#include <algorithm>
#include <cmath>

namespace ceik {

namespace {

// First derivative of the n samples u[0], u[s], u[2s], ... written to out
// with the same stride.
void diff_line(const cplx* u, cplx* out, int n, std::ptrdiff_t s, double h) {
  const double k = 1.0 / (12.0 * h);
  auto at = [&](int i) { return u[i * s]; };
  if (n < 5) {
    for (int i = 0; i < n; ++i) {
      const int a = std::max(i - 1, 0), b = std::min(i + 1, n - 1);
      out[i * s] = b > a ? (at(b) - at(a)) / ((b - a) * h) : cplx{};
    }
    return;
  }
  // Written on differences so that constant data gives exact zeros.
  out[0] = (48.0 * (at(1) - at(0)) - 36.0 * (at(2) - at(0)) + 16.0 * (at(3) - at(0)) -
            3.0 * (at(4) - at(0))) * k;
  out[s] = (3.0 * (at(1) - at(0)) + 18.0 * (at(2) - at(1)) - 6.0 * (at(3) - at(1)) +
            (at(4) - at(1))) * k;
  for (int i = 2; i < n - 2; ++i) {
    out[i * s] = (8.0 * (at(i + 1) - at(i - 1)) - (at(i + 2) - at(i - 2))) * k;
  }
  const int m = n - 1;
  out[(m - 1) * s] = (3.0 * (at(m - 1) - at(m)) + 18.0 * (at(m - 2) - at(m - 1)) -
                      6.0 * (at(m - 3) - at(m - 1)) + (at(m - 4) - at(m - 1))) * -k;
  out[m * s] = (48.0 * (at(m - 1) - at(m)) - 36.0 * (at(m - 2) - at(m)) +
                16.0 * (at(m - 3) - at(m)) - 3.0 * (at(m - 4) - at(m))) * -k;
}

double keys(double t, int which) {
  switch (which) {
    case -1:
      return ((-0.5 * t + 1.0) * t - 0.5) * t;
    case 0:
      return (1.5 * t - 2.5) * t * t + 1.0;
    case 1:
      return ((-1.5 * t + 2.0) * t + 0.5) * t;
    default:
      return (0.5 * t - 0.5) * t * t;
  }
}

}  // namespace

CField diff_x(const CField& u, const GridSpec& g) {
  CField out(u.nx(), u.ny());
  for (int j = 0; j < u.ny(); ++j) diff_line(&u(0, j), &out(0, j), u.nx(), 1, g.hx());
  return out;
}

CField diff_y(const CField& u, const GridSpec& g) {
  CField out(u.nx(), u.ny());
  for (int i = 0; i < u.nx(); ++i) diff_line(&u(i, 0), &out(i, 0), u.ny(), u.nx(), g.hy());
  return out;
}

WirtingerFields wirtinger_fd(const CField& u, const GridSpec& g) {
  const CField dx = diff_x(u, g);
  const CField dy = diff_y(u, g);
  WirtingerFields w{CField(u.nx(), u.ny()), CField(u.nx(), u.ny())};
  for (std::size_t k = 0; k < u.size(); ++k) {
    const WirtingerPair p = from_partials(dx[k], dy[k]);
    w.d_zeta[k] = p.d_zeta;
    w.d_zeta_bar[k] = p.d_zeta_bar;
  }
  return w;
}

bool in_lattice(const GridSpec& g, cplx at) {
  const double fi = g.fi(at), fj = g.fj(at);
  return fi >= 0.0 && fi <= g.nx - 1 && fj >= 0.0 && fj <= g.ny - 1;
}

cplx interp_bilinear(const CField& u, const GridSpec& g, cplx at) {
  const double fi = std::clamp(g.fi(at), 0.0, static_cast<double>(g.nx - 1));
  const double fj = std::clamp(g.fj(at), 0.0, static_cast<double>(g.ny - 1));
  const int i = std::min(static_cast<int>(fi), g.nx - 2);
  const int j = std::min(static_cast<int>(fj), g.ny - 2);
  const double s = fi - i, t = fj - j;
  return (1 - s) * (1 - t) * u(i, j) + s * (1 - t) * u(i + 1, j) + (1 - s) * t * u(i, j + 1) +
         s * t * u(i + 1, j + 1);
}

cplx interp_bicubic(const CField& u, const GridSpec& g, cplx at) {
  const double fi = std::clamp(g.fi(at), 0.0, static_cast<double>(g.nx - 1));
  const double fj = std::clamp(g.fj(at), 0.0, static_cast<double>(g.ny - 1));
  const int i = std::min(static_cast<int>(std::floor(fi)), g.nx - 1);
  const int j = std::min(static_cast<int>(std::floor(fj)), g.ny - 1);
  const double s = fi - i, t = fj - j;
  cplx acc{};
  for (int b = -1; b <= 2; ++b) {
    const int jj = std::clamp(j + b, 0, g.ny - 1);
    const double wy = keys(t, b);
    if (wy == 0.0) continue;
    cplx row{};
    for (int a = -1; a <= 2; ++a) {
      const double wx = keys(s, a);
      if (wx == 0.0) continue;
      row += wx * u(std::clamp(i + a, 0, g.nx - 1), jj);
    }
    acc += wy * row;
  }
  return acc;
}

cplx interp_bicubic_periodic(const CField& u, const GridSpec& g, cplx at) {
  const double fi = g.fi(at), fj = g.fj(at);
  const double i0 = std::floor(fi), j0 = std::floor(fj);
  const double s = fi - i0, t = fj - j0;
  auto wrap = [](double k, int n) {
    const int m = static_cast<int>(std::fmod(k, static_cast<double>(n)));
    return m < 0 ? m + n : m;
  };
  cplx acc{};
  for (int b = -1; b <= 2; ++b) {
    const double wy = keys(t, b);
    if (wy == 0.0) continue;
    const int jj = wrap(j0 + b, g.ny);
    cplx row{};
    for (int a = -1; a <= 2; ++a) {
      const double wx = keys(s, a);
      if (wx == 0.0) continue;
      row += wx * u(wrap(i0 + a, g.nx), jj);
    }
    acc += wy * row;
  }
  return acc;
}

}  // namespace ceik
