#include "ceik/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <fftw3.h>

namespace ceik {

struct PeriodicOps::Impl {
  int nx, ny;
  fftw_complex* buf = nullptr;
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
  std::vector<double> kx, ky;

  Impl(const GridSpec& g) : nx(g.nx), ny(g.ny) {
    buf = fftw_alloc_complex(static_cast<std::size_t>(nx) * ny);
    fwd = fftw_plan_dft_2d(ny, nx, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
    bwd = fftw_plan_dft_2d(ny, nx, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
    auto wave = [](int n, double len) {
      std::vector<double> k(n);
      for (int m = 0; m < n; ++m) {
        const int mm = m <= n / 2 ? m : m - n;
        k[m] = 2.0 * kPi * mm / len;
      }
      return k;
    };
    kx = wave(nx, g.x1 - g.x0);
    ky = wave(ny, g.y1 - g.y0);
  }
  ~Impl() {
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(bwd);
    fftw_free(buf);
  }
  cplx* data() { return reinterpret_cast<cplx*>(buf); }
};

PeriodicOps::PeriodicOps(const GridSpec& g) : g_(g), impl_(std::make_unique<Impl>(g)) {
  if (g.nx < 4 || g.ny < 4 || g.nx % 2 || g.ny % 2) {
    throw DomainError("spectral grid needs even sizes of at least 4");
  }
}

PeriodicOps::~PeriodicOps() = default;

CField PeriodicOps::dbar_inverse(const CField& g, cplx* mean) const {
  return apply(g, Op::dbar_inverse, mean);
}

CField PeriodicOps::beurling(const CField& h) const { return apply(h, Op::beurling, nullptr); }

CField PeriodicOps::apply(const CField& in, Op op, cplx* mean) const {
  Impl& m = *impl_;
  const int nx = m.nx, ny = m.ny;
  const double n = static_cast<double>(nx) * ny;
  cplx* b = m.data();
  std::copy(in.values().begin(), in.values().end(), b);
  fftw_execute(m.fwd);
  if (mean) *mean = b[0] / n;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      cplx& c = b[static_cast<std::size_t>(j) * nx + i];
      if ((i == 0 && j == 0) || i == nx / 2 || j == ny / 2) {
        c = 0.0;
        continue;
      }
      const cplx kk{m.kx[i], m.ky[j]};  // kx + i ky
      if (op == Op::dbar_inverse) {
        c /= 0.5 * kI * kk;
      } else {
        c *= std::conj(kk) / kk;
      }
    }
  }
  fftw_execute(m.bwd);
  CField out(nx, ny);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = b[k] / n;
  return out;
}

namespace {

double smooth_step(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / t);
  const double c = std::exp(-1.0 / (1.0 - t));
  return a / (a + c);
}

}  // namespace

RField taper_window(const GridSpec& g, double margin) {
  RField w(g, 1.0);
  if (margin <= 0.0) return w;
  const double lx = g.x1 - g.x0, ly = g.y1 - g.y0;
  std::vector<double> wx(g.nx), wy(g.ny);
  for (int i = 0; i < g.nx; ++i) {
    const double x = i * g.hx();
    wx[i] = smooth_step(std::min(x, lx - x) / (margin * lx));
  }
  for (int j = 0; j < g.ny; ++j) {
    const double y = j * g.hy();
    wy[j] = smooth_step(std::min(y, ly - y) / (margin * ly));
  }
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) w(i, j) = wx[i] * wy[j];
  return w;
}

IndexBox interior_box(const GridSpec& g, double margin, int pad) {
  const int bx = margin > 0.0 ? static_cast<int>(std::ceil(margin * g.nx)) : 0;
  const int by = margin > 0.0 ? static_cast<int>(std::ceil(margin * g.ny)) : 0;
  // x = i hx reaches the plateau at i >= margin nx; on the far side the
  // distance is (nx - i) hx.
  return {bx + pad, std::min(g.nx, g.nx - bx - pad + 1), by + pad,
          std::min(g.ny, g.ny - by - pad + 1)};
}

}  // namespace ceik
