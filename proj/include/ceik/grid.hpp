#pragma once

#include <cstddef>
#include <vector>

#include "ceik/core.hpp"
#include "ceik/wirtinger.hpp"

namespace ceik {

// Rectangular lattice over [x0, x1) x [y0, y1) with nx * ny nodes at
// x_i = x0 + i hx, hx = (x1 - x0)/nx (same in y). The half-open layout is the
// periodic one used by the spectral solvers; the node at (nx/2, ny/2) is the
// centre of a symmetric box.
struct GridSpec {
  double x0 = -1, x1 = 1, y0 = -1, y1 = 1;
  int nx = 64, ny = 64;

  double hx() const { return (x1 - x0) / nx; }
  double hy() const { return (y1 - y0) / ny; }
  cplx node(int i, int j) const { return {x0 + i * hx(), y0 + j * hy()}; }
  int ci() const { return nx / 2; }
  int cj() const { return ny / 2; }
  std::size_t size() const { return static_cast<std::size_t>(nx) * ny; }

  // Fractional node coordinates of a point.
  double fi(cplx z) const { return (z.real() - x0) / hx(); }
  double fj(cplx z) const { return (z.imag() - y0) / hy(); }
};

template <class T>
class Field2D {
 public:
  Field2D() = default;
  Field2D(int nx, int ny, T init = T{}) : nx_(nx), ny_(ny), v_(static_cast<std::size_t>(nx) * ny, init) {}
  explicit Field2D(const GridSpec& g, T init = T{}) : Field2D(g.nx, g.ny, init) {}

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  std::size_t size() const { return v_.size(); }

  T& operator()(int i, int j) { return v_[static_cast<std::size_t>(j) * nx_ + i]; }
  const T& operator()(int i, int j) const { return v_[static_cast<std::size_t>(j) * nx_ + i]; }
  T& operator[](std::size_t k) { return v_[k]; }
  const T& operator[](std::size_t k) const { return v_[k]; }

  T* data() { return v_.data(); }
  const T* data() const { return v_.data(); }
  std::vector<T>& values() { return v_; }
  const std::vector<T>& values() const { return v_; }

 private:
  int nx_ = 0, ny_ = 0;
  std::vector<T> v_;
};

using CField = Field2D<cplx>;
using RField = Field2D<double>;

// Derivatives along x and y: fourth-order central differences in the
// interior, fourth-order one-sided stencils within two nodes of the edge.
CField diff_x(const CField& u, const GridSpec& g);
CField diff_y(const CField& u, const GridSpec& g);

struct WirtingerFields {
  CField d_zeta, d_zeta_bar;
};
WirtingerFields wirtinger_fd(const CField& u, const GridSpec& g);

// Index box [i0, i1) x [j0, j1).
struct IndexBox {
  int i0 = 0, i1 = 0, j0 = 0, j1 = 0;
  bool contains(int i, int j) const { return i >= i0 && i < i1 && j >= j0 && j < j1; }
  bool empty() const { return i1 <= i0 || j1 <= j0; }
};

// Bilinear interpolation; points outside the lattice are clamped to it.
cplx interp_bilinear(const CField& u, const GridSpec& g, cplx at);

// Cubic convolution (Keys, a = -1/2) with clamped edges; reproduces nodal
// values exactly.
cplx interp_bicubic(const CField& u, const GridSpec& g, cplx at);

// Cubic convolution treating u as periodic with periods (x1 - x0, y1 - y0).
cplx interp_bicubic_periodic(const CField& u, const GridSpec& g, cplx at);

// Whether `at` lies inside the lattice hull [x_0, x_{n-1}] x [y_0, y_{n-1}].
bool in_lattice(const GridSpec& g, cplx at);

}  // namespace ceik
