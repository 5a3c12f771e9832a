#pragma once

#include <memory>

#include "ceik/grid.hpp"

namespace ceik {

// Fourier-side operators on the periodized lattice. Plans and buffers are
// owned by the object; one instance must not be used from two threads at once.
class PeriodicOps {
 public:
  explicit PeriodicOps(const GridSpec& g);
  ~PeriodicOps();
  PeriodicOps(const PeriodicOps&) = delete;
  PeriodicOps& operator=(const PeriodicOps&) = delete;

  // Periodic zero-mean u with u_zetabar = g - mean(g). The mean is returned
  // through `mean` (the part a periodic field cannot absorb).
  CField dbar_inverse(const CField& g, cplx* mean = nullptr) const;

  // Beurling transform: S h = d/dzeta of dbar_inverse(h). Multiplier
  // (kx - i ky)/(kx + i ky), zero on the mean and the Nyquist modes.
  CField beurling(const CField& h) const;

  const GridSpec& grid() const { return g_; }

 private:
  enum class Op { dbar_inverse, beurling };
  CField apply(const CField& in, Op op, cplx* mean) const;

  GridSpec g_;
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Smooth taper equal to 1 at distance >= margin * (box side) from the box
// edge and falling to 0 at the edge (C-infinity transition). margin = 0 gives 1.
RField taper_window(const GridSpec& g, double margin);

// Nodes where the taper equals 1, shrunk by `pad` nodes on every side.
IndexBox interior_box(const GridSpec& g, double margin, int pad);

}  // namespace ceik
