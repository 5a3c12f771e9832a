#pragma once

#include <vector>

#include "ceik/grid.hpp"

namespace ceik {

struct BeltramiOptions {
  double margin = 0.1;     // taper band as a fraction of the box side
  double k_max = 0.9;      // refuse sup |sigma| above this
  int max_iter = 2000;
  double iter_tol = 1e-13; // sup-norm update of the derivative field, relative
  double tol = 1e-4;       // acceptance bound for the relative residual
  int pad = 3;             // nodes dropped inside the plateau for residuals
};

// Discrete solution of chi_zetabar = sigma chi_zeta on a lattice, normalized
// by chi(centre node) = centre node and mean chi_zeta = 1.
//
// chi = zeta + beta conj(zeta) + u + offset with u periodic. The periodic
// part carries the tapered sigma; the residual is only meaningful on
// `interior`, where the taper is 1.
struct QuasiconformalMap {
  GridSpec grid;
  CField chi;
  CField sigma_used;  // sigma after tapering
  cplx beta{};
  cplx offset{};
  CField periodic;    // u at the nodes
  IndexBox interior;
  double residual_l2 = 0.0;   // relative, fourth-order differences on `interior`
  double jacobian_min = 0.0;  // min of |chi_zeta|^2 - |chi_zetabar|^2 on `interior`
  int iterations = 0;
  bool converged = false;
  std::vector<double> update_history;

  // chi at an arbitrary point (cubic convolution).
  cplx eval(cplx zeta) const;

  // zeta with chi(zeta) = target, by Newton on the bilinear interpolant.
  // Throws DomainError when the target is outside the image of the lattice.
  cplx invert(cplx target) const;

  // chi extended to the whole plane through the periodic part u.
  cplx eval_extended(cplx zeta) const;

  // Inverse of eval_extended; defined for every target. Throws
  // ConvergenceError if Newton stalls.
  cplx invert_extended(cplx target) const;
};

// Throws DomainError when sup |sigma| >= 1 or above k_max, ConvergenceError
// when the fixed point does not settle within max_iter.
QuasiconformalMap solve_beltrami(const CField& sigma, const GridSpec& g,
                                 const BeltramiOptions& opts = {});

// Relative residual ||chi_zetabar - sigma chi_zeta|| / ||chi_zeta|| over `box`,
// fourth-order differences.
double beltrami_residual(const CField& chi, const CField& sigma, const GridSpec& g,
                         const IndexBox& box);

}  // namespace ceik
