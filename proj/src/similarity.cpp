#include "ceik/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include <fmt/format.h>

#include "ceik/parallel.hpp"
#include "ceik/spectral.hpp"

namespace ceik {

CField sample_on_grid(const AnalyticFunction& f, const GridSpec& g) {
  CField out(g);
  parallel_for(g.size(), [&](std::size_t k) {
    out[k] = f(g.node(static_cast<int>(k % g.nx), static_cast<int>(k / g.nx)));
  });
  return out;
}

double w_equation_residual(const CField& W, const CField& B, const CField& C, const GridSpec& g,
                           const IndexBox& box) {
  const CField wb = wirtinger_fd(W, g).d_zeta_bar;
  double num = 0.0, den = 0.0;
  for (int j = box.j0; j < box.j1; ++j) {
    for (int i = box.i0; i < box.i1; ++i) {
      num += abs2(wb(i, j) - B(i, j) * W(i, j) - C(i, j) * std::conj(W(i, j)));
      den += abs2(W(i, j));
    }
  }
  return den > 0.0 ? std::sqrt(num / den) : 0.0;
}

SimilarityResult solve_similarity(const CField& f_values, const CField& kappa, const GridSpec& g,
                                  const SimilarityOptions& opts) {
  if (f_values.nx() != g.nx || kappa.nx() != g.nx || f_values.ny() != g.ny ||
      kappa.ny() != g.ny) {
    throw DomainError("solve_similarity: fields do not fit the grid");
  }
  SimilarityResult res;
  const std::size_t n = g.size();
  CField ratio(g);
  for (std::size_t k = 0; k < n; ++k) {
    if (f_values[k] == cplx{}) {
      throw DomainError(fmt::format("solve_similarity: f vanishes at node {}", k));
    }
    ratio[k] = std::conj(f_values[k]) / f_values[k];
  }
  const CField kb = wirtinger_fd(kappa, g).d_zeta_bar;
  res.B = CField(g);
  res.C = CField(g);
  for (std::size_t k = 0; k < n; ++k) {
    const BC bc = coeffs_BC(kappa[k], kb[k], opts.kappa_guard);
    res.B[k] = bc.B;
    res.C[k] = bc.C;
    if (std::abs(kappa[k]) > 1.0) ++res.kappa_above_one;
  }
  res.interior = interior_box(g, opts.margin, opts.pad);
  const RField w = taper_window(g, opts.margin);
  const PeriodicOps ops(g);
  const cplx centre = g.node(g.ci(), g.cj());

  res.s = CField(g);
  CField rhs(g);
  for (int it = 1; it <= opts.max_iter; ++it) {
    for (std::size_t k = 0; k < n; ++k) {
      const cplx sk = res.s[k];
      rhs[k] = w[k] * (res.B[k] + res.C[k] * std::exp(std::conj(sk) - sk) * ratio[k]);
    }
    cplx mean;
    CField next = ops.dbar_inverse(rhs, &mean);
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) next(i, j) += mean * std::conj(g.node(i, j) - centre);
    const cplx pin = next(g.ci(), g.cj());
    double upd = 0.0, mag = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      next[k] -= pin;
      upd = std::max(upd, std::abs(next[k] - res.s[k]));
      mag = std::max(mag, std::abs(next[k]));
      res.s[k] += opts.damping * (next[k] - res.s[k]);
    }
    res.history.push_back(upd);
    res.iterations = it;
    if (upd <= opts.update_tol * std::max(1.0, mag)) {
      res.converged = true;
      break;
    }
  }
  if (!res.converged) {
    throw ConvergenceError(fmt::format("similarity iteration stalled after {} steps (update {:.3e})",
                                       res.iterations, res.history.back()));
  }
  res.W = CField(g);
  for (std::size_t k = 0; k < n; ++k) res.W[k] = std::exp(res.s[k]) * f_values[k];
  res.w_residual = w_equation_residual(res.W, res.B, res.C, g, res.interior);
  return res;
}

SimilarityResult solve_similarity(const AnalyticFunction& f, const CField& kappa,
                                  const GridSpec& g, const SimilarityOptions& opts) {
  return solve_similarity(sample_on_grid(f, g), kappa, g, opts);
}

CField assemble_Z(const CField& W, const CField& kappa, double guard) {
  CField Z(W.nx(), W.ny());
  for (std::size_t k = 0; k < W.size(); ++k) {
    const double den = 1.0 - abs2(kappa[k]);
    if (std::abs(den) < guard) {
      throw SingularError(fmt::format("assemble_Z: |kappa| = 1 at node {}", k));
    }
    Z[k] = (W[k] + kappa[k] * std::conj(W[k])) / den;
  }
  return Z;
}

CField assemble_Z(const CField& f_values, const CField& s, const CField& kappa, double guard) {
  CField W(f_values.nx(), f_values.ny());
  for (std::size_t k = 0; k < W.size(); ++k) W[k] = std::exp(s[k]) * f_values[k];
  return assemble_Z(W, kappa, guard);
}

double canonical_residual(const CField& Z, const CField& kappa, const GridSpec& g,
                          const IndexBox& box) {
  const WirtingerFields d = wirtinger_fd(Z, g);
  double num = 0.0, den = 0.0;
  for (int j = box.j0; j < box.j1; ++j) {
    for (int i = box.i0; i < box.i1; ++i) {
      num += abs2(d.d_zeta_bar(i, j) - kappa(i, j) * std::conj(d.d_zeta(i, j)));
      den += abs2(d.d_zeta(i, j));
    }
  }
  return den > 0.0 ? std::sqrt(num / den) : 0.0;
}

WirtingerPair phi_wirtinger_variable(cplx zeta, cplx Z_chi, cplx chi_zeta, cplx sigma, cplx kappa,
                                     double N) {
  if (zeta == cplx{}) throw DomainError("phi_wirtinger_variable: zeta = 0");
  const cplx P = Z_chi * chi_zeta;
  const cplx pre = N / (2.0 * zeta);
  const cplx a = (1.0 + zeta * zeta * std::conj(kappa)) * P;
  const cplx b = (kappa + zeta * zeta) * std::conj(P);
  return {pre * (a + std::conj(sigma) * b), pre * (sigma * a + b)};
}

namespace {

// Integral from node k to k+1 of samples v[0..n) with spacing h and stride s.
cplx edge_integral(const cplx* v, int n, std::ptrdiff_t s, int k, double h) {
  auto at = [&](int i) { return v[i * s]; };
  if (n < 4) return 0.5 * h * (at(k) + at(k + 1));
  if (k == 0) return h / 24.0 * (9.0 * at(0) + 19.0 * at(1) - 5.0 * at(2) + at(3));
  if (k == n - 2) {
    return h / 24.0 * (at(n - 4) - 5.0 * at(n - 3) + 19.0 * at(n - 2) + 9.0 * at(n - 1));
  }
  return h / 24.0 * (-at(k - 1) + 13.0 * at(k) + 13.0 * at(k + 1) - at(k + 2));
}

}  // namespace

PhiIntegration integrate_phi(const CField& phi_zeta, const CField& phi_zeta_bar,
                             const GridSpec& g, int bi, int bj, cplx base_value,
                             const IndexBox& audit) {
  const int nx = g.nx, ny = g.ny;
  if (bi < 0 || bi >= nx || bj < 0 || bj >= ny) throw DomainError("integrate_phi: bad base node");
  CField gx(g), gy(g);
  for (std::size_t k = 0; k < g.size(); ++k) {
    gx[k] = phi_zeta[k] + phi_zeta_bar[k];
    gy[k] = kI * (phi_zeta[k] - phi_zeta_bar[k]);
  }
  CField ex(nx - 1, ny), ey(nx, ny - 1);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i + 1 < nx; ++i) ex(i, j) = edge_integral(&gx(0, j), nx, 1, i, g.hx());
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j + 1 < ny; ++j) ey(i, j) = edge_integral(&gy(i, 0), ny, nx, j, g.hy());

  PhiIntegration out;
  out.phi = CField(g);
  CField& phi = out.phi;
  phi(bi, bj) = base_value;
  for (int i = bi + 1; i < nx; ++i) phi(i, bj) = phi(i - 1, bj) + ex(i - 1, bj);
  for (int i = bi - 1; i >= 0; --i) phi(i, bj) = phi(i + 1, bj) - ex(i, bj);
  for (int i = 0; i < nx; ++i) {
    for (int j = bj + 1; j < ny; ++j) phi(i, j) = phi(i, j - 1) + ey(i, j - 1);
    for (int j = bj - 1; j >= 0; --j) phi(i, j) = phi(i, j + 1) - ey(i, j);
  }

  const IndexBox cells = audit.empty() ? IndexBox{0, nx, 0, ny} : audit;
  for (int j = cells.j0; j + 1 < cells.j1; ++j) {
    for (int i = cells.i0; i + 1 < cells.i1; ++i) {
      const double loop = std::abs(ex(i, j) + ey(i + 1, j) - ex(i, j + 1) - ey(i, j));
      if (loop > out.loop_max || out.worst_i < 0) {
        out.loop_max = loop;
        out.worst_i = i;
        out.worst_j = j;
      }
    }
  }

  const CField a = wirtinger_fd(phi_zeta, g).d_zeta_bar;
  const CField b = wirtinger_fd(phi_zeta_bar, g).d_zeta;
  double num = 0.0, den = 0.0;
  for (int j = 2; j < ny - 2; ++j) {
    for (int i = 2; i < nx - 2; ++i) {
      num = std::max(num, std::abs(a(i, j) - b(i, j)));
      den = std::max({den, std::abs(a(i, j)), std::abs(b(i, j))});
    }
  }
  out.mixed_partial_max = den > 0.0 ? num / den : num;
  return out;
}

double eikonal_residual_fields(const CField& phi, const CField& z, const RField& N,
                               const GridSpec& g, const IndexBox& box) {
  const WirtingerFields dp = wirtinger_fd(phi, g);
  const WirtingerFields dz = wirtinger_fd(z, g);
  double worst = 0.0;
  for (int j = box.j0; j < box.j1; ++j) {
    for (int i = box.i0; i < box.i1; ++i) {
      const WirtingerPair pz = legendre_invert({dp.d_zeta(i, j), dp.d_zeta_bar(i, j)},
                                               {dz.d_zeta(i, j), dz.d_zeta_bar(i, j)});
      const double n = N(i, j);
      worst = std::max(worst, std::abs(4.0 * pz.d_zeta * pz.d_zeta_bar - n * n));
    }
  }
  return worst;
}

DeformedSample deformed_classify(cplx chi, cplx kappa, cplx s, cplx f_value,
                                 const DeformedOptions& opts, const QuasiconformalMap* chi_map) {
  DeformedSample out;
  out.chi = chi;
  out.kappa = kappa;
  out.W = std::exp(s) * f_value;
  const double k2 = abs2(kappa);
  if (std::abs(k2 - 1.0) > opts.unit_tol) {
    out.category = Category::shadow;
    out.Z = (out.W + kappa * std::conj(out.W)) / (1.0 - k2);
    return out;
  }
  const RaySolution ray = solve_ray_system(kappa, out.W, std::max(opts.rank_tol, opts.unit_tol));
  if (ray.rank != RaySolution::Rank::line) {
    out.category = ray.rank == RaySolution::Rank::point ? Category::shadow
                                                        : Category::maps_to_infinity;
    if (ray.rank == RaySolution::Rank::point) out.Z = ray.point;
    return out;
  }
  out.category = Category::light_segment;
  out.line = {ray.point, ray.direction};
  out.segment = clip_line(out.line, opts.box);
  if (chi_map && out.segment && opts.pullback_samples > 1) {
    for (int k = 0; k < opts.pullback_samples; ++k) {
      const double t = static_cast<double>(k) / (opts.pullback_samples - 1);
      const cplx q = out.segment->a + t * (out.segment->b - out.segment->a);
      try {
        out.pullback.push_back(chi_map->invert(q));
      } catch (const DomainError&) {
      }
    }
  }
  return out;
}

VariableIndexSolution run_variable_pipeline(const AnalyticFunction& f, const RefractionField& n,
                                            const GridSpec& g, const PipelineOptions& opts) {
  VariableIndexSolution sol;
  sol.grid = g;
  const std::size_t count = g.size();
  auto node_of = [&](std::size_t k) {
    return g.node(static_cast<int>(k % g.nx), static_cast<int>(k / g.nx));
  };

  sol.coeffs = Field2D<CoefficientPoint>(g.nx, g.ny);
  sol.N = RField(g);
  parallel_for(count, [&](std::size_t k) {
    const cplx zeta = node_of(k);
    const LogIndexJet ell = n.ell_in_zeta(zeta);
    sol.coeffs[k] = compute_coefficients(ell, zeta);
    sol.N[k] = std::exp(ell.ell);
  });

  sol.sigma = CField(g);
  sol.kappa_zeta = CField(g);
  for (std::size_t k = 0; k < count; ++k) {
    const CoefficientPoint& p = sol.coeffs[k];
    if (!p.valid) {
      ++sol.degenerate_nodes;
      continue;
    }
    (p.elliptic ? sol.elliptic_nodes : sol.non_elliptic_nodes)++;
    if (p.elliptic && !p.moduli_ok) ++sol.moduli_violations;
    sol.literal_nu_gap_max = std::max(sol.literal_nu_gap_max, std::abs(p.mn_literal.nu - p.mn.nu));
    sol.sigma[k] = p.sigma;
    sol.kappa_zeta[k] = p.kappa;
  }
  if (sol.degenerate_nodes > 0) {
    throw DomainError(fmt::format("{} lattice nodes have a degenerate coefficient system",
                                  sol.degenerate_nodes));
  }

  BeltramiOptions bo = opts.beltrami;
  bo.margin = opts.margin;
  bo.pad = opts.pad;
  sol.chi_map = solve_beltrami(sol.sigma, g, bo);
  sol.interior = sol.chi_map.interior;

  // The chi-lattice is chosen so that chi of the zeta interior, with a
  // stencil of slack, lands on the plateau of the similarity taper.
  {
    const int slack = 3;
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (int j = std::max(0, sol.interior.j0 - slack); j < std::min(g.ny, sol.interior.j1 + slack); ++j) {
      for (int i = std::max(0, sol.interior.i0 - slack); i < std::min(g.nx, sol.interior.i1 + slack); ++i) {
        const cplx X = sol.chi_map.chi(i, j);
        x0 = std::min(x0, X.real());
        x1 = std::max(x1, X.real());
        y0 = std::min(y0, X.imag());
        y1 = std::max(y1, X.imag());
      }
    }
    auto widen = [&](double a, double b, int n) {
      const double band = std::ceil(opts.margin * n) + opts.pad + 1;
      const double frac = 1.0 - 2.0 * band / n;
      if (frac <= 0.1) throw DomainError("run_variable_pipeline: lattice too coarse for the taper");
      const double len = (b - a) / frac;
      const double mid = 0.5 * (a + b);
      return std::pair{mid - 0.5 * len, mid + 0.5 * len};
    };
    const auto [cx0, cx1] = widen(x0, x1, g.nx);
    const auto [cy0, cy1] = widen(y0, y1, g.ny);
    sol.chi_grid = GridSpec{cx0, cx1, cy0, cy1, g.nx, g.ny};
  }
  const GridSpec& cg = sol.chi_grid;
  auto chi_node = [&](std::size_t k) {
    return cg.node(static_cast<int>(k % cg.nx), static_cast<int>(k / cg.nx));
  };

  // kappa as a function of chi: kappa(zeta(chi)) at the chi-lattice nodes.
  // Nodes outside the image of the zeta box go through the extended map so
  // that kappa_chi stays smooth under the taper.
  sol.kappa_chi = CField(cg);
  parallel_for(count, [&](std::size_t k) {
    const cplx zeta = sol.chi_map.invert_extended(chi_node(k));
    const CoefficientPoint p = compute_coefficients(n.ell_in_zeta(zeta), zeta);
    sol.kappa_chi[k] = p.valid ? p.kappa : interp_bicubic(sol.kappa_zeta, g, zeta);
  });

  sol.f_chi = sample_on_grid(f, cg);
  SimilarityOptions so = opts.similarity;
  so.margin = opts.margin;
  so.pad = opts.pad;
  sol.sim = solve_similarity(sol.f_chi, sol.kappa_chi, cg, so);
  sol.Z = assemble_Z(sol.sim.W, sol.kappa_chi, so.kappa_guard);
  sol.canonical_residual = canonical_residual(sol.Z, sol.kappa_chi, cg, sol.sim.interior);
  for (std::size_t k = 0; k < count; ++k) {
    if (std::abs(abs2(sol.kappa_chi[k]) - 1.0) < 1e-6) ++sol.kappa_unit_nodes;
  }

  const CField Z_chi = wirtinger_fd(sol.Z, cg).d_zeta;
  const CField chi_zeta = wirtinger_fd(sol.chi_map.chi, g).d_zeta;
  sol.z = CField(g);
  sol.phi_zeta = CField(g);
  sol.phi_zeta_bar = CField(g);
  parallel_for(count, [&](std::size_t k) {
    const cplx zeta = node_of(k);
    const cplx X = sol.chi_map.chi[k];
    sol.z[k] = interp_bicubic(sol.Z, cg, X);
    const WirtingerPair d = phi_wirtinger_variable(zeta, interp_bicubic(Z_chi, cg, X), chi_zeta[k],
                                                   sol.chi_map.sigma_used[k], sol.kappa_zeta[k],
                                                   sol.N[k]);
    sol.phi_zeta[k] = d.d_zeta;
    sol.phi_zeta_bar[k] = d.d_zeta_bar;
  });
  sol.phi = integrate_phi(sol.phi_zeta, sol.phi_zeta_bar, g, g.ci(), g.cj(), {}, sol.interior);
  sol.eikonal_residual_max = eikonal_residual_fields(sol.phi.phi, sol.z, sol.N, g, sol.interior);
  return sol;
}

}  // namespace ceik
