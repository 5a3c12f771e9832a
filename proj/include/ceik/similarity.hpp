#pragma once

#include <optional>
#include <vector>

#include "ceik/analytic.hpp"
#include "ceik/grid.hpp"
#include "ceik/quasiconformal.hpp"
#include "ceik/refraction.hpp"
#include "ceik/region.hpp"

namespace ceik {

struct SimilarityOptions {
  double damping = 0.5;
  int max_iter = 200;
  double update_tol = 1e-10;  // relative sup-norm update
  double margin = 0.1;        // taper band, as for the Beltrami solver
  int pad = 3;
  double kappa_guard = 1e-9;  // refuse nodes with | |kappa|^2 - 1 | below this
};

struct SimilarityResult {
  CField s;
  CField W;  // e^s f
  CField B, C;
  IndexBox interior;
  int iterations = 0;
  bool converged = false;
  std::vector<double> history;
  double w_residual = 0.0;  // ||W_chibar - B W - C conj W|| / ||W|| on `interior`
  int kappa_above_one = 0;  // nodes with |kappa| > 1
};

// f values on the chi-lattice. Throws DomainError if f vanishes at a node.
CField sample_on_grid(const AnalyticFunction& f, const GridSpec& g);

// W = e^s f with W_chibar = B W + C conj(W), where B, C come from kappa by
// finite differences. s is pinned to 0 at the centre node.
SimilarityResult solve_similarity(const CField& f_values, const CField& kappa, const GridSpec& g,
                                  const SimilarityOptions& opts = {});
SimilarityResult solve_similarity(const AnalyticFunction& f, const CField& kappa,
                                  const GridSpec& g, const SimilarityOptions& opts = {});

double w_equation_residual(const CField& W, const CField& B, const CField& C, const GridSpec& g,
                           const IndexBox& box);

// Z = (W + kappa conj W) / (1 - |kappa|^2) nodewise. Throws SingularError at
// nodes where |kappa| is within `guard` of 1.
CField assemble_Z(const CField& W, const CField& kappa, double guard = 1e-9);
CField assemble_Z(const CField& f_values, const CField& s, const CField& kappa,
                  double guard = 1e-9);

// ||Z_chibar - kappa conj(Z_chi)|| / ||Z_chi|| on `box`.
double canonical_residual(const CField& Z, const CField& kappa, const GridSpec& g,
                          const IndexBox& box);

// phi_zeta and phi_zetabar from the chain rule through z = Z(chi(zeta)), with
// P = Z_chi chi_zeta and chi_zetabar = sigma chi_zeta.
WirtingerPair phi_wirtinger_variable(cplx zeta, cplx Z_chi, cplx chi_zeta, cplx sigma, cplx kappa,
                                     double N);

struct PhiIntegration {
  CField phi;
  double loop_max = 0.0;          // worst closed-cell integral
  int worst_i = -1, worst_j = -1; // lower-left node of that cell
  double mixed_partial_max = 0.0; // relative | d(phi_zeta)/dzetabar - d(phi_zetabar)/dzeta |
};

// phi from its Wirtinger derivatives by path integration over a spanning tree
// rooted at (bi, bj): along the base row, then along columns. Edge integrals
// use the four-point rule h/24 (-1, 13, 13, -1) with one-sided variants at
// the ends. Loop integrals are audited with the same rule over the cells of
// `audit` (every cell when it is empty).
PhiIntegration integrate_phi(const CField& phi_zeta, const CField& phi_zeta_bar,
                             const GridSpec& g, int bi, int bj, cplx base_value = {},
                             const IndexBox& audit = {});

// Eikonal residual |4 phi_z phi_zbar - N^2| from fields on the zeta-lattice:
// derivatives by finite differences, then the Legendre inversion. Returns the
// max over `box`.
double eikonal_residual_fields(const CField& phi, const CField& z, const RField& N,
                               const GridSpec& g, const IndexBox& box);

struct DeformedSample {
  Category category = Category::shadow;
  cplx chi{};
  cplx W{};
  cplx kappa{};
  cplx Z{};       // shadow: unique point
  Line line{};    // light: the Z-plane line Z - kappa conj(Z) = W
  std::optional<Segment> segment;  // line clipped to the box given
  std::vector<cplx> pullback;      // segment samples mapped back by the chi map
};

struct DeformedOptions {
  double unit_tol = 1e-9;  // | |kappa|^2 - 1 | threshold
  double rank_tol = 1e-9;
  BBox box{};
  int pullback_samples = 32;
};

DeformedSample deformed_classify(cplx chi, cplx kappa, cplx s, cplx f_value,
                                 const DeformedOptions& opts = {},
                                 const QuasiconformalMap* chi_map = nullptr);

struct PipelineOptions {
  BeltramiOptions beltrami{};
  SimilarityOptions similarity{};
  double margin = 0.1;  // shared taper band
  int pad = 3;
};

// Full variable-index construction over a zeta-lattice: coefficients, the
// Beltrami map, kappa moved to the chi-lattice, the similarity solve, Z, z,
// phi and the final residual audit.
struct VariableIndexSolution {
  GridSpec grid;
  Field2D<CoefficientPoint> coeffs;
  int elliptic_nodes = 0, non_elliptic_nodes = 0, degenerate_nodes = 0;
  int moduli_violations = 0;
  double literal_nu_gap_max = 0.0;  // max |nu_printed - nu_rederived| at valid nodes
  CField sigma;         // on the zeta-lattice, 0 at non-elliptic nodes
  QuasiconformalMap chi_map;
  CField kappa_zeta;    // kappa on the zeta-lattice
  GridSpec chi_grid;    // sized so its plateau covers chi of the interior
  CField kappa_chi;     // kappa on the chi-lattice
  CField f_chi;         // f on the chi-lattice
  SimilarityResult sim;
  CField Z;             // on the chi-lattice
  CField z;             // z(zeta) = Z(chi(zeta)) on the zeta-lattice
  RField N;             // e^l on the zeta-lattice
  CField phi_zeta, phi_zeta_bar;
  PhiIntegration phi;
  IndexBox interior;
  double canonical_residual = 0.0;
  double eikonal_residual_max = 0.0;
  int kappa_unit_nodes = 0;  // nodes with |kappa| within guard of 1 (light candidates)
};

VariableIndexSolution run_variable_pipeline(const AnalyticFunction& f,
                                            const RefractionField& n, const GridSpec& g,
                                            const PipelineOptions& opts = {});

}  // namespace ceik
