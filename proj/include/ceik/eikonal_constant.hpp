#pragma once

#include <array>

#include "ceik/analytic.hpp"
#include "ceik/wirtinger.hpp"

namespace ceik {

// z together with its Wirtinger derivatives.
struct ZJet {
  cplx z{};
  WirtingerPair d{};
};

struct ResidualReport {
  double value = 0.0;     // |4 phi_z phi_zbar - n^2|
  double jacobian = 0.0;  // |z_zeta|^2 - |z_zetabar|^2
  bool degenerate = false;
};

// Constant-index (n = 1) eikonal in parametric form
//
//   z   = (f + zeta^2 conj f) / (1 - |zeta|^4)
//   phi = (zeta conj f + f/zeta) / (1 - |zeta|^4) - f/(2 zeta) + P(zeta)/2 + c
//
// with P a primitive of f/zeta^2. The map is undefined on |zeta| = 1.
class ParametrizedEikonal {
 public:
  explicit ParametrizedEikonal(AnalyticFunction f, cplx phi_constant = {},
                               double branch_cut = kPi);

  const AnalyticFunction& f() const { return f_; }
  cplx phi_constant() const { return c_; }
  double branch_cut() const { return primitive_.cut_angle(); }
  ParametrizedEikonal with_constant(cplx c) const;

  // Evaluation is refused when |1 - |zeta|^4| is below this.
  static constexpr double kUnitCircleGuard = 1e-12;
  // The jacobian counts as vanishing below this fraction of |z_zeta|^2 + |z_zetabar|^2.
  static constexpr double kDegenerateRatio = 1e-14;

  cplx z(cplx zeta) const;
  ZJet z_jet(cplx zeta) const;
  cplx phi(cplx zeta) const;
  WirtingerPair phi_wirtinger(cplx zeta) const;

  // |4 phi_z phi_zbar - 1| with phi_z, phi_zbar recovered from the
  // parametrization through the Legendre relations. A vanishing jacobian is
  // reported in the result, not thrown.
  ResidualReport eikonal_residual(cplx zeta) const;

  // v_x + i v_y at the image point z(zeta), from the jacobian identity.
  cplx grad_v(cplx zeta) const;

  // True if the straight segment a -> b crosses the cut of the log term.
  bool segment_crosses_cut(cplx a, cplx b) const;

 private:
  void check_domain(cplx zeta, bool need_nonzero) const;

  AnalyticFunction f_;
  AnalyticFunction df_;
  ZetaSquaredPrimitive primitive_;
  cplx c_;
};

// Free-function spellings of the operations above.
cplx eval_z(const ParametrizedEikonal& e, cplx zeta);
cplx eval_phi(const ParametrizedEikonal& e, cplx zeta);
WirtingerPair phi_wirtinger(const ParametrizedEikonal& e, cplx zeta);
ResidualReport eikonal_residual(const ParametrizedEikonal& e, cplx zeta);
cplx grad_v(const ParametrizedEikonal& e, cplx zeta);

struct QuadraticBranch {
  cplx zeta{};
  cplx phi{};
  cplx root{};  // the square root value used by this branch
};

// Closed-form inversion for f = f0 + f1 zeta + f2 zeta^2: both square-root
// branches of zeta(z) and the matching phi (principal log, constant c).
// Throws SingularError when conj(z) + f2 = 0.
std::array<QuadraticBranch, 2> quadratic_closed_form(cplx f0, cplx f1, cplx f2, cplx z,
                                                     cplx c = {});

}  // namespace ceik
