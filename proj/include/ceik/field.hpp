#pragma once

#include <vector>

#include "ceik/eikonal_constant.hpp"
#include "ceik/region.hpp"

namespace ceik {

// Leading term e^{k v} cos(k u) of the evanescent-wave ansatz.
struct FieldSample {
  cplx z{};
  double u = 0.0, v = 0.0;  // v after normalization
  double k = 0.0;
  double W_leading = 0.0;
};

FieldSample field_sample(cplx z, cplx phi, double k, double v_shift = 0.0);

struct FieldBatch {
  std::vector<FieldSample> samples;
  int positive_v = 0;  // samples whose normalized v is above 0 (still computed)
};

// phi given at z-plane points; v is shifted by v_shift before evaluation.
FieldBatch eval_field(const std::vector<cplx>& z, const std::vector<cplx>& phi, double k,
                      double v_shift = 0.0);

// Value of phi at the boundary limit point of e^{i theta} for theta in the
// zero set: e^{-i theta} z_lim - f/(2 e^{i theta}) + P(e^{i theta})/2 + c.
cplx light_phi_limit(const ParametrizedEikonal& e, double theta);

struct LightSample {
  double theta = 0.0;
  cplx z{};
  cplx phi{};
};

// Limit points and phi values over the zero set: the isolated angles plus
// `per_arc` angles inside each arc.
std::vector<LightSample> light_samples(const ParametrizedEikonal& e, const SPhiSet& s_phi,
                                       int per_arc);

// max Im phi over the light samples; 0 when there are none.
double light_v_max(const std::vector<LightSample>& light);

}  // namespace ceik
