#include "ceik/field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ceik {

FieldSample field_sample(cplx z, cplx phi, double k, double v_shift) {
  FieldSample s;
  s.z = z;
  s.u = phi.real();
  s.v = phi.imag() - v_shift;
  s.k = k;
  s.W_leading = std::exp(k * s.v) * std::cos(k * s.u);
  return s;
}

FieldBatch eval_field(const std::vector<cplx>& z, const std::vector<cplx>& phi, double k,
                      double v_shift) {
  if (z.size() != phi.size()) throw DomainError("eval_field: z and phi sizes differ");
  if (!(k > 0.0)) throw DomainError("eval_field: wave number must be positive");
  FieldBatch out;
  out.samples.reserve(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    out.samples.push_back(field_sample(z[i], phi[i], k, v_shift));
    if (out.samples.back().v > 0.0) ++out.positive_v;
  }
  return out;
}

cplx light_phi_limit(const ParametrizedEikonal& e, double theta) {
  const cplx eth = std::polar(1.0, theta);
  const cplx zl = boundary_limit_point(e.f(), theta);
  const ZetaSquaredPrimitive prim(e.f(), e.branch_cut());
  return zl / eth - e.f()(eth) / (2.0 * eth) + 0.5 * prim(eth) + e.phi_constant();
}

std::vector<LightSample> light_samples(const ParametrizedEikonal& e, const SPhiSet& s_phi,
                                       int per_arc) {
  std::vector<LightSample> out;
  auto add = [&](double th) {
    out.push_back({th, boundary_limit_point(e.f(), th), light_phi_limit(e, th)});
  };
  for (double th : s_phi.points) add(th);
  for (const Arc& a : s_phi.arcs) {
    for (int k = 0; k < per_arc; ++k) add(a.lo + (a.hi - a.lo) * (k + 0.5) / per_arc);
  }
  return out;
}

double light_v_max(const std::vector<LightSample>& light) {
  if (light.empty()) return 0.0;
  double m = -std::numeric_limits<double>::infinity();
  for (const auto& s : light) m = std::max(m, s.phi.imag());
  return m;
}

}  // namespace ceik
