#include "ceik/region.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace ceik {

RaySolution solve_ray_system(cplx kappa, cplx rhs, double rank_tol) {
  RaySolution sol;
  const double m = std::abs(kappa);
  sol.smallest_singular = std::abs(1.0 - m);
  if (sol.smallest_singular > rank_tol) {
    sol.rank = RaySolution::Rank::point;
    sol.point = (rhs + kappa * std::conj(rhs)) / (1.0 - m * m);
    return sol;
  }
  // kappa = m e^{2 i alpha}; e^{i alpha} spans the null space of the symmetric
  // matrix, i e^{i alpha} is the eigenvector for 1 + m.
  const double alpha = m > 0.0 ? 0.5 * std::arg(kappa) : 0.0;
  const cplx d = std::polar(1.0, alpha);
  const cplx rot = rhs * std::conj(d);
  sol.direction = d;
  sol.compatibility = std::abs(rot.real());
  sol.point = kI * d * (rot.imag() / (1.0 + m));
  sol.rank = sol.compatibility <= rank_tol * std::max(1.0, std::abs(rhs))
                 ? RaySolution::Rank::line
                 : RaySolution::Rank::inconsistent;
  return sol;
}

double ray_determinant(double r, double theta) {
  const double r2 = r * r;
  const double c2 = std::cos(2.0 * theta);
  const double s2 = std::sin(2.0 * theta);
  return (1.0 - r2 * c2) * (1.0 + r2 * c2) - r2 * s2 * r2 * s2;
}

double condition(const AnalyticFunction& f, double theta) {
  const cplx e = std::polar(1.0, theta);
  return (f(e) * std::conj(e)).real();
}

bool Arc::contains(double theta, double margin) const {
  return theta > lo + margin && theta < hi - margin;
}

bool SPhiSet::in_arc(double theta, double margin) const {
  return std::any_of(arcs.begin(), arcs.end(),
                     [&](const Arc& a) { return a.contains(theta, margin); });
}

namespace {

struct Sample {
  double theta;
  double value;
  bool valid;
};

Sample probe(const AnalyticFunction& f, double theta) {
  try {
    return {theta, condition(f, theta), true};
  } catch (const DomainError&) {
    return {theta, std::numeric_limits<double>::quiet_NaN(), false};
  }
}

}  // namespace

SPhiSet find_S_phi(const AnalyticFunction& f, const SPhiOptions& opts) {
  const int m = opts.resolution;
  if (m < 8) throw DomainError("find_S_phi: resolution must be at least 8");
  SPhiSet out;
  out.tol = opts.rel_tol * std::max(1.0, circle_scale(f));
  const double tol = out.tol;
  const double step = 2.0 * kPi / m;

  std::vector<Sample> s(m);
  for (int j = 0; j < m; ++j) s[j] = probe(f, -kPi + step * j);
  auto sub = [&](const Sample& q) { return q.valid && std::abs(q.value) < tol; };
  auto sub_at = [&](double th) { return sub(probe(f, th)); };

  std::vector<char> used(m, 0);
  // Maximal runs of sub-tolerance samples, walked circularly from a sample
  // that is not sub-tolerance.
  int start = -1;
  for (int j = 0; j < m; ++j) {
    if (!sub(s[j])) {
      start = j;
      break;
    }
  }
  if (start < 0) {
    out.arcs.push_back({-kPi, kPi});
    return out;
  }
  // theta of circular index k counted from `start`, unwrapped
  auto theta_of = [&](int k) { return -kPi + step * (start + k); };
  auto wrap = [](double th) {
    while (th > kPi) th -= 2.0 * kPi;
    while (th <= -kPi) th += 2.0 * kPi;
    return th;
  };

  for (int k = 1; k < m;) {
    const int j = (start + k) % m;
    if (!sub(s[j])) {
      ++k;
      continue;
    }
    int len = 0;
    while (k + len < m && sub(s[(start + k + len) % m])) ++len;
    bool confirmed = len >= opts.min_arc_samples;
    for (int q = 0; confirmed && q + 1 < len; ++q) {
      confirmed = sub_at(theta_of(k + q) + 0.5 * step);
    }
    if (confirmed) {
      // Bisect each end between the last inside and first outside sample.
      double in = theta_of(k), outside = theta_of(k - 1);
      while (std::abs(in - outside) > opts.bisect_tol) {
        const double mid = 0.5 * (in + outside);
        (sub_at(mid) ? in : outside) = mid;
      }
      const double lo = in;
      in = theta_of(k + len - 1);
      outside = theta_of(k + len);
      while (std::abs(in - outside) > opts.bisect_tol) {
        const double mid = 0.5 * (in + outside);
        (sub_at(mid) ? in : outside) = mid;
      }
      const double hi = in;
      // keep lo < hi with lo in (-pi, pi]; an arc through pi keeps hi > pi
      const double wl = wrap(lo);
      out.arcs.push_back({wl, wl + (hi - lo)});
      for (int q = -1; q <= len; ++q) used[((start + k + q) % m + m) % m] = 1;
    }
    k += len;
  }

  auto near_existing = [&](double th) {
    return std::any_of(out.points.begin(), out.points.end(), [&](double p) {
      return std::abs(wrap(p - th)) < 1e-9;
    });
  };

  for (int j = 0; j < m; ++j) {
    const int jn = (j + 1) % m;
    if (used[j] || used[jn] || !s[j].valid || !s[jn].valid) continue;
    const double a = s[j].value, b = s[jn].value;
    double th_root;
    if (a == 0.0) {
      th_root = s[j].theta;
    } else if ((a < 0.0) != (b < 0.0) && b != 0.0) {
      double lo = s[j].theta, hi = lo + step;
      double flo = a;
      while (hi - lo > opts.bisect_tol) {
        const double mid = 0.5 * (lo + hi);
        const double fm = condition(f, mid);
        if (fm == 0.0) {
          lo = hi = mid;
          break;
        }
        if ((fm < 0.0) == (flo < 0.0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      th_root = 0.5 * (lo + hi);
    } else {
      continue;
    }
    th_root = wrap(th_root);
    if (!near_existing(th_root)) out.points.push_back(th_root);
  }

  // Short sub-tolerance runs without a sign change (touching zeros).
  for (int j = 0; j < m; ++j) {
    if (used[j] || !sub(s[j])) continue;
    const int jp = (j + m - 1) % m, jn = (j + 1) % m;
    const bool is_local_min = (!sub(s[jp]) || std::abs(s[jp].value) >= std::abs(s[j].value)) &&
                              (!sub(s[jn]) || std::abs(s[jn].value) > std::abs(s[j].value));
    if (is_local_min && !near_existing(s[j].theta)) {
      bool sign_change_near = false;
      for (double p : out.points) sign_change_near |= std::abs(wrap(p - s[j].theta)) < 1.5 * step;
      if (!sign_change_near) out.points.push_back(s[j].theta);
    }
  }
  std::sort(out.points.begin(), out.points.end());
  std::sort(out.arcs.begin(), out.arcs.end(),
            [](const Arc& x, const Arc& y) { return x.lo < y.lo; });
  return out;
}

Line light_segment(const AnalyticFunction& f, double theta, double tol) {
  const cplx e = std::polar(1.0, theta);
  const cplx fv = f(e);
  const double cond = (fv * std::conj(e)).real();
  const double scale = std::max(1.0, std::abs(fv));
  if (std::abs(cond) >= tol * scale) {
    throw DomainError(fmt::format(
        "light_segment: condition {:.3e} does not vanish at theta = {:.17g}; the point maps to "
        "infinity",
        cond, theta));
  }
  // kappa = e^{2 i theta}: rank one, the compatibility is |cond| itself.
  const RaySolution sol = solve_ray_system(e * e, fv, 1e-9);
  Line line;
  line.direction = e;
  line.point = sol.point;
  return line;
}

cplx boundary_limit_point(const AnalyticFunction& f, double theta) {
  const cplx e = std::polar(1.0, theta);
  const cplx fp = f.derivative()(e);
  return -0.25 * e * (fp + std::conj(fp)) - 0.5 * e * e * std::conj(f(e));
}

cplx caustic_point(const AnalyticFunction& f, double theta, const SPhiSet& s_phi) {
  if (!s_phi.in_arc(theta)) {
    throw DomainError(fmt::format(
        "caustic_point: theta = {:.17g} is not interior to an arc of the zero set", theta));
  }
  const cplx e = std::polar(1.0, theta);
  return f(e) - 0.5 * e * f.derivative()(e);
}

std::vector<cplx> caustic_polyline(const AnalyticFunction& f, const Arc& arc, int samples,
                                   double endpoint_margin) {
  std::vector<cplx> pts;
  if (samples < 2) return pts;
  const AnalyticFunction df = f.derivative();
  const double lo = arc.lo + endpoint_margin;
  const double hi = arc.hi - endpoint_margin;
  pts.reserve(samples);
  for (int k = 0; k < samples; ++k) {
    const double th = lo + (hi - lo) * k / (samples - 1);
    const cplx e = std::polar(1.0, th);
    pts.push_back(f(e) - 0.5 * e * df(e));
  }
  return pts;
}

std::optional<Segment> clip_line(const Line& line, const BBox& box) {
  double t0 = -std::numeric_limits<double>::infinity();
  double t1 = std::numeric_limits<double>::infinity();
  const double p[4] = {-line.direction.real(), line.direction.real(), -line.direction.imag(),
                       line.direction.imag()};
  const double q[4] = {line.point.real() - box.x0, box.x1 - line.point.real(),
                       line.point.imag() - box.y0, box.y1 - line.point.imag()};
  for (int i = 0; i < 4; ++i) {
    if (p[i] == 0.0) {
      if (q[i] < 0.0) return std::nullopt;
      continue;
    }
    const double t = q[i] / p[i];
    if (p[i] < 0.0) {
      t0 = std::max(t0, t);
    } else {
      t1 = std::min(t1, t);
    }
  }
  if (!(t0 <= t1)) return std::nullopt;
  return Segment{line.point + t0 * line.direction, line.point + t1 * line.direction};
}

const char* category_name(Category c) {
  switch (c) {
    case Category::shadow:
      return "shadow";
    case Category::light_segment:
      return "light_segment";
    case Category::maps_to_infinity:
      return "maps_to_infinity";
  }
  return "?";
}

ClassifiedSample classify(const AnalyticFunction& f, cplx zeta, const ClassifyOptions& opts) {
  ClassifiedSample out;
  out.zeta = zeta;
  const double r = std::abs(zeta);
  out.theta = std::arg(zeta);
  out.inside_disk = r < 1.0;
  if (std::abs(r - 1.0) > opts.circle_tol) {
    out.category = Category::shadow;
    const cplx fv = f(zeta);
    const double r2 = r * r;
    out.z = (fv + zeta * zeta * std::conj(fv)) / (1.0 - r2 * r2);
    return out;
  }
  const cplx e = std::polar(1.0, out.theta);
  const cplx fv = f(e);
  out.condition_value = (fv * std::conj(e)).real();
  if (std::abs(out.condition_value) < opts.zero_tol * std::max(1.0, std::abs(fv))) {
    out.category = Category::light_segment;
    out.line = light_segment(f, out.theta, opts.zero_tol);
  } else {
    out.category = Category::maps_to_infinity;
  }
  return out;
}

std::vector<Segment> sweep_light_segments(const AnalyticFunction& f, const SPhiSet& s_phi,
                                          int samples_per_arc, const BBox& box) {
  std::vector<Segment> segs;
  for (const Arc& arc : s_phi.arcs) {
    for (int k = 0; k < samples_per_arc; ++k) {
      const double th = arc.lo + (arc.hi - arc.lo) * (k + 0.5) / samples_per_arc;
      try {
        if (auto seg = clip_line(light_segment(f, th, std::max(s_phi.tol, 1e-9)), box)) {
          segs.push_back(*seg);
        }
      } catch (const DomainError&) {
      }
    }
  }
  for (double th : s_phi.points) {
    try {
      if (auto seg = clip_line(light_segment(f, th, std::max(s_phi.tol, 1e-9)), box)) {
        segs.push_back(*seg);
      }
    } catch (const DomainError&) {
    }
  }
  return segs;
}

int side_of_polyline(const std::vector<cplx>& poly, cplx z) {
  if (poly.size() < 2) return 0;
  double best = std::numeric_limits<double>::infinity();
  int side = 0;
  for (std::size_t k = 0; k + 1 < poly.size(); ++k) {
    const cplx a = poly[k], d = poly[k + 1] - poly[k];
    const double len2 = abs2(d);
    if (len2 == 0.0) continue;
    const double t = std::clamp(((z - a) * std::conj(d)).real() / len2, 0.0, 1.0);
    const double dist = abs2(z - (a + t * d));
    if (dist < best) {
      best = dist;
      const bool at_end = (k == 0 && t == 0.0) || (k + 2 == poly.size() && t == 1.0);
      const double cross = (std::conj(d) * (z - a)).imag();
      side = at_end ? 0 : (cross > 0.0 ? 1 : (cross < 0.0 ? -1 : 0));
    }
  }
  return side;
}

}  // namespace ceik
