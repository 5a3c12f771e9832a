#pragma once

#include <optional>
#include <vector>

#include "ceik/analytic.hpp"

namespace ceik {

// A line {point + t * direction : t real} in the z-plane, |direction| = 1.
struct Line {
  cplx point{};
  cplx direction{1.0, 0.0};
};

struct Segment {
  cplx a{}, b{};
};

// Real 2x2 system Z - kappa conj(Z) = rhs, written as
//   [1 - Re k, -Im k; -Im k, 1 + Re k] (x, y)^T = (Re rhs, Im rhs)^T.
// Its determinant is 1 - |kappa|^2 and its singular values are 1 +- |kappa|.
struct RaySolution {
  enum class Rank { point, line, inconsistent };
  Rank rank = Rank::point;
  cplx point{};          // unique solution, or the foot point of the line
  cplx direction{};      // null direction when rank == line
  double smallest_singular = 0.0;
  double compatibility = 0.0;  // |projection of rhs on the left null space|
};

RaySolution solve_ray_system(cplx kappa, cplx rhs, double rank_tol = 1e-9);

// Determinant of the ray system at zeta = r e^{i theta} (equals 1 - r^4).
double ray_determinant(double r, double theta);

// Re[f(e^{i theta}) e^{-i theta}].
double condition(const AnalyticFunction& f, double theta);

struct Arc {
  double lo = 0.0, hi = 0.0;  // lo < hi, angles in radians
  bool contains(double theta, double margin = 0.0) const;
};

// Zero set of the condition on the unit circle: isolated roots and arcs.
struct SPhiSet {
  std::vector<double> points;
  std::vector<Arc> arcs;
  double tol = 0.0;  // absolute zero tolerance used

  bool in_arc(double theta, double margin = 0.0) const;
};

struct SPhiOptions {
  int resolution = 4096;
  double rel_tol = 1e-9;       // scaled by max(1, max |f| on the circle)
  double bisect_tol = 1e-13;
  int min_arc_samples = 3;
};

SPhiSet find_S_phi(const AnalyticFunction& f, const SPhiOptions& opts = {});

// The common line of the degenerate ray system at e^{i theta}. Throws
// DomainError when the condition does not vanish (the two lines are parallel
// and distinct, the point maps to infinity).
Line light_segment(const AnalyticFunction& f, double theta, double tol = 1e-9);

// Radial limit of z(zeta) at e^{i theta} for theta in S_phi.
cplx boundary_limit_point(const AnalyticFunction& f, double theta);

// Caustic point f - e^{i theta} f'/2. Only defined inside an arc of S_phi;
// throws DomainError otherwise.
cplx caustic_point(const AnalyticFunction& f, double theta, const SPhiSet& s_phi);

std::vector<cplx> caustic_polyline(const AnalyticFunction& f, const Arc& arc, int samples,
                                   double endpoint_margin = 1e-6);

struct BBox {
  double x0 = -1, x1 = 1, y0 = -1, y1 = 1;
  bool contains(cplx z) const {
    return z.real() >= x0 && z.real() <= x1 && z.imag() >= y0 && z.imag() <= y1;
  }
};

// Clip a line to a box (Liang-Barsky). Empty if the line misses the box.
std::optional<Segment> clip_line(const Line& line, const BBox& box);

enum class Category { shadow, light_segment, maps_to_infinity };
const char* category_name(Category c);

struct ClassifiedSample {
  cplx zeta{};
  double theta = 0.0;
  Category category = Category::shadow;
  cplx z{};             // shadow: image point
  Line line{};          // light_segment: the light line
  bool inside_disk = false;
  double condition_value = 0.0;
};

struct ClassifyOptions {
  double circle_tol = 1e-12;  // | |zeta| - 1 | below this counts as on the circle
  double zero_tol = 1e-9;     // relative zero tolerance of the condition
};

ClassifiedSample classify(const AnalyticFunction& f, cplx zeta, const ClassifyOptions& opts = {});

// Light lines for `samples` angles spread over each arc, clipped to the box.
std::vector<Segment> sweep_light_segments(const AnalyticFunction& f, const SPhiSet& s_phi,
                                          int samples_per_arc, const BBox& box);

// Which side of a polyline z lies on, judged against the nearest segment:
// +1 left, -1 right, 0 when the nearest point is an end of the polyline (the
// comparison is only local).
int side_of_polyline(const std::vector<cplx>& polyline, cplx z);

}  // namespace ceik
