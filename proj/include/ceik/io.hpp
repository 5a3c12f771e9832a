#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "ceik/analytic.hpp"
#include "ceik/refraction.hpp"
#include "ceik/region.hpp"

namespace ceik::io {

using json = nlohmann::json;

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitGates = 2;

class IoError : public Error {
 public:
  using Error::Error;
};

// Sampling box. Subcommands that sample zeta on a closed lattice use
// resolution points per axis including both ends; `variable` uses the
// periodic half-open layout of GridSpec.
struct GridConfig {
  double x0 = -2.5, y0 = -2.5, x1 = 2.5, y1 = 2.5;
  int resolution = 21;
};

struct RunConfig {
  json echo;  // the parsed config after command-line overrides
  json f_spec, n_spec;
  GridConfig grid;
  double tol = 1e-8;           // constant-index residual gate
  double beltrami_tol = 1e-4;  // Beltrami / W-equation residual gate
  double loop_tol = 1e-6;      // closed-cell integral gate for phi
  double eikonal_tol = 1e-4;   // variable-index eikonal residual gate
  std::set<std::string> outputs{"csv", "json"};
  int theta_samples = 512;     // circle sampling and zero-set search
  int caustic_samples = 4096;  // points per caustic polyline
  int light_per_arc = 16;      // light lines drawn per arc
  double k = 20.0;
  cplx phi_constant{};
  double branch_cut = kPi;
  double unit_guard = 1e-3;  // skip samples with |1 - |zeta|^4| below this
  BBox bbox{-3, 3, -3, 3};
  double margin = 0.1;
};

AnalyticFunction parse_f(const json& spec);
RefractionField parse_n(const json& spec);

// Throws ConfigError on missing or malformed fields.
RunConfig parse_config(const json& j);

struct Invocation {
  std::string subcommand;
  std::filesystem::path config;  // optional for verify
  std::filesystem::path out;
  std::optional<int> grid;
  std::optional<double> tol;
  std::optional<std::string> formats;  // comma separated
};

// Runs one subcommand, writes artifacts to inv.out and a summary to `log`.
// Returns kExitOk, kExitGates or kExitError.
int run(const Invocation& inv, std::ostream& log);

// Shortest text that reads back to the same double.
std::string fmt_num(double x);

// |4 phi_z phi_zbar - n^2| from the parametric derivatives; NaN when the
// Legendre jacobian vanishes.
double residual_from_derivatives(cplx phi_zeta, cplx phi_zeta_bar, cplx z_zeta, cplx z_zeta_bar,
                                 double n);

}  // namespace ceik::io
