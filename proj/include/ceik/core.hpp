#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace ceik {

using cplx = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr cplx kI{0.0, 1.0};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Evaluation outside the set where a formula or representation is valid.
class DomainError : public Error {
 public:
  using Error::Error;
};

// A denominator, jacobian or determinant vanished.
class SingularError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

inline double abs2(cplx z) { return std::norm(z); }

// Argument of z in (cut - 2pi, cut].
inline double arg_with_cut(cplx z, double cut) {
  double a = std::arg(z);  // (-pi, pi]
  while (a > cut) a -= 2.0 * kPi;
  while (a <= cut - 2.0 * kPi) a += 2.0 * kPi;
  return a;
}

// log z on the branch whose cut is the ray at angle `cut`.
inline cplx log_with_cut(cplx z, double cut) {
  return {std::log(std::abs(z)), arg_with_cut(z, cut)};
}

}  // namespace ceik
