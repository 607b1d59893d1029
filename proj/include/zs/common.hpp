#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace zs {

struct Error : std::runtime_error {
  explicit Error(const std::string& m) : std::runtime_error(m) {}
};

struct InvalidPotential : Error { using Error::Error; };
struct OutOfRange : Error { using Error::Error; };
struct QuadratureFailure : Error {
  double last_estimate;
  double error_bound;
  QuadratureFailure(const std::string& m, double est, double err)
      : Error(m), last_estimate(est), error_bound(err) {}
};
struct DecayViolation : Error { using Error::Error; };
struct NoBracket : Error { using Error::Error; };
struct RootNotFound : Error { using Error::Error; };
struct AssumptionViolation : Error { using Error::Error; };
struct EvaluationFailure : Error { using Error::Error; };
struct InternalError : Error { using Error::Error; };
struct Overflow : Error {
  double log_magnitude;  // natural log of the overflowing quantity
  Overflow(const std::string& m, double lg) : Error(m), log_magnitude(lg) {}
};
struct NotImplemented : Error { using Error::Error; };
struct IntegrationFailure : Error { using Error::Error; };
struct ConditioningWarning : Error { using Error::Error; };

// Sign-and-log representation for quantities whose magnitude may leave the
// double range (PCF values carry factors like e^{x^2/4} Gamma(1/2-b)^{1/2}).
struct LogVal {
  double lg = -std::numeric_limits<double>::infinity();
  int sign = 0;  // -1, 0, +1

  static LogVal from(double v) {
    if (v == 0.0) return {};
    return {std::log(std::fabs(v)), v > 0 ? 1 : -1};
  }
  double value() const {
    if (sign == 0) return 0.0;
    double v = std::exp(lg);
    if (!std::isfinite(v))
      throw Overflow("LogVal::value overflow", lg);
    return sign * v;
  }
  LogVal operator*(const LogVal& o) const {
    if (sign == 0 || o.sign == 0) return {};
    return {lg + o.lg, sign * o.sign};
  }
  LogVal scaled(double s) const {  // multiply by plain double
    if (s == 0.0 || sign == 0) return {};
    return {lg + std::log(std::fabs(s)), s > 0 ? sign : -sign};
  }
};

// a*b - c*d for log-scaled operands, result as LogVal.
inline LogVal logval_det(const LogVal& a, const LogVal& b, const LogVal& c,
                         const LogVal& d) {
  LogVal ab = a * b, cd = c * d;
  if (ab.sign == 0) return {cd.lg, -cd.sign};
  if (cd.sign == 0) return ab;
  double m = std::max(ab.lg, cd.lg);
  double v = ab.sign * std::exp(ab.lg - m) - cd.sign * std::exp(cd.lg - m);
  if (v == 0.0) return {};
  return {m + std::log(std::fabs(v)), v > 0 ? 1 : -1};
}

}  // namespace zs
