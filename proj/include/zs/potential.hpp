#pragma once

// Bell-shaped decaying potentials A(x): catalog, assumption validation, and
// the half-line inverse A(a) = mu.

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "zs/common.hpp"
#include "zs/numerics.hpp"

namespace zs {

enum class TailKind { Rational, Exponential, Generic };

struct TailClass {
  TailKind kind = TailKind::Generic;
  double exponent = 0.0;  // d for rational |x|^{-d}, delta for exp(-c|x|^delta)
  double C = 1.0;
};

struct Potential {
  std::function<double(double)> A;   // amplitude, even, positive, unimodal
  std::function<double(double)> A1;  // dA/dx
  std::function<double(double)> A2;  // d2A/dx2
  double a_max_amplitude = 1.0;      // A(0)
  double tau = 1.0;                  // decay rate in the |x|^{-(1+tau)} sense
  TailClass tail;
  std::string name = "custom";

  // Half-line truncation beyond which tail contributions are below noise for
  // the catalog potentials.
  double x_max() const { return tail.kind == TailKind::Rational ? 50.0 : 10.0; }
};

inline Potential rational_lorentz() {
  Potential p;
  p.A = [](double x) { return 1.0 / (1.0 + x * x); };
  p.A1 = [](double x) {
    double d = 1.0 + x * x;
    return -2.0 * x / (d * d);
  };
  p.A2 = [](double x) {
    double d = 1.0 + x * x;
    return (6.0 * x * x - 2.0) / (d * d * d);
  };
  p.a_max_amplitude = 1.0;
  p.tau = 1.0;
  p.tail = {TailKind::Rational, 2.0, 1.0};
  p.name = "rational_lorentz";
  return p;
}

inline Potential sech_potential() {
  Potential p;
  p.A = [](double x) { return 1.0 / std::cosh(x); };
  p.A1 = [](double x) {
    double s = 1.0 / std::cosh(x);
    return -s * std::tanh(x);
  };
  p.A2 = [](double x) {
    double s = 1.0 / std::cosh(x);
    double t = std::tanh(x);
    return s * t * t - s * s * s;
  };
  p.a_max_amplitude = 1.0;
  p.tau = 2.0;
  p.tail = {TailKind::Exponential, 1.0, 2.0};
  p.name = "sech";
  return p;
}

inline Potential gaussian_potential() {
  Potential p;
  p.A = [](double x) { return std::exp(-x * x); };
  p.A1 = [](double x) { return -2.0 * x * std::exp(-x * x); };
  p.A2 = [](double x) { return (4.0 * x * x - 2.0) * std::exp(-x * x); };
  p.a_max_amplitude = 1.0;
  p.tau = 2.0;
  p.tail = {TailKind::Exponential, 2.0, 1.0};
  p.name = "gaussian";
  return p;
}

// Scaled kernel amp*K(x/width); used by the CLI inline-potential format.
inline Potential scaled_potential(const Potential& base, double amp,
                                  double width) {
  if (!(amp > 0.0) || !(width > 0.0))
    throw InvalidPotential("amplitude and width must be positive");
  Potential p = base;
  auto A = base.A, A1 = base.A1, A2 = base.A2;
  p.A = [=](double x) { return amp * A(x / width); };
  p.A1 = [=](double x) { return amp / width * A1(x / width); };
  p.A2 = [=](double x) { return amp / (width * width) * A2(x / width); };
  p.a_max_amplitude = amp * base.a_max_amplitude;
  p.name = base.name + "_scaled";
  return p;
}

inline Potential make_potential(const std::string& name) {
  if (name == "rational_lorentz") return rational_lorentz();
  if (name == "sech") return sech_potential();
  if (name == "gaussian") return gaussian_potential();
  throw InvalidPotential("unknown potential '" + name +
                         "' (catalog: rational_lorentz, sech, gaussian)");
}

// The coupled triple (mu, a, alpha): eigenvalue parameter, turning point,
// Liouville radius.  alpha is filled by the Liouville module.
struct SpectralPoint {
  double mu = 0.0;
  double a = 0.0;
  double alpha = 0.0;
};

struct ValidationReport {
  struct Check {
    std::string what;
    bool pass = true;
    double witness_x = 0.0;
    std::string detail;
  };
  std::vector<Check> checks;
  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

// Numerically verifies the standing assumptions on A over a symmetric grid.
inline ValidationReport validate_assumptions(const Potential& p,
                                             int n_grid = 2001) {
  const double X = p.x_max();
  ValidationReport rep;
  ValidationReport::Check positivity{"A > 0"}, evenness{"A(-x) = A(x)"},
      unimodal{"x*A'(x) < 0 for x != 0"}, curvature{"A''(0) < 0"},
      tail{"tail decay bounds"};

  for (int i = 0; i < n_grid; ++i) {
    double x = -X + 2.0 * X * i / (n_grid - 1);
    double v = p.A(x);
    if (!std::isfinite(v))
      throw InvalidPotential("non-finite A at x=" + std::to_string(x));
    if (v <= 0.0 && positivity.pass) {
      positivity.pass = false;
      positivity.witness_x = x;
    }
    double vm = p.A(-x);
    if (std::fabs(v - vm) > 1e-12 * std::fabs(v) && evenness.pass) {
      evenness.pass = false;
      evenness.witness_x = x;
    }
    if (x != 0.0 && x * p.A1(x) >= 0.0 && unimodal.pass) {
      unimodal.pass = false;
      unimodal.witness_x = x;
    }
  }
  if (!(p.A2(0.0) < 0.0)) {
    curvature.pass = false;
    curvature.witness_x = 0.0;
  }
  // Tail boundedness: |A| |x|^{1+tau}, |A'| |x|^{2+tau}, |A''| |x|^{3+tau}
  // bounded on the sampled tail (monitored against 100x the value at X/2).
  {
    double x0 = X / 2.0;
    double b0 = std::fabs(p.A(x0)) * std::pow(x0, 1.0 + p.tau);
    double b1 = std::fabs(p.A1(x0)) * std::pow(x0, 2.0 + p.tau);
    double b2 = std::fabs(p.A2(x0)) * std::pow(x0, 3.0 + p.tau);
    for (int i = 0; i <= 200; ++i) {
      double x = x0 + (X - x0) * i / 200.0;
      if (std::fabs(p.A(x)) * std::pow(x, 1.0 + p.tau) > 100.0 * b0 + 1e-12 ||
          std::fabs(p.A1(x)) * std::pow(x, 2.0 + p.tau) > 100.0 * b1 + 1e-12 ||
          std::fabs(p.A2(x)) * std::pow(x, 3.0 + p.tau) > 100.0 * b2 + 1e-12) {
        tail.pass = false;
        tail.witness_x = x;
        break;
      }
    }
  }
  rep.checks = {positivity, evenness, unimodal, curvature, tail};
  return rep;
}

// Solves A(a) = mu on [0, x_max] (a only; see liouville.hpp turning_point for
// the full SpectralPoint with alpha).
inline double turning_point_a(const Potential& p, double mu) {
  const double amax = p.a_max_amplitude;
  if (!(mu > 0.0) || mu > amax * (1.0 + 1e-14))
    throw OutOfRange("turning_point: mu must lie in (0, A_max]");
  if (mu >= amax) return 0.0;
  double hi = p.x_max();
  if (p.A(hi) > mu) {
    while (p.A(hi) > mu && hi < 1e9) hi *= 2.0;
    if (p.A(hi) > mu) throw OutOfRange("turning_point: mu below reachable tail");
  }
  auto g = [&](double x) { return p.A(x) - mu; };
  // bisection, then one Newton polish with A'
  double lo = 0.0;
  double flo = g(lo);
  for (int it = 0; it < 200 && (hi - lo) > 1e-13 * (1.0 + hi); ++it) {
    double m = 0.5 * (lo + hi);
    double fm = g(m);
    if (fm == 0.0) {
      lo = hi = m;
      break;
    }
    if ((fm > 0) == (flo > 0)) {
      lo = m;
      flo = fm;
    } else {
      hi = m;
    }
  }
  double a = 0.5 * (lo + hi);
  double d = p.A1(a);
  if (d != 0.0) {
    double an = a - (p.A(a) - mu) / d;
    if (an > 0.0 && std::isfinite(an)) a = an;
  }
  return a;
}

// Worst relative error of the analytic derivatives against central finite
// differences (audit only; analytic derivatives are the primary path).
inline double finite_difference_audit(const Potential& p) {
  // 5-point stencils: O(h^4) truncation keeps the eps/h^2 roundoff of the
  // second difference below the audit tolerance.
  const double h = 1e-3;
  double worst = 0.0;
  for (int i = 0; i <= 100; ++i) {
    double x = -5.0 + 10.0 * i / 100.0;
    double fm2 = p.A(x - 2 * h), fm1 = p.A(x - h), f0 = p.A(x),
           fp1 = p.A(x + h), fp2 = p.A(x + 2 * h);
    double d1 = (fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2) / (12.0 * h);
    double d2 =
        (-fm2 + 16.0 * fm1 - 30.0 * f0 + 16.0 * fp1 - fp2) / (12.0 * h * h);
    double a1 = p.A1(x), a2 = p.A2(x);
    double s1 = std::max(std::fabs(a1), 1e-3);
    double s2 = std::max(std::fabs(a2), 1e-3);
    worst = std::max(worst, std::fabs(d1 - a1) / s1);
    worst = std::max(worst, std::fabs(d2 - a2) / s2);
  }
  return worst;
}

}  // namespace zs
