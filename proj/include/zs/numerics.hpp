#pragma once

// Shared numerical kernels: adaptive quadrature robust to square-root endpoint
// singularities, improper tail integrals with a declared decay envelope, and
// bracketed root-finding.  All functions are pure.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <variant>
#include <vector>

#include "zs/common.hpp"

namespace zs::numerics {

struct QuadratureSpec {
  double abs_tol = 1e-11;
  double rel_tol = 1e-10;
  int max_refinements = 50;  // max bisection depth of a panel
};

namespace detail {

// Gauss 7 / Kronrod 15 pair on [a,b]; no endpoint evaluations.
template <class F>
double gk15(const F& f, double a, double b, double& err) {
  static const double xk[8] = {
      0.0,
      0.4058451513773972,  0.7415311855993944,  0.9491079123427585,
      0.2077849550078985,  0.5860872354676911,  0.8648644233597691,
      0.9914553711208126};
  static const double wg[4] = {
      0.4179591836734694, 0.3818300505051189, 0.2797053914892767,
      0.1294849661688697};
  static const double wk[8] = {
      0.2094821410847278, 0.1903505780647854, 0.1406532597155259,
      0.0630920926299786, 0.2044329400752989, 0.1690047266392679,
      0.1047900103222502, 0.0229353220105292};

  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double f0 = f(c);
  double g7 = wg[0] * f0;
  double k15 = wk[0] * f0;
  for (int i = 1; i < 8; ++i) {
    double fi = f(c + h * xk[i]) + f(c - h * xk[i]);
    k15 += wk[i] * fi;
    if (i < 4) g7 += wg[i] * fi;
  }
  g7 *= h;
  k15 *= h;
  err = std::pow(200.0 * std::fabs(g7 - k15), 1.5);
  return k15;
}

template <class F>
double adapt_rec(const F& f, double a, double b, double tol, int depth,
                 const QuadratureSpec& spec, long& panels) {
  double err;
  double s = gk15(f, a, b, err);
  if (!std::isfinite(s))
    throw QuadratureFailure("non-finite quadrature panel", s, err);
  if (err <= tol || (b - a) < 1e-15 * (std::fabs(a) + std::fabs(b) + 1.0))
    return s;
  if (depth >= spec.max_refinements || panels > 4'000'000)
    throw QuadratureFailure("quadrature did not converge", s, err);
  double m = 0.5 * (a + b);
  panels += 2;
  return adapt_rec(f, a, m, 0.5 * tol, depth + 1, spec, panels) +
         adapt_rec(f, m, b, 0.5 * tol, depth + 1, spec, panels);
}

}  // namespace detail

// Adaptive quadrature of a continuous integrand on [lo,hi].
template <class F>
double integrate_adaptive(const F& f, double lo, double hi,
                          const QuadratureSpec& spec = {}) {
  if (lo == hi) return 0.0;
  long panels = 0;
  double err;
  double coarse = detail::gk15(f, lo, hi, err);
  double tol = std::max(spec.abs_tol, spec.rel_tol * std::fabs(coarse));
  return detail::adapt_rec(f, lo, hi, tol, 0, spec, panels);
}

// Integrate f over [lo,hi] where f may vanish like sqrt(distance) -- or blow
// up like 1/sqrt(distance) -- at one or both endpoints.  Substitution
// x = m + h*sin(theta) maps to a smooth (or bounded) integrand in theta.
// The distances to the endpoints are computed with the half-angle forms
// 1±sin(theta) = 2 sin/cos^2(theta/2 ± pi/4) to keep them accurate near the
// ends, which matters for inverse-square-root integrands.
template <class F>
double integrate_sqrt_endpoints(const F& f, double lo, double hi,
                                const QuadratureSpec& spec = {}) {
  if (lo == hi) return 0.0;
  if (lo > hi) return -integrate_sqrt_endpoints(f, hi, lo, spec);
  const double h = 0.5 * (hi - lo);
  auto g = [&](double th) {
    double sp = std::sin(0.5 * th + 0.25 * M_PI);  // 1+sin = 2 sp^2
    double cp = std::cos(0.5 * th + 0.25 * M_PI);  // 1-sin = 2 cp^2
    double dlo = 2.0 * h * sp * sp;                // x - lo
    double dhi = 2.0 * h * cp * cp;                // hi - x
    double x = (th <= 0.0) ? lo + dlo : hi - dhi;
    double v = f(x) * h * std::cos(th);
    if (!std::isfinite(v)) {
      // Endpoint-limit evaluations may produce inf*0; the measure there is
      // zero, so drop them rather than poisoning the panel.
      if (std::min(dlo, dhi) < 1e-13 * h) return 0.0;
      throw QuadratureFailure("non-finite integrand inside interval", v, 0.0);
    }
    return v;
  };
  return integrate_adaptive(g, -0.5 * M_PI, 0.5 * M_PI, spec);
}

struct AlgebraicDecay {  // |f(t)| <= C * t^{-p} eventually, p > 1
  double p;
  double C = 1.0;
};
struct ExponentialDecay {  // |f(t)| <= C * e^{-rate*t} eventually
  double rate;
  double C = 1.0;
};
using Decay = std::variant<AlgebraicDecay, ExponentialDecay>;

// Integral of f over [lo, +inf): truncation point T chosen so the declared
// envelope bounds the remainder below abs_tol, adaptive quadrature on
// geometrically growing segments of [lo, T].
template <class F>
double integrate_tail(const F& f, double lo, const Decay& decay,
                      const QuadratureSpec& spec = {}) {
  double T;
  double envelope_at_T;
  if (std::holds_alternative<AlgebraicDecay>(decay)) {
    auto d = std::get<AlgebraicDecay>(decay);
    if (d.p <= 1.0) throw DecayViolation("algebraic decay needs p > 1");
    // remainder bound C*T^{1-p}/(p-1) = abs_tol
    T = std::pow(d.C / (spec.abs_tol * (d.p - 1.0)), 1.0 / (d.p - 1.0));
    T = std::clamp(T, std::max(lo, 1.0) + 1.0, 1e8);
    envelope_at_T = d.C * std::pow(T, -d.p);
  } else {
    auto d = std::get<ExponentialDecay>(decay);
    if (d.rate <= 0.0) throw DecayViolation("exponential decay needs rate > 0");
    T = std::log(std::max(d.C / (spec.abs_tol * d.rate), 2.0)) / d.rate;
    T = std::clamp(T, std::max(lo, 0.0) + 1.0, 1e8);
    envelope_at_T = d.C * std::exp(-d.rate * T);
  }
  if (std::fabs(f(T)) > 10.0 * envelope_at_T + 1e-300)
    throw DecayViolation("integrand exceeds declared decay envelope at T");

  // ~log2(T-lo) segments; split the tolerance across them.
  QuadratureSpec seg = spec;
  seg.abs_tol = spec.abs_tol / 64.0;
  double sum = 0.0;
  double x0 = lo, w = std::min(1.0, T - lo);
  while (x0 < T) {
    double x1 = std::min(x0 + w, T);
    sum += integrate_adaptive(f, x0, x1, seg);
    x0 = x1;
    w *= 2.0;
  }
  return sum;
}

// Hybrid bisection/secant root finder on a bracket.
template <class G>
double find_root_bracketed(const G& g, double lo, double hi, double tol) {
  double flo = g(lo), fhi = g(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0) == (fhi > 0))
    throw NoBracket("find_root_bracketed: no sign change on bracket");
  for (int it = 0; it < 200 && (hi - lo) > tol; ++it) {
    // secant proposal, clipped to the middle 90% of the bracket
    double mid;
    double denom = fhi - flo;
    if (denom != 0.0) {
      mid = lo - flo * (hi - lo) / denom;
      double lop = lo + 0.05 * (hi - lo), hip = hi - 0.05 * (hi - lo);
      if (!(mid > lop && mid < hip)) mid = 0.5 * (lo + hi);
    } else {
      mid = 0.5 * (lo + hi);
    }
    double fm = g(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
      fhi = fm;
    }
  }
  return 0.5 * (lo + hi);
}

// Safeguarded Newton on a monotone g with analytic derivative; falls back to
// bisection whenever the Newton step leaves the bracket.
template <class G, class DG>
double newton_bracketed(const G& g, const DG& dg, double lo, double hi,
                        double tol) {
  double flo = g(lo), fhi = g(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0) == (fhi > 0))
    throw NoBracket("newton_bracketed: no sign change on bracket");
  double x = 0.5 * (lo + hi);
  double fx = g(x);
  for (int it = 0; it < 100; ++it) {
    if (fx == 0.0 || (hi - lo) <= tol) break;
    if ((fx > 0) == (flo > 0)) {
      lo = x;
      flo = fx;
    } else {
      hi = x;
      fhi = fx;
    }
    double d = dg(x);
    double xn = (d != 0.0) ? x - fx / d : 0.5 * (lo + hi);
    if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
    if (std::fabs(xn - x) <= 0.25 * tol) {
      x = xn;
      fx = g(x);
      break;
    }
    x = xn;
    fx = g(x);
  }
  return x;
}

// ---------------------------------------------------------------------------
// Generic adaptive Dormand-Prince 5(4) integrator on fixed-size states.

namespace ode_detail {

inline double comp_abs(double v) { return std::fabs(v); }
inline double comp_abs(const std::complex<double>& v) { return std::abs(v); }

template <class State>
double sup_norm(const State& y) {
  double m = 0.0;
  for (const auto& c : y) m = std::max(m, comp_abs(c));
  return m;
}

template <class State>
State axpy(const State& y, double h, const State& k) {
  State r = y;
  for (size_t i = 0; i < y.size(); ++i) r[i] = y[i] + h * k[i];
  return r;
}

}  // namespace ode_detail

// Integrates y' = f(t, y) from t0 to t1 (either direction), adapting the step
// to meet |local error| <= atol + rtol*|y| per step.  State is std::array of
// double or complex<double>.
template <class State, class F>
void ode45(const F& f, double t0, double t1, State& y, double rtol = 1e-10,
           double atol = 1e-13) {
  using ode_detail::axpy;
  using ode_detail::sup_norm;
  static const double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static const double a21 = 1.0 / 5;
  static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                      a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                      a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                      a65 = -5103.0 / 18656;
  static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                      b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static const double e1 = 35.0 / 384 - 5179.0 / 57600,
                      e3 = 500.0 / 1113 - 7571.0 / 16695,
                      e4 = 125.0 / 192 - 393.0 / 640,
                      e5 = -2187.0 / 6784 + 92097.0 / 339200,
                      e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

  if (t0 == t1) return;
  const double dir = (t1 > t0) ? 1.0 : -1.0;
  double span = std::fabs(t1 - t0);
  double h = dir * std::min(0.1 * span + 1e-12, 0.1);
  double t = t0;
  State k1;
  f(t, y, k1);
  long nsteps = 0;
  while (dir * (t1 - t) > 0.0) {
    if (++nsteps > 40'000'000)
      throw IntegrationFailure("ode45: step budget exhausted");
    if (dir * (t + h - t1) > 0.0) h = t1 - t;
    State y2 = axpy(y, h * a21, k1);
    State k2;
    f(t + c2 * h, y2, k2);
    State y3 = y;
    for (size_t i = 0; i < y.size(); ++i)
      y3[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    State k3;
    f(t + c3 * h, y3, k3);
    State y4 = y;
    for (size_t i = 0; i < y.size(); ++i)
      y4[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    State k4;
    f(t + c4 * h, y4, k4);
    State y5 = y;
    for (size_t i = 0; i < y.size(); ++i)
      y5[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] +
                          a54 * k4[i]);
    State k5;
    f(t + c5 * h, y5, k5);
    State y6 = y;
    for (size_t i = 0; i < y.size(); ++i)
      y6[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] +
                          a64 * k4[i] + a65 * k5[i]);
    State k6;
    f(t + h, y6, k6);
    State ynew = y;
    for (size_t i = 0; i < y.size(); ++i)
      ynew[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] +
                            b5 * k5[i] + b6 * k6[i]);
    State k7;
    f(t + h, ynew, k7);
    State errv = y;
    for (size_t i = 0; i < y.size(); ++i)
      errv[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                     e6 * k6[i] + e7 * k7[i]);
    double sc = atol + rtol * std::max(sup_norm(y), sup_norm(ynew));
    double err = sup_norm(errv) / sc;
    if (err <= 1.0) {
      t += h;
      y = ynew;
      k1 = k7;  // FSAL
    }
    double fac = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
    h *= std::clamp(fac, 0.2, 5.0);
    if (std::fabs(h) < 1e-14 * (std::fabs(t) + 1.0))
      throw IntegrationFailure("ode45: step size underflow");
  }
}

// Same, for linear systems whose solutions grow exponentially: integrates in
// chunks, renormalizing the state to unit sup-norm after each chunk and
// accumulating the log of the scale in log_scale.  Signs/phases of the state
// are preserved (scale factors are positive).
template <class State, class F>
void ode45_renorm(const F& f, double t0, double t1, State& y,
                  double& log_scale, double chunk = 0.5, double rtol = 1e-10,
                  double atol = 0.0) {
  const double dir = (t1 > t0) ? 1.0 : -1.0;
  double t = t0;
  while (dir * (t1 - t) > 0.0) {
    double tn = t + dir * chunk;
    if (dir * (tn - t1) > 0.0) tn = t1;
    double m0 = ode_detail::sup_norm(y);
    if (m0 > 0.0 && (m0 > 1e100 || m0 < 1e-100)) {
      for (auto& c : y) c /= m0;
      log_scale += std::log(m0);
      m0 = 1.0;
    }
    ode45(f, t, tn, y, rtol, atol > 0 ? atol : 1e-14 * std::max(m0, 1.0));
    t = tn;
  }
  double m = ode_detail::sup_norm(y);
  if (m > 0.0 && m != 1.0) {
    for (auto& c : y) c /= m;
    log_scale += std::log(m);
  }
}

}  // namespace zs::numerics
