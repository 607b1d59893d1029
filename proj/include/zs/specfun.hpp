#pragma once

// Real-argument Airy functions with the auxiliary (E, M, theta) system, and
// parabolic cylinder functions U(x,b), Ubar(x,b) for x >= 0, b <= 0 with the
// auxiliary (E, M, N, theta, omega) system and the crossing root rho(b).
//
// PCF evaluation routes (chosen for accuracy, overlap-tested):
//   * 1F1 series                      x <= 4.5 and -b <= 10
//   * log-scaled asymptotic series    x >= max(2*sqrt(-b)+10, 15), -b <= 40
//   * Weber-equation ODE bridge       everything else with -b <= 40
//       (outward from x=0 closed forms for Ubar and for U left of the
//        turning point; inward from the asymptotic seed for U right of it)
//   * uniform Airy-type forms         -b > 40 (leading order only, relative
//       error O(1/|b|); used where only percent-level accuracy is consumed)

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <mutex>

#include <boost/math/special_functions/airy.hpp>

#include "zs/common.hpp"
#include "zs/numerics.hpp"

namespace zs::specfun {

// ---------------------------------------------------------------------- Airy

struct AiryBundle {
  double ai, bi, ai1, bi1;
  double e_weight, m_mod, theta_phase;
};

// Biggest negative root of Ai(x) = Bi(x), about -0.36605.
inline double airy_crossover() {
  static const double c = numerics::find_root_bracketed(
      [](double x) {
        return boost::math::airy_ai(x) - boost::math::airy_bi(x);
      },
      -1.0, 0.0, 1e-14);
  return c;
}

// log Ai, log Bi and derivatives for large positive argument (validation-grade
// three-term asymptotics; used by the uniform-PCF path only).
struct AiryLog {
  double lg_ai, lg_bi, lg_ai1, lg_bi1;  // ai1/bi1 carry the (negative) sign
  int sign_ai1 = -1;                    // Ai' < 0 for x > 0
};

inline AiryLog airy_log_large(double x) {
  double xi = (2.0 / 3.0) * std::pow(x, 1.5);
  double u1 = 5.0 / 72.0, u2 = 385.0 / 10368.0;
  double v1 = 7.0 / 72.0, v2 = 455.0 / 10368.0;
  AiryLog r;
  r.lg_ai = -xi - std::log(2.0 * std::sqrt(M_PI)) - 0.25 * std::log(x) +
            std::log1p(-u1 / xi + u2 / (xi * xi));
  r.lg_bi = xi - 0.5 * std::log(M_PI) - 0.25 * std::log(x) +
            std::log1p(u1 / xi + u2 / (xi * xi));
  r.lg_ai1 = -xi - std::log(2.0 * std::sqrt(M_PI)) + 0.25 * std::log(x) +
             std::log1p(v1 / xi - v2 / (xi * xi));
  r.lg_bi1 = xi - 0.5 * std::log(M_PI) + 0.25 * std::log(x) +
             std::log1p(-v1 / xi - v2 / (xi * xi));
  return r;
}

inline AiryBundle airy(double x) {
  if (!std::isfinite(x)) throw OutOfRange("airy: non-finite argument");
  if (x > 104.0) {
    throw Overflow("airy: Bi overflows double range",
                   airy_log_large(x).lg_bi);
  }
  AiryBundle r;
  r.ai = boost::math::airy_ai(x);
  r.bi = boost::math::airy_bi(x);
  r.ai1 = boost::math::airy_ai_prime(x);
  r.bi1 = boost::math::airy_bi_prime(x);
  const double c = airy_crossover();
  if (x <= c) {
    r.e_weight = 1.0;
    r.m_mod = std::hypot(r.ai, r.bi);
    r.theta_phase = std::atan2(r.ai, r.bi);
  } else {
    r.e_weight = std::sqrt(r.bi / r.ai);
    r.m_mod = std::sqrt(2.0 * r.ai * r.bi);
    r.theta_phase = 0.25 * M_PI;
    if (!std::isfinite(r.e_weight))
      throw Overflow("airy: weight E overflows",
                     0.5 * (airy_log_large(x).lg_bi - airy_log_large(x).lg_ai));
  }
  return r;
}

// ----------------------------------------------------------------------- PCF

struct PcfCore {
  LogVal u, u1, ubar, ubar1;
};

struct PcfBundle {
  double u, ubar, u1, ubar1;
  double e_weight, m_mod, n_mod, theta_phase, omega_phase;
  double b, x;
};

namespace detail {

inline double recip_gamma(double z) {
  if (z <= 0.0 && z == std::round(z)) return 0.0;  // pole of Gamma
  return 1.0 / std::tgamma(z);
}

// sin(pi*t) with exact zeros at integer t (radian reduction would leave
// O(eps) residues that break resonant-parameter cases).
inline double sin_pi(double t) {
  double r = std::remainder(t, 2.0);  // in [-1, 1], exact
  if (r == 0.0 || r == 1.0 || r == -1.0) return 0.0;
  if (r > 0.5) r = 1.0 - r;
  if (r < -0.5) r = -1.0 - r;
  return std::sin(M_PI * r);
}

// Kummer 1F1(a;c;z), Kahan-compensated, for moderate z.
inline double kummer_1f1(double a, double c, double z) {
  double sum = 1.0, comp = 0.0, term = 1.0;
  for (int k = 0; k < 800; ++k) {
    term *= (a + k) * z / ((c + k) * (k + 1));
    double yy = term - comp;
    double tt = sum + yy;
    comp = (tt - sum) - yy;
    sum = tt;
    if (std::fabs(term) < 1e-18 * std::fabs(sum) && k > 3) return sum;
  }
  throw EvaluationFailure("1F1 series did not converge");
}

// Closed-form values at x = 0 (valid for all b), in log form.
inline PcfCore pcf_at_zero(double b) {
  auto mk = [](double lg_gamma_part, double pow2_exp, double half_turns) {
    double s = sin_pi(half_turns);
    LogVal v;
    if (s == 0.0) return LogVal{};
    v.lg = -0.5 * std::log(M_PI) + pow2_exp * std::log(2.0) + lg_gamma_part +
           std::log(std::fabs(s));
    v.sign = s > 0 ? 1 : -1;
    return v;
  };
  double lgq = std::lgamma(0.25 - 0.5 * b);   // Gamma(1/4 - b/2), positive arg
  double lg3q = std::lgamma(0.75 - 0.5 * b);  // Gamma(3/4 - b/2)
  double p_u = -0.25 * (2.0 * b + 1.0);
  double p_d = -0.25 * (2.0 * b - 1.0);
  PcfCore r;
  r.u = mk(lgq, p_u, 0.25 - 0.5 * b);
  r.ubar = mk(lgq, p_u, 0.75 - 0.5 * b);
  LogVal u1 = mk(lg3q, p_d, 0.75 - 0.5 * b);
  LogVal ub1 = mk(lg3q, p_d, 1.25 - 0.5 * b);
  u1.sign = -u1.sign;
  ub1.sign = -ub1.sign;
  r.u1 = u1;
  r.ubar1 = ub1;
  return r;
}

// 1F1-series evaluation, plain doubles (safe for x <= 4.5, -b <= 10).
inline PcfCore pcf_series(double x, double b) {
  const double a1 = 0.25 + 0.5 * b, a2 = 0.75 + 0.5 * b;
  const double z = 0.5 * x * x;
  const double F1 = kummer_1f1(a1, 0.5, z);
  const double F2 = kummer_1f1(a2, 1.5, z);
  const double F1d = 2.0 * a1 * kummer_1f1(a1 + 1.0, 1.5, z);  // dF1/dz
  const double F2d = (a2 / 1.5) * kummer_1f1(a2 + 1.0, 2.5, z);
  const double ex = std::exp(-0.25 * x * x);

  const double c1 = std::sqrt(M_PI) * std::pow(2.0, -0.25 * (2.0 * b + 1.0)) *
                    recip_gamma(0.75 + 0.5 * b);
  const double c2 = std::sqrt(M_PI) * std::pow(2.0, -0.25 * (2.0 * b - 1.0)) *
                    recip_gamma(0.25 + 0.5 * b);
  const double d1 = std::pow(M_PI, -0.5) *
                    std::pow(2.0, -0.25 * (2.0 * b + 1.0)) *
                    std::tgamma(0.25 - 0.5 * b) *
                    sin_pi(0.75 - 0.5 * b);
  const double d2 = std::pow(M_PI, -0.5) *
                    std::pow(2.0, -0.25 * (2.0 * b - 1.0)) *
                    std::tgamma(0.75 - 0.5 * b) *
                    sin_pi(1.25 - 0.5 * b);

  auto val = [&](double q1, double q2) {
    return ex * (q1 * F1 - q2 * x * F2);
  };
  auto der = [&](double q1, double q2) {
    return ex * (-0.5 * x * (q1 * F1 - q2 * x * F2) + q1 * x * F1d -
                 q2 * F2 - q2 * x * x * F2d);
  };
  PcfCore r;
  r.u = LogVal::from(val(c1, c2));
  r.u1 = LogVal::from(der(c1, c2));
  r.ubar = LogVal::from(val(d1, d2));
  r.ubar1 = LogVal::from(der(d1, d2));
  return r;
}

// Large-x asymptotic series, log-scaled.  valid for x >= 2*sqrt(-b)+10 when
// -b <= ~40 (the Pochhammer factors pass near zero and the series
// near-terminates).  pm = -1 selects the recessive U expansion, +1 the
// dominant Ubar expansion.
inline void asympt_sums(double x, double b, int pm, double& S, double& Sd) {
  // S   = sum_s sgn^s (a)_{2s} / (s! (2x^2)^s),  a = 1/2 + pm*b... see below
  // Sd  = dS/dx = sum_s ... * (-2s/x)
  const double a = 0.5 + (pm < 0 ? b : -b);
  const double sgn = (pm < 0) ? -1.0 : 1.0;
  double term = 1.0, sum = 1.0, sumd = 0.0;
  double min_term = 1.0;
  bool grew = false;
  for (int s = 0; s < 200; ++s) {
    double next = term * sgn * (a + 2.0 * s) * (a + 2.0 * s + 1.0) /
                  ((s + 1.0) * 2.0 * x * x);
    if (std::fabs(next) >= std::fabs(term) && s > 2) {
      grew = true;
      break;  // truncate at the smallest term
    }
    term = next;
    sum += term;
    sumd += term * (-2.0 * (s + 1.0) / x);
    min_term = std::min(min_term, std::fabs(term));
    if (std::fabs(term) < 1e-17 * std::fabs(sum)) break;
  }
  if (grew && min_term > 1e-11 * std::fabs(sum))
    throw EvaluationFailure("pcf asymptotic series insufficient accuracy");
  S = sum;
  Sd = sumd;
}

inline PcfCore pcf_asympt(double x, double b) {
  PcfCore r;
  {
    double S, Sd;
    asympt_sums(x, b, -1, S, Sd);
    double lgf = -0.25 * x * x + (-b - 0.5) * std::log(x);
    double combo = (-0.5 * x + (-b - 0.5) / x) * S + Sd;
    r.u = {lgf + std::log(std::fabs(S)), S > 0 ? 1 : -1};
    r.u1 = LogVal::from(combo);
    r.u1.lg += lgf;
  }
  {
    double S, Sd;
    asympt_sums(x, b, +1, S, Sd);
    double lgf = 0.5 * std::log(2.0 / M_PI) + std::lgamma(0.5 - b) +
                 0.25 * x * x + (b - 0.5) * std::log(x);
    double combo = (0.5 * x + (b - 0.5) / x) * S + Sd;
    r.ubar = {lgf + std::log(std::fabs(S)), S > 0 ? 1 : -1};
    r.ubar1 = LogVal::from(combo);
    r.ubar1.lg += lgf;
  }
  return r;
}

// Integrate Weber's equation from (x0, seeded value/derivative) to x,
// log-scaled.  Returns {value, derivative} as LogVals.
inline std::array<LogVal, 2> weber_bridge(double b, double x0,
                                          const LogVal& w0, const LogVal& w0p,
                                          double x) {
  double ls = std::max(w0.lg, w0p.lg);
  std::array<double, 2> y = {w0.sign * std::exp(w0.lg - ls),
                             w0p.sign * std::exp(w0p.lg - ls)};
  auto rhs = [b](double t, const std::array<double, 2>& s,
                 std::array<double, 2>& d) {
    d[0] = s[1];
    d[1] = (0.25 * t * t + b) * s[0];
  };
  numerics::ode45_renorm(rhs, x0, x, y, ls, 0.5, 1e-12);
  auto mk = [&](double v) {
    if (v == 0.0) return LogVal{};
    return LogVal{ls + std::log(std::fabs(v)), v > 0 ? 1 : -1};
  };
  return {mk(y[0]), mk(y[1])};
}

// Uniform Airy-type approximation (leading order), for -b > 40.
inline PcfCore pcf_uniform_airy(double x, double b) {
  const double nu = std::sqrt(-2.0 * b);
  const double y = x / (nu * std::sqrt(2.0));

  auto eta_of = [](double yy) {
    if (yy >= 1.0) {
      double I = 0.5 * (yy * std::sqrt(yy * yy - 1.0) - std::acosh(yy));
      return std::pow(1.5 * I, 2.0 / 3.0);
    }
    double I = 0.25 * M_PI - 0.5 * (yy * std::sqrt(1.0 - yy * yy) +
                                    std::asin(yy));
    return -std::pow(1.5 * I, 2.0 / 3.0);
  };
  auto ratio4 = [&](double yy) {  // (eta/(y^2-1))^{1/4}
    double t = yy - 1.0;
    if (std::fabs(t) < 1e-4)
      return std::pow(std::pow(2.0, -2.0 / 3.0) * (1.0 - 0.4 * t), 0.25);
    return std::pow(eta_of(yy) / (yy * yy - 1.0), 0.25);
  };

  const double eta = eta_of(y);
  const double arg = std::pow(nu, 4.0 / 3.0) * eta;
  const double lg_pref = 0.5 * std::log(2.0) + 0.25 * std::log(M_PI) +
                         0.5 * std::lgamma(0.5 + 0.5 * nu * nu) -
                         std::log(nu) / 6.0;
  const double r4 = ratio4(y);
  // d/dy of ratio4 (smooth), central difference
  const double hr = 1e-5 * (1.0 + y);
  const double dr4 = (ratio4(y + hr) - ratio4(y - hr)) / (2.0 * hr);
  // eta'(y) = sqrt((y^2-1)/eta) = ratio^{-1/2}, and r4 = ratio^{1/4}
  const double eta_prime = 1.0 / (r4 * r4);

  LogVal lAi, lBi, lAi1, lBi1;
  if (arg > 25.0) {
    AiryLog al = airy_log_large(arg);
    lAi = {al.lg_ai, 1};
    lBi = {al.lg_bi, 1};
    lAi1 = {al.lg_ai1, -1};
    lBi1 = {al.lg_bi1, 1};
  } else {
    lAi = LogVal::from(boost::math::airy_ai(arg));
    lBi = LogVal::from(boost::math::airy_bi(arg));
    lAi1 = LogVal::from(boost::math::airy_ai_prime(arg));
    lBi1 = LogVal::from(boost::math::airy_bi_prime(arg));
  }

  const double dargdx = std::pow(nu, 4.0 / 3.0) * eta_prime / (nu * M_SQRT2);
  auto assemble = [&](const LogVal& F, const LogVal& Fp) {
    // value = e^{lg_pref} * r4 * F(arg)
    // deriv = e^{lg_pref} * [ dr4/dx * F + r4 * F' * darg/dx ]
    LogVal val = F.scaled(r4);
    val.lg += lg_pref;
    LogVal t1 = F.scaled(dr4 / (nu * M_SQRT2));
    LogVal t2 = Fp.scaled(r4 * dargdx);
    LogVal der;
    if (t1.sign == 0) {
      der = t2;
    } else if (t2.sign == 0) {
      der = t1;
    } else {
      double m = std::max(t1.lg, t2.lg);
      double v = t1.sign * std::exp(t1.lg - m) + t2.sign * std::exp(t2.lg - m);
      der = (v == 0.0) ? LogVal{}
                       : LogVal{m + std::log(std::fabs(v)), v > 0 ? 1 : -1};
    }
    der.lg += lg_pref;
    return std::array<LogVal, 2>{val, der};
  };
  auto [u, u1] = assemble(lAi, lAi1);
  auto [ub, ub1] = assemble(lBi, lBi1);
  PcfCore r;
  r.u = u;
  r.u1 = u1;
  r.ubar = ub;
  r.ubar1 = ub1;
  return r;
}

}  // namespace detail

// Core evaluation, sign-and-log representation (never overflows).
inline PcfCore pcf_core(double x, double b) {
  if (!(x >= 0.0)) throw OutOfRange("pcf: x must be >= 0");
  if (!(b <= 0.0)) throw OutOfRange("pcf: b must be <= 0");
  const double mb = -b;
  if (mb <= 10.0 && x <= 4.5) return detail::pcf_series(x, b);
  if (mb > 40.0) return detail::pcf_uniform_airy(x, b);

  const double xt = 2.0 * std::sqrt(mb);
  const double xfar = std::max(xt + 10.0, 15.0);
  if (x >= xfar) return detail::pcf_asympt(x, b);

  PcfCore r;
  // Ubar: dominant for growing x, outward integration from 0 is stable.
  {
    PcfCore z = detail::pcf_at_zero(b);
    auto [v, d] = detail::weber_bridge(b, 0.0, z.ubar, z.ubar1, x);
    r.ubar = v;
    r.ubar1 = d;
  }
  // U: recessive beyond the turning point -> seed from the asymptotic side
  // and integrate inward; left of the turning point outward from 0 is fine.
  if (x >= xt) {
    PcfCore far = detail::pcf_asympt(xfar, b);
    auto [v, d] = detail::weber_bridge(b, xfar, far.u, far.u1, x);
    r.u = v;
    r.u1 = d;
  } else {
    PcfCore z = detail::pcf_at_zero(b);
    auto [v, d] = detail::weber_bridge(b, 0.0, z.u, z.u1, x);
    r.u = v;
    r.u1 = d;
  }
  return r;
}

// Validation-grade uniform Airy evaluation (exposed for tests).
inline PcfCore pcf_uniform_airy(double x, double b) {
  return detail::pcf_uniform_airy(x, b);
}

// Largest real root of U(x,b) = Ubar(x,b); rho(0) = 0.  Memoized (the root
// is re-used by every auxiliary evaluation at the same b).
inline double crossing_root_rho(double b) {
  if (!(b <= 0.0)) throw OutOfRange("rho: b must be <= 0");
  if (b == 0.0) return 0.0;

  static std::mutex mtx;
  static std::map<double, double> cache;
  {
    std::lock_guard<std::mutex> lk(mtx);
    auto it = cache.find(b);
    if (it != cache.end()) return it->second;
  }

  auto diff = [&](double x) {  // sign-faithful scaled U - Ubar
    PcfCore c = pcf_core(x, b);
    if (c.u.sign == 0) return -double(c.ubar.sign);
    if (c.ubar.sign == 0) return double(c.u.sign);
    double m = std::max(c.u.lg, c.ubar.lg);
    return c.u.sign * std::exp(c.u.lg - m) -
           c.ubar.sign * std::exp(c.ubar.lg - m);
  };

  double root = std::numeric_limits<double>::quiet_NaN();
  const double xt = 2.0 * std::sqrt(-b);
  // two-term asymptotic seed; excellent already for moderate -b
  const double seed = xt + airy_crossover() * std::pow(-b, -1.0 / 6.0);
  for (double w : {0.05, 0.2, 0.8}) {
    double lo = std::max(0.0, seed - w), hi = seed + w;
    double flo = diff(lo), fhi = diff(hi);
    if ((flo > 0) != (fhi > 0)) {
      root = numerics::find_root_bracketed(diff, lo, hi, 1e-12);
      break;
    }
  }
  if (std::isnan(root)) {
    // fall back to a right-to-left scan over the spec bracket, widened
    double lo = std::max(0.0, xt - 2.0), hi = xt + 2.0;
    for (int widen = 0; widen < 6 && std::isnan(root); ++widen) {
      const int n = 200;
      double prev_x = hi, prev_f = diff(hi);
      for (int i = 1; i <= n; ++i) {
        double x = hi - (hi - lo) * i / n;
        double f = diff(x);
        if ((f > 0) != (prev_f > 0) || f == 0.0) {
          root = numerics::find_root_bracketed(diff, x, prev_x, 1e-12);
          break;
        }
        prev_x = x;
        prev_f = f;
      }
      lo = std::max(0.0, lo - 2.0);
      hi += 2.0;
    }
    if (std::isnan(root))
      throw RootNotFound("crossing_root_rho: no sign change found");
  }
  {
    std::lock_guard<std::mutex> lk(mtx);
    cache[b] = root;
  }
  return root;
}

struct PcfAux {
  double e_weight, m_mod, n_mod, theta_phase, omega_phase;
};

inline PcfAux pcf_aux_from_core(const PcfCore& c, double x, double rho) {
  PcfAux a;
  auto rel = [](const LogVal& p, double m) {
    return p.sign == 0 ? 0.0 : p.sign * std::exp(p.lg - m);
  };
  if (x <= rho) {
    double m = std::max(c.u.lg, c.ubar.lg);
    double u = rel(c.u, m), ub = rel(c.ubar, m);
    a.e_weight = 1.0;
    a.m_mod = std::hypot(u, ub) * std::exp(m);
    a.theta_phase = std::atan2(u, ub);
    double md = std::max(c.u1.lg, c.ubar1.lg);
    double u1 = rel(c.u1, md), ub1 = rel(c.ubar1, md);
    a.n_mod = std::hypot(u1, ub1) * std::exp(md);
    a.omega_phase = std::atan2(u1, ub1);
  } else {
    a.e_weight = std::exp(0.5 * (c.ubar.lg - c.u.lg));
    a.m_mod = std::exp(0.5 * (std::log(2.0) + c.u.lg + c.ubar.lg));
    a.theta_phase = 0.25 * M_PI;
    // N^2 = (U'^2 Ubar^2 + Ubar'^2 U^2) / (U Ubar)
    double lg_t1 = 2.0 * (c.u1.lg + c.ubar.lg);
    double lg_t2 = 2.0 * (c.ubar1.lg + c.u.lg);
    double m = std::max(lg_t1, lg_t2);
    double n2 = std::exp(lg_t1 - m) + std::exp(lg_t2 - m);
    a.n_mod = std::exp(0.5 * (m + std::log(n2) - (c.u.lg + c.ubar.lg)));
    // omega = arctan(U' Ubar / (Ubar' U)), branch -> -pi/4 as x -> inf;
    // beyond the turning point U' < 0 < Ubar', U, Ubar > 0, so the principal
    // arctan of the (negative) ratio already sits in (-pi/2, 0).
    double ratio = double(c.u1.sign * c.ubar.sign) /
                   double(c.ubar1.sign * c.u.sign) *
                   std::exp(c.u1.lg + c.ubar.lg - c.ubar1.lg - c.u.lg);
    a.omega_phase = std::atan(ratio);
  }
  return a;
}

inline PcfBundle pcf(double x, double b) {
  PcfCore c = pcf_core(x, b);
  PcfBundle r;
  r.u = c.u.value();
  r.ubar = c.ubar.value();
  r.u1 = c.u1.value();
  r.ubar1 = c.ubar1.value();
  double rho = crossing_root_rho(b);
  PcfAux a = pcf_aux_from_core(c, x, rho);
  r.e_weight = a.e_weight;
  r.m_mod = a.m_mod;
  r.n_mod = a.n_mod;
  r.theta_phase = a.theta_phase;
  r.omega_phase = a.omega_phase;
  r.b = b;
  r.x = x;
  return r;
}

inline PcfAux pcf_aux(double x, double b) {
  return pcf_aux_from_core(pcf_core(x, b), x, crossing_root_rho(b));
}

// Omega(x) M(x,b)^2 / Gamma(1/2-b), assembled in log space (finite even when
// Gamma and M overflow separately).  Omega(x) = 1 + |x|^{1/3}.
inline double m2_over_gamma_weighted(double x, double b, double rho) {
  PcfCore c = pcf_core(x, b);
  double lg_m2;
  if (x <= rho) {
    double m = 2.0 * std::max(c.u.lg, c.ubar.lg);
    lg_m2 = m + std::log(std::exp(2.0 * c.u.lg - m) +
                         std::exp(2.0 * c.ubar.lg - m));
  } else {
    lg_m2 = std::log(2.0) + c.u.lg + c.ubar.lg;
  }
  double omega = 1.0 + std::cbrt(std::fabs(x));
  return omega * std::exp(lg_m2 - std::lgamma(0.5 - b));
}

}  // namespace zs::specfun
