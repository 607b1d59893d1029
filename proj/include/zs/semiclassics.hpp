#pragma once

// Bohr-Sommerfeld eigenvalues, eigenvalue counting, norming constants,
// connection coefficients and the parabolic-cylinder approximate solutions
// with rigorous error envelopes.

#include <cmath>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "zs/common.hpp"
#include "zs/liouville.hpp"
#include "zs/numerics.hpp"
#include "zs/potential.hpp"
#include "zs/specfun.hpp"

namespace zs {

struct EigenRecord {
  int n = 0;
  double a_wkb = 0.0;
  double mu_wkb = 0.0;
  double alpha_wkb = 0.0;
  double hbar = 0.0;
  double residual = 0.0;  // |Phi(a) - pi(n+1/2)hbar| after the solve
  int norming_sign = +1;  // (-1)^n
};

// Quantization: solve Phi(a) = pi(n+1/2)hbar for every admissible n.
// Phi is strictly increasing in a, so each target has a unique root;
// brackets for consecutive targets are disjoint by monotonicity.
inline std::vector<EigenRecord> bs_eigenvalues(const Potential& p, double hbar,
                                               double mu_floor = -1.0) {
  if (!(hbar > 0.0)) throw OutOfRange("bs_eigenvalues: hbar must be > 0");
  if (mu_floor < 0.0) mu_floor = 0.05 * p.a_max_amplitude;
  if (!(mu_floor < p.a_max_amplitude))
    throw OutOfRange("bs_eigenvalues: mu_floor must be < A_max");
  const double a_top =
      turning_point_a(p, std::max(mu_floor, 1e-12 * p.a_max_amplitude));
  const double phi_top = action_phi(p, a_top);

  std::vector<EigenRecord> out;
  double a_lo = 0.0;
  for (int n = 0;; ++n) {
    const double target = M_PI * (n + 0.5) * hbar;
    if (target > phi_top) break;
    double a = numerics::newton_bracketed(
        [&](double t) { return action_phi(p, t) - target; },
        [&](double t) { return action_phi_derivative(p, t); }, a_lo, a_top,
        1e-13 * (1.0 + a_top));
    // one explicit Newton polish to push the action residual to ~1e-13
    double r = action_phi(p, a) - target;
    double dp = action_phi_derivative(p, a);
    if (dp > 0.0) {
      double an = a - r / dp;
      if (an > 0.0 && an < a_top) a = an;
    }
    EigenRecord rec;
    rec.n = n;
    rec.a_wkb = a;
    rec.mu_wkb = p.A(a);
    rec.alpha_wkb = std::sqrt(2.0 * target / M_PI);
    rec.hbar = hbar;
    rec.residual = std::fabs(action_phi(p, a) - target);
    rec.norming_sign = (n % 2 == 0) ? +1 : -1;
    out.push_back(rec);
    a_lo = a;  // next target is larger, so its root lies to the right
  }
  return out;
}

// Semiclassical counting: estimate = [Phi(a1) - Phi(a2)]/(pi hbar) and the
// exact number of quantization targets inside the action window.
inline std::pair<double, long> count_eigenvalues(const Potential& p,
                                                 double mu1, double mu2,
                                                 double hbar) {
  if (!(mu1 <= mu2))
    throw OutOfRange("count_eigenvalues: need mu1 <= mu2");
  if (mu1 == mu2) return {0.0, 0};
  double a1 = turning_point_a(p, mu1);  // mu1 smaller => a1 larger
  double a2 = turning_point_a(p, mu2);
  double phi1 = action_phi(p, a1), phi2 = action_phi(p, a2);
  double estimate = (phi1 - phi2) / (M_PI * hbar);
  // # { n >= 0 : pi(n+1/2)hbar in (phi2, phi1) }
  long n_min = (long)std::floor(phi2 / (M_PI * hbar) - 0.5) + 1;
  if (n_min < 0) n_min = 0;
  long n_max = (long)std::ceil(phi1 / (M_PI * hbar) - 0.5) - 1;
  long count = n_max >= n_min ? (n_max - n_min + 1) : 0;
  return {estimate, count};
}

// Leading norming-constant data: sign (-1)^n with error scale hbar^{2/3}
// (returned as the exponent 2/3).
inline std::pair<int, double> norming_constant(const EigenRecord& rec) {
  return {(rec.n % 2 == 0) ? +1 : -1, 2.0 / 3.0};
}

// ---------------------------------------------------------------------------
// PCF approximate solutions with error envelopes.

enum class ApproxKind { Y1, Y2, Y3, Y4 };

struct ApproxEval {
  double value = 0.0;
  double derivative = 0.0;
  double error_envelope = 0.0;  // bound on |error| of `value`
};

class ApproxSolution {
 public:
  ApproxSolution(const Potential& p, const SpectralPoint& point, double hbar,
                 ApproxKind which)
      : which_(which),
        point_(point),
        hbar_(hbar),
        scale_(std::sqrt(2.0 / hbar)),
        b_(-0.5 * point.alpha * point.alpha / hbar),
        ev_(std::make_shared<ErrorTermEvaluator>(p, point.a)),
        lb_(balancing_l(b_)) {}

  ApproxKind which() const { return which_; }
  const SpectralPoint& point() const { return point_; }
  double hbar() const { return hbar_; }
  double b() const { return b_; }
  const ErrorTermEvaluator& error_term() const { return *ev_; }

  ApproxEval value_at(double zeta) const {
    const bool reflected = (which_ == ApproxKind::Y3 || which_ == ApproxKind::Y4);
    if (!reflected && zeta < 0.0)
      throw OutOfRange("ApproxSolution: Y1/Y2 defined for zeta >= 0");
    if (reflected && zeta > 0.0)
      throw OutOfRange("ApproxSolution: Y3/Y4 defined for zeta <= 0");
    const double s = reflected ? -zeta : zeta;  // nonnegative PCF abscissa
    const bool bar = (which_ == ApproxKind::Y2 || which_ == ApproxKind::Y4);

    specfun::PcfCore c = specfun::pcf_core(s * scale_, b_);
    specfun::PcfAux aux = specfun::pcf_aux(s * scale_, b_);
    ApproxEval r;
    const LogVal& v = bar ? c.ubar : c.u;
    const LogVal& d = bar ? c.ubar1 : c.u1;
    r.value = v.value();
    r.derivative = (reflected ? -1.0 : 1.0) * scale_ * d.value();

    const double half = 0.5 * std::sqrt(M_PI * hbar_) * lb_;
    double var = bar ? variation_V(*ev_, 0.0, s, hbar_)
                     : variation_V(*ev_, s,
                                   std::numeric_limits<double>::infinity(),
                                   hbar_);
    double grow = std::expm1(half * var);
    r.error_envelope = bar ? aux.m_mod * aux.e_weight * grow
                           : (aux.m_mod / aux.e_weight) * grow;
    return r;
  }

 private:
  ApproxKind which_;
  SpectralPoint point_;
  double hbar_, scale_, b_;
  std::shared_ptr<ErrorTermEvaluator> ev_;
  double lb_;
};

inline ApproxSolution approximate_solution(const Potential& p,
                                           const SpectralPoint& point,
                                           double hbar, ApproxKind which) {
  return ApproxSolution(p, point, hbar, which);
}

// ---------------------------------------------------------------------------
// Connection coefficients.
//
// For an even potential the transformed equation is even in zeta, so the
// reflected pair satisfies Y3(zeta) = Y1(-zeta), Y4(zeta) = Y2(-zeta)
// exactly and the Wronskian-ratio formulas collapse to data of Y1, Y2 at
// zeta = 0 (with W[Y3,Y4] = -W[Y1,Y2]):
//   s11 = (Y1 Y2' + Y1' Y2)/W12,  s12 = -2 Y1 Y1'/W12,
//   s21 =  2 Y2 Y2'/W12,          s22 = -s11,  W12 = W[Y1,Y2](0).
//
// Numerical realization: Y1 (recessive at +infinity) is seeded with its PCF
// approximant at zeta = alpha + 6 sqrt(hbar) and integrated inward -- the
// stable, growing direction.  Y2 (dominant at +infinity) cannot be seeded
// beyond the turning point: integrating it inward through the barrier
// amplifies seed and truncation error by exp(2 * barrier-action / hbar).  It
// is therefore seeded with its approximant *at* the turning point zeta =
// alpha (where the envelope is still O(hbar^{2/3})) and integrated through
// the oscillatory region only, which is neutrally stable.  The resulting
// contamination of Y2 by Y1 is O(hbar^{2/3}), inside the asymptotics'
// own error order.
struct ConnectionMatrix {
  double s11 = 0.0, s12 = 0.0, s21 = 0.0, s22 = 0.0;
  double predicted_sin = 0.0;  // sin(pi alpha^2 / (2 hbar)) -> s11
  double predicted_cos = 0.0;  // cos(pi alpha^2 / (2 hbar)) -> s12, s21
  double wronskian_drift = 0.0;  // |W12(0)-W12(seed)| / |W12|, a quality check
};

inline ConnectionMatrix connection_coefficients(const Potential& p,
                                                const SpectralPoint& point,
                                                double hbar) {
  if (!(hbar > 0.0)) throw OutOfRange("connection_coefficients: hbar > 0");
  const double alpha = point.alpha;
  const double scale = std::sqrt(2.0 / hbar);
  const double b = -0.5 * alpha * alpha / hbar;
  ErrorTermEvaluator ev(p, point.a);

  auto rhs = [&](double z, const std::array<double, 2>& y,
                 std::array<double, 2>& d) {
    d[0] = y[1];
    d[1] = ((z * z - alpha * alpha) / (hbar * hbar) + ev.psi(z)) * y[0];
  };

  // seed helper: unit-sup-norm state + log scale from PCF log values
  auto seed = [&](const LogVal& v, const LogVal& d1, std::array<double, 2>& y,
                  double& ls) {
    LogVal dv = d1.scaled(scale);
    double m = std::max(v.lg, dv.lg);
    y = {v.sign * std::exp(v.lg - m), dv.sign * std::exp(dv.lg - m)};
    ls = m;
  };

  // Y1 from zeta_far inward
  const double z_far = alpha + 6.0 * std::sqrt(hbar);
  specfun::PcfCore cf = specfun::pcf_core(z_far * scale, b);
  std::array<double, 2> y1;
  double ls1 = 0.0;
  seed(cf.u, cf.u1, y1, ls1);
  numerics::ode45_renorm(rhs, z_far, 0.0, y1, ls1, 0.25, 1e-11);

  // Y2 from the turning point inward
  specfun::PcfCore ct = specfun::pcf_core(alpha * scale, b);
  std::array<double, 2> y2;
  double ls2 = 0.0;
  seed(ct.ubar, ct.ubar1, y2, ls2);
  numerics::ode45_renorm(rhs, alpha, 0.0, y2, ls2, 0.25, 1e-11);

  // Wronskian in log space: W12 = Y1 Y2' - Y1' Y2, scales exp(ls1 + ls2)
  LogVal w12 = logval_det(LogVal::from(y1[0]), LogVal::from(y2[1]),
                          LogVal::from(y1[1]), LogVal::from(y2[0]));
  if (w12.sign == 0)
    throw InternalError("connection_coefficients: degenerate Wronskian");

  // Ideal Wronskian of the approximant pair: sqrt(2/hbar) W[U,Ubar]
  //   = sqrt(2/hbar) sqrt(2/pi) Gamma(1/2-b); report the relative drift.
  double lg_ideal = std::log(scale) + 0.5 * std::log(2.0 / M_PI) +
                    std::lgamma(0.5 - b);
  double drift = std::fabs(std::expm1(w12.lg + ls1 + ls2 - lg_ideal));

  // numerator carries the product of its two factors' log scales; W12
  // carries ls1 + ls2, so the residual scale is (num scale) - (ls1 + ls2)
  auto ratio = [&](const LogVal& num, double num_ls) {
    if (num.sign == 0) return 0.0;
    return num.sign * w12.sign *
           std::exp(num.lg + num_ls - (w12.lg + ls1 + ls2));
  };
  LogVal a_ = LogVal::from(y1[0]), ap = LogVal::from(y1[1]);
  LogVal b_ = LogVal::from(y2[0]), bp = LogVal::from(y2[1]);
  LogVal s11_num = logval_det(a_, bp, ap.scaled(-1.0), b_);  // Y1Y2' + Y1'Y2
  LogVal s12_num = (a_ * ap).scaled(-2.0);
  LogVal s21_num = (b_ * bp).scaled(2.0);

  ConnectionMatrix m;
  m.s11 = ratio(s11_num, ls1 + ls2);
  m.s12 = ratio(s12_num, 2.0 * ls1);
  m.s21 = ratio(s21_num, 2.0 * ls2);
  m.s22 = -m.s11;
  double phase = 0.5 * M_PI * alpha * alpha / hbar;
  m.predicted_sin = std::sin(phase);
  m.predicted_cos = std::cos(phase);
  m.wronskian_drift = drift;
  return m;
}

// ---------------------------------------------------------------------------
// Near-zero eigenvalue window: records extended down to mu = hbar^{b_exp}
// and the tail-class-dependent error rate for |mu_n - mu_n^{WKB}|.
struct NearZeroReport {
  double mu_lo = 0.0, mu_hi = 0.0;
  std::vector<EigenRecord> records;
  double rate_exponent = 0.0;  // |mu_n - mu_n^{WKB}| = O(hbar^{rate_exponent})
  bool log_correction = false;  // true: additional 1/log(1/hbar) factor
  std::string rate_note;
};

inline NearZeroReport near_zero_window(const Potential& p, double b_exp,
                                       double hbar) {
  if (!(b_exp > 0.0) || !(b_exp < 5.0 / 3.0))
    throw OutOfRange("near_zero_window: exponent must lie in (0, 5/3)");
  NearZeroReport rep;
  rep.mu_lo = std::pow(hbar, b_exp);
  rep.mu_hi = p.a_max_amplitude;
  if (rep.mu_lo >= rep.mu_hi)
    throw OutOfRange("near_zero_window: hbar^b reaches A_max; hbar too large");
  rep.records = bs_eigenvalues(p, hbar, rep.mu_lo);
  switch (p.tail.kind) {
    case TailKind::Rational:
      rep.rate_exponent = 5.0 / 3.0 + b_exp / p.tail.exponent;
      rep.rate_note = "rational tail, decay degree " +
                      std::to_string(p.tail.exponent);
      break;
    case TailKind::Exponential:
      rep.rate_exponent = 5.0 / 3.0;
      rep.log_correction = p.tail.exponent < 1.0;
      rep.rate_note = p.tail.exponent < 1.0
                          ? "exponential tail, index < 1: logarithmic loss"
                          : "exponential tail, index >= 1";
      break;
    case TailKind::Generic:
      rep.rate_exponent = 0.0;
      rep.rate_note = "unspecified by theory for generic tails";
      break;
  }
  return rep;
}

}  // namespace zs
