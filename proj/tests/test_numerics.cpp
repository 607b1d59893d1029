#include <cmath>
#include <random>

#include "doctest.h"
#include "zs/numerics.hpp"
#include "zs/potential.hpp"

using namespace zs;
using namespace zs::numerics;

namespace {

// Brute-force oracle: midpoint rule on the sin-substituted integrand with a
// large fixed panel count.  Independent of the adaptive machinery.
template <class F>
double midpoint_sin_oracle(const F& f, double lo, double hi, long n = 1000000) {
  const double m = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
  double sum = 0.0;
  const double dth = M_PI / n;
  for (long i = 0; i < n; ++i) {
    double th = -0.5 * M_PI + (i + 0.5) * dth;
    sum += f(m + h * std::sin(th)) * h * std::cos(th) * dth;
  }
  return sum;
}

}  // namespace

TEST_CASE("integrate_sqrt_endpoints: circle area") {
  double v = integrate_sqrt_endpoints(
      [](double x) { return std::sqrt(1.0 - x * x); }, -1.0, 1.0);
  CHECK(v == doctest::Approx(M_PI / 2).epsilon(1e-11));
}

TEST_CASE("integrate_sqrt_endpoints: zero-width interval") {
  CHECK(integrate_sqrt_endpoints([](double x) { return x; }, 2.0, 2.0) == 0.0);
}

TEST_CASE("integrate_sqrt_endpoints: action integrand vs brute-force oracle") {
  auto p = rational_lorentz();
  double Aa2 = p.A(1.0) * p.A(1.0);
  auto f = [&](double x) {
    double d = p.A(x) * p.A(x) - Aa2;
    return d > 0 ? std::sqrt(d) : 0.0;
  };
  double v = integrate_sqrt_endpoints(f, -1.0, 1.0);
  double o = midpoint_sin_oracle(f, -1.0, 1.0);
  CHECK(std::fabs(v - o) < 1e-10);
}

TEST_CASE("integrate_sqrt_endpoints: randomized (A,a) against oracle") {
  std::mt19937 rng(12345);
  std::uniform_real_distribution<double> ua(0.2, 2.5);
  auto pots = {rational_lorentz(), sech_potential(), gaussian_potential()};
  int idx = 0;
  for (const auto& p : pots) {
    for (int k = 0; k < 7; ++k, ++idx) {
      double a = ua(rng);
      double Aa2 = p.A(a) * p.A(a);
      auto f = [&](double x) {
        double d = p.A(x) * p.A(x) - Aa2;
        return d > 0 ? std::sqrt(d) : 0.0;
      };
      double v = integrate_sqrt_endpoints(f, -a, a);
      double o = midpoint_sin_oracle(f, -a, a, 400000);
      CHECK(std::fabs(v - o) < std::max(1e-11, 1e-9 * std::fabs(v)));
    }
  }
}

TEST_CASE("integrate_sqrt_endpoints: additivity") {
  auto f = [](double x) { return std::sqrt((1.0 - x) * (x + 1.0)) + 0.3; };
  double whole = integrate_sqrt_endpoints(f, -1.0, 1.0);
  double parts = integrate_sqrt_endpoints(f, -1.0, 0.3) +
                 integrate_sqrt_endpoints(f, 0.3, 1.0);
  CHECK(std::fabs(whole - parts) < 1e-10);
}

TEST_CASE("integrate_sqrt_endpoints: inverse-sqrt endpoint singularity") {
  // int_-1^1 dx/sqrt(1-x^2) = pi
  double v = integrate_sqrt_endpoints(
      [](double x) { return 1.0 / std::sqrt(1.0 - x * x); }, -1.0, 1.0);
  CHECK(v == doctest::Approx(M_PI).epsilon(1e-10));
}

TEST_CASE("integrate_tail: algebraic t^-2") {
  double v = integrate_tail([](double t) { return 1.0 / (t * t); }, 1.0,
                            AlgebraicDecay{2.0, 1.0});
  CHECK(v == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("integrate_tail: exponential e^-t") {
  double v = integrate_tail([](double t) { return std::exp(-t); }, 0.0,
                            ExponentialDecay{1.0, 1.0});
  CHECK(v == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("integrate_tail: half L1 norm of the lorentzian") {
  auto p = rational_lorentz();
  double v = integrate_tail([&](double t) { return p.A(t); }, 0.0,
                            AlgebraicDecay{2.0, 1.0});
  CHECK(v == doctest::Approx(M_PI / 2).epsilon(1e-7));
}

TEST_CASE("integrate_tail: decay violation detected") {
  CHECK_THROWS_AS(integrate_tail([](double t) { return 1.0 / (1.0 + t); }, 1.0,
                                 AlgebraicDecay{3.0, 1.0}),
                  DecayViolation);
}

TEST_CASE("find_root_bracketed: sqrt(2)") {
  double r = find_root_bracketed([](double x) { return x * x - 2.0; }, 1.0,
                                 2.0, 1e-12);
  CHECK(r == doctest::Approx(std::sqrt(2.0)).epsilon(1e-11));
  CHECK(r >= 1.0);
  CHECK(r <= 2.0);
}

TEST_CASE("find_root_bracketed: root at bracket edge") {
  double r = find_root_bracketed([](double x) { return x - 1.0; }, 1.0, 2.0,
                                 1e-12);
  CHECK(r == 1.0);
}

TEST_CASE("find_root_bracketed: no sign change throws") {
  CHECK_THROWS_AS(find_root_bracketed([](double x) { return x * x + 1.0; },
                                      -1.0, 1.0, 1e-12),
                  NoBracket);
}

TEST_CASE("ode45: harmonic oscillator round trip") {
  std::array<double, 2> y = {1.0, 0.0};
  auto f = [](double, const std::array<double, 2>& s,
              std::array<double, 2>& d) {
    d[0] = s[1];
    d[1] = -s[0];
  };
  ode45(f, 0.0, 2.0 * M_PI, y, 1e-12, 1e-14);
  CHECK(y[0] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(std::fabs(y[1]) < 1e-9);
}

TEST_CASE("ode45_renorm: exponential growth tracked in log scale") {
  std::array<double, 2> y = {1.0, 1.0};
  double ls = 0.0;
  auto f = [](double, const std::array<double, 2>& s,
              std::array<double, 2>& d) {
    d[0] = s[0];
    d[1] = s[1];
  };
  ode45_renorm(f, 0.0, 500.0, y, ls, 0.5, 1e-11);
  // solution e^t (1,1): log scale should be 500, state unit sup-norm
  CHECK(ls == doctest::Approx(500.0).epsilon(1e-8));
  CHECK(std::max(std::fabs(y[0]), std::fabs(y[1])) ==
        doctest::Approx(1.0).epsilon(1e-12));
}
