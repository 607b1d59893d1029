#include <cmath>
#include <complex>
#include <vector>

#include "doctest.h"
#include "zs/oracle.hpp"

using namespace zs;

TEST_CASE("mismatch: sign changes straddle the exact sech spectrum") {
  auto p = sech_potential();
  const double hbar = 0.2;
  for (int n = 0; n < 5; ++n) {
    double mu = 1.0 - (n + 0.5) * hbar;  // exact eigenvalues for the sech bell
    double lo = mismatch(p, hbar, mu - 0.02);
    double hi = mismatch(p, hbar, mu + 0.02);
    CHECK((lo > 0) != (hi > 0));
  }
}

TEST_CASE("mismatch: no sign change above the largest eigenvalue") {
  auto p = sech_potential();
  const double hbar = 0.2;  // largest eigenvalue at mu = 0.9
  double prev = mismatch(p, hbar, 0.92);
  for (double mu : {0.94, 0.96, 0.98, 1.0}) {
    double v = mismatch(p, hbar, mu);
    CHECK((v > 0) == (prev > 0));
    prev = v;
  }
}

TEST_CASE("mismatch: continuity in mu") {
  auto p = sech_potential();
  double v0 = mismatch(p, 0.2, 0.60);
  double v1 = mismatch(p, 0.2, 0.601);
  double v2 = mismatch(p, 0.2, 0.602);
  double slope = std::fabs(v2 - v0) / 0.002;
  CHECK(std::fabs(v1 - v0) < 10.0 * (slope + 1e-6) * 0.001 + 1e-9);
}

TEST_CASE("mismatch: out-of-range mu rejected") {
  auto p = sech_potential();
  CHECK_THROWS_AS(mismatch(p, 0.2, 1.5), OutOfRange);
  CHECK_THROWS_AS(mismatch(p, 0.2, 0.0), OutOfRange);
}

TEST_CASE("spectrum_scan: sech ladder recovered to 1e-6") {
  auto p = sech_potential();
  auto roots = spectrum_scan(p, 0.2, 0.05, 1.0);
  REQUIRE(roots.size() == 5);
  for (int n = 0; n < 5; ++n)
    CHECK(roots[n] == doctest::Approx(0.1 + 0.2 * n).epsilon(1e-6));
}

TEST_CASE("spectrum_scan: empty window") {
  auto p = sech_potential();
  auto roots = spectrum_scan(p, 0.2, 0.35, 0.45);
  CHECK(roots.empty());
}

TEST_CASE("spectrum_scan: coarse explicit resolution warns") {
  auto p = sech_potential();
  ShootingConfig cfg;
  cfg.mu_scan_resolution = 0.5;
  std::vector<std::string> warnings;
  spectrum_scan(p, 0.2, 0.05, 1.0, cfg, &warnings);
  CHECK(!warnings.empty());
}

TEST_CASE("spectrum_scan: roots invariant under L and matching changes") {
  auto p = sech_potential();
  ShootingConfig base;  // auto L = 12
  auto r1 = spectrum_scan(p, 0.2, 0.45, 0.55, base);
  ShootingConfig wide;
  wide.L = 24.0;
  auto r2 = spectrum_scan(p, 0.2, 0.45, 0.55, wide);
  ShootingConfig moved;
  moved.matching_point = 0.5;
  auto r3 = spectrum_scan(p, 0.2, 0.45, 0.55, moved);
  REQUIRE(r1.size() == 1);
  REQUIRE(r2.size() == 1);
  REQUIRE(r3.size() == 1);
  CHECK(std::fabs(r1[0] - r2[0]) < 1e-8);
  CHECK(std::fabs(r1[0] - r3[0]) < 1e-8);
}

TEST_CASE("norming_sign_oracle: ground state +1, alternating ladder") {
  auto p = sech_potential();
  auto roots = spectrum_scan(p, 0.2, 0.05, 1.0);
  REQUIRE(roots.size() == 5);
  // roots ascending in mu; n = 0 is the largest mu
  for (size_t k = 0; k < roots.size(); ++k) {
    int n = (int)(roots.size() - 1 - k);
    std::vector<std::string> warnings;
    int s = norming_sign_oracle(p, 0.2, roots[k], {}, &warnings);
    CHECK(s == (n % 2 == 0 ? +1 : -1));
    CHECK(warnings.empty());  // converged root: ratio well-conditioned
  }
}

TEST_CASE("jost oracle: unitarity |T|^2 - |R|^2 = 1") {
  auto p = rational_lorentz();
  auto [R, T] = jost_scattering_oracle(p, 0.1, 1.0);
  CHECK(std::norm(T) - std::norm(R) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("jost oracle: free limit T -> 1, R -> 0") {
  auto p = scaled_potential(rational_lorentz(), 1e-8, 1.0);
  auto [R, T] = jost_scattering_oracle(p, 0.1, 1.0);
  CHECK(std::abs(T - std::complex<double>(1.0, 0.0)) < 1e-6);
  CHECK(std::abs(R) < 1e-6);
}

TEST_CASE("jost oracle: reflection is semiclassically small") {
  auto p = rational_lorentz();
  auto [R, T] = jost_scattering_oracle(p, 0.1, 1.0);
  CHECK(std::abs(R) <= 10.0 * 0.1);
  (void)T;
}

TEST_CASE("jost oracle: rejects nonpositive lambda") {
  auto p = rational_lorentz();
  CHECK_THROWS_AS(jost_scattering_oracle(p, 0.1, -1.0), OutOfRange);
}
