#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "geolab/glp.hpp"

using namespace geolab;

TEST_CASE("cutoff: telescoping partition and support") {
  for (double lam : {0.03, 0.9, 2.0, 17.0, 400.0, 12345.0}) {
    double sum = 0.0;
    for (int k = -12; k <= 12; ++k) sum += lp_sigma(std::pow(4.0, -k) * lam);
    CHECK(std::abs(sum - 1.0) < 1e-14);
  }
  CHECK(lp_sigma(0.24) == 0.0);
  CHECK(lp_sigma(4.01) == 0.0);
  CHECK(lp_sigma(1.0) > 0.0);
}

TEST_CASE("round spectra") {
  auto m = SurfaceMetric::round_sphere(8);
  const auto& ds = decomposition_for(m, Bundle::scalar);
  // eigenvalues l(l+1) with multiplicity 2l+1
  int p = 0;
  for (int l = 0; l <= 8; ++l)
    for (int mm = -l; mm <= l; ++mm, ++p)
      CHECK(ds.eigenvalues[p] == doctest::Approx(l * (l + 1.0)).epsilon(1e-14));
  CHECK(ds.kernel_dim == 1);

  const auto& dh1 = decomposition_for(m, Bundle::h1);
  CHECK(dh1.eigenvalues.front() == doctest::Approx(1.0));  // l = 1 band
  CHECK(dh1.kernel_dim == 0);
}

TEST_CASE("conformal decomposition: orthonormality and weak residuals") {
  SpinField u = random_conformal_factor(3, 1, 4, 0.25, 12);
  auto m = SurfaceMetric::conformal(u);
  for (Bundle b : {Bundle::scalar, Bundle::h1, Bundle::h2}) {
    const auto& d = decomposition_for(m, b);
    // gamma-orthonormality
    Eigen::MatrixXcd I = d.V.adjoint() * d.GV;
    CHECK((I - Eigen::MatrixXcd::Identity(I.rows(), I.cols())).norm() < 1e-9);
    CHECK(d.eigenvalues.front() >= 0.0);
    if (b == Bundle::scalar) CHECK(d.kernel_dim == 1);
    // ascending
    for (size_t j = 1; j < d.eigenvalues.size(); ++j)
      CHECK(d.eigenvalues[j] >= d.eigenvalues[j - 1] - 1e-10);
  }
  // dim ker on scalars = 1 for any u (connected surface)
  SpinField u2 = random_conformal_factor(7, 1, 5, 0.3, 10);
  auto m2 = SurfaceMetric::conformal(u2);
  CHECK(decomposition_for(m2, Bundle::scalar).kernel_dim == 1);
}

TEST_CASE("lp_apply on pure harmonics, round") {
  auto m = SurfaceMetric::round_sphere(8);
  const auto& d = decomposition_for(m, Bundle::scalar);
  SpinField f = unit_harmonic(0, 4, 1, 8);  // lambda = 20
  SpinField p2 = lp_apply(d, LpSelector::P(2), f);
  double expect = lp_sigma(20.0 / 16.0);
  CHECK(std::abs(p2.at(4, 1).real() - expect) < 1e-12);
  SpinField p1 = lp_apply(d, LpSelector::P(1), f);
  CHECK(p1.l2_norm() < 1e-14);  // 20/4 = 5 outside supp sigma
  // bundle mismatch
  CHECK_THROWS(lp_apply(d, LpSelector::P(1), SpinField(1, 8)));
}

TEST_CASE("besov and sobolev oracles") {
  auto m = SurfaceMetric::round_sphere(10);
  const auto& d = decomposition_for(m, Bundle::scalar);

  // constant: only the low-frequency term survives
  SpinField c(0, 10);
  c.at(0, 0) = 2.0;
  CHECK(besov_norm_x(d, c, 1.0, 0.7) == doctest::Approx(2.0).epsilon(1e-12));

  // sobolev s=0 equals L2; Ylm with s=1
  SpinField f = random_band_limited(5, 0, 0, 10, 1.3, 10);
  CHECK(sobolev_norm(d, f, 0.0) == doctest::Approx(f.l2_norm()).epsilon(1e-12));
  SpinField y = unit_harmonic(0, 6, -2, 10);
  CHECK(sobolev_norm(d, y, 1.0) == doctest::Approx(std::sqrt(1.0 + 42.0)).epsilon(1e-12));

  // H1 comparison: ||f||_H1 vs ||grad f|| + ||f||, ratio in [1/sqrt2, 1]
  SpinField g = random_band_limited(9, 0, 1, 10, 1.0, 10);
  double h1 = sobolev_norm(d, g, 1.0);
  Eigen::VectorXcd e = d.expand(g);
  double gr = 0.0;
  for (int j = 0; j < e.size(); ++j) gr += d.eigenvalues[j] * std::norm(e(j));
  double denom = std::sqrt(gr) + g.l2_norm();
  CHECK(h1 / denom > 1.0 / std::sqrt(2.0) - 1e-12);
  CHECK(h1 / denom < std::sqrt(2.0) + 1e-12);

  // pure band at a sigma-plateau eigenvalue: norm = 2^{sk} ||f|| + low remainder
  SpinField band = unit_harmonic(0, 4, 0, 10);  // lambda = 20, sigma(20/16) etc.
  double s = 0.5;
  double manual = 0.0;
  for (int k = 0; k <= d.k_max; ++k) {
    double mult = lp_sigma(std::pow(4.0, -k) * 20.0);
    manual += std::pow(std::pow(2.0, s * k) * mult, 1.0);
  }
  CHECK(besov_norm_x(d, band, 1.0, s) == doctest::Approx(manual).epsilon(1e-12));
}

TEST_CASE("lp property suite on a conformal metric") {
  SpinField u = random_conformal_factor(21, 1, 4, 0.2, 15);
  auto m = SurfaceMetric::conformal(u);
  Report r = lp_property_suite(m, 6, 42);
  for (const auto& c : r.checks) {
    INFO(c.name, " value=", c.lhs);
    CHECK(c.pass);
  }
}

TEST_CASE("lp structure suite: round L=32 slope and identities") {
  auto m = SurfaceMetric::round_sphere(32);
  Report r = lp_structure_suite(m, 8, 7, 2, -1);
  for (const auto& c : r.checks) {
    INFO(c.name, " value=", c.lhs, " slope?=", c.slope ? *c.slope : 0.0);
    CHECK(c.pass);
  }
}
