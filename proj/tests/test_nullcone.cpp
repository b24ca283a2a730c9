#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>

#include "geolab/nullcone.hpp"

using namespace geolab;

TEST_CASE("minkowski cone: closed forms and structure residuals") {
  NullConeData d = generate_cone(ConeModel::minkowski, 0.0, 1.0, 1.0, 16, 10);
  CHECK(d.trchi(0.5) == doctest::Approx(2.0 / 1.5));
  CHECK(d.rho(0.3) == 0.0);
  Report r = structure_residuals(d);
  for (const auto& c : r.checks) {
    INFO(c.name, " residual=", c.lhs);
    CHECK(c.pass);
  }
  FluxReport f = flux_and_bootstrap_norms(d);
  CHECK(f.flux == 0.0);
  CHECK(f.chi_n1 == 0.0);
  CHECK(f.chib_norm == 0.0);
}

TEST_CASE("schwarzschild cone: rho, flux value, structure residuals") {
  NullConeData d = generate_cone(ConeModel::schwarzschild, 0.01, 1.0, 1.0, 16, 10);
  CHECK(d.rho(0.0) == doctest::Approx(-0.02));
  CHECK(d.rho(1.0) == doctest::Approx(-0.02 / 8.0));
  Report r = structure_residuals(d);
  for (const auto& c : r.checks) {
    INFO(c.name, " residual=", c.lhs);
    CHECK(c.pass);
  }
  // closed-form oracle: (16 pi M^2 / 3)(r0^{-3} - (r0+delta)^{-3})
  FluxReport f = flux_and_bootstrap_norms(d);
  double oracle = (16.0 * kPi * 0.01 * 0.01 / 3.0) * (1.0 - 1.0 / 8.0);
  CHECK(std::abs(f.rho_l22_sq - oracle) / oracle < 1e-9);
  CHECK(oracle == doctest::Approx(1.466e-3).epsilon(1e-3));
  // flux monotone in delta
  NullConeData d2 = generate_cone(ConeModel::schwarzschild, 0.01, 1.0, 1.5, 16, 10);
  CHECK(flux_and_bootstrap_norms(d2).flux > f.flux);
  // horizon guard
  CHECK_THROWS(generate_cone(ConeModel::schwarzschild, 0.6, 1.0, 1.0, 16, 10));
}

TEST_CASE("mass zero schwarzschild equals minkowski") {
  NullConeData a = generate_cone(ConeModel::schwarzschild, 0.0, 1.0, 1.0, 8, 8);
  NullConeData b = generate_cone(ConeModel::minkowski, 0.0, 1.0, 1.0, 8, 8);
  for (double tau : {0.0, 0.5, 1.0}) {
    CHECK(a.trchib(tau) == b.trchib(tau));
    CHECK(a.rho(tau) == b.rho(tau));
    SpinField ua = a.gamma.u_at(tau), ub = b.gamma.u_at(tau);
    for (int i = 0; i < ua.size(); ++i) CHECK(ua.a[i] == ub.a[i]);
  }
}

TEST_CASE("gauss-bonnet on cone slices") {
  NullConeData d = generate_cone(ConeModel::schwarzschild, 0.02, 1.2, 1.0, 8, 10);
  const auto& g = grid_for(30);
  for (double tau : {0.0, 0.7}) {
    auto m = d.gamma.metric_at(tau);
    SpinField K = gauss_curvature(m, 10);
    auto kv = sample_real(K, g);
    CHECK(std::abs(integrate_measure(m, kv, g) - kFourPi) / kFourPi < 1e-10);
  }
}

TEST_CASE("perturbed cone: determinism, positivity, finite regularity bounds") {
  NullConeData base = generate_cone(ConeModel::minkowski, 0.0, 1.0, 1.0, 8, 10);
  NullConeData p0 = perturb_cone(base, 0.0, 5);
  CHECK(p0.vacuum);
  NullConeData p1 = perturb_cone(base, 0.1, 5);
  NullConeData p2 = perturb_cone(base, 0.1, 5);
  CHECK(!p1.vacuum);
  SpinField u1 = p1.gamma.u_at(0.4), u2 = p2.gamma.u_at(0.4);
  for (int i = 0; i < u1.size(); ++i) CHECK(u1.a[i] == u2.a[i]);
  RegularityBounds rb = regularity_bounds(p1.gamma);
  CHECK(std::isfinite(rb.b_sff));
  CHECK(std::isfinite(rb.b_sffcurl));
  RegularityBounds rb2 = regularity_bounds(perturb_cone(base, 0.05, 5).gamma);
  CHECK(rb2.b_sffcurl <= rb.b_sffcurl + 1e-12);
  // exported container round trip
  p1.gamma.save("cone_test.fol");
  Foliation back = Foliation::load("cone_test.fol");
  CHECK(back.M() == 8);
  std::remove("cone_test.fol");
}
