#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "geolab/eucl.hpp"

using namespace geolab::eucl;

TEST_CASE("plane wave projection and almost orthogonality") {
  EuclGrid g{64, 4.0};
  int k = 2;
  int mbest = int(std::round(4.0 / (3.14159265358979 / 4.0)));
  double xi = (3.14159265358979 / 4.0) * mbest;
  EuclideanField f;
  f.grid = g;
  f.M = 4;
  f.delta = 1.0;
  f.v.assign(5, std::vector<double>(64 * 64));
  for (int y = 0; y < 64; ++y)
    for (int x = 0; x < 64; ++x)
      f.v[0][y * 64 + x] = std::cos(xi * (-4.0 + g.dx() * x));
  for (int j = 1; j <= 4; ++j) f.v[j] = f.v[0];
  EuclideanField pk = e_project(f, LpSel::E(k));
  double expect = eucl_multiplier(LpSel::E(k), xi);
  double got = pk.v[0][5] / f.v[0][5];
  CHECK(std::abs(got - expect) < 1e-10);
  EuclideanField e5 = e_project(f, LpSel::E(5));
  EuclideanField e25 = e_project(e5, LpSel::E(2));
  CHECK(l2x(g, e25.v[0]) < 1e-12);
  CHECK(sigma_freq(1.0) == 1.0);  // plane wave exactly at |xi| = 2^k passes whole
}

TEST_CASE("t_integral and dt") {
  EuclGrid g{16, 4.0};
  EuclideanField f;
  f.grid = g;
  f.M = 16;
  f.delta = 1.0;
  f.v.assign(17, std::vector<double>(16 * 16, 1.0));
  EuclideanField F = t_integral(f);
  for (int j = 0; j <= 16; ++j) CHECK(std::abs(F.v[j][3] - f.tau(j)) < 1e-14);

  for (int j = 0; j <= 16; ++j) {
    double tau = f.tau(j);
    for (auto& v : f.v[j]) v = 1.0 + 2 * tau - 3 * tau * tau + 0.5 * tau * tau * tau;
  }
  f.has_dt = false;
  f.dt.clear();
  EuclideanField I = t_integral(f);
  auto d = dt_samples(I);
  double err = 0;
  for (int j = 0; j <= 16; ++j) err = std::max(err, std::abs(d[j][7] - f.v[j][7]));
  CHECK(err < 1e-10);

  // dt o int = identity through the FD path as well (polynomial data)
  EuclideanField I2 = I;
  I2.has_dt = false;
  I2.dt.clear();
  auto d2 = dt_samples(I2);
  double err2 = 0;
  for (int j = 0; j <= 16; ++j) err2 = std::max(err2, std::abs(d2[j][7] - f.v[j][7]));
  CHECK(err2 < 1e-8);
}

TEST_CASE("besov of a banded static field") {
  EuclGrid g{64, 4.0};
  EuclideanField f = random_field(11, g, 8, 1.0, 0.4, true);
  EuclideanField f3 = e_project(f, LpSel::E(3));
  double s = 0.5;
  double manual = 0.0;
  for (int k = 2; k <= 4; ++k) {
    EuclideanField fk = e_project(f3, LpSel::E(k));
    manual += std::pow(2.0, s * k) * lp2_tx(fk, 2.0);
  }
  EuclideanField flow = e_project(f3, LpSel::Below(0));
  manual += lp2_tx(flow, 2.0);
  CHECK(eucl_besov(f3, 1.0, 2.0, s) == doctest::Approx(manual).epsilon(1e-9));

  EuclideanField z = f;
  for (auto& sl : z.v)
    for (auto& v : sl) v = 0.0;
  z.has_dt = false;
  z.dt.clear();
  CHECK(eucl_besov(z, 2.0, 2.0, 0.0) == 0.0);

  // homogeneity
  EuclideanField f2 = f;
  for (auto& sl : f2.v)
    for (auto& v : sl) v *= -3.0;
  CHECK(eucl_besov(f2, 2.0, 2.0, 0.25) ==
        doctest::Approx(3.0 * eucl_besov(f, 2.0, 2.0, 0.25)).epsilon(1e-12));
}

TEST_CASE("sobolev consistency B^{2,s} vs H^s on a slice") {
  EuclGrid g{64, 4.0};
  EuclideanField f = random_field(21, g, 4, 1.0, 0.5);
  for (double s : {-0.5, 0.0, 0.5}) {
    double a = slice_besov(g, f.v[0], 2.0, s);
    double b = slice_hs(g, f.v[0], s);
    CHECK(a / b > 0.4);
    CHECK(a / b < 2.5);
  }
}

TEST_CASE("euclidean invariants suite") {
  geolab::Report r = eucl_lp_invariants(64, 5, 3);
  for (const auto& c : r.checks) {
    INFO(c.name, " value=", c.lhs);
    CHECK(c.pass);
  }
}

TEST_CASE("euclidean product and trace suites at n=64") {
  geolab::Report r = eucl_product_suite(64, 8, 5);
  for (const auto& c : r.checks) {
    INFO(c.name, " ratio=", c.lhs);
    CHECK(c.pass);
    CHECK(c.lhs < 100.0);
  }
  geolab::Report r2 = eucl_trace_embedding_suite(64, 8, 6);
  for (const auto& c : r2.checks) {
    INFO(c.name, " ratio=", c.lhs);
    CHECK(c.pass);
  }
}

TEST_CASE("intertwining decay exponents") {
  geolab::Report r = eucl_intertwining_decay(128, 7);
  for (const auto& c : r.checks) {
    INFO(c.name, " exponent=", c.lhs);
    CHECK(c.pass);
  }
}
