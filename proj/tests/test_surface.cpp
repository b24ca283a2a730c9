#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "geolab/metric.hpp"

using namespace geolab;

namespace {
double rel(double a, double b) { return std::abs(a - b) / (std::abs(b) + 1e-300); }
}

TEST_CASE("gauss curvature: round sphere and single-mode conformal factor") {
  auto round_m = SurfaceMetric::round_sphere(8);
  SpinField K = gauss_curvature(round_m);
  CHECK(std::abs(K.at(0, 0) - std::sqrt(kFourPi)) < 1e-12);

  // u = c Y10: lapl-hat u = -2u, so K = e^{-2u}(1 + 2u), checked pointwise
  double c = 0.11;
  SpinField u = unit_harmonic(0, 1, 0, 8);
  u *= cplx(c, 0.0);
  auto m = SurfaceMetric::conformal(u);
  SpinField Kc = gauss_curvature(m, 40);
  for (auto [t, p] : {std::pair<double, double>{0.9, 0.0}, {2.0, 1.0}}) {
    double uv = synthesize_at(u, t, p).real();
    double expect = std::exp(-2 * uv) * (1 + 2 * uv);
    CHECK(rel(synthesize_at(Kc, t, p).real(), expect) < 1e-9);
  }

  // Gauss-Bonnet for a random u
  SpinField ur = random_conformal_factor(5, 1, 4, 0.3, 15);
  auto mr = SurfaceMetric::conformal(ur);
  const auto& g = grid_for(60);
  SpinField Kr = gauss_curvature(mr, 40);
  auto kv = sample_real(Kr, g);
  CHECK(rel(integrate_measure(mr, kv, g), kFourPi) < 1e-8);
}

TEST_CASE("covariant derivative: gradient dictionary and metric compatibility") {
  int L = 10;
  auto round_m = SurfaceMetric::round_sphere(L);
  SpinField f = random_band_limited(3, 0, 1, L, 1.0, L, true);
  SurfaceField df = covariant_derivative(round_m, make_scalar(f));
  SpinField expected = detail::eth_any(f, EthDirection::raise);
  expected *= cplx(-1.0 / std::sqrt(2.0), 0.0);
  SpinField got = df.ten.comp[0];
  double err = 0.0;
  for (int i = 0; i < got.size(); ++i) err += std::norm(got.a[i] - expected.a[i]);
  CHECK(std::sqrt(err) < 1e-13);

  // nabla gamma = 0 for a conformal metric
  SpinField u = random_conformal_factor(7, 1, 3, 0.25, L);
  auto m = SurfaceMetric::conformal(u);
  const auto& g = grid_for(90);
  GridTensor gbar(2, g);
  auto us = sample_real(u, g);
  for (int i = 0; i < g.n_nodes(); ++i) {
    gbar.comp[0][i] = std::exp(2 * us[i]);
    gbar.comp[3][i] = std::exp(2 * us[i]);
  }
  SurfaceField gb = make_field(project(gbar, 44), {1, 1});
  GridTensor dg = covariant_derivative_grid(m, gb, g);
  auto n2 = pointwise_norm_sq_grid(m, dg, {1, 1, 1}, g);
  double mx = 0.0;
  for (double v : n2) mx = std::max(mx, v);
  CHECK(std::sqrt(mx) < 1e-9);
}

TEST_CASE("lq norms") {
  int L = 8;
  auto m = SurfaceMetric::round_sphere(L);
  SpinField one(0, L);
  one.at(0, 0) = std::sqrt(kFourPi);
  CHECK(rel(lq_norm(m, make_scalar(one), 2.0), std::sqrt(kFourPi)) < 1e-12);

  // |c gamma| = sqrt(2) |c| pointwise, any conformal metric
  SpinField u = random_conformal_factor(9, 1, 3, 0.2, L);
  auto mc = SurfaceMetric::conformal(u);
  const auto& g = grid_for(40);
  const auto& gd = mc.grid_data(g);
  GridTensor gt(2, g);
  double c = 1.7;
  for (int i = 0; i < g.n_nodes(); ++i) {
    gt.comp[0][i] = c * gd.g00[i];
    gt.comp[1][i] = c * gd.g01[i];
    gt.comp[2][i] = c * gd.g01[i];
    gt.comp[3][i] = c * gd.g11[i];
  }
  auto n2 = pointwise_norm_sq_grid(mc, gt, {1, 1}, g);
  for (int i = 0; i < g.n_nodes(); i += 37)
    CHECK(rel(std::sqrt(n2[i]), std::sqrt(2.0) * c) < 1e-12);

  // homogeneity
  SurfaceField F = random_surface_field(11, 1, 1, L, 1.0, L);
  double n1 = lq_norm(mc, F, 3.0);
  F *= -2.5;
  CHECK(rel(lq_norm(mc, F, 3.0), 2.5 * n1) < 1e-12);
}

TEST_CASE("hodge operators: round-sphere oracles and adjointness") {
  int L = 10;
  auto m = SurfaceMetric::round_sphere(L);
  // X = grad Ylm as a 1-form: D1 X = lapl Ylm = -l(l+1) Ylm, curl part 0
  int l = 4, mm = 2;
  SpinField y = unit_harmonic(0, l, mm, L);
  SpinField x = detail::eth_any(y, EthDirection::raise);
  x *= cplx(-1.0 / std::sqrt(2.0), 0.0);
  H0Section d1x = hodge_d1(m, {x});
  SpinField expect = y;
  expect *= cplx(-double(l) * (l + 1), 0.0);
  double err = 0.0;
  for (int i = 0; i < d1x.f.size(); ++i) err += std::norm(d1x.f.a[i] - expect.a[i]);
  CHECK(std::sqrt(err) < 1e-11);

  // adjointness on a conformal metric
  SpinField u = random_conformal_factor(21, 1, 3, 0.25, L);
  auto mc = SurfaceMetric::conformal(u);
  H1Section X{random_band_limited(4, 1, 1, L, 1.0, L)};
  H0Section Y{random_band_limited(5, 0, 0, L, 1.0, L)};
  double a = bundle_inner(mc, hodge_d1(mc, X, L + 40), Y);
  double b = bundle_inner(mc, X, hodge_d1s(mc, Y));
  CHECK(rel(a, b) < 1e-9);

  H2Section W{random_band_limited(6, 2, 2, L, 1.0, L)};
  double a2 = bundle_inner(mc, hodge_d2(mc, W, L + 40), X);
  double b2 = bundle_inner(mc, W, hodge_d2s(mc, X, L + 40));
  CHECK(rel(a2, b2) < 1e-9);

  // conformal invariance: D1 under gamma-bar = e^{-2u} (D1 under round)
  H0Section lhs = hodge_d1(mc, X, L + 40);
  SpinField rhs_flat = hodge_d1(m, X).f;
  const auto& g = grid_for(L + 60);
  auto ls = sample_cplx(lhs.f, g);
  auto rs = sample_cplx(rhs_flat, g);
  auto us = sample_real(u, g);
  double mx = 0.0;
  for (int i = 0; i < g.n_nodes(); ++i)
    mx = std::max(mx, std::abs(ls[i] - std::exp(-2 * us[i]) * rs[i]));
  CHECK(mx < 1e-8);
}

TEST_CASE("bochner laplacian routes") {
  int L = 10;
  auto m = SurfaceMetric::round_sphere(L);
  SpinField f = random_band_limited(31, 0, 1, L, 1.0, L, true);
  SurfaceField lf = bochner_laplacian(m, make_scalar(f));
  SpinField lap = round_laplacian(f);
  double err = 0.0;
  for (int i = 0; i < lap.size(); ++i) err += std::norm(lf.ten.comp[0].a[i] - lap.a[i]);
  CHECK(std::sqrt(err) < 1e-12);

  SpinField u = random_conformal_factor(33, 1, 3, 0.2, L);
  auto mc = SurfaceMetric::conformal(u);

  // scalar: direct e^{-2u} lapl-hat f vs -D1 D1* f
  SurfaceField l1 = bochner_laplacian(mc, make_scalar(f));
  H1Section d1sf = hodge_d1s(mc, H0Section{f});
  H0Section dd = hodge_d1(mc, d1sf, l1.band());
  SpinField other = dd.f;
  other *= cplx(-1.0, 0.0);
  double err2 = 0.0;
  for (int i = 0; i < other.size(); ++i) err2 += std::norm(l1.ten.comp[0].a[i] - other.a[i]);
  CHECK(std::sqrt(err2) / other.l2_norm() < 1e-9);

  // Delta(c gamma) = 0
  const auto& g = grid_for(70);
  const auto& gd = mc.grid_data(g);
  GridTensor gt(2, g);
  for (int i = 0; i < g.n_nodes(); ++i) {
    gt.comp[0][i] = gd.g00[i];
    gt.comp[3][i] = gd.g11[i];
  }
  SurfaceField cg = make_field(project(gt, 40), {1, 1});
  SurfaceField lcg = bochner_laplacian(mc, cg);
  CHECK(lcg.ten.l2_coeff_norm() / cg.ten.l2_coeff_norm() < 1e-8);

  // Hodge route vs trace-of-nabla^2 route on a 1-form
  SurfaceField X = make_oneform(random_band_limited(35, 1, 1, L, 1.0, L));
  SurfaceField a = bochner_laplacian(mc, X);
  SurfaceField b = bochner_direct(mc, X);
  const auto& gg = grid_for(100);
  GridTensor da = sample(a.ten, gg);
  GridTensor db = sample(b.ten, gg);
  da -= db;
  auto n2 = pointwise_norm_sq_grid(mc, da, {1}, gg);
  auto d2 = pointwise_norm_sq_grid(mc, db, {1}, gg);
  double nn = 0, dd2 = 0;
  for (size_t i = 0; i < n2.size(); ++i) {
    nn = std::max(nn, n2[i]);
    dd2 = std::max(dd2, d2[i]);
  }
  CHECK(std::sqrt(nn / dd2) < 1e-8);
}

TEST_CASE("conformal compose group law and area") {
  SpinField u = random_conformal_factor(41, 1, 3, 0.2, 10);
  SpinField v = random_conformal_factor(43, 1, 4, 0.15, 10);
  auto m = SurfaceMetric::conformal(u);
  auto m2 = conformal_compose(m, v);
  SpinField mv = v;
  mv *= cplx(-1.0, 0.0);
  auto m3 = conformal_compose(m2, mv);
  double err = 0.0;
  for (int i = 0; i < u.size(); ++i) err += std::norm(m3.u().a[i] - u.a[i]);
  CHECK(std::sqrt(err) < 1e-13);

  // area of composed metric = int e^{2(u+v)}
  const auto& g = grid_for(60);
  auto us = sample_real(u, g);
  auto vs = sample_real(v, g);
  double acc = 0.0;
  for (int i = 0; i < g.n_theta; ++i) {
    double row = 0.0;
    for (int j = 0; j < g.n_phi; ++j)
      row += std::exp(2 * (us[g.node(i, j)] + vs[g.node(i, j)]));
    acc += g.node_measure(i) * row;
  }
  CHECK(rel(area(m2), acc) < 1e-12);
}

TEST_CASE("decompose2 and pointwise norm consistency") {
  int L = 9;
  SpinField u = random_conformal_factor(51, 1, 3, 0.2, L);
  auto m = SurfaceMetric::conformal(u);
  SurfaceField F = random_surface_field(53, 2, 0, L, 1.0, L);
  Sym2Pieces p = decompose2(m, F);
  // |F|^2 = t^2/2 + a^2/2 + |h2|^2 with the gamma norms
  const auto& g = grid_for(80);
  auto n2 = pointwise_norm_sq(m, F, g);
  auto ts = sample_real(p.trace, g);
  auto as = sample_real(p.antisym, g);
  auto hs = sample_cplx(p.h2, g);
  auto uu = sample_real(u, g);
  for (int i = 0; i < g.n_nodes(); i += 101) {
    double h2n = 2.0 * std::norm(hs[i]) * std::exp(-4.0 * uu[i]);
    double expect = 0.5 * ts[i] * ts[i] + 0.5 * as[i] * as[i] + h2n;
    CHECK(rel(n2[i], expect) < 1e-8);
  }
}

TEST_CASE("surface identity suite at L=15") {
  Report r = surface_identity_suite(15, 10, 12345, 1e-6);
  for (const auto& c : r.checks) {
    INFO(c.name, " residual=", c.lhs);
    CHECK(c.pass);
  }
}

TEST_CASE("gns suite: constant field oracle and boundedness") {
  auto m = SurfaceMetric::round_sphere(12);
  Report r = gns_suite(m, 30, 99);
  for (const auto& c : r.checks) {
    INFO(c.name, " ratio=", c.lhs);
    CHECK(c.pass);
    CHECK(c.lhs < 10.0);
  }
  // constant F: gns_2 ratio = |F|_inf / |F|_L2 = (4pi)^{-1/2}
  SpinField cf(0, 12);
  cf.at(0, 0) = 3.0 * std::sqrt(kFourPi);
  SurfaceField F = make_scalar(cf);
  double ratio = lq_norm(m, F, INFINITY) /
                 (0.0 + lq_norm(m, F, 2.0));
  CHECK(rel(ratio, 1.0 / std::sqrt(kFourPi)) < 1e-10);
}
