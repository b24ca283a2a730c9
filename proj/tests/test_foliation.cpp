#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>

#include "geolab/foliation.hpp"

using namespace geolab;

TEST_CASE("lie_t: equivariant fields and the expanding example") {
  Foliation fol = Foliation::expanding(1.0, 16, 8);
  SurfaceField F = random_surface_field(3, 1, 1, 6, 1.0, 8);
  HorizontalField Z = transport(fol, F, TransportMode::equivariant);
  HorizontalField dZ = lie_t(Z);
  for (int j : {0, 8, 16}) CHECK(dZ.node[j].l2_coeff_norm() < 1e-14);

  // gamma[tau] = (1+tau)^2 round: lie_t gamma = 2(1+tau) round
  const auto& g = grid_for(20);
  SecondFormBundle sf = second_form(fol);
  // k = (1+tau) round, trk = 2/(1+tau)
  for (double t : {0.0, 0.5, 1.0}) {
    GridTensor kt = sample(sf.k.at(t), g);
    for (int i = 0; i < g.n_nodes(); i += 57) {
      CHECK(kt.comp[0][i] == doctest::Approx(1.0 + t).epsilon(1e-9));
      CHECK(std::abs(kt.comp[1][i]) < 1e-10);
    }
    GridTensor trk = sample(sf.trk.at(t), g);
    for (int i = 0; i < g.n_nodes(); i += 57)
      CHECK(trk.comp[0][i] == doctest::Approx(2.0 / (1.0 + t)).epsilon(1e-12));
    GridTensor C = sample(sf.curl.at(t), g);
    double mx = 0;
    for (const auto& c : C.comp)
      for (double v : c) mx = std::max(mx, std::abs(v));
    CHECK(mx < 1e-9);
  }
}

TEST_CASE("jacobian closed form on the expanding foliation") {
  Foliation fol = Foliation::expanding(1.0, 16, 8);
  const auto& g = grid_for(12);
  auto J = jacobian_grid(fol, 1.0, g);
  for (int i = 0; i < g.n_nodes(); i += 31)
    CHECK(J[i] == doctest::Approx(4.0).epsilon(1e-10));
  Report r = jacobian_identity_check(fol, 1e-8);
  for (const auto& c : r.checks) {
    INFO(c.name, " value=", c.lhs);
    CHECK(c.pass);
  }
}

TEST_CASE("second form of a conformal wave vs spec example u = tau Y10") {
  int L = 8;
  SpinField v = unit_harmonic(0, 1, 0, L);
  v *= cplx(1.0, 0.0);
  Foliation fol = Foliation::conformal_linear(SpinField(0, L), v, 1.0, 16);
  SecondFormBundle sf = second_form(fol);
  // at tau = 0: trk = 2 Y10, C_abc = d_b Y10 gamma_ac - d_c Y10 gamma_ab
  const auto& g = grid_for(24);
  GridTensor trk = sample(sf.trk.at(0.0), g);
  for (int i = 0; i < g.n_nodes(); i += 41) {
    double y = std::sqrt(3.0 / kFourPi) * g.ctheta[i / g.n_phi];
    CHECK(trk.comp[0][i] == doctest::Approx(2.0 * y).epsilon(1e-9));
  }
  GridTensor C = sample(sf.curl.at(0.0), g);
  GridTensor dv = sample(round_nabla(scalar_tensor(v)), g);
  // at tau 0 gamma = round: C_abc = dv_b delta_ac - dv_c delta_ab
  double mx = 0;
  for (int w = 0; w < 8; ++w) {
    int a = (w >> 2) & 1, b = (w >> 1) & 1, c = w & 1;
    for (int i = 0; i < g.n_nodes(); ++i) {
      double expect = (a == c ? dv.comp[b][i] : 0.0) - (a == b ? dv.comp[c][i] : 0.0);
      mx = std::max(mx, std::abs(C.comp[w][i] - expect));
    }
  }
  CHECK(mx < 1e-9);
}

TEST_CASE("transport: parallel preserves norms, static foliation equals equivariant") {
  SpinField u = random_conformal_factor(5, 1, 3, 0.2, 10);
  auto m = SurfaceMetric::conformal(u);
  Foliation st = Foliation::static_metric(m, 1.0, 8);
  SurfaceField F = random_surface_field(7, 2, 0, 6, 1.0, 10);
  HorizontalField P = transport(st, F, TransportMode::parallel);
  HorizontalField E = transport(st, F, TransportMode::equivariant);
  const auto& g = grid_for(40);
  GridTensor a = sample(P.node[8], g);
  GridTensor b = sample(extend_band_tensor(E.node[8], P.node[8].band_limit), g);
  a -= b;
  double mx = 0;
  for (const auto& c : a.comp)
    for (double vv : c) mx = std::max(mx, std::abs(vv));
  CHECK(mx < 1e-10);
}

TEST_CASE("covariant integral basics") {
  Foliation fol = Foliation::expanding(1.0, 16, 8);
  // field = 1 (scalar): integral = tau
  auto onefn = [](double) {
    SpinField f(0, 8);
    f.at(0, 0) = std::sqrt(kFourPi);
    return scalar_tensor(f);
  };
  HorizontalField one = make_horizontal(fol, {}, onefn);
  HorizontalField I = covariant_integral(one, 2);
  for (int j : {4, 8, 16})
    CHECK(std::abs(I.node[j].comp[0].at(0, 0).real() -
                   fol.tau(j) * std::sqrt(kFourPi)) < 1e-12);

  // field = gamma: integral = t gamma (gamma is t-parallel)
  const auto& g = grid_for(16);
  auto gfn = [&fol](double t) {
    const auto& gg = grid_for(16);
    GridTensor gt(2, gg);
    for (int i = 0; i < gg.n_nodes(); ++i) {
      gt.comp[0][i] = (1 + t) * (1 + t);
      gt.comp[3][i] = (1 + t) * (1 + t);
    }
    return project(gt, 4);
  };
  HorizontalField gam = make_horizontal(fol, {1, 1}, gfn);
  HorizontalField Ig = covariant_integral(gam, 4);
  GridTensor at1 = sample(Ig.node[16], g);
  for (int i = 0; i < g.n_nodes(); i += 37)
    CHECK(at1.comp[0][i] == doctest::Approx(1.0 * 2.0 * 2.0).epsilon(1e-8));
}

TEST_CASE("evolution identity suite on wave and sheared foliations") {
  Foliation fol = Foliation::conformal_wave(11, 0.25, 3, 1.0, 16, 12);
  Report r = evolution_identity_suite(fol, 3, 21, 1e-7);
  for (const auto& c : r.checks) {
    INFO(c.name, " value=", c.lhs);
    CHECK(c.pass);
  }
  Foliation sh = Foliation::sheared(13, 0.15, 3, 1.0, 16, 12);
  Report r2 = evolution_identity_suite(sh, 2, 23, 1e-6);
  for (const auto& c : r2.checks) {
    INFO("sheared ", c.name, " value=", c.lhs);
    CHECK(c.pass);
  }
}

TEST_CASE("commutator suite: conformal and sheared") {
  Foliation fol = Foliation::conformal_wave(31, 0.25, 3, 1.0, 16, 12);
  Report r = commutator_suite(fol, 2, 41, 1e-6);
  for (const auto& c : r.checks) {
    INFO(c.name, " value=", c.lhs);
    CHECK(c.pass);
  }
  Foliation sh = Foliation::sheared(33, 0.15, 3, 1.0, 16, 12);
  Report r2 = commutator_suite(sh, 2, 43, 1e-6);
  for (const auto& c : r2.checks) {
    INFO("sheared ", c.name, " value=", c.lhs);
    CHECK(c.pass);
  }
  // static foliation: all commutators vanish identically
  auto m = SurfaceMetric::conformal(random_conformal_factor(3, 1, 3, 0.2, 12));
  Foliation st = Foliation::static_metric(m, 1.0, 16);
  Report r3 = commutator_suite(st, 1, 45, 1e-9);
  for (const auto& c : r3.checks) {
    INFO("static ", c.name, " value=", c.lhs);
    CHECK(c.pass);
  }
}

TEST_CASE("transport estimate suite") {
  Foliation fol = Foliation::conformal_wave(51, 0.2, 3, 1.0, 12, 10);
  Report r = transport_estimate_suite(fol, 2, 61);
  for (const auto& c : r.checks) {
    INFO(c.name, " value=", c.lhs);
    CHECK(c.pass);
    CHECK(c.lhs < 50.0);
  }
}

TEST_CASE("time-step convergence order") {
  Report r = integral_convergence_study(71);
  for (const auto& c : r.checks) {
    INFO(c.name, " slope=", c.lhs);
    CHECK(c.pass);
  }
}

TEST_CASE("regularity bounds: static zero, expanding closed form, monotone") {
  auto round_m = SurfaceMetric::round_sphere(8);
  Foliation st = Foliation::static_metric(round_m, 1.0, 8);
  RegularityBounds rb = regularity_bounds(st);
  CHECK(rb.b_sff == 0.0);
  CHECK(rb.b_sff_tr == 0.0);
  CHECK(rb.b_sffd == 0.0);
  CHECK(rb.b_sffcurl == 0.0);

  // expanding: |k| = sqrt(2)/(1+tau) pointwise, so L^{inf,1} = sqrt(2) ln 2
  Foliation ex = Foliation::expanding(1.0, 16, 8);
  RegularityBounds re = regularity_bounds(ex);
  CHECK(re.b_sff == doctest::Approx(std::sqrt(2.0) * std::log(2.0)).epsilon(1e-4));
  CHECK(re.b_sffcurl < 1e-9);

  Foliation ex2 = Foliation::expanding(2.0, 16, 8);
  CHECK(regularity_bounds(ex2).b_sff > re.b_sff);
}

TEST_CASE("foliation container round trip") {
  Foliation fol = Foliation::conformal_wave(77, 0.2, 3, 1.0, 16, 10);
  fol.save("test_fol.fol");
  Foliation back = Foliation::load("test_fol.fol");
  CHECK(back.is_conformal());
  CHECK(back.M() == 16);
  CHECK(back.L() == 10);
  SpinField a = fol.u_at(0.5);
  SpinField b = back.u_at(0.5);
  double err = 0;
  for (int i = 0; i < a.size(); ++i) err += std::norm(a.a[i] - b.a[i]);
  CHECK(std::sqrt(err) < 1e-10);
  std::remove("test_fol.fol");
}
