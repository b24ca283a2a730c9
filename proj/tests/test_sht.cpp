#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "geolab/grid.hpp"
#include "geolab/par.hpp"
#include "geolab/sht.hpp"
#include "geolab/wigner.hpp"

using namespace geolab;

namespace {

// analytic eth as a differential operator, evaluated by 4th-order central
// differences on synthesize_at; independent of the coefficient ladder
cplx eth_fd(const SpinField& f, double theta, double phi, bool raise) {
  const double h = 1e-3;
  auto F = [&](double t, double p) { return synthesize_at(f, t, p); };
  auto d4 = [&](auto g) {
    return (-g(2.0 * h) + 8.0 * g(h) - 8.0 * g(-h) + g(-2.0 * h)) / (12.0 * h);
  };
  cplx Ft = d4([&](double d) { return F(theta + d, phi); });
  cplx Fp = d4([&](double d) { return F(theta, phi + d); });
  cplx F0 = F(theta, phi);
  double s = f.spin;
  double cot = std::cos(theta) / std::sin(theta);
  double csc = 1.0 / std::sin(theta);
  if (raise) return -(Ft - s * cot * F0 + cplx(0, 1) * csc * Fp);
  return -(Ft + s * cot * F0 - cplx(0, 1) * csc * Fp);
}

double rel_err(const SpinField& a, const SpinField& b) {
  double d = 0.0;
  for (int i = 0; i < a.size(); ++i) d += std::norm(a.a[i] - b.a[i]);
  return std::sqrt(d) / (b.l2_norm() + 1e-300);
}

}  // namespace

TEST_CASE("wigner d sanity against closed forms") {
  double b = 0.7;
  CHECK(wigner_d(1, 1, 1, b) == doctest::Approx(0.5 * (1 + std::cos(b))).epsilon(1e-13));
  CHECK(wigner_d(1, 1, 0, b) == doctest::Approx(-std::sin(b) / std::sqrt(2.0)).epsilon(1e-13));
  CHECK(wigner_d(1, 0, 0, b) == doctest::Approx(std::cos(b)).epsilon(1e-13));
  CHECK(wigner_d(2, 0, 0, b) ==
        doctest::Approx(0.5 * (3 * std::cos(b) * std::cos(b) - 1)).epsilon(1e-13));
  CHECK(wigner_d(2, 2, -2, b) ==
        doctest::Approx(std::pow(std::sin(0.5 * b), 4)).epsilon(1e-12));
}

TEST_CASE("orthonormality of the spin basis under quadrature") {
  const auto& g = grid_for(10);
  for (int s = -4; s <= 4; ++s) {
    for (auto [l, m, l2, m2] : {std::array<int, 4>{std::abs(s), 0, std::abs(s), 0},
                                std::array<int, 4>{5, 2, 5, 2},
                                std::array<int, 4>{5, 2, 7, 2},
                                std::array<int, 4>{6, -3, 6, -3}}) {
      if (l < std::abs(s) || l2 < std::abs(s)) continue;
      std::vector<cplx> prod(g.n_nodes());
      for (int i = 0; i < g.n_theta; ++i)
        for (int j = 0; j < g.n_phi; ++j)
          prod[g.node(i, j)] = eval_harmonic(s, l, m, g.theta[i], g.phi[j]) *
                               std::conj(eval_harmonic(s, l2, m2, g.theta[i], g.phi[j]));
      cplx ip = integrate_grid(prod, g);
      double expect = (l == l2 && m == m2) ? 1.0 : 0.0;
      CHECK(std::abs(ip - expect) < 1e-12);
    }
  }
}

TEST_CASE("forward transform of the constant") {
  const auto& g = grid_for(15);
  std::vector<cplx> ones(g.n_nodes(), cplx(1.0, 0.0));
  SpinField f = forward_transform(ones, 0, g);
  CHECK(std::abs(f.at(0, 0) - std::sqrt(kFourPi)) < 1e-12);
  double rest = 0.0;
  for (int l = 1; l <= 15; ++l)
    for (int m = -l; m <= l; ++m) rest += std::norm(f.at(l, m));
  CHECK(std::sqrt(rest) < 1e-12);
  // cross-check: quadrature of 1*1 is the sphere area
  CHECK(std::abs(integrate_grid(ones, g) - kFourPi) < 1e-12);
}

TEST_CASE("inverse transform of a single harmonic matches the closed form") {
  const auto& g = grid_for(8);
  SpinField f = unit_harmonic(0, 1, 0, 8);
  auto samples = inverse_transform(f, g);
  for (int i = 0; i < g.n_theta; ++i) {
    double expect = std::sqrt(3.0 / kFourPi) * g.ctheta[i];
    CHECK(std::abs(samples[g.node(i, 0)] - expect) < 1e-13);
  }
}

TEST_CASE("zero cases and round trips") {
  const auto& g = grid_for(12);
  std::vector<cplx> zeros(g.n_nodes(), cplx(0.0, 0.0));
  SpinField z = forward_transform(zeros, 1, g);
  CHECK(z.l2_norm() == 0.0);
  CHECK(inverse_transform(SpinField(0, 12), g) == std::vector<cplx>(g.n_nodes(), cplx{}));

  for (int s : {-2, -1, 0, 1, 2}) {
    SpinField f = random_band_limited(17 + s, s, std::max(1, std::abs(s)), 12, 1.0, 12);
    auto samples = inverse_transform(f, g);
    SpinField f2 = forward_transform(samples, s, g);
    CHECK(rel_err(f2, f) < 1e-12);
  }
}

TEST_CASE("parseval") {
  const auto& g = grid_for(15);
  SpinField f = random_band_limited(3, 0, 0, 15, 2.5, 15);
  auto samples = inverse_transform(f, g);
  std::vector<cplx> sq(samples.size());
  for (size_t i = 0; i < samples.size(); ++i) sq[i] = std::norm(samples[i]);
  double l2grid = std::sqrt(integrate_grid(sq, g).real());
  CHECK(std::abs(l2grid - f.l2_norm()) / f.l2_norm() < 1e-10);
}

TEST_CASE("eth ladder matches the finite-difference operator") {
  for (int s : {-2, -1, 0, 1, 2}) {
    SpinField f = random_band_limited(99 + s, s, std::abs(s) == 0 ? 1 : std::abs(s), 7, 1.0, 7);
    for (bool raise : {true, false}) {
      if (raise && s == 2) continue;
      if (!raise && s == -2) continue;
      SpinField ef = eth(f, raise ? EthDirection::raise : EthDirection::lower);
      for (auto [t, p] : {std::pair<double, double>{1.1, 0.3}, {2.0, 4.0}, {0.7, 2.2}}) {
        cplx lhs = synthesize_at(ef, t, p);
        cplx rhs = eth_fd(f, t, p, raise);
        CHECK(std::abs(lhs - rhs) < 1e-8);
      }
    }
  }
}

TEST_CASE("eth annihilates constants; lower(raise) is the spin-0 laplacian") {
  SpinField c(0, 9);
  c.at(0, 0) = 2.0;
  CHECK(eth(c, EthDirection::raise).l2_norm() == 0.0);
  SpinField f = random_band_limited(5, 0, 1, 9, 1.0, 9);
  SpinField lr = eth(eth(f, EthDirection::raise), EthDirection::lower);
  SpinField lap = round_laplacian(f);
  CHECK(rel_err(lr, lap) < 1e-13);
}

TEST_CASE("eth rejects spin overflow") {
  SpinField f(2, 5);
  CHECK_THROWS(eth(f, EthDirection::raise));
  SpinField h(-2, 5);
  CHECK_THROWS(eth(h, EthDirection::lower));
  std::vector<cplx> v(grid_for(5).n_nodes());
  CHECK_THROWS(forward_transform(v, 3, grid_for(5)));
}

TEST_CASE("round laplacian eigenvalues and linearity") {
  SpinField f = unit_harmonic(0, 2, 1, 6);
  SpinField lf = round_laplacian(f);
  CHECK(std::abs(lf.at(2, 1) - cplx(-6.0, 0.0)) < 1e-15);
  SpinField c(0, 6);
  c.at(0, 0) = 3.0;
  CHECK(round_laplacian(c).l2_norm() == 0.0);
  SpinField a = random_band_limited(1, 1, 1, 6, 1.0, 6);
  SpinField b = random_band_limited(2, 1, 1, 6, 1.0, 6);
  SpinField lin = round_laplacian(cplx(2.0, 0) * a + cplx(-0.5, 0) * b);
  SpinField lin2 = cplx(2.0, 0) * round_laplacian(a) + cplx(-0.5, 0) * round_laplacian(b);
  CHECK(rel_err(lin, lin2) < 1e-14);
}

TEST_CASE("integrate_round oracle values") {
  const auto& g = grid_for(8);
  SpinField one(0, 8);
  one.at(0, 0) = std::sqrt(kFourPi);
  CHECK(std::abs(integrate_round(one) - kFourPi) < 1e-12);

  // independent quadrature oracle on a different rule (Simpson in theta)
  auto simpson_integral = [&](auto fn) {
    int nt = 200, np = 128;
    double acc = 0.0;
    for (int i = 0; i <= nt; ++i) {
      double t = kPi * i / nt;
      double wt = (i == 0 || i == nt) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
      double row = 0.0;
      for (int j = 0; j < np; ++j) row += fn(t, 2 * kPi * j / np);
      acc += wt * std::sin(t) * row * (kPi / nt / 3.0) * (2 * kPi / np);
    }
    return acc;
  };
  double i32 = simpson_integral([&](double t, double p) {
    return eval_harmonic(0, 3, 2, t, p).real();
  });
  CHECK(std::abs(i32) < 1e-9);
  CHECK(std::abs(integrate_round(unit_harmonic(0, 3, 2, 8))) < 1e-15);

  double n10 = simpson_integral([&](double t, double p) {
    return std::norm(eval_harmonic(0, 1, 0, t, p));
  });
  CHECK(n10 == doctest::Approx(1.0).epsilon(1e-8));
  CHECK_THROWS(integrate_round(SpinField(1, 8)));
}

TEST_CASE("random_band_limited contract") {
  SpinField f = random_band_limited(7, 0, 1, 5, 1.0, 15);
  CHECK(f.l2_norm() == doctest::Approx(1.0).epsilon(1e-14));
  for (int l = 6; l <= 15; ++l)
    for (int m = -l; m <= l; ++m) CHECK(f.at(l, m) == cplx(0.0, 0.0));
  CHECK(f.at(0, 0) == cplx(0.0, 0.0));
  SpinField f2 = random_band_limited(7, 0, 1, 5, 1.0, 15);
  CHECK(f.a == f2.a);
  SpinField z = random_band_limited(7, 0, 1, 5, 0.0, 15);
  CHECK(z.l2_norm() == 0.0);
  CHECK_THROWS(random_band_limited(7, 0, 5, 1, 1.0, 15));
  SpinField r = random_band_limited(11, 0, 0, 6, 1.0, 15, true);
  CHECK(is_real_field(r));
}

TEST_CASE("conjugation rule") {
  SpinField f = random_band_limited(23, 2, 2, 6, 1.0, 6);
  SpinField fc = conj_field(f);
  CHECK(fc.spin == -2);
  for (auto [t, p] : {std::pair<double, double>{0.9, 1.7}, {2.3, 5.1}}) {
    cplx a = synthesize_at(fc, t, p);
    cplx b = std::conj(synthesize_at(f, t, p));
    CHECK(std::abs(a - b) < 1e-12);
  }
}

TEST_CASE("parallel and serial transforms agree bitwise") {
  const auto& g = grid_for(15);
  SpinField f = random_band_limited(41, -1, 1, 15, 1.0, 15);
  std::vector<cplx> a, b;
  detail::synthesis(f, g, a);
  detail::synthesis_serial(f, g, b);
  CHECK(a == b);
  SpinField fa = detail::analysis(a, -1, 15, g);
  SpinField fb = detail::analysis_serial(a, -1, 15, g);
  CHECK(fa.a == fb.a);
}

TEST_CASE("spin field serialization round trip") {
  SpinField f = random_band_limited(4, 1, 1, 9, 3.0, 9);
  save_spin_field(f, "test_field.spin");
  SpinField g = load_spin_field("test_field.spin");
  CHECK(g.spin == f.spin);
  CHECK(g.band_limit == f.band_limit);
  CHECK(g.a == f.a);
}
