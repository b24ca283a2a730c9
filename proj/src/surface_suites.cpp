#include <cmath>

#include "geolab/metric.hpp"
#include "geolab/par.hpp"

namespace geolab {

namespace {

GridTensor oneform_grid(const std::vector<cplx>& plus, const QuadratureGrid& g) {
  GridTensor t(1, g);
  const double s2 = std::sqrt(2.0);
  for (int i = 0; i < g.n_nodes(); ++i) {
    t.comp[0][i] = s2 * plus[i].real();
    t.comp[1][i] = s2 * plus[i].imag();
  }
  return t;
}

GridTensor h2_grid(const std::vector<cplx>& plus2, const QuadratureGrid& g) {
  GridTensor t(2, g);
  for (int i = 0; i < g.n_nodes(); ++i) {
    t.comp[0][i] = plus2[i].real();
    t.comp[1][i] = plus2[i].imag();
    t.comp[2][i] = plus2[i].imag();
    t.comp[3][i] = -plus2[i].real();
  }
  return t;
}

double grid_l2(const SurfaceMetric& m, const GridTensor& T, const std::vector<int>& var,
               const QuadratureGrid& g) {
  auto n2 = pointwise_norm_sq_grid(m, T, var, g);
  return std::sqrt(std::max(0.0, integrate_measure(m, n2, g)));
}

double cgrid_l2(const SurfaceMetric& m, const std::vector<cplx>& v,
                const QuadratureGrid& g) {
  std::vector<double> n2(v.size());
  for (size_t i = 0; i < v.size(); ++i) n2[i] = std::norm(v[i]);
  return std::sqrt(std::max(0.0, integrate_measure(m, n2, g)));
}

// trace of nabla^2, assembled pointwise (independent Bochner route)
GridTensor bochner_grid(const SurfaceMetric& m, const SurfaceField& F,
                        const QuadratureGrid& g) {
  SurfaceField d1 = covariant_derivative(m, F);  // exact for conformal metrics
  GridTensor d2 = covariant_derivative_grid(m, d1, g);
  const auto& gd = m.grid_data(g);
  return contract(d2, 0, 1, gd.inv00, gd.inv01, gd.inv11);
}

std::vector<cplx> sampled(const SpinField& f, const QuadratureGrid& g) {
  std::vector<cplx> v;
  detail::synthesis(f, g, v);
  return v;
}

struct MaxAgg {
  double v = 0.0;
  void add(double x) { v = std::max(v, x); }
};

}  // namespace

Report surface_identity_suite(int L, int trials, std::uint64_t seed, double tol) {
  Report rep;
  const int ub = 4;  // conformal factor band
  const auto& g = grid_for(2 * L + 6 * ub + 40);
  Rng root(seed);

  MaxAgg r_d1d1s, r_d1sd1, r_d2d2s, r_d2sd2;
  MaxAgg r_id1, r_id2, r_id3, r_id4;
  MaxAgg r_adj1, r_adj2;
  MaxAgg r_confcd, r_confgc, r_gb, r_compat, r_leibniz, r_lqcomp;
  MaxAgg r_cinv_d1, r_cinv_d2, r_cinv_d1s;
  MaxAgg probe_d2s;

  for (int t = 0; t < trials; ++t) {
    Rng rng = root.fork(t);
    double amp = rng.uniform(0.05, 0.3);
    SpinField u = random_conformal_factor(rng.next_u64(), 1, ub, amp, L);
    SurfaceMetric m = SurfaceMetric::conformal(u);
    const auto& gd = m.grid_data(g);

    SpinField x0r = random_band_limited(rng.next_u64(), 0, 0, L, 1.0, L, true);
    SpinField x0i = random_band_limited(rng.next_u64(), 0, 0, L, 1.0, L, true);
    SpinField x0 = x0r;
    x0 += cplx(0.0, 1.0) * x0i;
    SpinField x1 = random_band_limited(rng.next_u64(), 1, 1, L, 1.0, L);
    SpinField x2 = random_band_limited(rng.next_u64(), 2, 2, L, 1.0, L);

    int n = g.n_nodes();
    std::vector<double> w2(n), wm2(n), wm4(n);
    for (int i = 0; i < n; ++i) {
      w2[i] = std::exp(2.0 * gd.usamp[i]);
      wm2[i] = 1.0 / w2[i];
      wm4[i] = wm2[i] * wm2[i];
    }
    // K = e^{-2u}(1 - lapl-hat u), pointwise
    SpinField lu = round_laplacian(u);
    auto lus = sampled(lu, g);
    std::vector<double> Ks(n);
    for (int i = 0; i < n; ++i) Ks[i] = wm2[i] * (1.0 - lus[i].real());

    // ---- hodge_sq on H0: D1 D1* X = -Delta X ----
    {
      SpinField ddx = detail::eth_any(detail::eth_any(x0, EthDirection::raise),
                                      EthDirection::lower);
      auto lhs = sampled(ddx, g);  // D1 D1* X = -e^{-2u} ethbar eth X
      for (int i = 0; i < n; ++i) lhs[i] *= -wm2[i];
      GridTensor br = bochner_grid(m, make_scalar(x0r), g);
      GridTensor bi = bochner_grid(m, make_scalar(x0i), g);
      std::vector<cplx> rhs(n);
      for (int i = 0; i < n; ++i) rhs[i] = -cplx(br.comp[0][i], bi.comp[0][i]);
      std::vector<cplx> diff(n);
      for (int i = 0; i < n; ++i) diff[i] = lhs[i] - rhs[i];
      r_d1d1s.add(cgrid_l2(m, diff, g) / cgrid_l2(m, rhs, g));
    }

    // ---- hodge_sq on H1: D1* D1 X = (-Delta + K) X ----
    SurfaceField X1 = make_oneform(x1);
    {
      SpinField a = detail::eth_any(detail::eth_any(x1, EthDirection::lower),
                                    EthDirection::raise);
      SpinField du = detail::eth_any(u, EthDirection::raise);
      auto as = sampled(a, g);
      auto dus = sampled(du, g);
      auto dbx = sampled(detail::eth_any(x1, EthDirection::lower), g);
      std::vector<cplx> lhs_plus(n);
      for (int i = 0; i < n; ++i)
        lhs_plus[i] = wm2[i] * (-as[i] + 2.0 * dus[i] * dbx[i]);
      GridTensor lhs = oneform_grid(lhs_plus, g);
      GridTensor rhs = bochner_grid(m, X1, g);
      rhs *= -1.0;
      GridTensor xs = sample(X1.ten, g);
      rhs += scalar_multiply(Ks, xs);
      GridTensor diff = lhs;
      diff -= rhs;
      r_d1sd1.add(grid_l2(m, diff, {1}, g) / grid_l2(m, rhs, {1}, g));
    }

    // D2* X1 = -(nabla X1)_{mm}, exact coefficients
    SurfaceField DX1 = covariant_derivative(m, X1);
    SpinField z1 = DX1.ten.comp[0];
    z1 *= cplx(-1.0, 0.0);

    // ---- hodge_sq on H1: 2 D2 D2* X = (-Delta - K) X ----
    {
      SpinField dz = detail::eth_any(z1, EthDirection::lower);
      auto dzs = sampled(dz, g);
      std::vector<cplx> lhs_plus(n);
      const double c = -1.0 / std::sqrt(2.0);
      for (int i = 0; i < n; ++i) lhs_plus[i] = 2.0 * wm2[i] * c * dzs[i];
      GridTensor lhs = oneform_grid(lhs_plus, g);
      GridTensor rhs = bochner_grid(m, X1, g);
      rhs *= -1.0;
      GridTensor xs = sample(X1.ten, g);
      std::vector<double> mK(n);
      for (int i = 0; i < n; ++i) mK[i] = -Ks[i];
      rhs += scalar_multiply(mK, xs);
      GridTensor diff = lhs;
      diff -= rhs;
      r_d2d2s.add(grid_l2(m, diff, {1}, g) / grid_l2(m, rhs, {1}, g));
    }

    // ---- hodge_sq on H2: 2 D2* D2 X = (-Delta + 2K) X ----
    SurfaceField X2 = make_h2(x2);
    {
      SpinField h = detail::eth_any(x2, EthDirection::lower);
      h *= cplx(-1.0 / std::sqrt(2.0), 0.0);  // D2-hat X2 (round part)
      SurfaceField H = make_oneform(h);
      SurfaceField DH = covariant_derivative(m, H);
      auto dhmm = sampled(DH.ten.comp[0], g);
      auto hs = sampled(h, g);
      SpinField du = detail::eth_any(u, EthDirection::raise);
      auto dus = sampled(du, g);
      std::vector<cplx> z2(n);
      const double s2 = std::sqrt(2.0);
      for (int i = 0; i < n; ++i)
        z2[i] = -(s2 * wm2[i] * dus[i] * hs[i] + wm2[i] * dhmm[i]);
      std::vector<cplx> lhs_plus(n);
      for (int i = 0; i < n; ++i) lhs_plus[i] = 2.0 * z2[i];
      GridTensor lhs = h2_grid(lhs_plus, g);
      GridTensor rhs = bochner_grid(m, X2, g);
      rhs *= -1.0;
      GridTensor xs = sample(X2.ten, g);
      std::vector<double> K2(n);
      for (int i = 0; i < n; ++i) K2[i] = 2.0 * Ks[i];
      rhs += scalar_multiply(K2, xs);
      GridTensor diff = lhs;
      diff -= rhs;
      r_d2sd2.add(grid_l2(m, diff, {1, 1}, g) / grid_l2(m, rhs, {1, 1}, g));
    }

    // ---- hodge_id integral identities ----
    {
      GridTensor dx1 = covariant_derivative_grid(m, X1, g);
      auto nd = pointwise_norm_sq_grid(m, dx1, {1, 1}, g);
      auto nx = pointwise_norm_sq(m, X1, g);
      std::vector<double> integ(n);
      for (int i = 0; i < n; ++i) integ[i] = nd[i] + Ks[i] * nx[i];
      double lhs = integrate_measure(m, integ, g);
      auto d1s_vals = sampled(detail::eth_any(x1, EthDirection::lower), g);
      std::vector<double> rq(n);
      for (int i = 0; i < n; ++i)
        rq[i] = std::norm(-std::sqrt(2.0) * wm2[i] * d1s_vals[i]);
      double rhs = integrate_measure(m, rq, g);
      r_id1.add(std::abs(lhs - rhs) / (std::abs(lhs) + std::abs(rhs)));

      // id4: int(|nabla X|^2 - K |X|^2) = 2 int |D2* X|^2, X in H1
      for (int i = 0; i < n; ++i) integ[i] = nd[i] - Ks[i] * nx[i];
      double lhs4 = integrate_measure(m, integ, g);
      auto z1s = sampled(z1, g);
      // rhs = 2 int |D2* X|^2, with |.|^2_{H2} = 2 |z|^2 e^{-4u}
      for (int i = 0; i < n; ++i) rq[i] = 4.0 * std::norm(z1s[i]) * wm4[i];
      double rhs4 = integrate_measure(m, rq, g);
      r_id4.add(std::abs(lhs4 - rhs4) / (std::abs(lhs4) + std::abs(rhs4)));
    }
    {
      GridTensor dx2 = covariant_derivative_grid(m, X2, g);
      auto nd = pointwise_norm_sq_grid(m, dx2, {1, 1, 1}, g);
      auto nx = pointwise_norm_sq(m, X2, g);
      std::vector<double> integ(n);
      for (int i = 0; i < n; ++i) integ[i] = nd[i] + 2.0 * Ks[i] * nx[i];
      double lhs = integrate_measure(m, integ, g);
      auto d2v = sampled(detail::eth_any(x2, EthDirection::lower), g);
      std::vector<double> rq(n);
      for (int i = 0; i < n; ++i)
        rq[i] = 2.0 * 2.0 * std::norm(-wm2[i] / std::sqrt(2.0) * d2v[i]) * wm2[i];
      // |D2 X|^2_{H1} = 2 |plus|^2 e^{-2u}; factor e^{-2u} from the H1 metric
      double rhs = integrate_measure(m, rq, g);
      r_id2.add(std::abs(lhs - rhs) / (std::abs(lhs) + std::abs(rhs)));
    }
    {
      // id3: int |nabla X|^2 = int |D1* X|^2, X in H0
      GridTensor dr = covariant_derivative_grid(m, make_scalar(x0r), g);
      GridTensor di = covariant_derivative_grid(m, make_scalar(x0i), g);
      auto n2r = pointwise_norm_sq_grid(m, dr, {1}, g);
      auto n2i = pointwise_norm_sq_grid(m, di, {1}, g);
      std::vector<double> integ(n);
      for (int i = 0; i < n; ++i) integ[i] = n2r[i] + n2i[i];
      double lhs = integrate_measure(m, integ, g);
      auto dx0 = sampled(detail::eth_any(x0, EthDirection::raise), g);
      std::vector<double> rq(n);
      for (int i = 0; i < n; ++i) rq[i] = std::norm(dx0[i]) * wm2[i];
      double rhs = integrate_measure(m, rq, g);
      r_id3.add(std::abs(lhs - rhs) / (std::abs(lhs) + std::abs(rhs)));
    }

    // ---- adjointness ----
    {
      // <D1 X, Y>_{H0} = <X, D1* Y>_{H1}
      SpinField y0 = random_band_limited(rng.next_u64(), 0, 0, L, 1.0, L);
      auto d1x = sampled(detail::eth_any(x1, EthDirection::lower), g);
      auto ys = sampled(y0, g);
      std::vector<double> integ(n);
      for (int i = 0; i < n; ++i)
        integ[i] = (-std::sqrt(2.0) * wm2[i] * d1x[i] * std::conj(ys[i])).real();
      double lhs = integrate_measure(m, integ, g);
      SpinField d1sy = detail::eth_any(y0, EthDirection::raise);
      d1sy *= cplx(1.0 / std::sqrt(2.0), 0.0);
      double rhs = 2.0 * l2_inner(x1, d1sy).real();
      r_adj1.add(std::abs(lhs - rhs) / (std::abs(lhs) + std::abs(rhs) + 1e-30));

      // <D2 W, X>_{H1} = <W, D2* X>_{H2}
      auto d2w = sampled(detail::eth_any(x2, EthDirection::lower), g);
      auto xs = sampled(x1, g);
      for (int i = 0; i < n; ++i)
        integ[i] = 2.0 *
                   ((-1.0 / std::sqrt(2.0)) * wm2[i] * d2w[i] * std::conj(xs[i])).real() *
                   wm2[i];
      double lhs2 = integrate_measure(m, integ, g);
      auto ws = sampled(x2, g);
      auto z1s = sampled(z1, g);
      for (int i = 0; i < n; ++i)
        integ[i] = 2.0 * (ws[i] * std::conj(z1s[i])).real() * wm4[i];
      double rhs2 = integrate_measure(m, integ, g);
      r_adj2.add(std::abs(lhs2 - rhs2) / (std::abs(lhs2) + std::abs(rhs2) + 1e-30));
    }

    // ---- conformal covariant derivative vs direct Levi-Civita assembly ----
    {
      SurfaceField F = random_surface_field(rng.next_u64(), 2, 0, L, 1.0, L);
      F.var = {0, 1};  // exercise a mixed-variance tensor
      GridTensor a = covariant_derivative_grid(m, F, g);
      // direct route: general-metric machinery on the projected gamma-bar
      int gband = 6 * ub + 24;
      GridTensor gsamp(2, g);
      for (int i = 0; i < n; ++i) {
        gsamp.comp[0][i] = w2[i];
        gsamp.comp[3][i] = w2[i];
      }
      SurfaceMetric direct = SurfaceMetric::general(project(gsamp, gband));
      GridTensor b = covariant_derivative_grid(direct, F, g);
      GridTensor diff = a;
      diff -= b;
      r_confcd.add(grid_l2(m, diff, {1, 0, 1}, g) / grid_l2(m, a, {1, 0, 1}, g));
    }

    // ---- conf_gc: finite-difference Laplace-Beltrami oracle at sample points ----
    {
      double mx = 0.0, scale = 0.0;
      for (auto [tt, pp] : {std::pair<double, double>{1.2, 0.4}, {2.1, 3.3}, {0.8, 5.0}}) {
        const double h = 1e-3;
        auto f = [&](double a, double b) { return synthesize_at(u, a, b).real(); };
        auto d2t = (-f(tt + 2 * h, pp) + 16 * f(tt + h, pp) - 30 * f(tt, pp) +
                    16 * f(tt - h, pp) - f(tt - 2 * h, pp)) /
                   (12 * h * h);
        auto d1t = (-f(tt + 2 * h, pp) + 8 * f(tt + h, pp) - 8 * f(tt - h, pp) +
                    f(tt - 2 * h, pp)) /
                   (12 * h);
        auto d2p = (-f(tt, pp + 2 * h) + 16 * f(tt, pp + h) - 30 * f(tt, pp) +
                    16 * f(tt, pp - h) - f(tt, pp - 2 * h)) /
                   (12 * h * h);
        double lap_fd = d2t + std::cos(tt) / std::sin(tt) * d1t +
                        d2p / (std::sin(tt) * std::sin(tt));
        double K_fd = std::exp(-2.0 * f(tt, pp)) * (1.0 - lap_fd);
        double K_formula =
            std::exp(-2.0 * f(tt, pp)) * (1.0 - synthesize_at(lu, tt, pp).real());
        mx = std::max(mx, std::abs(K_fd - K_formula));
        scale = std::max(scale, std::abs(K_formula));
      }
      r_confgc.add(mx / scale);
    }

    // ---- Gauss-Bonnet ----
    {
      // K dOmega-bar = (1 - lapl-hat u) dOmega-hat, quadrature-exact
      std::vector<double> integ(n);
      for (int i = 0; i < n; ++i) integ[i] = Ks[i];
      double gb = integrate_measure(m, integ, g);
      r_gb.add(std::abs(gb - kFourPi) / kFourPi);
    }

    // ---- metric compatibility ----
    {
      int gband = 6 * ub + 24;
      GridTensor gsamp(2, g);
      for (int i = 0; i < n; ++i) {
        gsamp.comp[0][i] = w2[i];
        gsamp.comp[3][i] = w2[i];
      }
      SurfaceField gbar = make_field(project(gsamp, gband), {1, 1});
      GridTensor dg = covariant_derivative_grid(m, gbar, g);
      double num = grid_l2(m, dg, {1, 1, 1}, g);
      r_compat.add(num / grid_l2(m, gsamp, {1, 1}, g));
    }

    // ---- Leibniz ----
    {
      SpinField f1 = random_band_limited(rng.next_u64(), 0, 0, L, 1.0, L, true);
      SpinField f2 = random_band_limited(rng.next_u64(), 0, 0, L, 1.0, L, true);
      const auto& pgrid = product_grid(L, L);
      auto v1 = sample_real(f1, pgrid);
      auto v2 = sample_real(f2, pgrid);
      std::vector<double> pv(v1.size());
      for (size_t i = 0; i < v1.size(); ++i) pv[i] = v1[i] * v2[i];
      SpinField prod = project_real(pv, 0, 2 * L, pgrid);
      GridTensor lhs = sample(round_nabla(scalar_tensor(prod)), g);
      GridTensor d1 = sample(round_nabla(scalar_tensor(f1)), g);
      GridTensor d2t = sample(round_nabla(scalar_tensor(f2)), g);
      auto v1g = sample_real(f1, g);
      auto v2g = sample_real(f2, g);
      GridTensor rhs = scalar_multiply(v2g, d1);
      rhs += scalar_multiply(v1g, d2t);
      GridTensor diff = lhs;
      diff -= rhs;
      r_leibniz.add(grid_l2(m, diff, {1}, g) / grid_l2(m, rhs, {1}, g));
    }

    // ---- Lq comparison under conformal change, explicit exponent ----
    {
      SpinField v = random_conformal_factor(rng.next_u64(), 1, ub, 0.2, L);
      SurfaceMetric mbar = conformal_compose(m, v);
      for (int rank = 0; rank <= 2; ++rank) {
        SurfaceField F = random_surface_field(rng.next_u64(), rank, 0, L, 1.0, L);
        for (double q : {2.0, 4.0}) {
          double a = lq_norm(mbar, F, q);
          double b = lq_norm(m, F, q);
          double c = std::abs(F.r() - F.l()) + 2.0 / q;
          double vmax = 0.0;
          auto vs = sample_real(v, g);
          for (double x : vs) vmax = std::max(vmax, std::abs(x));
          double lo = std::exp(-c * vmax), hi = std::exp(c * vmax);
          double ratio = a / b;
          double excess = std::max(lo - ratio, ratio - hi) / hi;
          r_lqcomp.add(std::max(0.0, excess));
        }
      }
    }

    // ---- conformal invariance of D1, D2, D1*; D2* failure probe ----
    {
      GridTensor T = covariant_derivative_grid(m, X1, g);
      const auto& gdm = m.grid_data(g);
      GridTensor div = contract(T, 0, 1, gdm.inv00, gdm.inv01, gdm.inv11);
      std::vector<double> inv_sq(n);
      for (int i = 0; i < n; ++i) inv_sq[i] = 1.0 / gdm.sqdet[i];
      GridTensor curl = contract_eps(T, 0, 1, inv_sq);
      auto sc = sampled(detail::eth_any(x1, EthDirection::lower), g);
      double num = 0.0, den = 0.0;
      std::vector<double> dn(n);
      for (int i = 0; i < n; ++i) {
        cplx geo(div.comp[0][i], -curl.comp[0][i]);
        cplx spec = -std::sqrt(2.0) * wm2[i] * sc[i];
        dn[i] = std::norm(geo - spec);
        num += 0.0;
      }
      num = std::sqrt(integrate_measure(m, dn, g));
      for (int i = 0; i < n; ++i) dn[i] = std::norm(-std::sqrt(2.0) * wm2[i] * sc[i]);
      den = std::sqrt(integrate_measure(m, dn, g));
      r_cinv_d1.add(num / den);

      // D2 geometric: contract derivative slot with the second tensor slot
      GridTensor T2 = covariant_derivative_grid(m, X2, g);
      GridTensor d2geo = contract(T2, 0, 2, gdm.inv00, gdm.inv01, gdm.inv11);
      auto s2v = sampled(detail::eth_any(x2, EthDirection::lower), g);
      std::vector<cplx> spec_plus(n);
      for (int i = 0; i < n; ++i)
        spec_plus[i] = (-1.0 / std::sqrt(2.0)) * wm2[i] * s2v[i];
      GridTensor spec2 = oneform_grid(spec_plus, g);
      GridTensor diff2 = d2geo;
      diff2 -= spec2;
      r_cinv_d2.add(grid_l2(m, diff2, {1}, g) / grid_l2(m, spec2, {1}, g));

      // D1* geometric: -nabla Re - eps_a^c nabla_c Im (round eps: invariant)
      GridTensor gr = covariant_derivative_grid(m, make_scalar(x0r), g);
      GridTensor gi = covariant_derivative_grid(m, make_scalar(x0i), g);
      GridTensor geo1(1, g);
      for (int i = 0; i < n; ++i) {
        // eps_a^c (frame, round): eps(th,ph) = -1 -> eps_th^ph = -1, eps_ph^th = +1
        geo1.comp[0][i] = -gr.comp[0][i] + gi.comp[1][i];
        geo1.comp[1][i] = -gr.comp[1][i] - gi.comp[0][i];
      }
      SpinField d1s = detail::eth_any(x0, EthDirection::raise);
      d1s *= cplx(1.0 / std::sqrt(2.0), 0.0);
      GridTensor spec1 = oneform_grid(sampled(d1s, g), g);
      GridTensor diff1 = geo1;
      diff1 -= spec1;
      r_cinv_d1s.add(grid_l2(m, diff1, {1}, g) / grid_l2(m, spec1, {1}, g));

      // D2-star conformal non-invariance, recorded
      SpinField z_round = round_nabla(X1.ten).comp[0];
      z_round *= cplx(-1.0, 0.0);
      SpinField dz = z1 - extend_band(z_round, z1.band_limit);
      probe_d2s.add(dz.l2_norm() / (z_round.l2_norm() + 1e-30));
    }
  }

  auto add_res = [&](const char* name, const char* ref, const MaxAgg& a) {
    rep.add(residual_check(name, ref, a.v, tol));
  };
  add_res("identities/hodge_sq_d1d1s", "eq.hodge_sq", r_d1d1s);
  add_res("identities/hodge_sq_d1sd1", "eq.hodge_sq", r_d1sd1);
  add_res("identities/hodge_sq_d2d2s", "eq.hodge_sq", r_d2d2s);
  add_res("identities/hodge_sq_d2sd2", "eq.hodge_sq", r_d2sd2);
  add_res("identities/hodge_id_d1", "eq.hodge_id", r_id1);
  add_res("identities/hodge_id_d2", "eq.hodge_id", r_id2);
  add_res("identities/hodge_id_d1s", "eq.hodge_id", r_id3);
  add_res("identities/hodge_id_d2s", "eq.hodge_id", r_id4);
  add_res("identities/adjoint_d1", "sec 2.1 adjoints", r_adj1);
  add_res("identities/adjoint_d2", "sec 2.1 adjoints", r_adj2);
  add_res("identities/conf_cd", "eq.conf_cd", r_confcd);
  add_res("identities/conf_gc_fd", "eq.conf_gc / eq.conf_gc_id", r_confgc);
  add_res("identities/gauss_bonnet", "external consistency (Gauss-Bonnet)", r_gb);
  add_res("identities/metric_compat", "Levi-Civita defining property", r_compat);
  add_res("identities/leibniz", "Leibniz rule", r_leibniz);
  add_res("identities/conf_lq_comparison", "eq.conf_comp", r_lqcomp);
  add_res("identities/conf_hodge_d1", "eq.conf_hodge", r_cinv_d1);
  add_res("identities/conf_hodge_d2", "eq.conf_hodge", r_cinv_d2);
  add_res("identities/conf_hodge_d1s", "eq.conf_hodge", r_cinv_d1s);
  rep.add(ratio_check("identities/d2s_noninvariance_probe",
                      "remark after eq.conf_hodge (recorded, no gate)", probe_d2s.v));
  rep.environment = {{"L", L}, {"trials", trials}, {"seed", seed}};
  return rep;
}

Report gns_suite(const SurfaceMetric& m, int trials, std::uint64_t seed) {
  Report rep;
  int L = m.band_limit();
  MaxAgg g1q4, g1q6, g1s, g2;
  Rng root(seed);
  for (int t = 0; t < trials; ++t) {
    Rng rng = root.fork(t);
    int rank = t % 3;
    SurfaceField F = random_surface_field(rng.next_u64(), rank, 0, L, 1.0, L);
    SurfaceField dF = covariant_derivative(m, F);
    SurfaceField d2F = covariant_derivative(m, dF);
    double l2 = lq_norm(m, F, 2.0);
    double dl2 = lq_norm(m, dF, 2.0);
    double d2l2 = lq_norm(m, d2F, 2.0);
    double linf = lq_norm(m, F, INFINITY);
    if (l2 == 0.0) continue;
    for (double q : {4.0, 6.0}) {
      double lq = lq_norm(m, F, q);
      double rhs = std::pow(dl2, 1.0 - 2.0 / q) * std::pow(l2, 2.0 / q) + l2;
      ((q == 4.0) ? g1q4 : g1q6).add(lq / rhs);
    }
    {
      double l4 = lq_norm(m, F, 4.0);
      double dl4 = lq_norm(m, dF, 4.0);
      double rhs = std::sqrt(dl4) * std::sqrt(l4) + l4;
      g1s.add(linf / rhs);
    }
    g2.add(linf / (std::sqrt(d2l2) * std::sqrt(l2) + l2));
  }
  rep.add(ratio_check("gns/gns_1_q4", "eq.gns_1", g1q4.v));
  rep.add(ratio_check("gns/gns_1_q6", "eq.gns_1", g1q6.v));
  rep.add(ratio_check("gns/gns_1s_q4", "eq.gns_1s", g1s.v));
  rep.add(ratio_check("gns/gns_2", "eq.gns_2", g2.v));
  return rep;
}

}  // namespace geolab
