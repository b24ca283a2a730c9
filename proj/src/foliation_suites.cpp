#include <cmath>

#include "geolab/eucl.hpp"
#include "geolab/foliation.hpp"
#include "geolab/rng.hpp"

namespace geolab {

namespace {

struct MaxAgg {
  double v = 0.0;
  void add(double x) { v = std::max(v, x); }
};

double grid_sup(const GridTensor& T) {
  double mx = 0;
  for (const auto& c : T.comp)
    for (double v : c) mx = std::max(mx, std::abs(v));
  return mx;
}

template <class F>
GridTensor fd4_tau(F&& eval, double t, double h) {
  GridTensor a = eval(t + 2 * h);
  a *= -1.0;
  GridTensor b = eval(t + h);
  b *= 8.0;
  GridTensor c = eval(t - h);
  c *= -8.0;
  GridTensor d = eval(t - 2 * h);
  a += b;
  a += c;
  a += d;
  a *= 1.0 / (12.0 * h);
  return a;
}

// gamma, gamma^{-1}, eps frame samples at time t
void metric_frames(const Foliation& fol, double t, const QuadratureGrid& g,
                   GridTensor& gam, GridTensor& ginv, GridTensor& eps) {
  gam = GridTensor(2, g);
  ginv = GridTensor(2, g);
  eps = GridTensor(2, g);
  int n = g.n_nodes();
  if (fol.is_conformal()) {
    auto uu = sample_real(fol.u_at(t), g);
    for (int i = 0; i < n; ++i) {
      double e2u = std::exp(2.0 * uu[i]);
      gam.comp[0][i] = gam.comp[3][i] = e2u;
      ginv.comp[0][i] = ginv.comp[3][i] = 1.0 / e2u;
      eps.comp[1][i] = -e2u;  // eps(th, ph) = -sqrtdet
      eps.comp[2][i] = e2u;
    }
  } else {
    GridTensor gs = sample(fol.g_at(t), g);
    for (int i = 0; i < n; ++i) {
      double g00 = gs.comp[0][i], g01 = gs.comp[1][i], g11 = gs.comp[3][i];
      double det = g00 * g11 - g01 * g01;
      double sq = std::sqrt(det);
      gam.comp[0][i] = g00;
      gam.comp[1][i] = gam.comp[2][i] = g01;
      gam.comp[3][i] = g11;
      ginv.comp[0][i] = g11 / det;
      ginv.comp[1][i] = ginv.comp[2][i] = -g01 / det;
      ginv.comp[3][i] = g00 / det;
      eps.comp[1][i] = -sq;
      eps.comp[2][i] = sq;
    }
  }
}

}  // namespace

Report jacobian_identity_check(const Foliation& fol, double tol) {
  Report rep;
  const auto& g = grid_for(fol.L() + 2 * fol.data_band() + 24);
  RegularityBounds rb = regularity_bounds(fol);
  double B = rb.b_sff_tr;
  MaxAgg vol_res, bound_res;
  GridTensor gam0, gi0, eps0;
  metric_frames(fol, 0.0, g, gam0, gi0, eps0);
  for (int j = 0; j <= fol.M(); ++j) {
    auto J = jacobian_grid(fol, fol.tau(j), g);
    GridTensor gam, gi, eps;
    metric_frames(fol, fol.tau(j), g, gam, gi, eps);
    for (int i = 0; i < g.n_nodes(); ++i) {
      double lhs = eps.comp[2][i];  // sqrtdet at tau
      double rhs = J[i] * eps0.comp[2][i];
      vol_res.add(std::abs(lhs - rhs) / std::abs(rhs));
      double lo = std::exp(-2.0 * B) * (1.0 - tol);
      double hi = std::exp(2.0 * B) * (1.0 + tol);
      bound_res.add(std::max(0.0, std::max(lo - J[i], J[i] - hi)));
    }
  }
  rep.add(residual_check("jacobian/change_of_measure", "eq.jacobian", vol_res.v, tol));
  rep.add(residual_check("jacobian/uniform_bounds", "eq.vol_comp", bound_res.v, tol));
  return rep;
}

Report evolution_identity_suite(const Foliation& fol, int trials, std::uint64_t seed,
                                double tol) {
  Report rep;
  const auto& g = grid_for(fol.L() + 2 * fol.data_band() + 32);
  Rng root(seed);
  int n = g.n_nodes();

  // ---- gamma, gamma^{-1}, eps are t-parallel ----
  MaxAgg tp_gam, tp_ginv, tp_eps;
  for (double t : {0.0, 0.41 * fol.delta(), fol.delta()}) {
    GridTensor gam, gi, eps;
    metric_frames(fol, t, g, gam, gi, eps);
    auto kd = fol.k_data(t, g);
    double h = std::min(1e-3, 0.2 * fol.delta());
    double tt = std::min(std::max(t, 2 * h), fol.delta() - 2 * h);
    metric_frames(fol, tt, g, gam, gi, eps);
    kd = fol.k_data(tt, g);
    auto gam_at = [&](double s) {
      GridTensor a, b, c;
      metric_frames(fol, s, g, a, b, c);
      return a;
    };
    auto ginv_at = [&](double s) {
      GridTensor a, b, c;
      metric_frames(fol, s, g, a, b, c);
      return b;
    };
    auto eps_at = [&](double s) {
      GridTensor a, b, c;
      metric_frames(fol, s, g, a, b, c);
      return c;
    };
    GridTensor dgam = fd4_tau(gam_at, tt, h);
    GridTensor dginv = fd4_tau(ginv_at, tt, h);
    GridTensor deps = fd4_tau(eps_at, tt, h);
    // nabla_t gamma = lie_t gamma - 2 k-corrections (both slots lower)
    GridTensor cg = dgam;
    {
      // corrections
      GridTensor corr(2, g);
      for (int w = 0; w < 4; ++w) {
        int a = (w >> 1) & 1, b = w & 1;
        for (int c = 0; c < 2; ++c)
          for (int i = 0; i < n; ++i) {
            corr.comp[w][i] += kd.alow[a][c][i] * gam.comp[(c << 1) | b][i];
            corr.comp[w][i] += kd.alow[b][c][i] * gam.comp[(a << 1) | c][i];
          }
      }
      cg -= corr;
    }
    tp_gam.add(grid_sup(cg) / grid_sup(gam));
    GridTensor ci = dginv;
    {
      GridTensor corr(2, g);
      for (int w = 0; w < 4; ++w) {
        int a = (w >> 1) & 1, b = w & 1;
        for (int c = 0; c < 2; ++c)
          for (int i = 0; i < n; ++i) {
            corr.comp[w][i] -= kd.aup[a][c][i] * gi.comp[(c << 1) | b][i];
            corr.comp[w][i] -= kd.aup[b][c][i] * gi.comp[(a << 1) | c][i];
          }
      }
      ci -= corr;
    }
    tp_ginv.add(grid_sup(ci) / grid_sup(gi));
    GridTensor ce = deps;
    {
      GridTensor corr(2, g);
      for (int w = 0; w < 4; ++w) {
        int a = (w >> 1) & 1, b = w & 1;
        for (int c = 0; c < 2; ++c)
          for (int i = 0; i < n; ++i) {
            corr.comp[w][i] += kd.alow[a][c][i] * eps.comp[(c << 1) | b][i];
            corr.comp[w][i] += kd.alow[b][c][i] * eps.comp[(a << 1) | c][i];
          }
      }
      ce -= corr;
    }
    tp_eps.add(grid_sup(ce) / grid_sup(eps));

    // ---- str_ev_vol: (1/2) lie_t gamma^{-1} = -k-sharp-sharp; lie_t eps = trk eps
    GridTensor lhs = dginv;
    lhs *= 0.5;
    for (int w = 0; w < 4; ++w) {
      int a = (w >> 1) & 1, b = w & 1;
      for (int i = 0; i < n; ++i) {
        // k-sharp-sharp = Ginv K Ginv = aup * Ginv
        double ks = kd.aup[a][0][i] * gi.comp[(0 << 1) | b][i] +
                    kd.aup[a][1][i] * gi.comp[(1 << 1) | b][i];
        lhs.comp[w][i] += ks;
      }
    }
    tp_ginv.add(grid_sup(lhs) / grid_sup(gi));
    GridTensor lev = deps;
    for (int w = 0; w < 4; ++w)
      for (int i = 0; i < n; ++i) lev.comp[w][i] -= kd.trk[i] * eps.comp[w][i];
    tp_eps.add(grid_sup(lev) / grid_sup(eps));
  }
  rep.add(residual_check("evolution/t_parallel_gamma", "sec 4.1 t-parallel", tp_gam.v,
                         tol));
  rep.add(residual_check("evolution/t_parallel_gamma_inv_strev",
                         "sec 4.1 / eq.str_ev_vol", tp_ginv.v, tol));
  rep.add(residual_check("evolution/t_parallel_eps_strev", "sec 4.1 / eq.str_ev_vol",
                         tp_eps.v, tol));

  // ---- fundamental theorem and pointwise trace inequality ----
  MaxAgg ft_res, trace_ineq, par0, scalar_ep, dtnorm;
  MaxAgg int_contract;
  for (int t = 0; t < trials; ++t) {
    Rng rng = root.fork(t);
    HorizontalField psi = random_horizontal(fol, rng.next_u64(), 1, 1, fol.L() / 2, 1.5);
    // source = nabla_t psi with analytic value_fn
    const Foliation* fp = &fol;
    auto psival = psi.value_fn;
    auto psidot = psi.dt_fn;
    auto var = psi.var;
    const QuadratureGrid* gp = &g;
    int band_src = psi.band() + fol.data_band() + (fol.is_conformal() ? 0 : 12);
    auto srcfn = [fp, gp, psival, psidot, var, band_src](double tt) {
      GridTensor D = sample(psidot(tt), *gp);
      auto kd = fp->k_data(tt, *gp);
      GridTensor S = sample(psival(tt), *gp);
      // corr with lower slots
      GridTensor corr(S.valence, *gp);
      int v = S.valence;
      for (int w = 0; w < S.n_words(); ++w)
        for (int i = 0; i < v; ++i) {
          int bit = v - 1 - i;
          int si = (w >> bit) & 1;
          for (int c = 0; c < 2; ++c) {
            int src = (w & ~(1 << bit)) | (c << bit);
            const auto& A = (var[i] == 1) ? kd.alow[si][c] : kd.aup[si][c];
            double sgn = (var[i] == 1) ? 1.0 : -1.0;
            for (size_t p = 0; p < corr.comp[w].size(); ++p)
              corr.comp[w][p] += sgn * A[p] * S.comp[src][p];
          }
        }
      D -= corr;
      return project(D, band_src);
    };
    HorizontalField src = make_horizontal(fol, psi.var, srcfn);
    HorizontalField I = covariant_integral(src, 8);
    HorizontalField par = transport(fol, psi.field_at_node(0), TransportMode::parallel);
    double num = 0, den = 0;
    for (int j : {fol.M() / 2, fol.M()}) {
      GridTensor a = sample(I.node[j], g);
      GridTensor b = sample(psi.node[j], g);
      GridTensor c = sample(par.node[j], g);
      b -= c;
      a -= b;
      num = std::max(num, grid_sup(a));
      den = std::max(den, grid_sup(b) + 1.0);
    }
    ft_res.add(num / den);

    // |int psi| <= int |psi| pointwise at final time
    {
      HorizontalField Ipsi = covariant_integral(psi, 8);
      GridTensor a = sample(Ipsi.node[fol.M()], g);
      auto n2 = pointwise_norm_sq_grid(fol.metric_node(fol.M()), a, psi.var, g);
      auto tw = eucl::time_weights(fol.M(), fol.delta());
      std::vector<double> rhs(n, 0.0);
      for (int j = 0; j <= fol.M(); ++j) {
        auto m2 = pointwise_norm_sq(fol.metric_node(j), psi.field_at_node(j), g);
        for (int i = 0; i < n; ++i) rhs[i] += tw[j] * std::sqrt(std::max(0.0, m2[i]));
      }
      // the right side is a time quadrature of the kinked integrand |psi|,
      // so allow discretization-scale slack relative to its size
      double scale = 0, worst = 0;
      for (int i = 0; i < n; ++i) scale = std::max(scale, rhs[i]);
      for (int i = 0; i < n; ++i)
        worst = std::max(worst, std::sqrt(std::max(0.0, n2[i])) - rhs[i]);
      trace_ineq.add(std::max(0.0, worst / (scale + 1e-30)));
    }

    // parallel transport preserves pointwise norm
    {
      SurfaceField F0 = random_surface_field(rng.next_u64(), 2, 0, fol.L() / 2, 1.0,
                                             fol.L());
      HorizontalField P = transport(fol, F0, TransportMode::parallel);
      auto n0 = pointwise_norm_sq(fol.metric_node(0), F0, g);
      for (int j : {fol.M() / 2, fol.M()}) {
        auto nj = pointwise_norm_sq(fol.metric_node(j), P.field_at_node(j), g);
        double mx = 0, scale = 0;
        for (int i = 0; i < n; ++i) {
          mx = std::max(mx, std::abs(std::sqrt(std::max(0.0, nj[i])) -
                                     std::sqrt(std::max(0.0, n0[i]))));
          scale = std::max(scale, std::sqrt(std::max(0.0, n0[i])));
        }
        par0.add(mx / scale);
      }
    }

    // scalar: equivariant and parallel transports coincide
    {
      SpinField f0 = random_band_limited(rng.next_u64(), 0, 0, fol.L() / 2, 1.0, fol.L(),
                                         true);
      HorizontalField A = transport(fol, make_scalar(f0), TransportMode::parallel);
      HorizontalField B = transport(fol, make_scalar(f0), TransportMode::equivariant);
      GridTensor a = sample(A.node[fol.M()], g);
      GridTensor b = sample(B.node[fol.M()], g);
      a -= b;
      scalar_ep.add(grid_sup(a) / (grid_sup(b) + 1e-30));
    }

    // nabla_t |psi|^2 = 2 <nabla_t psi, psi>
    {
      int j = fol.M() / 2;
      double tt = fol.tau(j);
      double h = std::min(1e-3, 0.2 * fol.delta());
      auto normsq_at = [&](double s) {
        GridTensor S = sample(psi.at(s), g);
        GridTensor out(0, g);
        GridTensor gam, gi, eps;
        metric_frames(fol, s, g, gam, gi, eps);
        // |psi|^2 = sum ginv-raised * comps (rank-1 lower)
        for (int i = 0; i < n; ++i) {
          double v = 0;
          for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
              v += gi.comp[(a << 1) | b][i] * S.comp[a][i] * S.comp[b][i];
          out.comp[0][i] = v;
        }
        return out;
      };
      GridTensor lhs = fd4_tau(normsq_at, tt, h);
      GridTensor dpsi = nabla_t_grid(psi, j, g);
      GridTensor S = sample(psi.node[j], g);
      GridTensor gam, gi, eps;
      metric_frames(fol, tt, g, gam, gi, eps);
      double mx = 0, scale = 0;
      for (int i = 0; i < n; ++i) {
        double ip = 0;
        for (int a = 0; a < 2; ++a)
          for (int b = 0; b < 2; ++b)
            ip += gi.comp[(a << 1) | b][i] * dpsi.comp[a][i] * S.comp[b][i];
        mx = std::max(mx, std::abs(lhs.comp[0][i] - 2.0 * ip));
        scale = std::max(scale, std::abs(2.0 * ip));
      }
      dtnorm.add(mx / (scale + 1e-30));
    }

    // covariant integral commutes with the metric trace
    {
      HorizontalField Psi2 = random_horizontal(fol, rng.next_u64(), 2, 0, fol.L() / 2,
                                               1.0);
      HorizontalField I2 = covariant_integral(Psi2, 8);
      // trace after integrating
      GridTensor TI = sample(I2.node[fol.M()], g);
      GridTensor gam, gi, eps;
      metric_frames(fol, fol.delta(), g, gam, gi, eps);
      GridTensor tr_after = contract(TI, 0, 1, gi.comp[0], gi.comp[1], gi.comp[3]);
      // integrate the traced field: nodes = gamma-trace at each node
      const Foliation* fp2 = &fol;
      const QuadratureGrid* gp2 = &g;
      auto v2 = Psi2.value_fn;
      int tb = Psi2.band() + fol.data_band() + 12;
      auto trfn = [fp2, gp2, v2, tb](double s) {
        GridTensor S = sample(v2(s), *gp2);
        GridTensor gam2, gi2, eps2;
        metric_frames(*fp2, s, *gp2, gam2, gi2, eps2);
        GridTensor tr = contract(S, 0, 1, gi2.comp[0], gi2.comp[1], gi2.comp[3]);
        return project(tr, tb);
      };
      HorizontalField trf = make_horizontal(fol, {}, trfn);
      HorizontalField Itr = covariant_integral(trf, 8);
      GridTensor b = sample(Itr.node[fol.M()], g);
      b -= tr_after;
      int_contract.add(grid_sup(b) / (grid_sup(tr_after) + 1e-30));
    }
  }
  rep.add(residual_check("evolution/fundamental_theorem", "sec 4.2 covariant integral",
                         ft_res.v, tol));
  rep.add(residual_check("evolution/integral_trace_ineq", "eq.est_trace", trace_ineq.v,
                         1e-5));
  rep.add(residual_check("evolution/par_est_0_pointwise", "eq.par_est_0", par0.v, 1e-7));
  rep.add(residual_check("evolution/scalar_e_equals_p", "sec 4.1 propagators coincide",
                         scalar_ep.v, 1e-9));
  rep.add(residual_check("evolution/nabla_t_metric_compat", "sec 4.1 compatibility",
                         dtnorm.v, tol));
  rep.add(residual_check("evolution/integral_commutes_trace",
                         "sec 4.2 commutes with contractions", int_contract.v, tol));
  return rep;
}

Report commutator_suite(const Foliation& fol, int trials, std::uint64_t seed,
                        double tol) {
  Report rep;
  const auto& g = grid_for(fol.L() + 2 * fol.data_band() + 32);
  Rng root(seed);
  int n = g.n_nodes();
  SecondFormBundle sf = second_form(fol);
  MaxAgg lie_res, cov_res, inv_res, cov_scalar;

  for (int t = 0; t < trials; ++t) {
    Rng rng = root.fork(t);
    HorizontalField psi = random_horizontal(fol, rng.next_u64(), 1, 1, fol.L() / 2, 1.2);
    int j = fol.M() / 2;
    double tt = fol.tau(j);
    double h = std::min(1e-3, 0.2 * fol.delta());

    GridTensor gam, gi, eps;
    metric_frames(fol, tt, g, gam, gi, eps);
    auto kd = fol.k_data(tt, g);
    GridTensor kg = sample(sf.k.at(tt), g);           // k frame components
    GridTensor Dk = covariant_derivative_grid(fol.metric_at(tt),
                                              make_field(sf.k.at(tt), {1, 1}), g);
    GridTensor C = sample(sf.curl.at(tt), g);         // C_{abc}
    GridTensor S = sample(psi.at(tt), g);
    // psi-sharp
    std::vector<double> psharp[2];
    for (int c = 0; c < 2; ++c) {
      psharp[c].resize(n);
      for (int i = 0; i < n; ++i)
        psharp[c][i] = gi.comp[(c << 1) | 0][i] * S.comp[0][i] +
                       gi.comp[(c << 1) | 1][i] * S.comp[1][i];
    }

    auto nabla_at = [&](double s) {
      return covariant_derivative_grid(fol.metric_at(s),
                                       make_field(psi.at(s), psi.var), g);
    };

    // ---- comm_lie ----
    {
      GridTensor lhs = fd4_tau(nabla_at, tt, h);
      GridTensor nd = covariant_derivative_grid(fol.metric_at(tt),
                                                make_field(psi.dt_fn(tt), psi.var), g);
      lhs -= nd;
      // rhs_{a u} = -sum_c (Dk[a][u][c] + Dk[u][a][c] - Dk[c][a][u]) psharp^c
      GridTensor rhs(2, g);
      for (int w = 0; w < 4; ++w) {
        int a = (w >> 1) & 1, u = w & 1;
        for (int c = 0; c < 2; ++c)
          for (int i = 0; i < n; ++i)
            rhs.comp[w][i] -= (Dk.comp[(a << 2) | (u << 1) | c][i] +
                               Dk.comp[(u << 2) | (a << 1) | c][i] -
                               Dk.comp[(c << 2) | (a << 1) | u][i]) *
                              psharp[c][i];
      }
      GridTensor diff = lhs;
      diff -= rhs;
      lie_res.add(grid_sup(diff) / (grid_sup(rhs) + grid_sup(nd) + 1e-30));
    }

    // ---- comm_cov ----
    {
      // nabla_t (nabla psi): d/dtau of the valence-2 field minus k-corrections
      GridTensor lhs = fd4_tau(nabla_at, tt, h);
      GridTensor npsi = nabla_at(tt);
      // corrections on both (lower) slots
      GridTensor corr(3, g);
      (void)corr;
      GridTensor kc(2, g);
      for (int w = 0; w < 4; ++w) {
        int a = (w >> 1) & 1, b = w & 1;
        for (int c = 0; c < 2; ++c)
          for (int i = 0; i < n; ++i) {
            kc.comp[w][i] += kd.alow[a][c][i] * npsi.comp[(c << 1) | b][i];
            kc.comp[w][i] += kd.alow[b][c][i] * npsi.comp[(a << 1) | c][i];
          }
      }
      lhs -= kc;
      // minus nabla(nabla_t psi)
      const Foliation* fp = &fol;
      auto pv = psi.value_fn;
      auto pd = psi.dt_fn;
      auto var = psi.var;
      const QuadratureGrid* gp = &g;
      int band_src = psi.band() + fol.data_band() + (fol.is_conformal() ? 0 : 12);
      auto ntpsi = [&](double s) {
        GridTensor D = sample(pd(s), *gp);
        auto kds = fp->k_data(s, *gp);
        GridTensor Ss = sample(pv(s), *gp);
        GridTensor cr(1, *gp);
        for (int w = 0; w < 2; ++w)
          for (int c = 0; c < 2; ++c)
            for (int i = 0; i < n; ++i)
              cr.comp[w][i] += kds.alow[w][c][i] * Ss.comp[c][i];
        D -= cr;
        return project(D, band_src);
      };
      GridTensor ndt = covariant_derivative_grid(fol.metric_at(tt),
                                                 make_field(ntpsi(tt), psi.var), g);
      lhs -= ndt;
      (void)var;
      // rhs_{a u} = -(k gamma^{-1})_a^d (nabla psi)_{d u} - sum_c C_{a u c} psharp^c
      GridTensor rhs(2, g);
      for (int w = 0; w < 4; ++w) {
        int a = (w >> 1) & 1, u = w & 1;
        for (int i = 0; i < n; ++i) {
          double v = 0;
          for (int d = 0; d < 2; ++d)
            v -= kd.alow[a][d][i] * npsi.comp[(d << 1) | u][i];
          for (int c = 0; c < 2; ++c)
            v -= C.comp[(a << 2) | (u << 1) | c][i] * psharp[c][i];
          rhs.comp[w][i] = v;
        }
      }
      GridTensor diff = lhs;
      diff -= rhs;
      cov_res.add(grid_sup(diff) / (grid_sup(rhs) + grid_sup(npsi) + 1e-30));
    }

    // ---- comm_cov on scalars: [nabla_t, nabla_a] f = -(k gamma^{-1})_a^d nabla_d f
    {
      HorizontalField f = random_horizontal(fol, rng.next_u64(), 0, 0, fol.L() / 2, 1.2);
      auto nabla_f = [&](double s) {
        return covariant_derivative_grid(fol.metric_at(s),
                                         make_field(f.at(s), {}), g);
      };
      GridTensor lhs = fd4_tau(nabla_f, tt, h);
      // k-correction on the single (lower) derivative slot
      GridTensor nf = nabla_f(tt);
      GridTensor kc(1, g);
      for (int w = 0; w < 2; ++w)
        for (int c = 0; c < 2; ++c)
          for (int i = 0; i < n; ++i) kc.comp[w][i] += kd.alow[w][c][i] * nf.comp[c][i];
      lhs -= kc;
      GridTensor ndd = covariant_derivative_grid(fol.metric_at(tt),
                                                 make_field(f.dt_fn(tt), {}), g);
      lhs -= ndd;
      GridTensor rhs(1, g);
      for (int w = 0; w < 2; ++w)
        for (int i = 0; i < n; ++i) {
          double v = 0;
          for (int d = 0; d < 2; ++d) v -= kd.alow[w][d][i] * nf.comp[d][i];
          rhs.comp[w][i] = v;
        }
      GridTensor diff = lhs;
      diff -= rhs;
      cov_scalar.add(grid_sup(diff) / (grid_sup(nf) + 1e-30));
    }

    // ---- comm_inv ----
    {
      // nabla of psi as a horizontal field (projected nodes)
      const Foliation* fp = &fol;
      auto pv = psi.value_fn;
      const QuadratureGrid* gp = &g;
      int nb = psi.band() + fol.data_band() + (fol.is_conformal() ? 0 : 12);
      auto napsi_fn = [fp, pv, gp, nb](double s) {
        SurfaceMetric m = fp->metric_at(s);
        return covariant_derivative(m, make_field(pv(s), {1})).ten;
      };
      (void)gp;
      (void)nb;
      HorizontalField napsi = make_horizontal(fol, {1, 1}, napsi_fn);
      HorizontalField I_napsi = covariant_integral(napsi, 8);
      HorizontalField Ipsi = covariant_integral(psi, 8);
      int jf = fol.M();
      GridTensor lhs = sample(I_napsi.node[jf], g);
      GridTensor nIpsi = covariant_derivative_grid(
          fol.metric_node(jf), make_field(Ipsi.node[jf], {1}), g);
      lhs -= nIpsi;

      // rhs = gamma^{cd} int(k_{ac} nabla_d (Int psi)_u) + gamma^{cd} int(C_{auc} (Int psi)_d)
      auto integrand = [&](double s) {
        SurfaceMetric m = fp->metric_at(s);
        // interpolate Int psi at s
        SpinTensor ip = Ipsi.at(s);
        GridTensor nip = covariant_derivative_grid(m, make_field(ip, {1}), g);
        GridTensor ipg = sample(ip, g);
        auto kds = fol.k_data(s, g);
        GridTensor gam2, gi2, eps2;
        metric_frames(fol, s, g, gam2, gi2, eps2);
        GridTensor Cs = sample(sf.curl.at(s), g);
        GridTensor out(2, g);
        for (int w = 0; w < 4; ++w) {
          int a = (w >> 1) & 1, u = w & 1;
          for (int i = 0; i < n; ++i) {
            double v = 0;
            for (int d = 0; d < 2; ++d) v += kds.alow[a][d][i] * nip.comp[(d << 1) | u][i];
            double ips[2];
            for (int c2 = 0; c2 < 2; ++c2)
              ips[c2] = gi2.comp[(c2 << 1) | 0][i] * ipg.comp[0][i] +
                        gi2.comp[(c2 << 1) | 1][i] * ipg.comp[1][i];
            for (int c2 = 0; c2 < 2; ++c2)
              v += Cs.comp[(a << 2) | (u << 1) | c2][i] * ips[c2];
            out.comp[w][i] = v;
          }
        }
        return project(out, psi.band() + 2 * fol.data_band() + 12);
      };
      HorizontalField integ = make_horizontal(fol, {1, 1}, integrand);
      HorizontalField RHS = covariant_integral(integ, 4);
      GridTensor rhs = sample(truncate_band_tensor(RHS.node[jf], g.band_limit), g);
      GridTensor diff = lhs;
      diff -= rhs;
      inv_res.add(grid_sup(diff) /
                  (grid_sup(rhs) + grid_sup(sample(I_napsi.node[jf], g)) + 1e-30));
    }
  }

  rep.add(residual_check("commutator/comm_lie", "eq.comm_lie", lie_res.v, tol));
  rep.add(residual_check("commutator/comm_cov", "eq.comm_cov", cov_res.v, tol));
  rep.add(residual_check("commutator/comm_cov_scalar", "eq.comm_cov, r = l = 0",
                         cov_scalar.v, tol));
  rep.add(residual_check("commutator/comm_inv", "eq.comm_inv", inv_res.v, tol));
  return rep;
}

Report transport_estimate_suite(const Foliation& fol, int trials, std::uint64_t seed) {
  Report rep;
  Rng root(seed);
  RegularityBounds rb = regularity_bounds(fol);
  SecondFormBundle sf = second_form(fol);
  const auto& g = grid_for(fol.L() + 2 * fol.data_band() + 24);

  MaxAgg eq0_excess, eq1, par1, voldc, nsob_pre, nsob, holder;
  double B = rb.b_sff;
  for (int t = 0; t < trials; ++t) {
    Rng rng = root.fork(t);
    for (int rank : {0, 1, 2}) {
      SurfaceField F = random_surface_field(rng.next_u64(), rank, 0, fol.L() / 2, 1.0,
                                            fol.L());
      HorizontalField Z = transport(fol, F, TransportMode::equivariant);
      double lhs = mixed_norm(Z, NormOrder::tx, INFINITY, INFINITY);
      double rhs = std::exp((F.r() + F.l()) * B) *
                   lq_norm(fol.metric_node(0), F, INFINITY);
      eq0_excess.add(std::max(0.0, lhs / rhs - 1.0));
    }
    // equiv_est_1 at q = 2
    {
      SurfaceField F = random_surface_field(rng.next_u64(), 1, 1, fol.L() / 2, 1.0,
                                            fol.L());
      HorizontalField Z = transport(fol, F, TransportMode::equivariant);
      HorizontalField dZ;
      dZ.fol = &fol;
      dZ.var = {1, 1};
      dZ.node.resize(fol.M() + 1);
      for (int j = 0; j <= fol.M(); ++j)
        dZ.node[j] = covariant_derivative(fol.metric_node(j), Z.field_at_node(j)).ten;
      double lhs = mixed_norm(dZ, NormOrder::xt, 2.0, INFINITY);
      const SurfaceMetric& m0 = fol.metric_node(0);
      double dz0 = lq_norm(m0, covariant_derivative(m0, F), 2.0);
      double z0inf = lq_norm(m0, F, INFINITY);
      // ||nabla k||_{L^{2,1}_{x,t}} = b_sffd
      double rhs = dz0 + z0inf * rb.b_sffd;
      eq1.add(lhs / rhs);

      // par_est_1 at q = 4 with the witness Phi = int C
      HorizontalField P = transport(fol, F, TransportMode::parallel);
      HorizontalField dP;
      dP.fol = &fol;
      dP.var = {1, 1};
      dP.node.resize(fol.M() + 1);
      for (int j = 0; j <= fol.M(); ++j)
        dP.node[j] = covariant_derivative(fol.metric_node(j), P.field_at_node(j)).ten;
      double lhsp = mixed_norm(dP, NormOrder::xt, 4.0, INFINITY);
      double dp0 = lq_norm(m0, covariant_derivative(m0, F), 4.0);
      double rhsp = dp0 + (F.r() + F.l()) * z0inf * rb.b_sffcurl + 1e-30;
      par1.add(lhsp / rhsp);
    }
    // nsob_pre and nsob
    {
      HorizontalField psi = random_horizontal(fol, rng.next_u64(), 1, 1, fol.L() / 2,
                                              1.5);
      double l2inf = mixed_norm(psi, NormOrder::xt, 2.0, INFINITY);
      double l4inf = mixed_norm(psi, NormOrder::xt, 4.0, INFINITY);
      const SurfaceMetric& m0 = fol.metric_node(0);
      double p0_2 = lq_norm(m0, psi.field_at_node(0), 2.0);
      double p0_4 = lq_norm(m0, psi.field_at_node(0), 4.0);
      HorizontalField dt = nabla_t(psi);
      double ndt = mixed_norm(dt, NormOrder::tx, 2.0, 2.0);
      double nl2 = mixed_norm(psi, NormOrder::tx, 2.0, 2.0);
      HorizontalField dx;
      dx.fol = &fol;
      dx.var = {1, 1};
      dx.node.resize(fol.M() + 1);
      for (int j = 0; j <= fol.M(); ++j)
        dx.node[j] = covariant_derivative(fol.metric_node(j), psi.field_at_node(j)).ten;
      double ngrad = mixed_norm(dx, NormOrder::tx, 2.0, 2.0);
      nsob_pre.add(l2inf / (p0_2 + std::sqrt(ndt * nl2) + 1e-30));
      nsob.add(l4inf / (p0_4 + std::sqrt(ndt * (ngrad + nl2)) + 1e-30));
    }
    // vold_comp at q = 2
    {
      // nabla J as a scalar-field gradient per node
      HorizontalField Jf;
      Jf.fol = &fol;
      Jf.var = {};
      Jf.node.resize(fol.M() + 1);
      for (int j = 0; j <= fol.M(); ++j) {
        auto J = jacobian_grid(fol, fol.tau(j), g);
        Jf.node[j] = scalar_tensor(
            project_real(J, 0, fol.L() + 2 * fol.data_band() + 16, g));
      }
      HorizontalField dJ;
      dJ.fol = &fol;
      dJ.var = {1};
      dJ.node.resize(fol.M() + 1);
      for (int j = 0; j <= fol.M(); ++j)
        dJ.node[j] = covariant_derivative(fol.metric_node(j), Jf.field_at_node(j)).ten;
      double lhs = mixed_norm(dJ, NormOrder::xt, 2.0, INFINITY);
      // ||nabla trk||_{L^{2,1}_{x,t}} = 2 b_sffd_tr
      voldc.add(lhs / (2.0 * rb.b_sffd_tr + 1e-30));
    }
    // int_ineq_bi
    {
      HorizontalField A = random_horizontal(fol, rng.next_u64(), 1, 1, fol.L() / 3, 1.0);
      HorizontalField Bf = random_horizontal(fol, rng.next_u64(), 1, 1, fol.L() / 3, 1.0);
      const Foliation* fp = &fol;
      auto av = A.value_fn;
      auto bv = Bf.value_fn;
      const QuadratureGrid* gp = &g;
      int ob = A.band() + Bf.band() + 8;
      auto prodfn = [fp, av, bv, gp, ob](double s) {
        GridTensor a = sample(av(s), *gp);
        GridTensor b = sample(bv(s), *gp);
        return project(tensor_product(a, b), ob);
      };
      HorizontalField prod = make_horizontal(fol, {1, 1}, prodfn);
      HorizontalField I = covariant_integral(prod, 4);
      double lhs = mixed_norm(I, NormOrder::xt, 2.0, INFINITY);
      double rhs = mixed_norm(A, NormOrder::xt, 4.0, 2.0) *
                   mixed_norm(Bf, NormOrder::xt, 4.0, 2.0);
      holder.add(lhs / (rhs * std::exp(4.0 * rb.b_sff_tr)));
    }
  }
  rep.add(bound_check("transport/equiv_est_0", "eq.equiv_est_0, explicit factor",
                      eq0_excess.v, 1e-8, 0.0));
  rep.add(ratio_check("transport/equiv_est_1", "eq.equiv_est_1", eq1.v));
  rep.add(ratio_check("transport/par_est_1", "eq.par_est_1", par1.v));
  rep.add(ratio_check("transport/vold_comp", "eq.vold_comp", voldc.v));
  rep.add(ratio_check("transport/nsob_ineq_pre", "eq.nsob_ineq_pre", nsob_pre.v));
  rep.add(ratio_check("transport/nsob_ineq", "eq.nsob_ineq", nsob.v));
  rep.add(bound_check("transport/int_ineq_bi", "eq.int_ineq_bi, ratio <= e^{4B}",
                      holder.v, 1.0, 1e-9));
  rep.environment = {{"B_sff", rb.b_sff},
                     {"B_sff_tr", rb.b_sff_tr},
                     {"B_sffd", rb.b_sffd},
                     {"B_sffd_tr", rb.b_sffd_tr},
                     {"B_sffcurl", rb.b_sffcurl}};
  return rep;
}

Report integral_convergence_study(std::uint64_t seed) {
  Report rep;
  std::vector<double> xs, ys;
  for (int M : {8, 16, 32}) {
    Foliation fol = Foliation::conformal_wave(seed, 0.25, 3, 1.0, M, 12);
    HorizontalField psi = random_horizontal(fol, seed ^ 0xabcull, 1, 1, 6, 3.0);
    const Foliation* fp = &fol;
    const auto& g = grid_for(fol.L() + 2 * fol.data_band() + 24);
    const QuadratureGrid* gp = &g;
    auto pv = psi.value_fn;
    auto pd = psi.dt_fn;
    int band_src = psi.band() + fol.data_band();
    auto srcfn = [fp, gp, pv, pd, band_src](double tt) {
      GridTensor D = sample(pd(tt), *gp);
      auto kd = fp->k_data(tt, *gp);
      GridTensor S = sample(pv(tt), *gp);
      GridTensor cr(1, *gp);
      for (int w = 0; w < 2; ++w)
        for (int c = 0; c < 2; ++c)
          for (size_t i = 0; i < cr.comp[w].size(); ++i)
            cr.comp[w][i] += kd.alow[w][c][i] * S.comp[c][i];
      D -= cr;
      return project(D, band_src);
    };
    HorizontalField src = make_horizontal(fol, {1}, srcfn);
    HorizontalField I = covariant_integral(src, 1);
    HorizontalField par = transport(fol, psi.field_at_node(0), TransportMode::parallel);
    GridTensor a = sample(I.node[M], g);
    GridTensor b = sample(psi.node[M], g);
    GridTensor c = sample(par.node[M], g);
    b -= c;
    a -= b;
    double mx = 0;
    for (const auto& cw : a.comp)
      for (double v : cw) mx = std::max(mx, std::abs(v));
    xs.push_back(std::log2(double(M)));
    ys.push_back(std::log2(mx + 1e-300));
  }
  double slope = -fit_slope(xs, ys);
  rep.add(slope_check("evolution/time_step_order", "4th-order covariant integration",
                      slope, 4.0, 0.5));
  return rep;
}

}  // namespace geolab
