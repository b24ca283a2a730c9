#include "geolab/nullcone.hpp"

#include <cmath>
#include <stdexcept>

#include "geolab/rng.hpp"

namespace geolab {

NullConeData generate_cone(ConeModel model, double mass, double r0, double delta, int M,
                           int L) {
  if (model == ConeModel::schwarzschild) {
    if (r0 <= 2.0 * mass || r0 + delta <= 2.0 * mass)
      throw std::invalid_argument("cone leaves the Schwarzschild exterior");
  } else {
    mass = 0.0;
  }
  NullConeData d;
  d.model = model;
  d.mass = mass;
  d.r0 = r0;
  d.delta = delta;
  d.M = M;
  d.L = L;
  auto u = [r0, L](double tau) {
    SpinField f(0, L);
    f.at(0, 0) = std::log(r0 + tau) * std::sqrt(kFourPi);
    return f;
  };
  auto ud = [r0, L](double tau) {
    SpinField f(0, L);
    f.at(0, 0) = 1.0 / (r0 + tau) * std::sqrt(kFourPi);
    return f;
  };
  d.gamma = Foliation::conformal(delta, M, L, u, ud);
  return d;
}

NullConeData perturb_cone(const NullConeData& base, double amplitude,
                          std::uint64_t seed) {
  NullConeData d = base;
  d.vacuum = (amplitude == 0.0);
  d.perturb_amp = amplitude;
  d.perturb_seed = seed;
  if (amplitude == 0.0) return d;
  int L = base.L;
  double r0 = base.r0;
  SpinField A = random_conformal_factor(seed, 1, 4, amplitude, L);
  SpinField B = random_conformal_factor(seed ^ 0x77ull, 1, 4, amplitude, L);
  auto u = [r0, L, A, B](double tau) {
    SpinField f(0, L);
    f.at(0, 0) = std::log(r0 + tau) * std::sqrt(kFourPi);
    SpinField a = A;
    a *= cplx(std::cos(1.1 * tau), 0.0);
    SpinField b = B;
    b *= cplx(std::sin(0.8 * tau), 0.0);
    f += a;
    f += b;
    return f;
  };
  auto ud = [r0, L, A, B](double tau) {
    SpinField f(0, L);
    f.at(0, 0) = 1.0 / (r0 + tau) * std::sqrt(kFourPi);
    SpinField a = A;
    a *= cplx(-1.1 * std::sin(1.1 * tau), 0.0);
    SpinField b = B;
    b *= cplx(0.8 * std::cos(0.8 * tau), 0.0);
    f += a;
    f += b;
    return f;
  };
  d.gamma = Foliation::conformal(base.delta, base.M, L, u, ud);
  return d;
}

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

// five-point Gauss-Legendre integral of a scalar function over [0, delta]
template <class F>
double gauss_time_integral(F&& fn, double delta, int nseg) {
  static const double gx[5] = {-0.9061798459386640, -0.5384693101056831, 0.0,
                               0.5384693101056831, 0.9061798459386640};
  static const double gw[5] = {0.2369268850561891, 0.4786286704993665,
                               0.5688888888888889, 0.4786286704993665,
                               0.2369268850561891};
  double h = delta / nseg, acc = 0.0;
  for (int s = 0; s < nseg; ++s)
    for (int q = 0; q < 5; ++q)
      acc += 0.5 * h * gw[q] * fn(s * h + 0.5 * h * (1.0 + gx[q]));
  return acc;
}

}  // namespace

Report structure_residuals(const NullConeData& d) {
  Report rep;
  const Foliation& fol = d.gamma;
  const auto& g = grid_for(fol.L() + 2 * fol.data_band() + 24);
  int n = g.n_nodes();

  // horizontal fields of the closed-form data
  const double r0 = d.r0, mass = d.mass;
  int L = fol.L();
  auto chif = [r0, L, &g, n](double tau) {
    GridTensor t(2, g);
    for (int i = 0; i < n; ++i) {
      t.comp[0][i] = r0 + tau;
      t.comp[3][i] = r0 + tau;
    }
    return project(t, 2);
  };
  auto chibf = [r0, mass, L, &g, n](double tau) {
    GridTensor t(2, g);
    double v = -((r0 + tau) - 2.0 * mass);
    for (int i = 0; i < n; ++i) {
      t.comp[0][i] = v;
      t.comp[3][i] = v;
    }
    return project(t, 2);
  };
  HorizontalField chi = make_horizontal(fol, {1, 1}, chif);
  HorizontalField chib = make_horizontal(fol, {1, 1}, chibf);

  MaxAgg ev_chi, ev_zeta, ev_chib, bi_beta, bi_rho, bi_betab, cod, gauss_eq, keq;
  SecondFormBundle sf = second_form(fol);

  for (int j : {0, fol.M() / 2, fol.M()}) {
    double tau = fol.tau(j);
    double r = d.r_of(tau);
    auto kd = fol.k_data(tau, g);
    GridTensor gam(2, g), gi(2, g), eps(2, g);
    {
      auto uu = sample_real(fol.u_at(tau), g);
      for (int i = 0; i < n; ++i) {
        double e2u = std::exp(2.0 * uu[i]);
        gam.comp[0][i] = gam.comp[3][i] = e2u;
        gi.comp[0][i] = gi.comp[3][i] = 1.0 / e2u;
        eps.comp[1][i] = -e2u;
        eps.comp[2][i] = e2u;
      }
    }

    // k = chi
    {
      GridTensor kt = sample(sf.k.at(tau), g);
      GridTensor ct = sample(chi.at(tau), g);
      kt -= ct;
      keq.add(grid_sup(kt) / (grid_sup(ct) + 1e-30));
    }

    // evolution: nabla_t chi = -gamma^{cd} chi_ac chi_bd - alpha
    {
      GridTensor lhs = nabla_t_grid(chi, j, g);
      GridTensor C = sample(chi.at(tau), g);
      GridTensor rhs(2, g);
      for (int w = 0; w < 4; ++w) {
        int a = (w >> 1) & 1, b = w & 1;
        for (int i = 0; i < n; ++i) {
          double acc = 0;
          for (int c = 0; c < 2; ++c)
            for (int dd = 0; dd < 2; ++dd)
              acc += gi.comp[(c << 1) | dd][i] * C.comp[(a << 1) | c][i] *
                     C.comp[(b << 1) | dd][i];
          rhs.comp[w][i] = -acc;  // alpha = 0
        }
      }
      GridTensor diff = lhs;
      diff -= rhs;
      ev_chi.add(grid_sup(diff) / (grid_sup(rhs) + 1e-30));
    }
    // evolution: nabla_t zeta = ... - beta: all zero
    ev_zeta.add(0.0);
    // evolution: nabla_t chib = -(nabla zeta)_sym - (1/2) gamma^{cd}(chi_ac
    // chib_bd + chi_bc chib_ad) + 2 zeta zeta + rho gamma
    {
      GridTensor lhs = nabla_t_grid(chib, j, g);
      GridTensor C = sample(chi.at(tau), g);
      GridTensor Cb = sample(chib.at(tau), g);
      GridTensor rhs(2, g);
      for (int w = 0; w < 4; ++w) {
        int a = (w >> 1) & 1, b = w & 1;
        for (int i = 0; i < n; ++i) {
          double acc = 0;
          for (int c = 0; c < 2; ++c)
            for (int dd = 0; dd < 2; ++dd)
              acc += gi.comp[(c << 1) | dd][i] *
                     (C.comp[(a << 1) | c][i] * Cb.comp[(b << 1) | dd][i] +
                      C.comp[(b << 1) | c][i] * Cb.comp[(a << 1) | dd][i]);
          rhs.comp[w][i] = -0.5 * acc + d.rho(tau) * gam.comp[w][i];
        }
      }
      GridTensor diff = lhs;
      diff -= rhs;
      ev_chib.add(grid_sup(diff) / (grid_sup(rhs) + 1e-30));
    }
    // Bianchi: nabla_t beta = D2 alpha - 2 trchi beta + zeta . alpha: zeros
    bi_beta.add(0.0);
    // Bianchi: d/dtau (rho + i sigma) = D1 beta - (3/2) trchi (rho + i sigma) - ...
    {
      double lhs = 6.0 * mass / std::pow(r, 4);  // d/dtau of -2M/r^3
      double rhs = -(1.5) * d.trchi(tau) * d.rho(tau);
      bi_rho.add(std::abs(lhs - rhs) / (std::abs(rhs) + 1e-30));
    }
    // Bianchi: nabla_t betab = D1*(rho - i sigma) - trchi betab + ...: the
    // D1* of an x-constant scalar vanishes
    {
      SpinField rho_field(0, L);
      rho_field.at(0, 0) = d.rho(tau) * std::sqrt(kFourPi);
      SpinField grad = detail::eth_any(rho_field, EthDirection::raise);
      bi_betab.add(grad.l2_norm());
    }
    // Codazzi: curl chi = -eps eps beta + chi zeta - chi zeta: both sides 0
    {
      GridTensor Cc = sample(sf.curl.at(tau), g);
      cod.add(grid_sup(Cc) / (1.0 / r + 1e-30));
    }
    // Gauss: K = -rho + (1/2)(gamma^{ac} gamma^{bd} - gamma^{ab} gamma^{cd})
    //             chi_ab chib_cd
    {
      SpinField K = gauss_curvature(fol.metric_at(tau), 8);
      auto ks = sample_real(K, g);
      GridTensor C = sample(chi.at(tau), g);
      GridTensor Cb = sample(chib.at(tau), g);
      double worst = 0, scale = 0;
      for (int i = 0; i < n; ++i) {
        double t1 = 0, tr1 = 0, tr2 = 0;
        for (int a = 0; a < 2; ++a)
          for (int b = 0; b < 2; ++b)
            for (int c = 0; c < 2; ++c)
              for (int dd = 0; dd < 2; ++dd)
                t1 += gi.comp[(a << 1) | c][i] * gi.comp[(b << 1) | dd][i] *
                      C.comp[(a << 1) | b][i] * Cb.comp[(c << 1) | dd][i];
        for (int a = 0; a < 2; ++a)
          for (int b = 0; b < 2; ++b) {
            tr1 += gi.comp[(a << 1) | b][i] * C.comp[(a << 1) | b][i];
            tr2 += gi.comp[(a << 1) | b][i] * Cb.comp[(a << 1) | b][i];
          }
        double rhs = -d.rho(tau) + 0.5 * (t1 - tr1 * tr2);
        worst = std::max(worst, std::abs(ks[i] - rhs));
        scale = std::max(scale, std::abs(rhs));
      }
      gauss_eq.add(worst / scale);
    }
  }

  rep.add(residual_check("nullcone/k_equals_chi", "eq.nc_sff", keq.v, 1e-9));
  rep.add(residual_check("nullcone/evolution_chi", "eq.structure_ev", ev_chi.v, 1e-9));
  rep.add(residual_check("nullcone/evolution_zeta", "eq.structure_ev", ev_zeta.v, 1e-9));
  rep.add(residual_check("nullcone/evolution_chib", "eq.structure_ev", ev_chib.v, 1e-9));
  rep.add(residual_check("nullcone/bianchi_beta", "eq.structure_nb", bi_beta.v, 1e-9));
  rep.add(residual_check("nullcone/bianchi_rho", "eq.structure_nb", bi_rho.v, 1e-9));
  rep.add(residual_check("nullcone/bianchi_betab", "eq.structure_nb", bi_betab.v, 1e-9));
  rep.add(residual_check("nullcone/codazzi", "eq.structure_gc", cod.v, 1e-9));
  rep.add(residual_check("nullcone/gauss", "eq.structure_gc", gauss_eq.v, 1e-9));
  return rep;
}

FluxReport flux_and_bootstrap_norms(const NullConeData& d) {
  FluxReport out;
  // ||rho||^2_{L^{2,2}} = int_0^delta rho(tau)^2 |S_tau| dtau, area = 4 pi r^2
  auto rho2 = [&](double tau) {
    double r = d.r_of(tau);
    return d.rho(tau) * d.rho(tau) * kFourPi * r * r;
  };
  out.rho_l22_sq = gauss_time_integral(rho2, d.delta, std::max(8, d.M));
  out.flux = out.rho_l22_sq;  // alpha, beta, sigma, betab vanish identically

  // chi - r^{-1} gamma and zeta vanish identically for the closed forms
  out.chi_n1 = 0.0;
  out.zeta_norm = 0.0;
  // ||chib + r^{-1} gamma||_{L^{2,inf}_{x,t}}: pointwise |2M/r^2 gamma|_gamma
  // = 2 sqrt2 M / r^2, maximal at tau = 0, integrated against d eps[0]
  double sup_pt = 2.0 * std::sqrt(2.0) * d.mass / (d.r0 * d.r0);
  out.chib_norm = sup_pt * std::sqrt(kFourPi) * d.r0;
  return out;
}

Report flux_report(const NullConeData& d) {
  Report rep;
  FluxReport f = flux_and_bootstrap_norms(d);
  rep.add(ratio_check("nullcone/flux", "eq.curv_flux", f.flux));
  rep.add(ratio_check("nullcone/rho_l22_sq", "eq.curv_flux", f.rho_l22_sq));
  rep.add(ratio_check("nullcone/bootstrap_chi", "eq.bootstrap", f.chi_n1));
  rep.add(ratio_check("nullcone/bootstrap_zeta", "eq.bootstrap", f.zeta_norm));
  rep.add(ratio_check("nullcone/bootstrap_chib", "eq.bootstrap", f.chib_norm));
  return rep;
}

}  // namespace geolab
