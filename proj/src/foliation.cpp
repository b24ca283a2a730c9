#include "geolab/foliation.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <mutex>
#include <stdexcept>

#include "geolab/eucl.hpp"
#include "geolab/par.hpp"
#include "geolab/rng.hpp"
#include "json.hpp"

namespace geolab {

namespace {
std::mutex fol_mutex;

void interp_window(double tau, int M, double delta, int idx[5], double w[5]) {
  double h = delta / M;
  int c = static_cast<int>(std::floor(tau / h + 0.5));
  int lo = std::min(std::max(c - 2, 0), std::max(M - 4, 0));
  for (int q = 0; q < 5; ++q) idx[q] = lo + q;
  for (int q = 0; q < 5; ++q) {
    double num = 1.0, den = 1.0;
    for (int r = 0; r < 5; ++r) {
      if (r == q) continue;
      num *= tau - idx[r] * h;
      den *= (idx[q] - idx[r]) * h;
    }
    w[q] = num / den;
  }
}

// derivative of the quartic Lagrange interpolant (4th-order d/dtau)
void interp_window_deriv(double tau, int M, double delta, int idx[5], double w[5]) {
  double h = delta / M;
  int c = static_cast<int>(std::floor(tau / h + 0.5));
  int lo = std::min(std::max(c - 2, 0), std::max(M - 4, 0));
  for (int q = 0; q < 5; ++q) idx[q] = lo + q;
  for (int q = 0; q < 5; ++q) {
    double den = 1.0;
    for (int r = 0; r < 5; ++r)
      if (r != q) den *= (idx[q] - idx[r]) * h;
    double dsum = 0.0;
    for (int s = 0; s < 5; ++s) {
      if (s == q) continue;
      double prod = 1.0;
      for (int r = 0; r < 5; ++r) {
        if (r == q || r == s) continue;
        prod *= tau - idx[r] * h;
      }
      dsum += prod;
    }
    w[q] = dsum / den;
  }
}

int detect_tensor_band(const SpinTensor& g) {
  int band = 0;
  for (const auto& c : g.comp)
    for (int l = c.band_limit; l > band; --l) {
      bool nz = false;
      for (int m = -l; m <= l; ++m)
        if (std::abs(c.at(l, m)) > 1e-13) nz = true;
      if (nz) {
        band = std::max(band, l);
        break;
      }
    }
  return band;
}
}  // namespace

Foliation Foliation::conformal(double delta, int M, int L, ConfFn u, ConfFn udot) {
  Foliation f;
  f.delta_ = delta;
  f.M_ = M;
  f.L_ = L;
  f.conformal_ = true;
  f.u_ = std::move(u);
  f.udot_ = std::move(udot);
  int band = 0;
  for (double t : {0.0, 0.37 * delta, delta}) {
    SpinField uu = f.u_(t);
    band = std::max(band, detect_tensor_band(scalar_tensor(uu)));
  }
  f.data_band_ = band;
  f.node_cache_->assign(M + 1, nullptr);
  return f;
}

Foliation Foliation::general(double delta, int M, int L, GenFn g, GenFn gdot) {
  Foliation f;
  f.delta_ = delta;
  f.M_ = M;
  f.L_ = L;
  f.conformal_ = false;
  f.g_ = std::move(g);
  f.gdot_ = std::move(gdot);
  f.data_band_ = detect_tensor_band(f.g_(0.37 * delta));
  f.node_cache_->assign(M + 1, nullptr);
  return f;
}

Foliation Foliation::expanding(double delta, int M, int L) {
  auto u = [L](double tau) {
    SpinField f(0, L);
    f.at(0, 0) = std::log(1.0 + tau) * std::sqrt(kFourPi);
    return f;
  };
  auto ud = [L](double tau) {
    SpinField f(0, L);
    f.at(0, 0) = 1.0 / (1.0 + tau) * std::sqrt(kFourPi);
    return f;
  };
  return conformal(delta, M, L, u, ud);
}

Foliation Foliation::conformal_linear(const SpinField& u0, const SpinField& v,
                                      double delta, int M) {
  int L = std::max(u0.band_limit, v.band_limit);
  SpinField a = extend_band(u0, L), b = extend_band(v, L);
  auto u = [a, b](double tau) {
    SpinField f = a;
    SpinField tb = b;
    tb *= cplx(tau, 0.0);
    f += tb;
    return f;
  };
  auto ud = [b](double) { return b; };
  return conformal(delta, M, L, u, ud);
}

Foliation Foliation::conformal_wave(std::uint64_t seed, double amp, int band_hi,
                                    double delta, int M, int L) {
  SpinField A = random_conformal_factor(seed, 1, band_hi, amp, L);
  SpinField B = random_conformal_factor(seed ^ 0x9e3779b97f4a7c15ull, 1, band_hi, amp, L);
  constexpr double w1 = 0.9, w2 = 1.7;
  auto u = [A, B](double tau) {
    SpinField f = A;
    f *= cplx(std::cos(w1 * tau), 0.0);
    SpinField g = B;
    g *= cplx(std::sin(w2 * tau), 0.0);
    f += g;
    return f;
  };
  auto ud = [A, B](double tau) {
    SpinField f = A;
    f *= cplx(-w1 * std::sin(w1 * tau), 0.0);
    SpinField g = B;
    g *= cplx(w2 * std::cos(w2 * tau), 0.0);
    f += g;
    return f;
  };
  return conformal(delta, M, L, u, ud);
}

Foliation Foliation::sheared(std::uint64_t seed, double amp, int band_hi, double delta,
                             int M, int L) {
  SpinField t = random_band_limited(seed ^ 0x11ull, 0, 0, band_hi, amp, L, true);
  SpinField h2 = random_band_limited(seed ^ 0x22ull, 2, 2, band_hi, amp, L);
  SpinTensor h(2, L);
  h += h2_tensor(h2);
  for (int l = 0; l <= band_hi; ++l)
    for (int mm = -l; mm <= l; ++mm) {
      h.comp[1].at(l, mm) += 0.5 * t.at(l, mm);
      h.comp[2].at(l, mm) += 0.5 * t.at(l, mm);
    }
  SpinTensor base = round_metric_tensor(L);
  auto g = [base, h](double tau) {
    SpinTensor out = base;
    SpinTensor th = h;
    th *= tau + 0.25 * tau * tau;
    out += th;
    return out;
  };
  auto gd = [h](double tau) {
    SpinTensor out = h;
    out *= 1.0 + 0.5 * tau;
    return out;
  };
  return general(delta, M, L, g, gd);
}

Foliation Foliation::static_metric(const SurfaceMetric& m, double delta, int M) {
  if (m.is_conformal()) {
    SpinField u = m.u();
    return conformal(
        delta, M, m.band_limit(), [u](double) { return u; },
        [u](double) { return SpinField(0, u.band_limit); });
  }
  SpinTensor g = m.g_tensor();
  return general(delta, M, m.band_limit(), [g](double) { return g; },
                 [g](double) { return SpinTensor(2, g.band_limit); });
}

SpinField Foliation::u_at(double tau) const {
  if (!conformal_) throw std::logic_error("u_at: general family");
  return u_(tau);
}
SpinField Foliation::udot_at(double tau) const {
  if (!conformal_) throw std::logic_error("udot_at: general family");
  return udot_(tau);
}
SpinTensor Foliation::g_at(double tau) const {
  if (conformal_) throw std::logic_error("g_at: conformal family");
  return g_(tau);
}
SpinTensor Foliation::gdot_at(double tau) const {
  if (conformal_) throw std::logic_error("gdot_at: conformal family");
  return gdot_(tau);
}

const SurfaceMetric& Foliation::metric_node(int j) const {
  std::lock_guard<std::mutex> lock(fol_mutex);
  auto& slot = (*node_cache_)[j];
  if (!slot) slot = std::make_shared<SurfaceMetric>(metric_at(tau(j)));
  return *slot;
}

SurfaceMetric Foliation::metric_at(double t) const {
  if (conformal_) return SurfaceMetric::conformal(u_(t));
  return SurfaceMetric::general(g_(t));
}

Foliation::KData Foliation::k_data(double t, const QuadratureGrid& g) const {
  KData kd;
  int n = g.n_nodes();
  if (conformal_) {
    auto ud = sample_real(udot_(t), g);
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        kd.alow[a][b].assign(n, 0.0);
        kd.aup[a][b].assign(n, 0.0);
      }
    kd.trk.resize(n);
    for (int i = 0; i < n; ++i) {
      kd.alow[0][0][i] = kd.alow[1][1][i] = ud[i];
      kd.aup[0][0][i] = kd.aup[1][1][i] = ud[i];
      kd.trk[i] = 2.0 * ud[i];
    }
    return kd;
  }
  GridTensor gs = sample(g_(t), g);
  GridTensor gdt = sample(gdot_(t), g);
  kd.trk.resize(n);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      kd.alow[a][b].resize(n);
      kd.aup[a][b].resize(n);
    }
  for (int i = 0; i < n; ++i) {
    double g00 = gs.comp[0][i], g01 = gs.comp[1][i], g11 = gs.comp[3][i];
    double det = g00 * g11 - g01 * g01;
    double i00 = g11 / det, i01 = -g01 / det, i11 = g00 / det;
    double k00 = 0.5 * gdt.comp[0][i], k01 = 0.5 * gdt.comp[1][i],
           k11 = 0.5 * gdt.comp[3][i];
    kd.alow[0][0][i] = k00 * i00 + k01 * i01;
    kd.alow[0][1][i] = k00 * i01 + k01 * i11;
    kd.alow[1][0][i] = k01 * i00 + k11 * i01;
    kd.alow[1][1][i] = k01 * i01 + k11 * i11;
    kd.aup[0][0][i] = i00 * k00 + i01 * k01;
    kd.aup[0][1][i] = i00 * k01 + i01 * k11;
    kd.aup[1][0][i] = i01 * k00 + i11 * k01;
    kd.aup[1][1][i] = i01 * k01 + i11 * k11;
    kd.trk[i] = kd.aup[0][0][i] + kd.aup[1][1][i];
  }
  return kd;
}

SpinTensor HorizontalField::at(double t) const {
  if (has_fn && value_fn) return value_fn(t);
  int idx[5];
  double w[5];
  interp_window(t, fol->M(), fol->delta(), idx, w);
  SpinTensor out = node[idx[0]];
  out *= w[0];
  for (int q = 1; q < 5; ++q) {
    SpinTensor s = node[idx[q]];
    s *= w[q];
    out += s;
  }
  return out;
}

HorizontalField make_horizontal(const Foliation& fol, std::vector<int> var,
                                std::function<SpinTensor(double)> value,
                                std::function<SpinTensor(double)> dt) {
  HorizontalField f;
  f.fol = &fol;
  f.var = std::move(var);
  f.value_fn = std::move(value);
  f.dt_fn = std::move(dt);
  f.has_fn = true;
  f.node.resize(fol.M() + 1);
  for (int j = 0; j <= fol.M(); ++j) f.node[j] = f.value_fn(fol.tau(j));
  return f;
}

HorizontalField random_horizontal(const Foliation& fol, std::uint64_t seed, int rank,
                                  int band_lo, int band_hi, double omega_max) {
  Rng rng(seed);
  int L = fol.L();
  const int nshapes = 3;
  auto base = std::make_shared<std::vector<SpinTensor>>();
  std::vector<int> var;
  auto om = std::make_shared<std::vector<double>>();
  auto ph = std::make_shared<std::vector<double>>();
  for (int q = 0; q < nshapes; ++q) {
    SurfaceField F =
        random_surface_field(rng.next_u64(), rank, band_lo, band_hi, 1.0 / nshapes, L);
    base->push_back(F.ten);
    var = F.var;
    om->push_back(rng.uniform(0.0, omega_max));
    ph->push_back(rng.uniform(0.0, 2 * kPi));
  }
  auto val = [base, om, ph](double tau) {
    SpinTensor out = (*base)[0];
    out *= std::cos((*om)[0] * tau + (*ph)[0]);
    for (size_t q = 1; q < base->size(); ++q) {
      SpinTensor s = (*base)[q];
      s *= std::cos((*om)[q] * tau + (*ph)[q]);
      out += s;
    }
    return out;
  };
  auto dt = [base, om, ph](double tau) {
    SpinTensor out = (*base)[0];
    out *= -(*om)[0] * std::sin((*om)[0] * tau + (*ph)[0]);
    for (size_t q = 1; q < base->size(); ++q) {
      SpinTensor s = (*base)[q];
      s *= -(*om)[q] * std::sin((*om)[q] * tau + (*ph)[q]);
      out += s;
    }
    return out;
  };
  return make_horizontal(fol, var, val, dt);
}

HorizontalField lie_t(const HorizontalField& f) {
  const Foliation& fol = *f.fol;
  HorizontalField out;
  out.fol = f.fol;
  out.var = f.var;
  out.node.resize(fol.M() + 1);
  if (f.has_fn && f.dt_fn) {
    out.value_fn = f.dt_fn;
    out.has_fn = true;
    for (int j = 0; j <= fol.M(); ++j) out.node[j] = f.dt_fn(fol.tau(j));
    return out;
  }
  int M = fol.M();
  if (M < 4) throw std::invalid_argument("lie_t: fewer than 5 time nodes");
  double h = fol.delta() / M;
  for (int j = 0; j <= M; ++j) {
    SpinTensor d(f.node[0].valence, f.node[0].band_limit);
    auto axpy = [&](double c, const SpinTensor& s) {
      SpinTensor t = s;
      t *= c / (12.0 * h);
      d += t;
    };
    auto V = [&](int q) -> const SpinTensor& { return f.node[q]; };
    if (j >= 2 && j <= M - 2) {
      axpy(-1, V(j + 2));
      axpy(8, V(j + 1));
      axpy(-8, V(j - 1));
      axpy(1, V(j - 2));
    } else if (j == 0) {
      axpy(-25, V(0));
      axpy(48, V(1));
      axpy(-36, V(2));
      axpy(16, V(3));
      axpy(-3, V(4));
    } else if (j == 1) {
      axpy(-3, V(0));
      axpy(-10, V(1));
      axpy(18, V(2));
      axpy(-6, V(3));
      axpy(1, V(4));
    } else if (j == M - 1) {
      axpy(3, V(M));
      axpy(10, V(M - 1));
      axpy(-18, V(M - 2));
      axpy(6, V(M - 3));
      axpy(-1, V(M - 4));
    } else {
      axpy(25, V(M));
      axpy(-48, V(M - 1));
      axpy(36, V(M - 2));
      axpy(-16, V(M - 3));
      axpy(3, V(M - 4));
    }
    out.node[j] = std::move(d);
  }
  return out;
}

namespace {

GridTensor apply_corr(const Foliation::KData& kd, const GridTensor& S,
                      const std::vector<int>& var) {
  GridTensor out(S.valence, *S.grid);
  int v = S.valence;
  size_t n = S.comp[0].size();
  for (int w = 0; w < S.n_words(); ++w) {
    auto& dst = out.comp[w];
    for (int i = 0; i < v; ++i) {
      int bit = v - 1 - i;
      int si = (w >> bit) & 1;
      for (int c = 0; c < 2; ++c) {
        int src = (w & ~(1 << bit)) | (c << bit);
        const auto& A = (var[i] == 1) ? kd.alow[si][c] : kd.aup[si][c];
        double sgn = (var[i] == 1) ? 1.0 : -1.0;
        const auto& sa = S.comp[src];
        for (size_t p = 0; p < n; ++p) dst[p] += sgn * A[p] * sa[p];
      }
    }
  }
  return out;
}

const QuadratureGrid& hfield_grid(const HorizontalField& f) {
  return grid_for(f.band() + 2 * f.fol->data_band() + 24);
}

}  // namespace

HorizontalField nabla_t(const HorizontalField& f) {
  const Foliation& fol = *f.fol;
  HorizontalField dot = lie_t(f);
  if (f.valence() == 0) return dot;
  const auto& g = hfield_grid(f);
  int out_band = f.band() + fol.data_band() + (fol.is_conformal() ? 0 : 12);
  HorizontalField out;
  out.fol = f.fol;
  out.var = f.var;
  out.node.resize(fol.M() + 1);
  for (int j = 0; j <= fol.M(); ++j) {
    auto kd = fol.k_data(fol.tau(j), g);
    GridTensor S = sample(f.node[j], g);
    GridTensor corr = apply_corr(kd, S, f.var);
    SpinTensor c = project(corr, out_band);
    c *= -1.0;
    SpinTensor d = truncate_band_tensor(dot.node[j], out_band);
    d += c;
    out.node[j] = std::move(d);
  }
  return out;
}

GridTensor nabla_t_grid(const HorizontalField& f, int j, const QuadratureGrid& g) {
  const Foliation& fol = *f.fol;
  HorizontalField dot = lie_t(f);
  GridTensor D = sample(dot.node[j], g);
  if (f.valence() == 0) return D;
  auto kd = fol.k_data(fol.tau(j), g);
  GridTensor S = sample(f.node[j], g);
  GridTensor corr = apply_corr(kd, S, f.var);
  D -= corr;
  return D;
}

HorizontalField covariant_integral(const HorizontalField& f, int substeps) {
  const Foliation& fol = *f.fol;
  const auto& g = hfield_grid(f);
  int M = fol.M();
  double h = fol.delta() / M / substeps;
  int out_band = f.band() + fol.data_band() + (fol.is_conformal() ? 8 : 16);
  HorizontalField out;
  out.fol = f.fol;
  out.var = f.var;
  out.node.resize(M + 1);
  GridTensor S(f.valence(), g);
  out.node[0] = project(S, out_band);
  Foliation::KData kd0 = fol.k_data(0.0, g);
  for (int j = 0; j < M; ++j) {
    for (int ss = 0; ss < substeps; ++ss) {
      double t0 = fol.tau(j) + ss * h;
      auto kdh = fol.k_data(t0 + 0.5 * h, g);
      auto kd1 = fol.k_data(t0 + h, g);
      GridTensor r0 = sample(f.at(t0), g);
      GridTensor rh = sample(f.at(t0 + 0.5 * h), g);
      GridTensor r1 = sample(f.at(t0 + h), g);
      auto F = [&](const Foliation::KData& kd, const GridTensor& r,
                   const GridTensor& state) {
        GridTensor d = apply_corr(kd, state, f.var);
        d += r;
        return d;
      };
      GridTensor k1 = F(kd0, r0, S);
      GridTensor s2 = k1;
      s2 *= 0.5 * h;
      s2 += S;
      GridTensor k2 = F(kdh, rh, s2);
      GridTensor s3 = k2;
      s3 *= 0.5 * h;
      s3 += S;
      GridTensor k3 = F(kdh, rh, s3);
      GridTensor s4 = k3;
      s4 *= h;
      s4 += S;
      GridTensor k4 = F(kd1, r1, s4);
      k2 += k3;
      k2 *= 2.0;
      k1 += k2;
      k1 += k4;
      k1 *= h / 6.0;
      S += k1;
      kd0 = std::move(kd1);
    }
    out.node[j + 1] = project(S, out_band);
  }
  return out;
}

HorizontalField transport(const Foliation& fol, const SurfaceField& initial,
                          TransportMode mode, int substeps) {
  HorizontalField out;
  out.fol = &fol;
  out.var = initial.var;
  out.node.assign(fol.M() + 1, initial.ten);
  if (mode == TransportMode::equivariant) {
    out.prov = HorizontalField::Provenance::equivariant;
    SpinTensor v = initial.ten;
    out.value_fn = [v](double) { return v; };
    out.dt_fn = [v](double) { return SpinTensor(v.valence, v.band_limit); };
    out.has_fn = true;
    return out;
  }
  out.prov = HorizontalField::Provenance::t_parallel;
  int rml = initial.r() - initial.l();
  if (fol.is_conformal()) {
    const auto& g = grid_for(initial.band() + 4 * fol.data_band() + 32);
    GridTensor S0 = sample(initial.ten, g);
    auto u0 = sample_real(fol.u_at(0.0), g);
    int out_band = initial.band() + 2 * fol.data_band() + 16;
    for (int j = 0; j <= fol.M(); ++j) {
      if (rml == 0) {
        out.node[j] = extend_band_tensor(initial.ten, out_band);
        continue;
      }
      auto ut = sample_real(fol.u_at(fol.tau(j)), g);
      GridTensor S = S0;
      for (auto& cw : S.comp)
        for (size_t i = 0; i < cw.size(); ++i)
          cw[i] *= std::exp(-rml * (ut[i] - u0[i]));
      out.node[j] = project(S, out_band);
    }
    return out;
  }
  const auto& g = grid_for(initial.band() + 2 * fol.data_band() + 24);
  int out_band = initial.band() + 2 * fol.data_band() + 16;
  GridTensor S = sample(initial.ten, g);
  out.node[0] = project(S, out_band);
  double h = fol.delta() / fol.M() / substeps;
  for (int j = 0; j < fol.M(); ++j) {
    for (int ss = 0; ss < substeps; ++ss) {
      double t0 = fol.tau(j) + ss * h;
      auto kd0 = fol.k_data(t0, g);
      auto kdh = fol.k_data(t0 + 0.5 * h, g);
      auto kd1 = fol.k_data(t0 + h, g);
      GridTensor k1 = apply_corr(kd0, S, initial.var);
      GridTensor s2 = k1;
      s2 *= 0.5 * h;
      s2 += S;
      GridTensor k2 = apply_corr(kdh, s2, initial.var);
      GridTensor s3 = k2;
      s3 *= 0.5 * h;
      s3 += S;
      GridTensor k3 = apply_corr(kdh, s3, initial.var);
      GridTensor s4 = k3;
      s4 *= h;
      s4 += S;
      GridTensor k4 = apply_corr(kd1, s4, initial.var);
      k2 += k3;
      k2 *= 2.0;
      k1 += k2;
      k1 += k4;
      k1 *= h / 6.0;
      S += k1;
    }
    out.node[j + 1] = project(S, out_band);
  }
  return out;
}

std::vector<double> jacobian_grid(const Foliation& fol, double t,
                                  const QuadratureGrid& g) {
  if (fol.is_conformal()) {
    auto u0 = sample_real(fol.u_at(0.0), g);
    auto ut = sample_real(fol.u_at(t), g);
    std::vector<double> J(g.n_nodes());
    for (int i = 0; i < g.n_nodes(); ++i) J[i] = std::exp(2.0 * (ut[i] - u0[i]));
    return J;
  }
  int nseg = std::max(8, fol.M());
  double h = t / nseg;
  static const double gx[5] = {-0.9061798459386640, -0.5384693101056831, 0.0,
                               0.5384693101056831, 0.9061798459386640};
  static const double gw[5] = {0.2369268850561891, 0.4786286704993665,
                               0.5688888888888889, 0.4786286704993665,
                               0.2369268850561891};
  std::vector<double> acc(g.n_nodes(), 0.0);
  if (t > 0.0) {
    for (int s = 0; s < nseg; ++s) {
      double a = s * h;
      for (int q = 0; q < 5; ++q) {
        double tq = a + 0.5 * h * (1.0 + gx[q]);
        auto kd = fol.k_data(tq, g);
        for (int i = 0; i < g.n_nodes(); ++i) acc[i] += 0.5 * h * gw[q] * kd.trk[i];
      }
    }
  }
  for (auto& v : acc) v = std::exp(v);
  return acc;
}

SecondFormBundle second_form(const Foliation& fol) {
  SecondFormBundle out;
  int kb = fol.data_band();
  int band_k = fol.is_conformal() ? 2 * kb + 16 : std::max(kb, 2);
  const QuadratureGrid* gp = &grid_for(std::max(2 * kb, band_k) + 24);
  const Foliation* fp = &fol;
  auto kfield = [fp, gp, band_k](double t) {
    if (!fp->is_conformal()) {
      SpinTensor kd = fp->gdot_at(t);
      kd *= 0.5;
      return kd;
    }
    auto ud = sample_real(fp->udot_at(t), *gp);
    auto uu = sample_real(fp->u_at(t), *gp);
    GridTensor kt(2, *gp);
    for (int i = 0; i < gp->n_nodes(); ++i) {
      double v = ud[i] * std::exp(2.0 * uu[i]);
      kt.comp[0][i] = v;
      kt.comp[3][i] = v;
    }
    return project(kt, band_k);
  };
  auto kdot = [kfield](double t) {
    double h = 1e-3;
    SpinTensor a = kfield(t + 2 * h), b = kfield(t + h), c = kfield(t - h),
               d = kfield(t - 2 * h);
    a *= -1.0;
    b *= 8.0;
    c *= -8.0;
    a += b;
    a += c;
    a += d;
    a *= 1.0 / (12.0 * h);
    return a;
  };
  out.k = make_horizontal(fol, {1, 1}, kfield, kdot);
  auto trkf = [fp, gp](double t) {
    if (fp->is_conformal()) {
      SpinField ud = fp->udot_at(t);
      ud *= cplx(2.0, 0.0);
      return scalar_tensor(ud);
    }
    auto kd = fp->k_data(t, *gp);
    return scalar_tensor(project_real(kd.trk, 0, fp->L() + 2 * fp->data_band() + 12, *gp));
  };
  out.trk = make_horizontal(fol, {}, trkf);
  auto curlf = [fp, kfield](double t) {
    SurfaceMetric m = fp->metric_at(t);
    SurfaceField kf = make_field(kfield(t), {1, 1});
    SurfaceField dk = covariant_derivative(m, kf);  // slots (b, a, c)
    SpinTensor C(3, dk.band());
    for (int w = 0; w < 8; ++w) {
      int a = (w >> 2) & 1, b = (w >> 1) & 1, c = w & 1;
      int w1 = (b << 2) | (a << 1) | c;
      int w2 = (c << 2) | (a << 1) | b;
      C.comp[w] = dk.ten.comp[w1] - dk.ten.comp[w2];
    }
    return C;
  };
  out.curl = make_horizontal(fol, {1, 1, 1}, curlf);
  out.jacobian = [fp](double t, const QuadratureGrid& gg) {
    return jacobian_grid(*fp, t, gg);
  };
  return out;
}

double mixed_norm(const HorizontalField& f, NormOrder order, double p, double q) {
  const Foliation& fol = *f.fol;
  int M = fol.M();
  if (order == NormOrder::tx) {
    std::vector<double> per(M + 1);
    for (int j = 0; j <= M; ++j)
      per[j] = lq_norm(fol.metric_node(j), f.field_at_node(j), q);
    if (std::isinf(p)) {
      double mx = 0;
      for (double v : per) mx = std::max(mx, v);
      return mx;
    }
    auto w = eucl::time_weights(M, fol.delta());
    double acc = 0;
    for (int j = 0; j <= M; ++j) acc += w[j] * std::pow(per[j], p);
    return std::pow(acc, 1.0 / p);
  }
  const auto& g = hfield_grid(f);
  int n = g.n_nodes();
  std::vector<std::vector<double>> absv(M + 1), J(M + 1);
  for (int j = 0; j <= M; ++j) {
    auto n2 = pointwise_norm_sq(fol.metric_node(j), f.field_at_node(j), g);
    absv[j].resize(n);
    for (int i = 0; i < n; ++i) absv[j][i] = std::sqrt(std::max(0.0, n2[i]));
    if (!std::isinf(q)) J[j] = jacobian_grid(fol, fol.tau(j), g);
  }
  auto tw = eucl::time_weights(M, fol.delta());
  std::vector<double> per(n, 0.0);
  parallel_for(n, [&](std::ptrdiff_t i) {
    if (std::isinf(q)) {
      if (std::isinf(p)) {
        double mx = 0;
        for (int j = 0; j <= M; ++j) mx = std::max(mx, absv[j][i]);
        per[i] = mx;
      } else {
        double acc = 0;
        for (int j = 0; j <= M; ++j) acc += tw[j] * std::pow(absv[j][i], p);
        per[i] = std::pow(acc, 1.0 / p);
      }
    } else if (std::isinf(p)) {
      double mx = 0;
      for (int j = 0; j <= M; ++j)
        mx = std::max(mx, absv[j][i] * std::pow(J[j][i], 1.0 / q));
      per[i] = mx;
    } else {
      double acc = 0;
      for (int j = 0; j <= M; ++j)
        acc += tw[j] * std::pow(absv[j][i], p) * std::pow(J[j][i], p / q);
      per[i] = std::pow(acc, 1.0 / p);
    }
  });
  if (std::isinf(q)) {
    double mx = 0;
    for (double v : per) mx = std::max(mx, v);
    return mx;
  }
  const SurfaceMetric& m0 = fol.metric_node(0);
  std::vector<double> integ(n);
  for (int i = 0; i < n; ++i) integ[i] = std::pow(per[i], q);
  return std::pow(integrate_measure(m0, integ, g), 1.0 / q);
}

double n1_norm(const HorizontalField& f) {
  HorizontalField dt = nabla_t(f);
  double a = mixed_norm(dt, NormOrder::tx, 2.0, 2.0);
  const Foliation& fol = *f.fol;
  HorizontalField df;
  df.fol = f.fol;
  df.var = f.var;
  df.var.insert(df.var.begin(), 1);
  df.node.resize(fol.M() + 1);
  for (int j = 0; j <= fol.M(); ++j)
    df.node[j] = covariant_derivative(fol.metric_node(j), f.field_at_node(j)).ten;
  double b = mixed_norm(df, NormOrder::tx, 2.0, 2.0);
  double c = mixed_norm(f, NormOrder::tx, 2.0, 2.0);
  return a + b + c;
}

BandProfile band_profile_tx(const HorizontalField& f, double p) {
  const Foliation& fol = *f.fol;
  int M = fol.M();
  std::vector<BandProfile> per(M + 1);
  size_t nk = 0;
  for (int j = 0; j <= M; ++j) {
    per[j] = band_profile_field(fol.metric_node(j), f.field_at_node(j));
    nk = std::max(nk, per[j].k.size());
  }
  auto tnorm = [&](auto getter) {
    if (std::isinf(p)) {
      double mx = 0;
      for (int j = 0; j <= M; ++j) mx = std::max(mx, getter(j));
      return mx;
    }
    auto w = eucl::time_weights(M, fol.delta());
    double acc = 0;
    for (int j = 0; j <= M; ++j) acc += w[j] * std::pow(getter(j), p);
    return std::pow(acc, 1.0 / p);
  };
  BandProfile out;
  out.low = tnorm([&](int j) { return per[j].low; });
  out.k.resize(nk);
  for (size_t k = 0; k < nk; ++k)
    out.k[k] = tnorm([&](int j) { return k < per[j].k.size() ? per[j].k[k] : 0.0; });
  return out;
}

double besov_tx(const HorizontalField& f, double a, double p, double s) {
  return besov_aggregate(band_profile_tx(f, p), a, s);
}

RegularityBounds regularity_bounds(const Foliation& fol) {
  RegularityBounds out{};
  const auto& g = grid_for(fol.L() + 2 * fol.data_band() + 24);
  int M = fol.M();
  int n = g.n_nodes();
  auto tw = eucl::time_weights(M, fol.delta());
  std::vector<std::vector<double>> kabs(M + 1), trkabs(M + 1);
  for (int j = 0; j <= M; ++j) {
    auto kd = fol.k_data(fol.tau(j), g);
    kabs[j].resize(n);
    trkabs[j].resize(n);
    for (int i = 0; i < n; ++i) {
      double t = kd.aup[0][0][i] * kd.aup[0][0][i] +
                 2.0 * kd.aup[0][1][i] * kd.aup[1][0][i] +
                 kd.aup[1][1][i] * kd.aup[1][1][i];
      kabs[j][i] = std::sqrt(std::max(0.0, t));
      trkabs[j][i] = std::abs(kd.trk[i]);
    }
  }
  auto linf1 = [&](const std::vector<std::vector<double>>& v) {
    double mx = 0;
    for (int i = 0; i < n; ++i) {
      double acc = 0;
      for (int j = 0; j <= M; ++j) acc += tw[j] * v[j][i];
      mx = std::max(mx, acc);
    }
    return mx;
  };
  out.b_sff_tr = 0.5 * linf1(trkabs);
  out.b_sff = linf1(kabs);

  SecondFormBundle sf = second_form(fol);
  std::vector<std::vector<double>> dtrk(M + 1), dk(M + 1);
  for (int j = 0; j <= M; ++j) {
    const SurfaceMetric& m = fol.metric_node(j);
    GridTensor d1 = covariant_derivative_grid(m, sf.trk.field_at_node(j), g);
    auto n1v = pointwise_norm_sq_grid(m, d1, {1}, g);
    GridTensor d2 = covariant_derivative_grid(m, sf.k.field_at_node(j), g);
    auto n2v = pointwise_norm_sq_grid(m, d2, {1, 1, 1}, g);
    dtrk[j].resize(n);
    dk[j].resize(n);
    for (int i = 0; i < n; ++i) {
      dtrk[j][i] = std::sqrt(std::max(0.0, n1v[i]));
      dk[j][i] = std::sqrt(std::max(0.0, n2v[i]));
    }
  }
  auto l21 = [&](const std::vector<std::vector<double>>& v) {
    std::vector<double> per(n);
    std::vector<std::vector<double>> J(M + 1);
    for (int j = 0; j <= M; ++j) J[j] = jacobian_grid(fol, fol.tau(j), g);
    for (int i = 0; i < n; ++i) {
      double acc = 0;
      for (int j = 0; j <= M; ++j) acc += tw[j] * v[j][i] * std::sqrt(J[j][i]);
      per[i] = acc * acc;
    }
    return std::sqrt(integrate_measure(fol.metric_node(0), per, g));
  };
  out.b_sffd_tr = 0.5 * l21(dtrk);
  out.b_sffd = l21(dk);

  HorizontalField Phi = covariant_integral(sf.curl);
  out.b_sffcurl = mixed_norm(Phi, NormOrder::xt, INFINITY, 4.0);
  return out;
}

void Foliation::save(const std::string& path) const {
  nlohmann::json manifest = {
      {"format", "geolab.foliation"},
      {"version", 1},
      {"family", conformal_ ? "conformal" : "general"},
      {"delta", delta_},
      {"M", M_},
      {"L", L_},
      {"layout", conformal_
                     ? "per node: spin-0 coefficients of u, float64 LE re/im"
                     : "per node: valence-2 spin components, 4 blocks, float64 LE re/im"},
  };
  std::string header = manifest.dump();
  std::ofstream outf(path, std::ios::binary);
  if (!outf) throw std::runtime_error("cannot open " + path);
  const char magic[8] = {'G', 'L', 'F', 'O', 'L', '0', '0', '0'};
  outf.write(magic, 8);
  std::uint64_t hlen = header.size();
  outf.write(reinterpret_cast<const char*>(&hlen), 8);
  outf.write(header.data(), hlen);
  for (int j = 0; j <= M_; ++j) {
    if (conformal_) {
      SpinField u = truncate_band(u_(tau(j)), L_);
      outf.write(reinterpret_cast<const char*>(u.a.data()), u.size() * sizeof(cplx));
    } else {
      SpinTensor g = truncate_band_tensor(g_(tau(j)), L_);
      for (const auto& c : g.comp)
        outf.write(reinterpret_cast<const char*>(c.a.data()), c.size() * sizeof(cplx));
    }
  }
}

Foliation Foliation::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  char magic[8];
  in.read(magic, 8);
  if (std::memcmp(magic, "GLFOL000", 8) != 0) throw std::runtime_error("bad magic");
  std::uint64_t hlen = 0;
  in.read(reinterpret_cast<char*>(&hlen), 8);
  std::string header(hlen, '\0');
  in.read(header.data(), hlen);
  auto manifest = nlohmann::json::parse(header);
  double delta = manifest.at("delta").get<double>();
  int M = manifest.at("M").get<int>();
  int L = manifest.at("L").get<int>();
  bool conf = manifest.at("family").get<std::string>() == "conformal";
  if (conf) {
    auto nodes = std::make_shared<std::vector<SpinField>>();
    for (int j = 0; j <= M; ++j) {
      SpinField u(0, L);
      in.read(reinterpret_cast<char*>(u.a.data()), u.size() * sizeof(cplx));
      nodes->push_back(std::move(u));
    }
    if (!in) throw std::runtime_error("truncated foliation blob");
    auto at = [nodes, M, delta](double t) {
      int idx[5];
      double w[5];
      interp_window(t, M, delta, idx, w);
      SpinField out = (*nodes)[idx[0]];
      out *= cplx(w[0], 0.0);
      for (int q = 1; q < 5; ++q) {
        SpinField s = (*nodes)[idx[q]];
        s *= cplx(w[q], 0.0);
        out += s;
      }
      return out;
    };
    auto dint = [nodes, M, delta](double t) {
      int idx[5];
      double w[5];
      interp_window_deriv(t, M, delta, idx, w);
      SpinField out = (*nodes)[idx[0]];
      out *= cplx(w[0], 0.0);
      for (int q = 1; q < 5; ++q) {
        SpinField s = (*nodes)[idx[q]];
        s *= cplx(w[q], 0.0);
        out += s;
      }
      return out;
    };
    return conformal(delta, M, L, at, dint);
  }
  auto nodes = std::make_shared<std::vector<SpinTensor>>();
  for (int j = 0; j <= M; ++j) {
    SpinTensor g(2, L);
    for (auto& c : g.comp)
      in.read(reinterpret_cast<char*>(c.a.data()), c.size() * sizeof(cplx));
    nodes->push_back(std::move(g));
  }
  if (!in) throw std::runtime_error("truncated foliation blob");
  auto at = [nodes, M, delta](double t) {
    int idx[5];
    double w[5];
    interp_window(t, M, delta, idx, w);
    SpinTensor out = (*nodes)[idx[0]];
    out *= w[0];
    for (int q = 1; q < 5; ++q) {
      SpinTensor s = (*nodes)[idx[q]];
      s *= w[q];
      out += s;
    }
    return out;
  };
  auto dint = [nodes, M, delta](double t) {
    int idx[5];
    double w[5];
    interp_window_deriv(t, M, delta, idx, w);
    SpinTensor out = (*nodes)[idx[0]];
    out *= w[0];
    for (int q = 1; q < 5; ++q) {
      SpinTensor s = (*nodes)[idx[q]];
      s *= w[q];
      out += s;
    }
    return out;
  };
  return general(delta, M, L, at, dint);
}

}  // namespace geolab
