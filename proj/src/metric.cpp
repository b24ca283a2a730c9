#include "geolab/metric.hpp"

#include <cmath>
#include <cstring>
#include <mutex>
#include <stdexcept>

#include "geolab/par.hpp"
#include "geolab/rng.hpp"

namespace geolab {

namespace {

std::uint64_t fnv_bytes(const void* data, size_t n, std::uint64_t h) {
  const unsigned char* p = static_cast<const unsigned char*>(data);
  for (size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

int detect_band(const SpinField& f) {
  double mx = 0.0;
  for (const auto& c : f.a) mx = std::max(mx, std::abs(c));
  if (mx == 0.0) return 0;
  int band = 0;
  for (int l = f.lmin(); l <= f.band_limit; ++l)
    for (int m = -l; m <= l; ++m)
      if (std::abs(f.at(l, m)) > 1e-14 * mx) band = std::max(band, l);
  return band;
}

std::mutex metric_cache_mutex;

SpinTensor extend_band(const SpinTensor& t, int L) {
  SpinTensor out(t.valence, L);
  for (int w = 0; w < t.n_words(); ++w) out.comp[w] = geolab::extend_band(t.comp[w], L);
  return out;
}

}  // namespace

SurfaceField make_scalar(const SpinField& f) {
  return SurfaceField(scalar_tensor(f), {});
}
SurfaceField make_oneform(const SpinField& plus) {
  return SurfaceField(oneform_tensor(plus), {1});
}
SurfaceField make_h2(const SpinField& plus2) {
  return SurfaceField(h2_tensor(plus2), {1, 1});
}
SurfaceField make_field(SpinTensor t, std::vector<int> var) {
  if (static_cast<int>(var.size()) != t.valence)
    throw std::invalid_argument("variance mask size mismatch");
  return SurfaceField(std::move(t), std::move(var));
}

SurfaceMetric SurfaceMetric::round_sphere(int L) {
  SurfaceMetric m;
  m.conformal_ = true;
  m.L_ = L;
  m.u_ = SpinField(0, L);
  m.data_band_ = 0;
  m.digest_ = fnv_bytes("round", 5, 0xcbf29ce484222325ull) ^ static_cast<std::uint64_t>(L);
  return m;
}

SurfaceMetric SurfaceMetric::conformal(const SpinField& u) {
  if (u.spin != 0) throw std::invalid_argument("conformal factor must be spin 0");
  if (!is_real_field(u, 1e-10)) throw std::invalid_argument("conformal factor must be real");
  SurfaceMetric m;
  m.conformal_ = true;
  m.L_ = u.band_limit;
  m.u_ = u;
  m.data_band_ = detect_band(u);
  std::uint64_t h = 0xcbf29ce484222325ull;
  h = fnv_bytes(u.a.data(), u.a.size() * sizeof(cplx), h);
  m.digest_ = h ^ 0x1ull;
  return m;
}

SurfaceMetric SurfaceMetric::general(const SpinTensor& g) {
  if (g.valence != 2) throw std::invalid_argument("metric must have valence 2");
  SurfaceMetric m;
  m.conformal_ = false;
  m.L_ = g.band_limit;
  m.g_ = g;
  int band = 0;
  for (const auto& c : g.comp) band = std::max(band, detect_band(c));
  m.data_band_ = band;
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const auto& c : g.comp) h = fnv_bytes(c.a.data(), c.a.size() * sizeof(cplx), h);
  m.digest_ = h ^ 0x2ull;
  return m;
}

bool SurfaceMetric::is_round() const { return conformal_ && data_band_ == 0 && u_.l2_norm() == 0.0; }

const SpinTensor& SurfaceMetric::g_tensor() const {
  if (conformal_) throw std::logic_error("g_tensor: conformal metric");
  return g_;
}

const SurfaceMetric::GridData& SurfaceMetric::grid_data(const QuadratureGrid& g) const {
  std::lock_guard<std::mutex> lock(metric_cache_mutex);
  for (const auto& gd : *cache_)
    if (gd->grid == &g) return *gd;
  auto gd = std::make_shared<GridData>();
  gd->grid = &g;
  int n = g.n_nodes();
  if (conformal_) {
    gd->usamp = sample_real(u_, g);
    gd->g00.resize(n);
    gd->g01.assign(n, 0.0);
    gd->g11.resize(n);
    gd->inv00.resize(n);
    gd->inv01.assign(n, 0.0);
    gd->inv11.resize(n);
    gd->sqdet.resize(n);
    for (int i = 0; i < n; ++i) {
      double e2u = std::exp(2.0 * gd->usamp[i]);
      gd->g00[i] = gd->g11[i] = e2u;
      gd->inv00[i] = gd->inv11[i] = 1.0 / e2u;
      gd->sqdet[i] = e2u;
    }
    // S_{ab}{}^c = delta_a^c du_b + delta_b^c du_a - delta_ab du^c
    GridTensor du = sample(round_nabla(scalar_tensor(u_)), g);
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        for (int c = 0; c < 2; ++c) {
          auto& arr = gd->chris[a][b][c];
          arr.assign(n, 0.0);
          for (int i = 0; i < n; ++i) {
            double v = 0.0;
            if (a == c) v += du.comp[b][i];
            if (b == c) v += du.comp[a][i];
            if (a == b) v -= du.comp[c][i];
            arr[i] = v;
          }
        }
  } else {
    GridTensor gs = sample(g_, g);
    gd->g00 = gs.comp[0];
    gd->g01 = gs.comp[1];
    gd->g11 = gs.comp[3];
    gd->inv00.resize(n);
    gd->inv01.resize(n);
    gd->inv11.resize(n);
    gd->sqdet.resize(n);
    for (int i = 0; i < n; ++i) {
      double det = gd->g00[i] * gd->g11[i] - gd->g01[i] * gd->g01[i];
      if (det <= 0.0) throw std::runtime_error("metric not positive definite on grid");
      gd->sqdet[i] = std::sqrt(det);
      gd->inv00[i] = gd->g11[i] / det;
      gd->inv01[i] = -gd->g01[i] / det;
      gd->inv11[i] = gd->g00[i] / det;
    }
    GridTensor Dg = sample(round_nabla(g_), g);
    auto dgat = [&](int x, int y, int z) -> const std::vector<double>& {
      return Dg.comp[(x << 2) | (y << 1) | z];
    };
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        for (int c = 0; c < 2; ++c) {
          auto& arr = gd->chris[a][b][c];
          arr.assign(n, 0.0);
          const auto& inv0 = (c == 0) ? gd->inv00 : gd->inv01;
          const auto& inv1 = (c == 0) ? gd->inv01 : gd->inv11;
          for (int i = 0; i < n; ++i) {
            double t0 = dgat(a, b, 0)[i] + dgat(b, a, 0)[i] - dgat(0, a, b)[i];
            double t1 = dgat(a, b, 1)[i] + dgat(b, a, 1)[i] - dgat(1, a, b)[i];
            arr[i] = 0.5 * (inv0[i] * t0 + inv1[i] * t1);
          }
        }
  }
  cache_->push_back(gd);
  return *cache_->back();
}

// ---- scalar helpers ----

std::vector<double> sample_real(const SpinField& f, const QuadratureGrid& g) {
  std::vector<cplx> v;
  detail::synthesis(f, g, v);
  std::vector<double> out(v.size());
  for (size_t i = 0; i < v.size(); ++i) out[i] = v[i].real();
  return out;
}

std::vector<cplx> sample_cplx(const SpinField& f, const QuadratureGrid& g) {
  std::vector<cplx> v;
  detail::synthesis(f, g, v);
  return v;
}

SpinField project_real(const std::vector<double>& v, int spin, int L,
                       const QuadratureGrid& g) {
  std::vector<cplx> c(v.size());
  for (size_t i = 0; i < v.size(); ++i) c[i] = v[i];
  return detail::analysis(c, spin, L, g);
}

SpinField multiply_real(const SpinField& f, const std::vector<double>& w, int out_band,
                        const QuadratureGrid& g) {
  std::vector<cplx> v;
  detail::synthesis(f, g, v);
  for (size_t i = 0; i < v.size(); ++i) v[i] *= w[i];
  return detail::analysis(v, f.spin, out_band, g);
}

const QuadratureGrid& product_grid(int b1, int b2) {
  int L = b1 + b2;
  return grid_for(L);  // n_theta = L+1 integrates band b1 x band b2 exactly
}

// margin (in degree) used when sampling analytic conformal weights
namespace {
constexpr int kWeightMargin = 24;
}

SpinField gauss_curvature(const SurfaceMetric& m, int out_band) {
  if (!m.is_conformal())
    throw std::invalid_argument("gauss_curvature: conformal metrics only");
  if (out_band < 0) out_band = m.band_limit();
  // K = e^{-2u} (1 - lapl-hat u)
  SpinField s = SpinField(0, std::max(m.data_band(), 0));
  s = truncate_band(m.u(), std::max(m.data_band(), 0));
  s = round_laplacian(s);
  s *= cplx(-1.0, 0.0);
  s.at(0, 0) += std::sqrt(kFourPi);
  const auto& g = product_grid(out_band + kWeightMargin, std::max(m.data_band(), 0));
  const auto& gd = m.grid_data(g);
  std::vector<cplx> v;
  detail::synthesis(extend_band(s, g.band_limit), g, v);
  std::vector<cplx> kv(v.size());
  for (size_t i = 0; i < v.size(); ++i)
    kv[i] = v[i] * std::exp(-2.0 * gd.usamp[i]);
  return detail::analysis(kv, 0, out_band, g);
}

GridTensor covariant_derivative_grid(const SurfaceMetric& m, const SurfaceField& F,
                                     const QuadratureGrid& g) {
  GridTensor out = sample(round_nabla(F.ten), g);
  if (m.is_round()) return out;
  const auto& gd = m.grid_data(g);
  GridTensor T = sample(F.ten, g);
  int v = F.valence();
  int n = g.n_nodes();
  for (int w = 0; w < out.n_words(); ++w) {
    int a = (w >> v) & 1;  // derivative slot (slot 0 of valence v+1)
    auto& dst = out.comp[w];
    for (int i = 0; i < v; ++i) {
      int bit = v - 1 - i;  // slot i of the original field within w's low bits
      int si = (w >> bit) & 1;
      for (int c = 0; c < 2; ++c) {
        int src = (w & ((1 << v) - 1));
        src = (src & ~(1 << bit)) | (c << bit);
        const auto& C = (F.var[i] == 1) ? gd.chris[a][si][c] : gd.chris[a][c][si];
        double sgn = (F.var[i] == 1) ? -1.0 : 1.0;
        const auto& src_arr = T.comp[src];
        for (int node = 0; node < n; ++node) dst[node] += sgn * C[node] * src_arr[node];
      }
    }
  }
  return out;
}

SurfaceField covariant_derivative(const SurfaceMetric& m, const SurfaceField& F) {
  std::vector<int> var;
  var.push_back(1);
  for (int x : F.var) var.push_back(x);
  if (m.is_round()) return make_field(round_nabla(F.ten), var);
  int pad = m.is_conformal() ? 0 : 2 * m.data_band() + 12;
  int out_band = F.band() + m.data_band() + pad;
  const auto& g = product_grid(F.band() + m.data_band() + pad, out_band);
  GridTensor D = covariant_derivative_grid(m, F, g);
  SpinTensor exact = round_nabla(F.ten);
  // subtract the exact round part sampled, project the correction, re-add
  GridTensor rs = sample(exact, g);
  D -= rs;
  SpinTensor corr = project(D, out_band);
  corr += extend_band(exact, out_band);
  return make_field(std::move(corr), var);
}

std::vector<double> pointwise_norm_sq(const SurfaceMetric& m, const SurfaceField& F,
                                      const QuadratureGrid& g) {
  GridTensor T = sample(F.ten, g);
  return pointwise_norm_sq_grid(m, T, F.var, g);
}

std::vector<double> pointwise_norm_sq_grid(const SurfaceMetric& m, const GridTensor& T,
                                           const std::vector<int>& var,
                                           const QuadratureGrid& g) {
  const auto& gd = m.grid_data(g);
  GridTensor R = T;
  for (size_t i = 0; i < var.size(); ++i) {
    if (var[i] == 1)
      R = slot_transform(R, static_cast<int>(i), gd.inv00, gd.inv01, gd.inv01, gd.inv11);
    else
      R = slot_transform(R, static_cast<int>(i), gd.g00, gd.g01, gd.g01, gd.g11);
  }
  int n = g.n_nodes();
  std::vector<double> out(n, 0.0);
  for (int w = 0; w < T.n_words(); ++w)
    for (int i = 0; i < n; ++i) out[i] += R.comp[w][i] * T.comp[w][i];
  return out;
}

double integrate_measure(const SurfaceMetric& m, const std::vector<double>& f,
                         const QuadratureGrid& g) {
  const auto& gd = m.grid_data(g);
  double acc = 0.0;
  for (int i = 0; i < g.n_theta; ++i) {
    double row = 0.0;
    for (int j = 0; j < g.n_phi; ++j) {
      int node = g.node(i, j);
      row += f[node] * gd.sqdet[node];
    }
    acc += g.node_measure(i) * row;
  }
  return acc;
}

double lq_norm(const SurfaceMetric& m, const SurfaceField& F, double q) {
  const auto& g = product_grid(F.band() + kWeightMargin, F.band() + m.data_band());
  auto n2 = pointwise_norm_sq(m, F, g);
  if (std::isinf(q)) {
    double mx = 0.0;
    for (double v : n2) mx = std::max(mx, v);
    return std::sqrt(std::max(0.0, mx));
  }
  std::vector<double> p(n2.size());
  for (size_t i = 0; i < n2.size(); ++i) p[i] = std::pow(std::max(0.0, n2[i]), 0.5 * q);
  return std::pow(integrate_measure(m, p, g), 1.0 / q);
}

double area(const SurfaceMetric& m) {
  const auto& g = product_grid(m.data_band() + kWeightMargin, m.data_band());
  std::vector<double> one(g.n_nodes(), 1.0);
  return integrate_measure(m, one, g);
}

SurfaceField bochner_direct(const SurfaceMetric& m, const SurfaceField& F) {
  SurfaceField d1 = covariant_derivative(m, F);
  SurfaceField d2 = covariant_derivative(m, d1);
  // gamma-trace over the two derivative slots (both lower)
  int out_band = d2.band() + m.data_band() + (m.is_conformal() ? 8 : 12);
  const auto& g = product_grid(d2.band() + m.data_band() + 8, out_band);
  const auto& gd = m.grid_data(g);
  GridTensor T = sample(d2.ten, g);
  GridTensor tr = contract(T, 0, 1, gd.inv00, gd.inv01, gd.inv11);
  return make_field(project(tr, out_band), F.var);
}

// conformal-weight multiply: f -> e^{c u} f projected at out_band
static SpinField conf_weight_multiply(const SurfaceMetric& m, const SpinField& f, double c,
                                      int out_band) {
  const auto& g = product_grid(f.band_limit + kWeightMargin, out_band);
  const auto& gd = m.grid_data(g);
  std::vector<cplx> v;
  detail::synthesis(f, g, v);
  for (size_t i = 0; i < v.size(); ++i) v[i] *= std::exp(c * gd.usamp[i]);
  return detail::analysis(v, f.spin, out_band, g);
}

H0Section hodge_d1(const SurfaceMetric& m, const H1Section& x, int out_band) {
  if (!m.is_conformal()) throw std::invalid_argument("hodge ops: conformal only");
  if (out_band < 0) out_band = x.p.band_limit + m.data_band();
  SpinField y = detail::eth_any(x.p, EthDirection::lower);
  y *= cplx(-std::sqrt(2.0), 0.0);
  if (m.is_round()) return {truncate_band(y, out_band)};
  return {conf_weight_multiply(m, y, -2.0, out_band)};
}

H1Section hodge_d1s(const SurfaceMetric& m, const H0Section& x) {
  (void)m;  // conformally invariant
  SpinField y = detail::eth_any(x.f, EthDirection::raise);
  y *= cplx(1.0 / std::sqrt(2.0), 0.0);
  return {y};
}

H1Section hodge_d2(const SurfaceMetric& m, const H2Section& x, int out_band) {
  if (!m.is_conformal()) throw std::invalid_argument("hodge ops: conformal only");
  if (out_band < 0) out_band = x.p.band_limit + m.data_band();
  SpinField y = detail::eth_any(x.p, EthDirection::lower);
  y *= cplx(-1.0 / std::sqrt(2.0), 0.0);
  if (m.is_round()) return {truncate_band(y, out_band)};
  return {conf_weight_multiply(m, y, -2.0, out_band)};
}

H2Section hodge_d2s(const SurfaceMetric& m, const H1Section& x, int out_band) {
  if (!m.is_conformal()) throw std::invalid_argument("hodge ops: conformal only");
  SurfaceField X = field_of(x);
  SurfaceField DX = covariant_derivative(m, X);
  SpinField z = DX.ten.comp[0];  // (m, m) word of nabla X
  z *= cplx(-1.0, 0.0);
  if (out_band >= 0) z = truncate_band(z, out_band);
  return {z};
}

double bundle_inner(const SurfaceMetric& m, const H0Section& a, const H0Section& b) {
  const auto& g = product_grid(a.f.band_limit + kWeightMargin,
                               b.f.band_limit + m.data_band());
  auto va = sample_cplx(a.f, g);
  auto vb = sample_cplx(b.f, g);
  std::vector<double> p(va.size());
  for (size_t i = 0; i < va.size(); ++i) p[i] = (va[i] * std::conj(vb[i])).real();
  return integrate_measure(m, p, g);
}

double bundle_inner(const SurfaceMetric& m, const H1Section& a, const H1Section& b) {
  (void)m;  // conformally invariant pairing
  int L = std::max(a.p.band_limit, b.p.band_limit);
  return 2.0 * l2_inner(geolab::extend_band(a.p, L), geolab::extend_band(b.p, L)).real();
}

double bundle_inner(const SurfaceMetric& m, const H2Section& a, const H2Section& b) {
  if (m.is_round()) {
    int L = std::max(a.p.band_limit, b.p.band_limit);
    return 2.0 * l2_inner(geolab::extend_band(a.p, L), geolab::extend_band(b.p, L)).real();
  }
  const auto& g = product_grid(a.p.band_limit + kWeightMargin,
                               b.p.band_limit + m.data_band());
  const auto& gd = m.grid_data(g);
  auto va = sample_cplx(a.p, g);
  auto vb = sample_cplx(b.p, g);
  std::vector<double> p(va.size());
  for (size_t i = 0; i < va.size(); ++i)
    p[i] = 2.0 * (va[i] * std::conj(vb[i])).real() * std::exp(-4.0 * gd.usamp[i]);
  // weight e^{-4u} x measure e^{2u} = invariant e^{-2u} weighting handled via
  // sqdet in integrate_measure (sqdet = e^{2u})
  return integrate_measure(m, p, g);
}

SurfaceMetric conformal_compose(const SurfaceMetric& m, const SpinField& v) {
  if (!m.is_conformal()) throw std::invalid_argument("conformal_compose: conformal only");
  int L = std::max(m.u().band_limit, v.band_limit);
  SpinField w = extend_band(m.u(), L);
  w += extend_band(v, L);
  return SurfaceMetric::conformal(w);
}

Sym2Pieces decompose2(const SurfaceMetric& m, const SurfaceField& F) {
  if (F.valence() != 2 || F.r() != 0)
    throw std::invalid_argument("decompose2: covariant valence-2 field required");
  Sym2Pieces out;
  SpinField tr_round = round_trace(F.ten, 0, 1);
  SpinField as_round = round_eps_trace(F.ten, 0, 1);
  int out_band = F.band() + 4 * m.data_band() + kWeightMargin;
  if (m.is_round()) {
    out.trace = tr_round;
    out.antisym = as_round;
  } else if (m.is_conformal()) {
    out.trace = conf_weight_multiply(m, tr_round, -2.0, out_band);
    out.antisym = conf_weight_multiply(m, as_round, -2.0, out_band);
  } else {
    throw std::invalid_argument("decompose2: conformal metrics only");
  }
  out.h2 = F.ten.comp[0];  // exact: gamma(m,m) = eps(m,m) = 0
  return out;
}

SurfaceField field_of(const H1Section& x) { return make_oneform(x.p); }
SurfaceField field_of(const H2Section& x) { return make_h2(x.p); }

SurfaceField bochner_laplacian(const SurfaceMetric& m, const SurfaceField& F) {
  if (!m.is_conformal()) throw std::invalid_argument("bochner_laplacian: conformal only");
  int v = F.valence();
  if (v == 0) {
    SpinField lf = round_laplacian(F.ten.comp[0]);
    int ob = F.band() + m.data_band() + 8;
    return make_scalar(m.is_round() ? lf : conf_weight_multiply(m, lf, -2.0, ob));
  }
  if (v == 1) {
    // Delta X = K X - D1* D1 X
    H1Section x{F.ten.comp[0]};
    int ob = F.band() + 4 * m.data_band() + kWeightMargin;
    H0Section d1x = hodge_d1(m, x, ob);
    H1Section dd = hodge_d1s(m, d1x);
    SpinField K = gauss_curvature(m, 4 * m.data_band() + kWeightMargin);
    const auto& g = product_grid(F.band() + kWeightMargin, K.band_limit + ob);
    auto kv = sample_real(K, g);
    SpinField kx = multiply_real(F.ten.comp[0], kv, ob, g);
    kx -= dd.p;
    return make_oneform(kx);
  }
  if (v == 2) {
    Sym2Pieces p = decompose2(m, F);
    SurfaceField lt = bochner_laplacian(m, make_scalar(p.trace));
    SurfaceField la = bochner_laplacian(m, make_scalar(p.antisym));
    // Delta on H2: 2 K X - 2 D2* D2 X
    int ob = F.band() + 4 * m.data_band() + kWeightMargin;
    H2Section x2{p.h2};
    H1Section d2x = hodge_d2(m, x2, ob);
    H2Section dd = hodge_d2s(m, d2x, ob + m.data_band());
    SpinField K = gauss_curvature(m, 4 * m.data_band() + kWeightMargin);
    const auto& g = product_grid(F.band() + kWeightMargin, K.band_limit + ob);
    auto kv = sample_real(K, g);
    SpinField kx = multiply_real(p.h2, kv, ob, g);
    kx *= cplx(2.0, 0.0);
    SpinField l2 = dd.p;
    l2 *= cplx(-2.0, 0.0);
    kx += l2;
    // reassemble (trace/2) gamma + (antisym/2) eps + h2
    int rb = ob + m.data_band() + 8;
    const auto& rg = product_grid(rb, m.data_band() + kWeightMargin);
    const auto& gd = m.grid_data(rg);
    auto ts = sample_real(lt.ten.comp[0], rg);
    auto as = sample_real(la.ten.comp[0], rg);
    GridTensor out(2, rg);
    auto zs = sample_cplx(kx, rg);
    int n = rg.n_nodes();
    for (int i = 0; i < n; ++i) {
      double e2u = gd.sqdet[i];
      double t = 0.5 * ts[i] * e2u;
      double a = 0.5 * as[i] * e2u;
      out.comp[0][i] = zs[i].real() + t * 1.0;  // theta-theta: Re z + t
      out.comp[1][i] = zs[i].imag() - a;        // theta-phi:   Im z + a*eps(th,ph)
      out.comp[2][i] = zs[i].imag() + a;        // phi-theta
      out.comp[3][i] = -zs[i].real() + t;       // phi-phi
    }
    return make_field(project(out, rb), {1, 1});
  }
  throw std::invalid_argument("bochner_laplacian: valence > 2");
}

SurfaceField random_surface_field(std::uint64_t seed, int rank, int band_lo, int band_hi,
                                  double scale, int L) {
  if (rank == 0)
    return make_scalar(random_band_limited(seed, 0, band_lo, band_hi, scale, L, true));
  if (rank == 1)
    return make_oneform(
        random_band_limited(seed, 1, std::max(1, band_lo), band_hi, scale, L));
  if (rank == 2) {
    SpinField t = random_band_limited(seed ^ 0xa1ull, 0, band_lo, band_hi, scale, L, true);
    SpinField a = random_band_limited(seed ^ 0xa2ull, 0, band_lo, band_hi, scale, L, true);
    SpinField h = random_band_limited(seed ^ 0xa3ull, 2, std::max(2, band_lo), band_hi,
                                      scale, L);
    SpinTensor out(2, L);
    double c = 0.5 / std::sqrt(kFourPi);
    // (t/2) gamma-hat + (a/2) eps-hat + h2: exact band-limited combination
    SpinTensor ht = h2_tensor(h);
    out += ht;
    for (int l = 0; l <= L; ++l)
      for (int mm = -l; mm <= l; ++mm) {
        (void)c;
        out.comp[1].at(l, mm) += 0.5 * (t.at(l, mm) + cplx(0, 1) * a.at(l, mm));
        out.comp[2].at(l, mm) += 0.5 * (t.at(l, mm) - cplx(0, 1) * a.at(l, mm));
      }
    SurfaceField F = make_field(std::move(out), {1, 1});
    double n = F.ten.l2_coeff_norm();
    if (n > 0) F *= scale * std::sqrt(3.0) / n;
    return F;
  }
  throw std::invalid_argument("rank 0..2 supported");
}

SpinField random_conformal_factor(std::uint64_t seed, int band_lo, int band_hi,
                                  double amp_inf, int L) {
  SpinField u = random_band_limited(seed, 0, std::max(1, band_lo), band_hi, 1.0, L, true);
  const auto& g = grid_for(std::max(L, band_hi) + 8);
  auto v = sample_real(u, g);
  double mx = 0.0;
  for (double x : v) mx = std::max(mx, std::abs(x));
  if (mx > 0) u *= cplx(amp_inf / mx, 0.0);
  return u;
}

}  // namespace geolab
