#include "geolab/hodge_ell.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

#include "geolab/par.hpp"
#include "geolab/rng.hpp"

namespace geolab {

namespace {

Eigen::VectorXd ladder_raise(int spin, int L) {
  int lmin = std::abs(spin);
  int n = (L + 1) * (L + 1) - lmin * lmin;
  Eigen::VectorXd d(n);
  int p = 0;
  for (int l = lmin; l <= L; ++l)
    for (int m = -l; m <= l; ++m)
      d(p++) = std::sqrt(double(l - spin) * double(l + spin + 1));
  return d;
}
Eigen::VectorXd ladder_lower(int spin, int L) {
  int lmin = std::abs(spin);
  int n = (L + 1) * (L + 1) - lmin * lmin;
  Eigen::VectorXd d(n);
  int p = 0;
  for (int l = lmin; l <= L; ++l)
    for (int m = -l; m <= l; ++m)
      d(p++) = -std::sqrt(double(l + spin) * double(l - spin + 1));
  return d;
}

// embedding of the spin-(s_out) index set with l >= lmin_src into the full set
Eigen::MatrixXcd embed_cols(const Eigen::MatrixXcd& A, int spin_row, int l_start, int L) {
  // build matrix with columns indexed by (l, m), l >= l_start, from A whose
  // columns are the spin_row basis at l >= |spin_row|
  int lr = std::abs(spin_row);
  int n_from = (L + 1) * (L + 1) - l_start * l_start;
  Eigen::MatrixXcd out(A.rows(), n_from);
  int p = 0;
  for (int l = l_start; l <= L; ++l)
    for (int m = -l; m <= l; ++m, ++p)
      out.col(p) = A.col(l * l - lr * lr + (m + l));
  return out;
}

// weighted pseudo-inverse of A: V -> W with Grams Gv, Gw (Hermitian PD)
Eigen::MatrixXcd weighted_pinv(const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& Gv,
                               const Eigen::MatrixXcd& Gw, int* kdim) {
  Eigen::LLT<Eigen::MatrixXcd> lv(Gv), lw(Gw);
  Eigen::MatrixXcd Rv = lv.matrixU();
  Eigen::MatrixXcd Rw = lw.matrixU();
  Eigen::MatrixXcd Aon = Rw * A * Rv.inverse();
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(Aon, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  double cutoff = 1e-10 * sv(0);
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > cutoff) ++rank;
  if (kdim) *kdim = static_cast<int>(A.cols()) - rank;
  Eigen::VectorXd inv = sv;
  for (int i = 0; i < sv.size(); ++i) inv(i) = (sv(i) > cutoff) ? 1.0 / sv(i) : 0.0;
  Eigen::MatrixXcd pinv_on =
      svd.matrixV() * inv.asDiagonal() * svd.matrixU().adjoint();
  return Rv.inverse() * pinv_on * Rw;
}

std::mutex hodge_mutex;
std::map<std::uint64_t, std::shared_ptr<HodgeSystem>> hodge_cache;

}  // namespace

HodgeSystem::HodgeSystem(const SurfaceMetric& m) : m_(&m), L_(m.band_limit()) {
  if (!m.is_conformal()) throw std::invalid_argument("HodgeSystem: conformal only");
  const int L = L_;
  const auto& g = grid_for(2 * L + 4 * m.data_band() + 32);
  const auto& gd = m.grid_data(g);
  int nn = g.n_nodes();
  std::vector<cplx> em2u(nn);
  std::vector<double> e2u(nn), em2u_r(nn);
  for (int i = 0; i < nn; ++i) {
    double w = std::exp(-2.0 * gd.usamp[i]);
    em2u[i] = w;
    em2u_r[i] = w;
    e2u[i] = 1.0 / w;
  }
  // Grams: H0 = M0[e^{2u}], H1 = 2 I, H2 = 2 M2[e^{-2u}]
  std::vector<cplx> e2uc(nn);
  for (int i = 0; i < nn; ++i) e2uc[i] = e2u[i];
  Eigen::MatrixXcd G0 = transfer_matrix(0, 0, L, e2uc, g);
  Eigen::MatrixXcd G1 =
      Eigen::MatrixXcd::Identity((L + 1) * (L + 1) - 1, (L + 1) * (L + 1) - 1) * 2.0;
  Eigen::MatrixXcd G2 = 2.0 * transfer_matrix(2, 2, L, em2u, g);
  G0 = (0.5 * (G0 + G0.adjoint())).eval();
  G2 = (0.5 * (G2 + G2.adjoint())).eval();
  rv_[0] = G0;
  rv_[1] = G1;
  rv_[2] = G2;

  // D1 = -sqrt2 e^{-2u} ethbar on spin-1; D2 = -(1/sqrt2) e^{-2u} ethbar on
  // spin-2; D1* = (1/sqrt2) eth on spin-0; D2* = (1/sqrt2) eth - sqrt2 (eth u)
  Eigen::MatrixXcd M00 = transfer_matrix(0, 0, L, em2u, g);
  Eigen::MatrixXcd M11 = transfer_matrix(1, 1, L, em2u, g);
  // ethbar on spin 1 lands on spin 0 with the same (l, m), l >= 1
  {
    Eigen::VectorXd lad = ladder_lower(1, L);
    Eigen::MatrixXcd M = embed_cols(M00, 0, 1, L);  // spin0 cols restricted l>=1
    d1_ = -std::sqrt(2.0) * (M * lad.asDiagonal());
  }
  {
    Eigen::VectorXd lad = ladder_lower(2, L);
    Eigen::MatrixXcd M = embed_cols(M11, 1, 2, L);
    d2_ = -(1.0 / std::sqrt(2.0)) * (M * lad.asDiagonal());
  }
  {
    // D1*: H0 -> H1, exact ladder, rows l >= 1
    Eigen::VectorXd lad = ladder_raise(0, L);
    int n1 = (L + 1) * (L + 1) - 1;
    int n0 = (L + 1) * (L + 1);
    d1s_ = Eigen::MatrixXcd::Zero(n1, n0);
    int p = 0;
    for (int l = 1; l <= L; ++l)
      for (int m = -l; m <= l; ++m, ++p)
        d1s_(p, l * l + (m + l)) = (1.0 / std::sqrt(2.0)) * lad(l * l + (m + l));
  }
  {
    // D2*: (1/sqrt2) eth - sqrt2 (eth u) x
    SpinField du = detail::eth_any(m.u(), EthDirection::raise);
    auto dus = sample_cplx(du, g);
    for (auto& v : dus) v *= -std::sqrt(2.0);
    Eigen::MatrixXcd Mdu = transfer_matrix(2, 1, L, dus, g);
    Eigen::VectorXd lad = ladder_raise(1, L);
    int n2 = (L + 1) * (L + 1) - 4;
    int n1 = (L + 1) * (L + 1) - 1;
    Eigen::MatrixXcd D = Eigen::MatrixXcd::Zero(n2, n1);
    int p = 0;
    for (int l = 2; l <= L; ++l)
      for (int m = -l; m <= l; ++m, ++p)
        D(p, l * l - 1 + (m + l)) =
            (1.0 / std::sqrt(2.0)) * lad(l * l - 1 + (m + l));
    d2s_ = D + Mdu;
  }
  d1p_ = weighted_pinv(d1_, rv_[1], rv_[0], &kdim_[0]);
  d2p_ = weighted_pinv(d2_, rv_[2], rv_[1], &kdim_[1]);
  d1sp_ = weighted_pinv(d1s_, rv_[0], rv_[1], &kdim_[2]);
  d2sp_ = weighted_pinv(d2s_, rv_[1], rv_[2], &kdim_[3]);
}

Eigen::VectorXcd HodgeSystem::to_vec(const SpinField& x) const {
  return Eigen::Map<const Eigen::VectorXcd>(x.a.data(),
                                            static_cast<Eigen::Index>(x.a.size()));
}

SpinField HodgeSystem::from_vec(const Eigen::VectorXcd& v, int spin) const {
  SpinField out(spin, L_);
  for (int i = 0; i < out.size(); ++i) out.a[i] = v(i);
  return out;
}

SpinField HodgeSystem::apply(WhichHodge which, const SpinField& x) const {
  switch (which) {
    case WhichHodge::D1:
      return from_vec(d1_ * to_vec(x), 0);
    case WhichHodge::D2:
      return from_vec(d2_ * to_vec(x), 1);
    case WhichHodge::D1s:
      return from_vec(d1s_ * to_vec(x), 1);
    case WhichHodge::D2s:
      return from_vec(d2s_ * to_vec(x), 2);
  }
  throw std::logic_error("unreachable");
}

SpinField HodgeSystem::inverse(WhichHodge which, const SpinField& x) const {
  switch (which) {
    case WhichHodge::D1:
      return from_vec(d1p_ * to_vec(x), 1);
    case WhichHodge::D2:
      return from_vec(d2p_ * to_vec(x), 2);
    case WhichHodge::D1s:
      return from_vec(d1sp_ * to_vec(x), 0);
    case WhichHodge::D2s:
      return from_vec(d2sp_ * to_vec(x), 1);
  }
  throw std::logic_error("unreachable");
}

SpinField HodgeSystem::range_projection(int i, const SpinField& x) const {
  if (i == 1) return from_vec(d1_ * (d1p_ * to_vec(x)), 0);
  if (i == 2) return from_vec(d2_ * (d2p_ * to_vec(x)), 1);
  throw std::invalid_argument("range projection: i in {1, 2}");
}

int HodgeSystem::kernel_dim(WhichHodge which) const {
  return kdim_[static_cast<int>(which)];
}

const HodgeSystem& hodge_system_for(const SurfaceMetric& m) {
  {
    std::lock_guard<std::mutex> lock(hodge_mutex);
    auto it = hodge_cache.find(m.digest());
    if (it != hodge_cache.end()) return *it->second;
  }
  auto sys = std::make_shared<HodgeSystem>(m);
  std::lock_guard<std::mutex> lock(hodge_mutex);
  auto it = hodge_cache.find(m.digest());
  if (it != hodge_cache.end()) return *it->second;
  return *hodge_cache.emplace(m.digest(), std::move(sys)).first->second;
}

void clear_hodge_cache() {
  std::lock_guard<std::mutex> lock(hodge_mutex);
  hodge_cache.clear();
}

// ---------------- condition K ----------------

CurvatureDecomposition curvature_decompose(const Foliation& fol,
                                           const HorizontalField& f_pos) {
  CurvatureDecomposition out;
  out.fol = &fol;
  int M = fol.M();
  int L = fol.L();
  int kb = L + 4 * fol.data_band() + 16;
  out.f.resize(M + 1);
  out.K.resize(M + 1);
  out.V.resize(M + 1);
  out.W.resize(M + 1);
  out.u.resize(M + 1);
  double fmax = 0, fmin = INFINITY, w_max = 0, v_besov = 0, v_h12 = 0;
  std::vector<double> vb_low;
  std::vector<std::vector<double>> vb_bands(41);
  const auto& g = grid_for(kb + 24);
  for (int j = 0; j <= M; ++j) {
    const SurfaceMetric& m = fol.metric_node(j);
    SpinField K = gauss_curvature(m, kb);
    out.K[j] = K;
    SpinField f = truncate_band(f_pos.node[j].comp[0], kb);
    out.f[j] = f;
    // gamma-mean of K - f
    auto ks = sample_real(K, g);
    auto fs = sample_real(f, g);
    std::vector<double> diff(g.n_nodes());
    for (int i = 0; i < g.n_nodes(); ++i) diff[i] = ks[i] - fs[i];
    double mean = integrate_measure(m, diff, g) / area(m);
    SpinField W(0, kb);
    W.at(0, 0) = mean * std::sqrt(kFourPi);
    out.W[j] = W;
    // solve lapl-hat U = e^{2u} (K - f - mean), mean-free exactly
    const auto& gd = m.grid_data(g);
    std::vector<cplx> rhs(g.n_nodes());
    for (int i = 0; i < g.n_nodes(); ++i)
      rhs[i] = (diff[i] - mean) * std::exp(2.0 * gd.usamp[i]);
    SpinField R = detail::analysis(rhs, 0, kb, g);
    R.at(0, 0) = 0.0;
    SpinField U = R;
    for (int l = 1; l <= kb; ++l)
      for (int mm = -l; mm <= l; ++mm) U.at(l, mm) /= -double(l) * (l + 1);
    U.at(0, 0) = 0.0;
    out.u[j] = U;  // potential; the renormalization factor is U up to mean
    SpinField V = detail::eth_any(U, EthDirection::raise);
    V *= cplx(-1.0 / std::sqrt(2.0), 0.0);
    out.V[j] = V;
    // constants
    for (int i = 0; i < g.n_nodes(); ++i) {
      fmax = std::max(fmax, fs[i]);
      fmin = std::min(fmin, fs[i]);
    }
    w_max = std::max(w_max, std::abs(mean) * std::sqrt(area(m)));
    // H^{1/2}_x of V on this slice (functional calculus), reported
    SurfaceField Vf = make_oneform(truncate_band(V, L));
    v_h12 = std::max(v_h12, sobolev_norm_field(m, Vf, 0.5));
    BandProfile bp = band_profile_field(m, Vf);
    vb_low.push_back(bp.low);
    for (size_t k = 0; k < bp.k.size(); ++k) vb_bands[k].push_back(bp.k[k]);
  }
  // B^{2,inf,1/2}_{l,t,x} of V: sup_t per band, then l^2 with 2^{k/2}
  {
    double acc = 0.0;
    double lo = 0.0;
    for (double v : vb_low) lo = std::max(lo, v);
    acc += lo * lo;
    for (size_t k = 0; k < vb_bands.size(); ++k) {
      double mx = 0.0;
      for (double v : vb_bands[k]) mx = std::max(mx, v);
      acc += std::pow(2.0, double(k)) * mx * mx;
    }
    v_besov = std::sqrt(acc);
  }
  out.C = std::max(fmax, 1.0 / std::max(fmin, 1e-300));
  out.D = std::max(v_besov, w_max);
  out.v_h12_x = v_h12;
  return out;
}

CurvatureDecomposition curvature_decompose(const Foliation& fol) {
  int L = fol.L();
  auto onefn = [L](double) {
    SpinField f(0, L);
    f.at(0, 0) = std::sqrt(kFourPi);
    return scalar_tensor(f);
  };
  HorizontalField one = make_horizontal(fol, {}, onefn);
  return curvature_decompose(fol, one);
}

Renormalization conformal_renormalize(const Foliation& fol,
                                      const CurvatureDecomposition& d) {
  Renormalization out;
  out.decomp = d;
  int M = fol.M();
  int L = fol.L();
  // zero gamma-mean shift of the potential per node; the returned foliation
  // carries a truncated factor so downstream spectral work stays desk-sized,
  // while the exact-identity residual below uses the full-band potential
  auto full = std::make_shared<std::vector<SpinField>>(M + 1);
  auto nodes = std::make_shared<std::vector<SpinField>>(M + 1);
  const auto& g = grid_for(fol.L() + 4 * fol.data_band() + 40);
  for (int j = 0; j <= M; ++j) {
    const SurfaceMetric& m = fol.metric_node(j);
    SpinField U = d.u[j];
    auto us = sample_real(U, g);
    double mean = integrate_measure(m, us, g) / area(m);
    U.at(0, 0) -= mean * std::sqrt(kFourPi);
    (*full)[j] = U;
    (*nodes)[j] = truncate_band(U, L + 2 * fol.data_band() + 8);
  }
  int band_u = (*nodes)[0].band_limit;
  // total conformal factor family: u_orig + u_renorm (node interpolation)
  const Foliation* fp = &fol;
  double delta = fol.delta();
  auto interp = [nodes, M, delta](double t) {
    // quartic interpolation over 5 nodes
    double h = delta / M;
    int c = static_cast<int>(std::floor(t / h + 0.5));
    int lo = std::min(std::max(c - 2, 0), std::max(M - 4, 0));
    SpinField out((*nodes)[0].spin, (*nodes)[0].band_limit);
    for (int q = 0; q < 5; ++q) {
      double num = 1.0, den = 1.0;
      for (int r = 0; r < 5; ++r) {
        if (r == q) continue;
        num *= t - (lo + r) * h;
        den *= (q - r) * h;
      }
      SpinField s = (*nodes)[lo + q];
      s *= cplx(num / den, 0.0);
      out += s;
    }
    return out;
  };
  auto utot = [fp, interp, band_u](double t) {
    SpinField u = extend_band(fp->u_at(t), band_u);
    u += interp(t);
    return u;
  };
  auto utotdot = [fp, interp, band_u, delta](double t) {
    SpinField ud = extend_band(fp->udot_at(t), band_u);
    double h = std::min(1e-3, 0.2 * delta);
    double a = std::min(delta, t + h), b = std::max(0.0, t - h);
    SpinField x = interp(a);
    x -= interp(b);
    x *= cplx(1.0 / (a - b), 0.0);
    ud += x;
    return ud;
  };
  out.renormalized = Foliation::conformal(fol.delta(), M, band_u, utot, utotdot);

  // exact identity e^{2u} Kbar = f + W, assembled pointwise at full band
  double res = 0.0, cmp = 0.0;
  for (int j = 0; j <= M; ++j) {
    SpinField ufull = extend_band(fol.u_at(fol.tau(j)), (*full)[j].band_limit);
    ufull += (*full)[j];
    SurfaceMetric mb = SurfaceMetric::conformal(ufull);
    SpinField Kbar = gauss_curvature(mb, ufull.band_limit + 8);
    auto kb = sample_real(Kbar, g);
    auto ur = sample_real((*full)[j], g);
    auto fs = sample_real(d.f[j], g);
    double wv = d.W[j].at(0, 0).real() / std::sqrt(kFourPi);
    double num = 0, den = 0;
    std::vector<double> l2num(g.n_nodes()), l2den(g.n_nodes());
    for (int i = 0; i < g.n_nodes(); ++i) {
      double lhs = std::exp(2.0 * ur[i]) * kb[i];
      double rhs = fs[i] + wv;
      num = std::max(num, std::abs(lhs - rhs));
      den = std::max(den, std::abs(rhs));
      double a = kb[i] - std::exp(-2.0 * ur[i]) * fs[i];
      double b = std::exp(-2.0 * ur[i]) * wv;
      l2num[i] = a * a;
      l2den[i] = b * b;
    }
    res = std::max(res, num / den);
    double nn = std::sqrt(integrate_measure(mb, l2num, g));
    double dd = std::sqrt(integrate_measure(mb, l2den, g));
    if (dd > 0) cmp = std::max(cmp, nn / dd - 1.0);
  }
  out.exact_identity_residual = res;
  out.l2_comparison_excess = std::max(0.0, cmp);
  return out;
}

Report renormalization_suite(const Foliation& fol, double tol) {
  Report rep;
  CurvatureDecomposition d = curvature_decompose(fol);
  // decomposition residual K - f - div V - W, pointwise
  const auto& g = grid_for(fol.L() + 4 * fol.data_band() + 40);
  double dres = 0.0;
  for (int j = 0; j <= fol.M(); ++j) {
    const SurfaceMetric& m = fol.metric_node(j);
    const auto& gd = m.grid_data(g);
    auto ks = sample_real(d.K[j], g);
    auto fs = sample_real(d.f[j], g);
    double wv = d.W[j].at(0, 0).real() / std::sqrt(kFourPi);
    // div V = e^{-2u} lapl-hat U = e^{-2u} Re(-sqrt2 ethbar v)
    SpinField dv = detail::eth_any(d.V[j], EthDirection::lower);
    auto dvs = sample_cplx(dv, g);
    double num = 0, den = 0;
    for (int i = 0; i < g.n_nodes(); ++i) {
      double div = -std::sqrt(2.0) * dvs[i].real() * std::exp(-2.0 * gd.usamp[i]);
      num = std::max(num, std::abs(ks[i] - fs[i] - div - wv));
      den = std::max(den, std::abs(ks[i]) + 1.0);
    }
    dres = std::max(dres, num / den);
  }
  rep.add(residual_check("renorm/decomposition_identity", "sec 6.1 condition K", dres,
                         tol));
  Renormalization r = conformal_renormalize(fol, d);
  rep.add(residual_check("renorm/exact_identity", "eq.conf_gc_id",
                         r.exact_identity_residual, tol));
  rep.add(residual_check("renorm/l2_comparison", "eq.conf_curv_est",
                         r.l2_comparison_excess, 1e-6));
  rep.add(ratio_check("renorm/D_constant", "condition K smallness", d.D));
  rep.add(ratio_check("renorm/V_h12_x", "condition k norm, reported beside Besov",
                      d.v_h12_x));
  // renormalized metric satisfies R1 with finite constants
  Atlas atlas = build_atlas(r.renormalized, true, 48);
  Report rr = regularity_constants(atlas, "R1");
  for (auto& c : rr.checks) {
    c.name = "renorm/" + c.name;
    rep.add(c);
  }
  return rep;
}

}  // namespace geolab
