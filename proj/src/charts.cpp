#include "geolab/charts.hpp"

#include <cmath>
#include <stdexcept>

#include "geolab/glp.hpp"
#include "geolab/par.hpp"
#include "geolab/rng.hpp"
#include "geolab/wigner.hpp"

namespace geolab {

double bump_eta(double r) { return lp_chi(1.0 + 3.0 * (r - 1.0) / 0.4); }
double bump_eta_d(double r) {
  double h = 1e-6;
  return (bump_eta(r + h) - bump_eta(r - h)) / (2 * h);
}
double bump_eta_tilde(double r) { return lp_chi(1.0 + 3.0 * (r - 1.42) / 0.16); }

void Chart::to_sphere(double x1, double x2, double& theta, double& phi) const {
  double r = std::hypot(x1, x2);
  if (north) {
    theta = 2.0 * std::atan(r);
    phi = std::atan2(x2, x1);
  } else {
    theta = kPi - 2.0 * std::atan(r);
    phi = -std::atan2(x2, x1);
  }
  if (phi < 0) phi += 2.0 * kPi;
}

double Chart::radius_at(double theta) const {
  return north ? std::tan(0.5 * theta) : std::tan(0.5 * (kPi - theta));
}

void Chart::coord_frame(double x1, double x2, double A[2][2]) const {
  double r = std::hypot(x1, x2);
  double f = 2.0 / ((1.0 + r * r) * r);
  if (north) {
    A[0][0] = f * x1;   // e_theta component of d/dx1
    A[0][1] = f * x2;
    A[1][0] = -f * x2;  // e_phi component of d/dx1
    A[1][1] = f * x1;
  } else {
    A[0][0] = -f * x1;
    A[0][1] = -f * x2;
    A[1][0] = f * x2;
    A[1][1] = -f * x1;
  }
}

namespace {

// frame components of the metric at a sphere point
void metric_frames_at(const Foliation& fol, double tau, double theta, double phi,
                      double G[3]) {
  if (fol.is_conformal()) {
    double u = synthesize_at(fol.u_at(tau), theta, phi).real();
    double e2u = std::exp(2.0 * u);
    G[0] = e2u;
    G[1] = 0.0;
    G[2] = e2u;
    return;
  }
  SpinTensor g = fol.g_at(tau);
  // words: (m,m), (m,mbar), (mbar,m), (mbar,mbar)
  cplx mm = synthesize_at(g.comp[0], theta, phi);
  cplx mmb = synthesize_at(g.comp[1], theta, phi);
  cplx mbm = synthesize_at(g.comp[2], theta, phi);
  cplx mbmb = synthesize_at(g.comp[3], theta, phi);
  const double is2 = 1.0 / std::sqrt(2.0);
  // frame from m-words (same change of basis as GridTensor sampling)
  auto conv = [&](int f1, int f2) {
    cplx acc(0, 0);
    const cplx w[4] = {mm, mmb, mbm, mbmb};
    for (int word = 0; word < 4; ++word) {
      cplx fac(1.0, 0.0);
      int bits[2] = {(word >> 1) & 1, word & 1};
      int fb[2] = {f1, f2};
      for (int s = 0; s < 2; ++s) {
        cplx c = (fb[s] == 0) ? cplx(is2, 0.0)
                              : ((bits[s] == 0) ? cplx(0.0, -is2) : cplx(0.0, is2));
        fac *= c;
      }
      acc += fac * w[word];
    }
    return acc.real();
  };
  G[0] = conv(0, 0);
  G[1] = conv(0, 1);
  G[2] = conv(1, 1);
}

}  // namespace

void Atlas::metric_at_point(int chart, int pt, int node, double G[3]) const {
  const auto& c = cd[chart];
  metric_frames_at(*fol, fol->tau(node), c.theta[pt], c.phi[pt], G);
}

Atlas build_atlas(const Foliation& fol, bool parallel_frames, int n_square,
                  double frame_angle, bool swap_charts, bool cache_basis) {
  Atlas at;
  at.fol = &fol;
  at.square = eucl::EuclGrid{n_square, 4.0};
  at.parallel_frames = parallel_frames;
  at.frame_angle = frame_angle;
  at.swap_charts = swap_charts;
  int n = n_square;
  double T = at.square.T;
  double dx = at.square.dx();
  for (int ci = 0; ci < 2; ++ci) {
    auto& c = at.cd[ci];
    c.chart.north = swap_charts ? (ci == 1) : (ci == 0);
    for (int y = 0; y < n; ++y)
      for (int x = 0; x < n; ++x) {
        // half-offset lattice avoids the pole at the origin
        double x1 = -T + (x + 0.5) * dx;
        double x2 = -T + (y + 0.5) * dx;
        double r = std::hypot(x1, x2);
        if (r > 1.6) continue;
        c.pts.push_back(y * n + x);
        c.x1.push_back(x1);
        c.x2.push_back(x2);
        c.r.push_back(r);
        double th, ph;
        c.chart.to_sphere(x1, x2, th, ph);
        c.theta.push_back(th);
        c.phi.push_back(ph);
        // eta of this chart: north bump in its own radius; the south chart
        // carries 1 - eta_north so the pair sums to one exactly
        double rn = c.chart.north ? r : 1.0 / r;
        double eta_n = bump_eta(rn);
        c.eta.push_back(c.chart.north ? eta_n : 1.0 - eta_n);
        c.eta_t.push_back(bump_eta_tilde(r));
      }
    int np = static_cast<int>(c.pts.size());
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) c.coordA[a][b].resize(np);
    for (int p = 0; p < np; ++p) {
      double A[2][2];
      c.chart.coord_frame(c.x1[p], c.x2[p], A);
      for (int fr = 0; fr < 2; ++fr)
        for (int co = 0; co < 2; ++co) c.coordA[fr][co][p] = A[fr][co];
    }
    // frames: Gram-Schmidt of the coordinate vectors w.r.t. gamma[0], then a
    // constant rotation, then the chosen propagation
    c.frame.resize(fol.M() + 1);
    for (auto& fr : c.frame)
      for (auto& v : fr) v.resize(np);
    double ca = std::cos(frame_angle), sa = std::sin(frame_angle);
    for (int p = 0; p < np; ++p) {
      double G[3];
      metric_frames_at(fol, 0.0, c.theta[p], c.phi[p], G);
      double v1[2] = {c.coordA[0][0][p], c.coordA[1][0][p]};
      double v2[2] = {c.coordA[0][1][p], c.coordA[1][1][p]};
      auto ip = [&](const double* a, const double* b) {
        return G[0] * a[0] * b[0] + G[1] * (a[0] * b[1] + a[1] * b[0]) +
               G[2] * a[1] * b[1];
      };
      double n1 = std::sqrt(ip(v1, v1));
      double e1[2] = {v1[0] / n1, v1[1] / n1};
      double pr = ip(v2, e1);
      double w2[2] = {v2[0] - pr * e1[0], v2[1] - pr * e1[1]};
      double n2 = std::sqrt(ip(w2, w2));
      double e2[2] = {w2[0] / n2, w2[1] / n2};
      double f1[2] = {ca * e1[0] + sa * e2[0], ca * e1[1] + sa * e2[1]};
      double f2[2] = {-sa * e1[0] + ca * e2[0], -sa * e1[1] + ca * e2[1]};
      c.frame[0][0][p] = f1[0];
      c.frame[0][1][p] = f1[1];
      c.frame[0][2][p] = f2[0];
      c.frame[0][3][p] = f2[1];
    }
    if (!parallel_frames || fol.is_conformal()) {
      // equivariant: constant coordinate components => constant round-frame
      // components; conformal parallel transport of vectors scales the
      // components by e^{-(u(tau)-u(0))}
      for (int j = 1; j <= fol.M(); ++j) {
        for (int p = 0; p < np; ++p) {
          double fac = 1.0;
          if (parallel_frames && fol.is_conformal()) {
            double u0 = synthesize_at(fol.u_at(0.0), c.theta[p], c.phi[p]).real();
            double ut = synthesize_at(fol.u_at(fol.tau(j)), c.theta[p], c.phi[p]).real();
            fac = std::exp(-(ut - u0));
          }
          for (int q = 0; q < 4; ++q) c.frame[j][q][p] = fac * c.frame[0][q][p];
        }
      }
    } else {
      // general family: per-point RK4 on nabla_t e = 0 for vectors
      int sub = 8;
      double h = fol.delta() / fol.M() / sub;
      std::vector<double> state = [&] {
        std::vector<double> s(4 * np);
        for (int p = 0; p < np; ++p)
          for (int q = 0; q < 4; ++q) s[q * np + p] = c.frame[0][q][p];
        return s;
      }();
      auto aup_at = [&](double t, int p, double A[2][2]) {
        double G[3];
        metric_frames_at(fol, t, c.theta[p], c.phi[p], G);
        SpinTensor gd = fol.gdot_at(t);
        cplx mm = synthesize_at(gd.comp[0], c.theta[p], c.phi[p]);
        cplx mmb = synthesize_at(gd.comp[1], c.theta[p], c.phi[p]);
        cplx mbm = synthesize_at(gd.comp[2], c.theta[p], c.phi[p]);
        cplx mbmb = synthesize_at(gd.comp[3], c.theta[p], c.phi[p]);
        const double is2 = 1.0 / std::sqrt(2.0);
        auto conv = [&](int f1, int f2) {
          cplx acc(0, 0);
          const cplx w[4] = {mm, mmb, mbm, mbmb};
          for (int word = 0; word < 4; ++word) {
            cplx fac(1.0, 0.0);
            int bits[2] = {(word >> 1) & 1, word & 1};
            int fb[2] = {f1, f2};
            for (int s = 0; s < 2; ++s)
              fac *= (fb[s] == 0)
                         ? cplx(is2, 0.0)
                         : ((bits[s] == 0) ? cplx(0.0, -is2) : cplx(0.0, is2));
            acc += fac * w[word];
          }
          return 0.5 * acc.real();  // k = gdot / 2
        };
        double K[3] = {conv(0, 0), conv(0, 1), conv(1, 1)};
        double det = G[0] * G[2] - G[1] * G[1];
        double i00 = G[2] / det, i01 = -G[1] / det, i11 = G[0] / det;
        A[0][0] = i00 * K[0] + i01 * K[1];
        A[0][1] = i00 * K[1] + i01 * K[2];
        A[1][0] = i01 * K[0] + i11 * K[1];
        A[1][1] = i01 * K[1] + i11 * K[2];
      };
      for (int j = 0; j < fol.M(); ++j) {
        for (int ss = 0; ss < sub; ++ss) {
          double t0 = fol.tau(j) + ss * h;
          parallel_for(np, [&](std::ptrdiff_t p) {
            double A0[2][2], Ah[2][2], A1[2][2];
            aup_at(t0, static_cast<int>(p), A0);
            aup_at(t0 + 0.5 * h, static_cast<int>(p), Ah);
            aup_at(t0 + h, static_cast<int>(p), A1);
            for (int vec = 0; vec < 2; ++vec) {
              double s0[2] = {state[(2 * vec) * np + p], state[(2 * vec + 1) * np + p]};
              auto F = [&](double A[2][2], const double* s, double* d) {
                d[0] = -(A[0][0] * s[0] + A[0][1] * s[1]);
                d[1] = -(A[1][0] * s[0] + A[1][1] * s[1]);
              };
              double k1[2], k2[2], k3[2], k4[2], tmp[2];
              F(A0, s0, k1);
              tmp[0] = s0[0] + 0.5 * h * k1[0];
              tmp[1] = s0[1] + 0.5 * h * k1[1];
              F(Ah, tmp, k2);
              tmp[0] = s0[0] + 0.5 * h * k2[0];
              tmp[1] = s0[1] + 0.5 * h * k2[1];
              F(Ah, tmp, k3);
              tmp[0] = s0[0] + h * k3[0];
              tmp[1] = s0[1] + h * k3[1];
              F(A1, tmp, k4);
              state[(2 * vec) * np + p] =
                  s0[0] + h / 6.0 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]);
              state[(2 * vec + 1) * np + p] =
                  s0[1] + h / 6.0 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]);
            }
          });
        }
        for (int p = 0; p < np; ++p)
          for (int q = 0; q < 4; ++q) c.frame[j + 1][q][p] = state[q * np + p];
      }
    }
    // basis rows for fast evaluation of spin fields at chart points
    if (cache_basis && np <= 20000) {
      int L = fol.L();
      for (int s = -4; s <= 4; ++s) {
        int lmin = std::abs(s);
        int nb = (L + 1) * (L + 1) - lmin * lmin;
        auto& B = c.basis[s + 4];
        B.assign(np, std::vector<cplx>(nb));
        parallel_for(np, [&](std::ptrdiff_t p) {
          std::vector<double> col;
          double sgn = (s % 2 == 0) ? 1.0 : -1.0;
          for (int m = -L; m <= L; ++m) {
            int base = std::max(std::abs(m), lmin);
            if (base > L) continue;
            wigner_d_column(m, -s, L, c.theta[p], col);
            for (int l = base; l <= L; ++l) {
              int idx = l * l - lmin * lmin + (m + l);
              B[p][idx] = sgn * std::sqrt((2.0 * l + 1.0) / kFourPi) *
                          col[l - base] * std::polar(1.0, m * c.phi[p]);
            }
          }
        });
      }
      c.basis_cached = true;
      c.basis_L = fol.L();
    }
  }
  return at;
}

namespace {

// evaluate a spin field at chart point p via the cached basis row
cplx eval_field(const Atlas::ChartData& c, const SpinField& f, int p) {
  int s = f.spin;
  if (c.basis_cached && f.band_limit == c.basis_L) {
    const auto& row = c.basis[s + 4][p];
    cplx acc(0, 0);
    for (size_t i = 0; i < row.size(); ++i) acc += row[i] * f.a[i];
    return acc;
  }
  return synthesize_at(f, c.theta[p], c.phi[p]);
}

}  // namespace

// frame components of a tensor at a chart point
void tensor_frame_at_point(const Atlas::ChartData& c, const SpinTensor& T, int p,
                           std::vector<double>& out) {
  int v = T.valence;
  out.assign(1 << v, 0.0);
  std::vector<cplx> words(1 << v);
  for (int w = 0; w < (1 << v); ++w) words[w] = eval_field(c, T.comp[w], p);
  const double is2 = 1.0 / std::sqrt(2.0);
  for (int fw = 0; fw < (1 << v); ++fw) {
    cplx acc(0, 0);
    for (int w = 0; w < (1 << v); ++w) {
      cplx fac(1.0, 0.0);
      for (int slot = 0; slot < v; ++slot) {
        int fbit = (fw >> (v - 1 - slot)) & 1;
        int mbit = (w >> (v - 1 - slot)) & 1;
        fac *= (fbit == 0) ? cplx(is2, 0.0)
                           : ((mbit == 0) ? cplx(0.0, -is2) : cplx(0.0, is2));
      }
      acc += fac * words[w];
    }
    out[fw] = acc.real();
  }
}

std::vector<std::vector<std::vector<double>>> scalar_reduce_node(
    const Atlas& atlas, const HorizontalField& f, int node, int weight) {
  int v = f.valence();
  int n = atlas.square.n;
  std::vector<std::vector<std::vector<double>>> out(2);
  for (int ci = 0; ci < 2; ++ci) {
    const auto& c = atlas.cd[ci];
    int np = static_cast<int>(c.pts.size());
    out[ci].assign(1 << v, std::vector<double>(static_cast<size_t>(n) * n, 0.0));
    std::vector<std::vector<double>> fcomp(np);
    parallel_for(np, [&](std::ptrdiff_t p) {
      tensor_frame_at_point(c, f.node[node], static_cast<int>(p), fcomp[p]);
    });
    for (int p = 0; p < np; ++p) {
      double G[3];
      atlas.metric_at_point(ci, p, node, G);
      // contraction vectors per slot value: lower slot -> frame vector e_a,
      // upper slot -> gamma-applied frame vector
      double low[2][2] = {{c.frame[node][0][p], c.frame[node][1][p]},
                          {c.frame[node][2][p], c.frame[node][3][p]}};
      double up[2][2];
      for (int a = 0; a < 2; ++a) {
        up[a][0] = G[0] * low[a][0] + G[1] * low[a][1];
        up[a][1] = G[1] * low[a][0] + G[2] * low[a][1];
      }
      double w = (weight == 0) ? c.eta[p] : ((weight == 1) ? c.eta_t[p] : 1.0);
      for (int multi = 0; multi < (1 << v); ++multi) {
        double acc = 0.0;
        for (int fw = 0; fw < (1 << v); ++fw) {
          double fac = 1.0;
          for (int slot = 0; slot < v; ++slot) {
            int a = (multi >> (v - 1 - slot)) & 1;   // which frame vector
            int fb = (fw >> (v - 1 - slot)) & 1;     // frame component
            fac *= (f.var[slot] == 1) ? low[a][fb] : up[a][fb];
          }
          acc += fac * fcomp[p][fw];
        }
        out[ci][multi][c.pts[p]] = w * acc;
      }
    }
  }
  return out;
}

double coordinate_besov(const Atlas& atlas, const HorizontalField& f, double a, double p,
                        double s, bool use_eta_tilde) {
  const Foliation& fol = *f.fol;
  int v = f.valence();
  int n = atlas.square.n;
  // assemble per-(chart, multi) Euclidean fields over all time nodes
  std::vector<std::vector<eucl::EuclideanField>> ef(2);
  for (int ci = 0; ci < 2; ++ci) {
    ef[ci].resize(1 << v);
    for (auto& e : ef[ci]) {
      e.grid = atlas.square;
      e.M = fol.M();
      e.delta = fol.delta();
      e.v.assign(fol.M() + 1, std::vector<double>(static_cast<size_t>(n) * n, 0.0));
    }
  }
  for (int j = 0; j <= fol.M(); ++j) {
    auto red = scalar_reduce_node(atlas, f, j, use_eta_tilde ? 1 : 0);
    for (int ci = 0; ci < 2; ++ci)
      for (int multi = 0; multi < (1 << v); ++multi) ef[ci][multi].v[j] = red[ci][multi];
  }
  double acc = 0.0;
  for (int ci = 0; ci < 2; ++ci)
    for (int multi = 0; multi < (1 << v); ++multi)
      acc += eucl::eucl_besov(ef[ci][multi], a, p, s);
  return acc;
}

// ---------------- regularity constants ----------------

Report regularity_constants(const Atlas& atlas, const std::string& level) {
  Report rep;
  const Foliation& fol = *atlas.fol;
  int M = fol.M();
  bool want1 = (level == "r1" || level == "r2" || level == "R1" || level == "R2" ||
                level == "F1" || level == "F2");
  bool want2 = (level == "r2" || level == "R2" || level == "F2");
  bool single = (level == "r0" || level == "r1" || level == "r2");
  int jmax = single ? 0 : M;

  double area_c = 0.0, pos_c = 0.0, deta = 0.0, d2eta = 0.0;
  for (int j = 0; j <= jmax; ++j) {
    double A = area(fol.metric_node(j));
    area_c = std::max({area_c, A, 1.0 / A});
  }
  for (int ci = 0; ci < 2; ++ci) {
    const auto& c = atlas.cd[ci];
    int np = static_cast<int>(c.pts.size());
    for (int j = 0; j <= jmax; ++j) {
      for (int p = 0; p < np; ++p) {
        double G[3];
        atlas.metric_at_point(ci, p, j, G);
        // coordinate components: Gc = A^T G A
        double A2[2][2];
        c.chart.coord_frame(c.x1[p], c.x2[p], A2);
        double g00 = 0, g01 = 0, g11 = 0;
        for (int x = 0; x < 2; ++x)
          for (int y = 0; y < 2; ++y) {
            double gxy = (x == 0 && y == 0) ? G[0] : ((x == 1 && y == 1) ? G[2] : G[1]);
            g00 += A2[x][0] * gxy * A2[y][0];
            g01 += A2[x][0] * gxy * A2[y][1];
            g11 += A2[x][1] * gxy * A2[y][1];
          }
        double tr = g00 + g11, det = g00 * g11 - g01 * g01;
        double disc = std::sqrt(std::max(0.0, tr * tr / 4 - det));
        double lmin = tr / 2 - disc, lmax = tr / 2 + disc;
        pos_c = std::max({pos_c, lmax, 1.0 / lmin});
      }
    }
    for (int p = 0; p < np; ++p) {
      double d = std::abs(bump_eta_d(c.chart.north == !atlas.swap_charts ? c.r[p]
                                                                          : c.r[p]));
      // |d eta| in chart coordinates: radial bump, |grad_coord r| = 1
      double rn = c.chart.north ? c.r[p] : 1.0 / c.r[p];
      double drn = c.chart.north ? 1.0 : 1.0 / (c.r[p] * c.r[p]);
      deta = std::max(deta, std::abs(bump_eta_d(rn)) * drn);
      (void)d;
      if (want2) {
        double h = 1e-4;
        auto eta_at = [&](double x1, double x2) {
          double rr = std::hypot(x1, x2);
          double rr_n = c.chart.north ? rr : 1.0 / rr;
          double e = bump_eta(rr_n);
          return c.chart.north ? e : 1.0 - e;
        };
        double exx = (eta_at(c.x1[p] + h, c.x2[p]) - 2 * eta_at(c.x1[p], c.x2[p]) +
                      eta_at(c.x1[p] - h, c.x2[p])) /
                     (h * h);
        double eyy = (eta_at(c.x1[p], c.x2[p] + h) - 2 * eta_at(c.x1[p], c.x2[p]) +
                      eta_at(c.x1[p], c.x2[p] - h)) /
                     (h * h);
        d2eta = std::max({d2eta, std::abs(exx), std::abs(eyy)});
      }
    }
  }
  rep.add(ratio_check(level + "/area_bound", "sec 2.4 / 3.3 area", area_c));
  rep.add(ratio_check(level + "/positivity", "uniform positivity", pos_c));
  rep.add(ratio_check(level + "/bump_derivative", "|d eta| <= C", deta));
  if (want2) rep.add(ratio_check(level + "/bump_second_derivative", "|d2 eta| <= C", d2eta));

  if (want1) {
    if (!fol.is_conformal())
      throw std::invalid_argument("frame derivative constants: conformal only");
    // ||nabla e||_{L^{infty,4}} over charts via finite differences of the
    // frame components on the chart lattice plus the connection terms
    double frame_c = 0.0, vd_c = 0.0, frame_on = 0.0, coordvec_c = 0.0;
    for (int ci = 0; ci < 2; ++ci) {
      const auto& c = atlas.cd[ci];
      int np = static_cast<int>(c.pts.size());
      // index chart points by pixel for FD neighbor lookup
      std::vector<int> pix2p(static_cast<size_t>(atlas.square.n) * atlas.square.n, -1);
      for (int p = 0; p < np; ++p) pix2p[c.pts[p]] = p;
      int n = atlas.square.n;
      double dx = atlas.square.dx();
      for (int j = 0; j <= jmax; ++j) {
        SpinField u = fol.u_at(fol.tau(j));
        SpinTensor du = round_nabla(scalar_tensor(u));
        double acc4 = 0.0, accv = 0.0, acc4z = 0.0;
        for (int p = 0; p < np; ++p) {
          if (c.r[p] > 1.45) continue;  // constants taken on supp eta~
          int px = c.pts[p] % n, py = c.pts[p] / n;
          int pr = pix2p[py * n + px + 1], pl = pix2p[py * n + px - 1];
          int pu = pix2p[(py + 1) * n + px], pd = pix2p[(py - 1) * n + px];
          if (pr < 0 || pl < 0 || pu < 0 || pd < 0) continue;
          double uu = synthesize_at(u, c.theta[p], c.phi[p]).real();
          std::vector<double> duf;
          tensor_frame_at_point(c, du, p, duf);
          double cot = std::cos(c.theta[p]) / std::sin(c.theta[p]);
          double G[3];
          atlas.metric_at_point(ci, p, j, G);
          auto nabla_vec = [&](int vec, double out[2][2], int node) {
            // partial derivatives of the round-frame comps along coords
            for (int co = 0; co < 2; ++co) {
              int pp = (co == 0) ? pr : pu;
              int pm = (co == 0) ? pl : pd;
              for (int fr = 0; fr < 2; ++fr) {
                double dcomp = (c.frame[node][2 * vec + fr][pp] -
                                c.frame[node][2 * vec + fr][pm]) /
                               (2 * dx);
                out[fr][co] = dcomp;
              }
              // round connection in the polar frame along the coordinate
              double Xth = c.coordA[0][co][p], Xph = c.coordA[1][co][p];
              double vth = c.frame[node][2 * vec + 0][p];
              double vph = c.frame[node][2 * vec + 1][p];
              out[0][co] += -cot * Xph * vph;
              out[1][co] += cot * Xph * vth;
              // conformal correction: C_{ab}^c = da u delta + db u delta - ...
              // for a vector (upper): (nabla_X V)^c += C_{X V}^c
              double dth = duf[0], dph = duf[1];
              double Xu = Xth * dth + Xph * dph;
              double Vu = vth * dth + vph * dph;
              double XdotV = (Xth * vth + Xph * vph);
              out[0][co] += Xu * vth + Vu * Xth - XdotV * dth;
              out[1][co] += Xu * vph + Vu * Xph - XdotV * dph;
            }
          };
          double n1[2][2], n2[2][2];
          nabla_vec(0, n1, j);
          nabla_vec(1, n2, j);
          // |nabla e|^2_gamma: lower the coordinate slot with the inverse
          // coordinate metric, measure the vector slot with gamma
          double A2[2][2];
          c.chart.coord_frame(c.x1[p], c.x2[p], A2);
          double gc00 = 0, gc01 = 0, gc11 = 0;
          for (int x = 0; x < 2; ++x)
            for (int y = 0; y < 2; ++y) {
              double gxy = (x == 0 && y == 0) ? G[0] : ((x == 1 && y == 1) ? G[2] : G[1]);
              gc00 += A2[x][0] * gxy * A2[y][0];
              gc01 += A2[x][0] * gxy * A2[y][1];
              gc11 += A2[x][1] * gxy * A2[y][1];
            }
          double det = gc00 * gc11 - gc01 * gc01;
          double ic00 = gc11 / det, ic01 = -gc01 / det, ic11 = gc00 / det;
          auto nsq = [&](double nv[2][2]) {
            double s = 0;
            for (int f1 = 0; f1 < 2; ++f1)
              for (int f2 = 0; f2 < 2; ++f2) {
                double gf = (f1 == f2) ? ((f1 == 0) ? G[0] : G[2]) : G[1];
                s += gf * (nv[f1][0] * (ic00 * nv[f2][0] + ic01 * nv[f2][1]) +
                           nv[f1][1] * (ic01 * nv[f2][0] + ic11 * nv[f2][1]));
              }
            return s;
          };
          double cell_measure = std::sqrt(det) * dx * dx;
          acc4 += std::pow(std::max(0.0, nsq(n1)), 2.0) * cell_measure;
          acc4 += std::pow(std::max(0.0, nsq(n2)), 2.0) * cell_measure;
          // orthonormality residual
          double e1[2] = {c.frame[j][0][p], c.frame[j][1][p]};
          double e2[2] = {c.frame[j][2][p], c.frame[j][3][p]};
          auto ipg = [&](const double* a, const double* b) {
            return G[0] * a[0] * b[0] + G[1] * (a[0] * b[1] + a[1] * b[0]) +
                   G[2] * a[1] * b[1];
          };
          frame_on = std::max({frame_on, std::abs(ipg(e1, e1) - 1.0),
                               std::abs(ipg(e2, e2) - 1.0), std::abs(ipg(e1, e2))});
          // area density gradient
          double vdp = std::sqrt(det);
          int prr = pix2p[py * n + px + 1];
          double grad_vd = 0.0;
          if (prr >= 0 && pl >= 0 && pu >= 0 && pd >= 0) {
            auto dens = [&](int q) {
              double Gq[3];
              metric_frames_at(fol, fol.tau(j), c.theta[q], c.phi[q], Gq);
              double Aq[2][2];
              c.chart.coord_frame(c.x1[q], c.x2[q], Aq);
              double a00 = 0, a01 = 0, a11 = 0;
              for (int x = 0; x < 2; ++x)
                for (int y = 0; y < 2; ++y) {
                  double gxy =
                      (x == 0 && y == 0) ? Gq[0] : ((x == 1 && y == 1) ? Gq[2] : Gq[1]);
                  a00 += Aq[x][0] * gxy * Aq[y][0];
                  a01 += Aq[x][0] * gxy * Aq[y][1];
                  a11 += Aq[x][1] * gxy * Aq[y][1];
                }
              return std::sqrt(a00 * a11 - a01 * a01);
            };
            double dvx = (dens(prr) - dens(pl)) / (2 * dx);
            double dvy = (dens(pu) - dens(pd)) / (2 * dx);
            grad_vd = ic00 * dvx * dvx + 2 * ic01 * dvx * dvy + ic11 * dvy * dvy;
            accv += std::max(0.0, grad_vd) * cell_measure;
          }
          (void)vdp;
          // equivariant coordinate vector field derivative (F2/R2)
          if (want2) {
            for (int vec = 0; vec < 2; ++vec) {
              double nc[2][2];
              for (int co = 0; co < 2; ++co) {
                int pp = (co == 0) ? pr : pu;
                int pm = (co == 0) ? pl : pd;
                for (int fr = 0; fr < 2; ++fr)
                  nc[fr][co] =
                      (c.coordA[fr][vec][pp] - c.coordA[fr][vec][pm]) / (2 * dx);
                double Xth = c.coordA[0][co][p], Xph = c.coordA[1][co][p];
                double vth = c.coordA[0][vec][p], vph = c.coordA[1][vec][p];
                nc[0][co] += -cot * Xph * vph;
                nc[1][co] += cot * Xph * vth;
                double dth = duf[0], dph = duf[1];
                double Xu = Xth * dth + Xph * dph;
                double Vu = vth * dth + vph * dph;
                double XdotV = Xth * vth + Xph * vph;
                nc[0][co] += Xu * vth + Vu * Xth - XdotV * dth;
                nc[1][co] += Xu * vph + Vu * Xph - XdotV * dph;
              }
              acc4z += std::max(0.0, nsq(nc)) * cell_measure;
            }
          }
        }
        frame_c = std::max(frame_c, std::pow(acc4, 0.25));
        vd_c = std::max(vd_c, std::sqrt(accv));
        if (want2) coordvec_c = std::max(coordvec_c, std::sqrt(acc4z));
      }
    }
    rep.add(ratio_check(level + "/frame_gradient_L4", "||nabla e||_{L^4}", frame_c));
    rep.add(ratio_check(level + "/area_density_gradient_L2", "||nabla theta||_{L^2}",
                        vd_c));
    rep.add(residual_check(level + "/frame_orthonormality", "gamma-orthonormal frames",
                           frame_on, 1e-8));
    if (want2)
      rep.add(ratio_check(level + "/coordvec_gradient_L2", "||nabla (e d)||_{L^2}",
                          coordvec_c));
  }

  if (level == "F0" || level == "F1" || level == "F2") {
    RegularityBounds rb = regularity_bounds(fol);
    rep.add(ratio_check(level + "/B_sff", "eqr.sff", rb.b_sff));
    if (level != "F0") {
      rep.add(ratio_check(level + "/B_sffd_tr", "eqr.sffd_tr", rb.b_sffd_tr));
      rep.add(ratio_check(level + "/B_sffcurl", "eqr.sffcurl", rb.b_sffcurl));
    }
    if (level == "F2") rep.add(ratio_check(level + "/B_sffd", "eqr.sffd", rb.b_sffd));
  }
  return rep;
}

}  // namespace geolab
