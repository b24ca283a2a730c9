#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "geolab/report.hpp"

namespace geolab::eucl {

using cplx = std::complex<double>;

// in-place radix-2 2D FFT on an n x n complex array (n a power of two)
void fft2(std::vector<cplx>& a, int n, bool inverse);

struct EuclGrid {
  int n = 64;      // points per side, power of two
  double T = 4.0;  // periodic square [-T, T)^2
  double dx() const { return 2.0 * T / n; }
  double cell() const { return dx() * dx(); }
  // signed frequency of index i: xi = (pi/T) * m, m in [-n/2, n/2)
  double freq(int i) const {
    int m = (i <= n / 2 - 1) ? i : i - n;
    return (3.14159265358979323846 / T) * m;
  }
};

// scalar field on [0, delta] x square; optional analytic time derivative
struct EuclideanField {
  EuclGrid grid;
  int M = 16;  // time intervals; M+1 nodes
  double delta = 1.0;
  std::vector<std::vector<double>> v;   // per node, size n*n
  std::vector<std::vector<double>> dt;  // analytic d/dt samples when present
  bool has_dt = false;

  int nodes() const { return M + 1; }
  double tau(int j) const { return delta * j / M; }
};

// frequency-radius cutoff: sigma_f(t) = chi(t^2) - chi(4 t^2), supp [1/2, 2]
double sigma_freq(double t);

struct LpSel {
  enum Kind { band, below, near } kind = band;
  int k = 0;
  static LpSel E(int k) { return {band, k}; }
  static LpSel Below(int k) { return {below, k}; }
  static LpSel Near(int k) { return {near, k}; }
};
double eucl_multiplier(const LpSel& s, double xi_abs);

// per-time-node projection
EuclideanField e_project(const EuclideanField& f, const LpSel& s);

// 4th-order time quadrature weights on M+1 uniform nodes
std::vector<double> time_weights(int M, double delta);
// cumulative 4th-order integral from 0; result node j = int_0^{tau_j}
std::vector<std::vector<double>> cumulative_integral(const EuclideanField& f);
EuclideanField t_integral(const EuclideanField& f);
// 4th-order d/dt (uses analytic samples when present)
std::vector<std::vector<double>> dt_samples(const EuclideanField& f);

// norms
double l2x(const EuclGrid& g, const std::vector<double>& slice);
// || . ||_{L^{p,2}_{t,x}}
double lp2_tx(const EuclideanField& f, double p);
// || . ||_{L^{q,p}_{x,t}} (x outside)
double lqp_xt(const EuclideanField& f, double q, double p);
double linf_inf(const EuclideanField& f);
// band profile: low + per-k  L^{p,2}_{t,x} norms of the projections
struct EBandProfile {
  double low = 0.0;
  std::vector<double> k;  // k = 0..k_max
};
EBandProfile band_profile(const EuclideanField& f, double p);
double eucl_besov(const EuclideanField& f, double a, double p, double s);
// spatial Besov / Sobolev norm of one time slice
double slice_besov(const EuclGrid& g, const std::vector<double>& slice, double a, double s);
double slice_hs(const EuclGrid& g, const std::vector<double>& slice, double s);
// N^1 norm = ||dt|| + ||grad|| + ||.||, all L^{2,2}
double n1_norm(const EuclideanField& f);

int k_max_for(const EuclGrid& g);

// deterministic random band-limited field with analytic time dependence
EuclideanField random_field(std::uint64_t seed, const EuclGrid& g, int M, double delta,
                            double freq_cap_frac = 0.33, bool t_parallel = false);

// verification suites (Appendix A)
Report eucl_lp_invariants(int n, int trials, std::uint64_t seed);
Report eucl_product_suite(int n, int trials, std::uint64_t seed);
Report eucl_trace_embedding_suite(int n, int trials, std::uint64_t seed);
Report eucl_intertwining_decay(int n, std::uint64_t seed);

}  // namespace geolab::eucl
