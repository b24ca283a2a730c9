#pragma once

#include <Eigen/Dense>

#include "geolab/metric.hpp"

namespace geolab {

// smooth cutoff: chi = 1 on (-inf,1], 0 on [4,infty), exp(-1/t) transition;
// sigma(x) = chi(x) - chi(4x), supported on [1/4, 4], telescoping partition
// of unity sum_k sigma(4^{-k} lambda) = 1 for lambda > 0
double lp_chi(double x);
double lp_sigma(double x);

enum class Bundle { scalar, h1, h2 };
int bundle_spin(Bundle b);

// eigen-decomposition of -lapl_gamma on one bundle, as the generalized
// symmetric pencil A v = lambda G v over the round spin basis
struct SpectralDecomposition {
  Bundle bundle = Bundle::scalar;
  int L = 0;
  std::uint64_t metric_digest = 0;
  std::vector<double> eigenvalues;  // ascending, kernel clamped to exactly 0
  Eigen::MatrixXcd V;   // columns gamma-orthonormal: V^H G V = I
  Eigen::MatrixXcd GV;  // G V, for coefficient extraction
  int kernel_dim = 0;
  int k_max = 0;  // largest k with a populated band

  Eigen::VectorXcd expand(const SpinField& x) const;
  SpinField synth(const Eigen::VectorXcd& e) const;
  double lambda_max() const { return eigenvalues.empty() ? 0.0 : eigenvalues.back(); }
};

// matrix of f -> (w f) from the spin_in basis to the spin_out basis, w given
// by complex grid samples; theta-separated assembly
Eigen::MatrixXcd transfer_matrix(int spin_out, int spin_in, int L,
                                 const std::vector<cplx>& w, const QuadratureGrid& g);

SpectralDecomposition build_decomposition(const SurfaceMetric& m, Bundle b);
// process-wide cache keyed by (metric digest, bundle)
const SpectralDecomposition& decomposition_for(const SurfaceMetric& m, Bundle b);
void clear_decomposition_cache();

// selector for the smoothed spectral projectors
struct LpSelector {
  enum Kind { band, below, kernel, near, upto } kind = band;  // P_k, P_{<k}, P_-, P_{~k}, P_{<~k}
  int k = 0;
  static LpSelector P(int k) { return {band, k}; }
  static LpSelector Below(int k) { return {below, k}; }
  static LpSelector Minus() { return {kernel, 0}; }
  static LpSelector Near(int k) { return {near, k}; }
  static LpSelector UpTo(int k) { return {upto, k}; }
};

double lp_multiplier(const LpSelector& s, double lambda);
SpinField lp_apply(const SpectralDecomposition& d, const LpSelector& s, const SpinField& x);

// per-band L2(gamma) norms of a section: low = ||P_{<0} x||, k[j] = ||P_j x||
struct BandProfile {
  double low = 0.0;
  std::vector<double> k;
};
BandProfile band_profile(const SpectralDecomposition& d, const SpinField& x);
BandProfile band_profile_field(const SurfaceMetric& m, const SurfaceField& F);
// l^a aggregation of 2^{sk} band norms plus the low term
double besov_aggregate(const BandProfile& p, double a, double s);

double besov_norm_x(const SpectralDecomposition& d, const SpinField& x, double a, double s);
double besov_norm_field(const SurfaceMetric& m, const SurfaceField& F, double a, double s);
double sobolev_norm(const SpectralDecomposition& d, const SpinField& x, double s);
double sobolev_norm_field(const SurfaceMetric& m, const SurfaceField& F, double s);

// ||nabla P_k x||_{L2 gamma} via <-lapl P_k x, P_k x>^{1/2} (exact in the pencil)
double grad_norm_banded(const SpectralDecomposition& d, const LpSelector& s,
                        const SpinField& x);

// property suites
Report lp_structure_suite(const SurfaceMetric& m, int trials, std::uint64_t seed,
                          int k_lo = 2, int k_hi = -1, bool scalar_only = false);
Report lp_property_suite(const SurfaceMetric& m, int trials, std::uint64_t seed);

}  // namespace geolab
