#pragma once

#include "geolab/charts.hpp"
#include "geolab/foliation.hpp"
#include "geolab/glp.hpp"

namespace geolab {

// dense symmetric-Hodge operators and pseudo-inverses on one surface, in the
// spin bases with the gamma-weighted inner products
class HodgeSystem {
 public:
  explicit HodgeSystem(const SurfaceMetric& m);

  const SurfaceMetric& metric() const { return *m_; }
  // apply D, D^{-1}, and the range projections P_i = D_i D_i^{-1}
  SpinField apply(WhichHodge which, const SpinField& x) const;
  SpinField inverse(WhichHodge which, const SpinField& x) const;
  SpinField range_projection(int i, const SpinField& x) const;  // P_1 on H0, P_2 on H1
  int kernel_dim(WhichHodge which) const;

 private:
  const SurfaceMetric* m_;
  int L_ = 0;
  Eigen::MatrixXcd d1_, d2_, d1s_, d2s_;        // operator matrices
  Eigen::MatrixXcd d1p_, d2p_, d1sp_, d2sp_;    // weighted pseudo-inverses
  Eigen::MatrixXcd rv_[3];                      // Cholesky factors of the Grams
  int kdim_[4] = {0, 0, 0, 0};
  Eigen::VectorXcd to_vec(const SpinField& x) const;
  SpinField from_vec(const Eigen::VectorXcd& v, int spin) const;
};

const HodgeSystem& hodge_system_for(const SurfaceMetric& m);
void clear_hodge_cache();

// condition K data: K - f = div V + W per node
struct CurvatureDecomposition {
  const Foliation* fol = nullptr;
  std::vector<SpinField> f, K;  // scalar per node
  std::vector<SpinField> V;     // spin +1 per node (1-form)
  std::vector<SpinField> W;     // scalar per node (the gamma-mean, constant)
  std::vector<SpinField> u;     // renormalization potential per node
  double C = 0.0, D = 0.0;
  double v_h12_x = 0.0;  // sup_t ||V||_{H^{1/2}_x}, reported beside the Besov norm
};

CurvatureDecomposition curvature_decompose(const Foliation& fol,
                                           const HorizontalField& f_pos);
// default f = 1
CurvatureDecomposition curvature_decompose(const Foliation& fol);

struct Renormalization {
  Foliation renormalized;
  CurvatureDecomposition decomp;
  double exact_identity_residual = 0.0;  // e^{2u} Kbar - (f + W)
  double l2_comparison_excess = 0.0;     // ||Kbar - e^{-2u} f|| vs ||e^{-2u} W||
};
Renormalization conformal_renormalize(const Foliation& fol,
                                      const CurvatureDecomposition& d);

Report renormalization_suite(const Foliation& fol, double tol);
Report elliptic_suite(const Foliation& fol, int trials, std::uint64_t seed);
Report besov_elliptic_suite(const Foliation& fol, int trials, std::uint64_t seed);

}  // namespace geolab
