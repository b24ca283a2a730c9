#pragma once

#include "geolab/grid.hpp"
#include "geolab/rng.hpp"
#include "geolab/spin_field.hpp"

namespace geolab {

inline constexpr double kPi = 3.14159265358979323846264338327950288;
inline constexpr double kFourPi = 4.0 * kPi;

// public transforms enforce the |spin| <= 2 contract; the detail:: variants
// accept |spin| <= 4 for the internal tensor calculus (derivatives of rank-2
// objects reach spin 4)
namespace detail {
void synthesis(const SpinField& f, const QuadratureGrid& g, std::vector<cplx>& out);
void synthesis_serial(const SpinField& f, const QuadratureGrid& g, std::vector<cplx>& out);
SpinField analysis(const std::vector<cplx>& samples, int spin, int L_out,
                   const QuadratureGrid& g);
SpinField analysis_serial(const std::vector<cplx>& samples, int spin, int L_out,
                          const QuadratureGrid& g);
}  // namespace detail

// forward_transform: grid samples -> coefficients of the band-limited
// interpolant. inverse_transform: pointwise synthesis on the grid.
SpinField forward_transform(const std::vector<cplx>& samples, int spin,
                            const QuadratureGrid& g);
std::vector<cplx> inverse_transform(const SpinField& f, const QuadratureGrid& g);

enum class EthDirection { raise, lower };
SpinField eth(const SpinField& f, EthDirection dir);
namespace detail {
SpinField eth_any(const SpinField& f, EthDirection dir);  // no spin cap
}

// spin-weighted round Laplacian: coefficient multiplier -(l(l+1) - s^2)
SpinField round_laplacian(const SpinField& f);

// integral over the round sphere (spin 0 only)
cplx integrate_round(const SpinField& f);
cplx integrate_grid(const std::vector<cplx>& samples, const QuadratureGrid& g);

// conjugate field: spin -s, c'_{l,m} = (-1)^{s+m} conj(c_{l,-m})
SpinField conj_field(const SpinField& f);

inline bool is_real_field(const SpinField& f, double tol = 1e-12) {
  SpinField c = conj_field(f);
  double d = 0.0;
  for (int i = 0; i < f.size(); ++i) d += std::norm(c.a[i] - f.a[i]);
  return std::sqrt(d) <= tol * (1.0 + f.l2_norm());
}

// deterministic pseudo-random field, unit L2 norm times scale, degrees in
// [l_lo, l_hi]; real = conjugate-symmetric (spin 0 only)
SpinField random_band_limited(std::uint64_t seed, int spin, int l_lo, int l_hi,
                              double scale, int band_limit, bool real = false);

// single-harmonic helpers
SpinField unit_harmonic(int spin, int l, int m, int band_limit);
cplx eval_harmonic(int spin, int l, int m, double theta, double phi);
// real spin-0 harmonic basis element (m=0: Yl0; m>0: sqrt2 Re Ylm; m<0: sqrt2 Im Yl|m|)
SpinField real_harmonic(int l, int m, int band_limit);

// pointwise synthesis at an arbitrary point (used by the chart machinery)
cplx synthesize_at(const SpinField& f, double theta, double phi);

}  // namespace geolab
