#pragma once

#include "geolab/foliation.hpp"

namespace geolab {

enum class ConeModel { minkowski, schwarzschild };

// geodesically foliated null cone with closed-form data: r(tau) = r0 + tau,
// gamma[tau] = r^2 * round; Schwarzschild rho = -2M/r^3
struct NullConeData {
  ConeModel model = ConeModel::minkowski;
  double mass = 0.0;
  double r0 = 1.0;
  double delta = 1.0;
  int M = 16, L = 15;
  Foliation gamma;
  bool vacuum = true;
  double perturb_amp = 0.0;
  std::uint64_t perturb_seed = 0;

  double r_of(double tau) const { return r0 + tau; }
  double trchi(double tau) const { return 2.0 / r_of(tau); }
  double trchib(double tau) const {
    double r = r_of(tau);
    return -(2.0 / r) * (1.0 - 2.0 * mass / r);
  }
  double rho(double tau) const {
    double r = r_of(tau);
    return -2.0 * mass / (r * r * r);
  }
};

NullConeData generate_cone(ConeModel model, double mass, double r0, double delta, int M,
                           int L);
NullConeData perturb_cone(const NullConeData& base, double amplitude,
                          std::uint64_t seed);

// residuals of the displayed structure equations (three evolution, three
// Bianchi, two Gauss-Codazzi) plus k = chi
Report structure_residuals(const NullConeData& data);

struct FluxReport {
  double flux = 0.0;            // five-term curvature flux (squares summed)
  double rho_l22_sq = 0.0;      // ||rho||^2_{L^{2,2}}
  double chi_n1 = 0.0;          // ||chi - r^{-1} gamma||_{N1} + L^{inf,2}_{x,t}
  double zeta_norm = 0.0;
  double chib_norm = 0.0;       // ||chib + r^{-1} gamma||_{L^{2,inf}_{x,t}}
};
FluxReport flux_and_bootstrap_norms(const NullConeData& data);
Report flux_report(const NullConeData& data);

}  // namespace geolab
