#pragma once

#include <functional>
#include <memory>
#include <optional>

#include "geolab/glp.hpp"
#include "geolab/metric.hpp"

namespace geolab {

// N = [0, delta] x S with an evolving metric family, callable at arbitrary
// tau (closed-form families carry analytic time derivatives; file-loaded
// families interpolate their node data at 4th order).
class Foliation {
 public:
  using ConfFn = std::function<SpinField(double)>;
  using GenFn = std::function<SpinTensor(double)>;

  static Foliation conformal(double delta, int M, int L, ConfFn u, ConfFn udot);
  static Foliation general(double delta, int M, int L, GenFn g, GenFn gdot);
  // gamma[tau] = (1+tau)^2 * round
  static Foliation expanding(double delta, int M, int L);
  // u(tau) = u0 + tau * v
  static Foliation conformal_linear(const SpinField& u0, const SpinField& v, double delta,
                                    int M);
  // u(tau) = amp * (cos(w1 tau) A + sin(w2 tau) B), A, B random band [1, band_hi]
  static Foliation conformal_wave(std::uint64_t seed, double amp, int band_hi,
                                  double delta, int M, int L);
  // g(tau) = round + tau * h + (tau^2/2) h2, h random symmetric (sheared k)
  static Foliation sheared(std::uint64_t seed, double amp, int band_hi, double delta,
                           int M, int L);
  static Foliation static_metric(const SurfaceMetric& m, double delta, int M);

  double delta() const { return delta_; }
  int M() const { return M_; }
  int L() const { return L_; }
  bool is_conformal() const { return conformal_; }
  int data_band() const { return data_band_; }
  double tau(int j) const { return delta_ * j / M_; }

  SpinField u_at(double tau) const;
  SpinField udot_at(double tau) const;
  SpinTensor g_at(double tau) const;
  SpinTensor gdot_at(double tau) const;
  const SurfaceMetric& metric_node(int j) const;  // cached, digest-stable
  SurfaceMetric metric_at(double tau) const;

  // second-fundamental-form correction matrices on a grid at time tau:
  // alow = k gamma^{-1}, aup = gamma^{-1} k (frame components), plus trk
  struct KData {
    std::vector<double> alow[2][2], aup[2][2], trk;
  };
  KData k_data(double tau, const QuadratureGrid& g) const;

  // serialization (JSON manifest + float64 node blobs)
  void save(const std::string& path) const;
  static Foliation load(const std::string& path);

 private:
  double delta_ = 1.0;
  int M_ = 16, L_ = 15;
  bool conformal_ = true;
  bool analytic_ = true;
  int data_band_ = 0;
  ConfFn u_, udot_;
  GenFn g_, gdot_;
  mutable std::shared_ptr<std::vector<std::shared_ptr<SurfaceMetric>>> node_cache_ =
      std::make_shared<std::vector<std::shared_ptr<SurfaceMetric>>>();
};

// time-indexed family of surface fields
struct HorizontalField {
  const Foliation* fol = nullptr;
  std::vector<int> var;
  std::vector<SpinTensor> node;
  std::function<SpinTensor(double)> value_fn, dt_fn;  // component-wise d/dtau
  bool has_fn = false;
  enum class Provenance { generic, equivariant, t_parallel } prov = Provenance::generic;

  int valence() const { return var.empty() ? (node.empty() ? 0 : node[0].valence)
                                           : static_cast<int>(var.size()); }
  int band() const { return node.empty() ? 0 : node[0].band_limit; }
  SpinTensor at(double tau) const;  // value_fn or 4th-order interpolation
  SurfaceField field_at_node(int j) const { return make_field(node[j], var); }
};

HorizontalField make_horizontal(const Foliation& fol, std::vector<int> var,
                                std::function<SpinTensor(double)> value,
                                std::function<SpinTensor(double)> dt = nullptr);
// random field with analytic cos/sin time envelopes
HorizontalField random_horizontal(const Foliation& fol, std::uint64_t seed, int rank,
                                  int band_lo, int band_hi, double omega_max = 1.0);

// vertical Lie derivative (component-wise d/dtau)
HorizontalField lie_t(const HorizontalField& f);
// covariant t-derivative
HorizontalField nabla_t(const HorizontalField& f);
// grid-assembled nabla_t at one node (pointwise, for residual checks)
GridTensor nabla_t_grid(const HorizontalField& f, int node, const QuadratureGrid& g);
// covariant t-integral: unique F with nabla_t F = f, F[0] = 0 (RK4, substeps)
HorizontalField covariant_integral(const HorizontalField& f, int substeps = 8);
// transports of an initial surface field
enum class TransportMode { parallel, equivariant };
HorizontalField transport(const Foliation& fol, const SurfaceField& initial,
                          TransportMode mode, int substeps = 8);

// second fundamental form bundle
struct SecondFormBundle {
  HorizontalField k;      // (0,2)
  HorizontalField trk;    // scalar
  HorizontalField curl;   // (0,3): C_abc = nabla_b k_ac - nabla_c k_ab
  // pointwise Jacobian on a grid at time tau
  std::function<std::vector<double>(double, const QuadratureGrid&)> jacobian;
};
SecondFormBundle second_form(const Foliation& fol);

// jacobian samples J(tau) on a grid (exact for conformal families)
std::vector<double> jacobian_grid(const Foliation& fol, double tau,
                                  const QuadratureGrid& g);

// mixed norms
enum class NormOrder { tx, xt };
double mixed_norm(const HorizontalField& f, NormOrder order, double p, double q);
double n1_norm(const HorizontalField& f);
// time-integrated geometric Besov norm B^{a,p,s}_{l,t,x}
double besov_tx(const HorizontalField& f, double a, double p, double s);
// band profile across time: per-k L^{p,2}_{t,x} pieces
BandProfile band_profile_tx(const HorizontalField& f, double p);

struct RegularityBounds {
  double b_sff_tr, b_sff, b_sffd_tr, b_sffd, b_sffcurl;
};
RegularityBounds regularity_bounds(const Foliation& fol);

// verification suites
Report evolution_identity_suite(const Foliation& fol, int trials, std::uint64_t seed,
                                double tol);
Report commutator_suite(const Foliation& fol, int trials, std::uint64_t seed, double tol);
Report transport_estimate_suite(const Foliation& fol, int trials, std::uint64_t seed);
Report jacobian_identity_check(const Foliation& fol, double tol);
Report integral_convergence_study(std::uint64_t seed);

}  // namespace geolab
