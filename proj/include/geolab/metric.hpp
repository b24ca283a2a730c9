#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "geolab/report.hpp"
#include "geolab/spin_tensor.hpp"

namespace geolab {

// Tensor field on one surface. Storage is fully covariant in the fixed round
// frame; contravariant slots of the abstract (r,l) tensor are lowered with
// the round metric (a t- and metric-independent bijection), recorded in var:
// var[i] = 0 for an upper slot, 1 for a lower slot.
struct SurfaceField {
  SpinTensor ten;
  std::vector<int> var;

  SurfaceField() = default;
  SurfaceField(SpinTensor t, std::vector<int> v) : ten(std::move(t)), var(std::move(v)) {}

  int valence() const { return ten.valence; }
  int r() const {
    int n = 0;
    for (int v : var) n += (v == 0);
    return n;
  }
  int l() const { return valence() - r(); }
  int band() const { return ten.band_limit; }

  SurfaceField& operator+=(const SurfaceField& o) {
    ten += o.ten;
    return *this;
  }
  SurfaceField& operator-=(const SurfaceField& o) {
    ten -= o.ten;
    return *this;
  }
  SurfaceField& operator*=(double c) {
    ten *= c;
    return *this;
  }
  friend SurfaceField operator+(SurfaceField a, const SurfaceField& b) { return a += b; }
  friend SurfaceField operator-(SurfaceField a, const SurfaceField& b) { return a -= b; }
  friend SurfaceField operator*(double c, SurfaceField a) { return a *= c; }
};

SurfaceField make_scalar(const SpinField& f);
SurfaceField make_oneform(const SpinField& plus);          // (0,1)
SurfaceField make_h2(const SpinField& plus2);              // (0,2) symmetric traceless
SurfaceField make_field(SpinTensor t, std::vector<int> var);

// Hodge bundle sections (spin representations)
struct H0Section {
  SpinField f;  // spin 0, complex
};
struct H1Section {
  SpinField p;  // spin +1 component of a real 1-form; |X|^2 = 2|p|^2
};
struct H2Section {
  SpinField p;  // spin +2 component; |X|^2 = 2|p|^2
};

enum class WhichHodge { D1, D2, D1s, D2s };

// (S, gamma): either gamma = e^{2u} * round (spectral paths available) or a
// general symmetric positive 2-tensor (transport paths only).
class SurfaceMetric {
 public:
  static SurfaceMetric round_sphere(int L);
  static SurfaceMetric conformal(const SpinField& u);
  static SurfaceMetric general(const SpinTensor& g);

  bool is_conformal() const { return conformal_; }
  bool is_round() const;
  const SpinField& u() const { return u_; }
  const SpinTensor& g_tensor() const;  // covariant components (general only)
  int band_limit() const { return L_; }
  // band of the metric data itself (support of u, or of g - round)
  int data_band() const { return data_band_; }
  std::uint64_t digest() const { return digest_; }

  // per-grid sampled data, cached per grid
  struct GridData {
    const QuadratureGrid* grid = nullptr;
    std::vector<double> g00, g01, g11;        // frame components of gamma
    std::vector<double> inv00, inv01, inv11;  // gamma^{-1}
    std::vector<double> sqdet;                // volume density vs round
    std::vector<double> usamp;                // conformal only: u on grid
    // Levi-Civita difference tensor S_{ab}{}^c, frame components
    std::vector<double> chris[2][2][2];
  };
  const GridData& grid_data(const QuadratureGrid& g) const;

 private:
  SurfaceMetric() = default;
  bool conformal_ = true;
  int L_ = 0;
  int data_band_ = 0;
  SpinField u_;
  SpinTensor g_;
  std::uint64_t digest_ = 0;
  mutable std::shared_ptr<std::vector<std::shared_ptr<GridData>>> cache_ =
      std::make_shared<std::vector<std::shared_ptr<GridData>>>();
};

// ---- scalar grid helpers ----
std::vector<double> sample_real(const SpinField& f, const QuadratureGrid& g);
std::vector<cplx> sample_cplx(const SpinField& f, const QuadratureGrid& g);
SpinField project_real(const std::vector<double>& v, int spin, int L,
                       const QuadratureGrid& g);
// f * w projected at out_band (exact when w band-limited and grid large enough)
SpinField multiply_real(const SpinField& f, const std::vector<double>& w, int out_band,
                        const QuadratureGrid& g);

// grid sized so products of bands b1 and b2 project exactly
const QuadratureGrid& product_grid(int b1, int b2);

// ---- surface operations ----

// K = e^{-2u} (1 - lapl-hat u), projected at out_band (default: L + data band)
SpinField gauss_curvature(const SurfaceMetric& m, int out_band = -1);

// gamma-Levi-Civita covariant differential; derivative slot first (lower).
// Exact band growth for conformal metrics; general metrics use a padded band.
SurfaceField covariant_derivative(const SurfaceMetric& m, const SurfaceField& F);

// pointwise-exact covariant derivative assembled on a grid (no projection);
// the substrate of every identity residual
GridTensor covariant_derivative_grid(const SurfaceMetric& m, const SurfaceField& F,
                                     const QuadratureGrid& g);

// pointwise |F|_gamma^2 sampled on a grid
std::vector<double> pointwise_norm_sq(const SurfaceMetric& m, const SurfaceField& F,
                                      const QuadratureGrid& g);
std::vector<double> pointwise_norm_sq_grid(const SurfaceMetric& m, const GridTensor& T,
                                           const std::vector<int>& var,
                                           const QuadratureGrid& g);
// integral against the gamma area measure of grid samples
double integrate_measure(const SurfaceMetric& m, const std::vector<double>& f,
                         const QuadratureGrid& g);

double lq_norm(const SurfaceMetric& m, const SurfaceField& F, double q);
double area(const SurfaceMetric& m);

// trace of nabla^2 (direct Bochner route, any metric)
SurfaceField bochner_direct(const SurfaceMetric& m, const SurfaceField& F);
// Hodge-identity route (conformal; scalar / 1-form / valence-2 by pieces)
SurfaceField bochner_laplacian(const SurfaceMetric& m, const SurfaceField& F);

// symmetric Hodge operators w.r.t. a conformal metric
H0Section hodge_d1(const SurfaceMetric& m, const H1Section& x, int out_band = -1);
H1Section hodge_d1s(const SurfaceMetric& m, const H0Section& x);  // exact
H1Section hodge_d2(const SurfaceMetric& m, const H2Section& x, int out_band = -1);
H2Section hodge_d2s(const SurfaceMetric& m, const H1Section& x, int out_band = -1);

// L2(gamma) pairings of bundle sections (real-valued)
double bundle_inner(const SurfaceMetric& m, const H0Section& a, const H0Section& b);
double bundle_inner(const SurfaceMetric& m, const H1Section& a, const H1Section& b);
double bundle_inner(const SurfaceMetric& m, const H2Section& a, const H2Section& b);

SurfaceMetric conformal_compose(const SurfaceMetric& m, const SpinField& v);

// gamma-irreducible pieces of a covariant valence-2 field:
// F = (trace/2) gamma + (antisym/2) eps + h2-part
struct Sym2Pieces {
  SpinField trace;    // gamma^{ab} F_ab, spin 0
  SpinField antisym;  // eps^{ab} F_ab, spin 0
  SpinField h2;       // spin +2 component of the symmetric traceless part
};
Sym2Pieces decompose2(const SurfaceMetric& m, const SurfaceField& F);

// conversions between H-sections and tensor fields
SurfaceField field_of(const H1Section& x);
SurfaceField field_of(const H2Section& x);

// random test fields
SurfaceField random_surface_field(std::uint64_t seed, int rank, int band_lo, int band_hi,
                                  double scale, int L);
SpinField random_conformal_factor(std::uint64_t seed, int band_lo, int band_hi,
                                  double amp_inf, int L);

// ---- verification suites (surface module) ----
Report surface_identity_suite(int L, int trials, std::uint64_t seed, double tol);
Report gns_suite(const SurfaceMetric& m, int trials, std::uint64_t seed);

}  // namespace geolab
