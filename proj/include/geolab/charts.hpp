#pragma once

#include "geolab/eucl.hpp"
#include "geolab/foliation.hpp"

namespace geolab {

// radial bumps: eta = 1 on r <= 1.0, 0 on r >= 1.4; eta~ = 1 on r <= 1.42
// (hence on supp eta), 0 on r >= 1.58
double bump_eta(double r);
double bump_eta_d(double r);
double bump_eta_tilde(double r);

// stereographic chart pair: north projects from the south pole
// (zeta = tan(theta/2) e^{i phi}), south from the north pole
// (zeta = cot(theta/2) e^{-i phi}); disks |x| <= 1.6 inside the square
struct Chart {
  bool north = true;
  void to_sphere(double x1, double x2, double& theta, double& phi) const;
  // coordinate vector fields in the round polar frame: A[frame][coord]
  void coord_frame(double x1, double x2, double A[2][2]) const;
  double radius_at(double theta) const;  // chart radius of a sphere point
};

class Atlas {
 public:
  const Foliation* fol = nullptr;
  eucl::EuclGrid square;  // periodic square carrying the reduced components
  bool parallel_frames = true;
  double frame_angle = 0.0;  // constant rotation applied to the tau=0 frames
  bool swap_charts = false;  // relabeling probe

  struct ChartData {
    Chart chart;
    std::vector<int> pts;  // linear indices into the square grid, r <= 1.6
    std::vector<double> x1, x2, r;
    std::vector<double> theta, phi;
    std::vector<double> eta, eta_t;
    std::vector<double> coordA[2][2];  // coordinate vectors, round frame
    // frames per node: round-frame components e[a][frame], a in {0,1}
    std::vector<std::array<std::vector<double>, 4>> frame;
    // cached spin-basis rows per spin s in [-4, 4] when small enough
    std::vector<std::vector<cplx>> basis[9];
    bool basis_cached = false;
    int basis_L = -1;
  };
  ChartData cd[2];

  // eta of the OTHER chart evaluated here completes the partition of unity
  // metric frame components at a chart point, per node
  void metric_at_point(int chart, int pt, int node, double G[3]) const;
};

Atlas build_atlas(const Foliation& fol, bool parallel_frames, int n_square = 64,
                  double frame_angle = 0.0, bool swap_charts = false,
                  bool cache_basis = true);

// round-frame components of a tensor at one chart point
void tensor_frame_at_point(const Atlas::ChartData& c, const SpinTensor& T, int pt,
                           std::vector<double>& out);

// values of all 2^{r+l} frame contractions eta_i Psi(X) at one node, as
// square-grid fields (zero-extended); comp[chart][multi][pixel]
// weight: 0 = eta, 1 = eta-tilde, 2 = none
std::vector<std::vector<std::vector<double>>> scalar_reduce_node(
    const Atlas& atlas, const HorizontalField& f, int node, int weight = 0);

// coordinate Besov norm: sum over charts and frame words of the Euclidean
// B^{a,p,s} norms of the reduced components
double coordinate_besov(const Atlas& atlas, const HorizontalField& f, double a, double p,
                        double s, bool use_eta_tilde = false);

// regularity constants report for one level
Report regularity_constants(const Atlas& atlas, const std::string& level);

Report scalar_reduction_identities(const Atlas& atlas, int trials, std::uint64_t seed,
                                   double tol);
Report besov_comparison_suite(const Atlas& atlas, int trials, std::uint64_t seed);
Report mixed_intertwining_decay(const Foliation& fol, std::uint64_t seed, int n_square);
Report geometric_product_suite(const Foliation& fol, int trials, std::uint64_t seed);
Report sharp_trace_check(const Foliation& fol, int trials, std::uint64_t seed);

}  // namespace geolab
