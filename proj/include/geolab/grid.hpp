#pragma once

#include <vector>

namespace geolab {

// Gauss-Legendre colatitude nodes x equispaced longitudes. n_theta = L+1
// makes quadrature of a product of two band-L scalars exact; oversampled
// grids (n_theta > L+1) carry the same band_limit tag of the fields they
// serve and are used for nonlinear terms.
struct QuadratureGrid {
  int n_theta = 0;
  int n_phi = 0;       // = 2 * n_theta
  int band_limit = 0;  // max degree L this grid transforms exactly
  std::vector<double> ctheta;  // cos(theta_i), Gauss-Legendre nodes
  std::vector<double> theta;
  std::vector<double> weight;  // GL weights (sum = 2)
  std::vector<double> phi;

  int n_nodes() const { return n_theta * n_phi; }
  int node(int i, int j) const { return i * n_phi + j; }
  // measure of one node for the round sphere: w_i * 2pi/n_phi
  double node_measure(int i) const;
};

QuadratureGrid make_grid(int band_limit, int n_theta = -1);

// process-wide caches; grids are immutable after construction
const QuadratureGrid& grid_for(int band_limit);
// grid able to project products of two band-L fields exactly
const QuadratureGrid& work_grid_for(int band_limit);

void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w);

}  // namespace geolab
