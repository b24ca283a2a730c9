#include "geolab/grid.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace geolab {

namespace {
constexpr double kPi = 3.14159265358979323846264338327950288;
}

double QuadratureGrid::node_measure(int i) const {
  return weight[i] * (2.0 * kPi / n_phi);
}

void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int k = 0; k < n; ++k) {
    // Chebyshev initial guess, Newton on P_n
    double xi = std::cos(kPi * (k + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = xi;
      for (int l = 2; l <= n; ++l) {
        double p2 = ((2 * l - 1) * xi * p1 - (l - 1) * p0) / l;
        p0 = p1;
        p1 = p2;
      }
      double dp = n * (xi * p1 - p0) / (xi * xi - 1.0);
      double dx = p1 / dp;
      xi -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    double p0 = 1.0, p1 = xi;
    for (int l = 2; l <= n; ++l) {
      double p2 = ((2 * l - 1) * xi * p1 - (l - 1) * p0) / l;
      p0 = p1;
      p1 = p2;
    }
    double dp = n * (xi * p1 - p0) / (xi * xi - 1.0);
    x[k] = xi;
    w[k] = 2.0 / ((1.0 - xi * xi) * dp * dp);
  }
}

QuadratureGrid make_grid(int band_limit, int n_theta) {
  if (n_theta < 0) n_theta = band_limit + 1;
  if (n_theta < band_limit + 1) throw std::invalid_argument("grid too small for band limit");
  QuadratureGrid g;
  g.band_limit = band_limit;
  g.n_theta = n_theta;
  g.n_phi = 2 * n_theta;
  if (g.n_phi < 2 * band_limit + 1) throw std::invalid_argument("n_phi < 2L+1");
  gauss_legendre(n_theta, g.ctheta, g.weight);
  g.theta.resize(n_theta);
  for (int i = 0; i < n_theta; ++i) g.theta[i] = std::acos(g.ctheta[i]);
  g.phi.resize(g.n_phi);
  for (int j = 0; j < g.n_phi; ++j) g.phi[j] = 2.0 * kPi * j / g.n_phi;
  return g;
}

namespace {
std::mutex cache_mutex;
std::map<std::pair<int, int>, QuadratureGrid> grid_cache;

const QuadratureGrid& cached(int L, int nt) {
  std::lock_guard<std::mutex> lock(cache_mutex);
  auto key = std::make_pair(L, nt);
  auto it = grid_cache.find(key);
  if (it == grid_cache.end()) it = grid_cache.emplace(key, make_grid(L, nt)).first;
  return it->second;
}
}  // namespace

const QuadratureGrid& grid_for(int band_limit) {
  return cached(band_limit, band_limit + 1);
}

const QuadratureGrid& work_grid_for(int band_limit) {
  return cached(band_limit, 2 * (band_limit + 1));
}

}  // namespace geolab
