#include "geolab/wigner.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace geolab {

namespace {

double lfact(int n) { return std::lgamma(static_cast<double>(n) + 1.0); }

// Seed value at l0 = max(|m|,|n|): the defining sum collapses to one term.
double seed_value(int m, int n, double theta) {
  int l = std::max(std::abs(m), std::abs(n));
  double c = std::cos(0.5 * theta);
  double s = std::sin(0.5 * theta);
  // k-range of the Wigner sum: max(0, n-m) <= k <= min(l+n, l-m); at l = l0
  // exactly one k survives.
  int klo = std::max(0, n - m);
  int khi = std::min(l + n, l - m);
  if (klo != khi) std::abort();  // seed must be a single term
  int k = klo;
  double lg = 0.5 * (lfact(l + n) + lfact(l - n) + lfact(l + m) + lfact(l - m)) -
              lfact(l + n - k) - lfact(k) - lfact(l - k - m) - lfact(k - n + m);
  int cpow = 2 * l - 2 * k + n - m;
  int spow = 2 * k - n + m;
  double sign = ((k - n + m) % 2 == 0) ? 1.0 : -1.0;
  double cf = (cpow == 0) ? 1.0 : std::pow(c, cpow);
  double sf = (spow == 0) ? 1.0 : std::pow(s, spow);
  return sign * std::exp(lg) * cf * sf;
}

}  // namespace

void wigner_d_column(int m, int n, int L, double theta, std::vector<double>& out) {
  int l0 = std::max(std::abs(m), std::abs(n));
  out.assign(std::max(0, L - l0 + 1), 0.0);
  if (L < l0) return;
  double x = std::cos(theta);
  double dlm1 = 0.0;
  double dl = seed_value(m, n, theta);
  out[0] = dl;
  for (int l = l0; l < L; ++l) {
    double wl = std::sqrt(double(l * l - m * m) * double(l * l - n * n));
    double wl1 = std::sqrt(double((l + 1) * (l + 1) - m * m) * double((l + 1) * (l + 1) - n * n));
    double next;
    if (l == 0) {
      // only occurs for m = n = 0: d^1_00 = x
      next = x;
    } else {
      next = ((2 * l + 1) * (l * (l + 1) * x - double(m) * n) * dl - (l + 1) * wl * dlm1) /
             (l * wl1);
    }
    dlm1 = dl;
    dl = next;
    out[l + 1 - l0] = dl;
  }
}

double wigner_d(int l, int m, int n, double theta) {
  std::vector<double> col;
  wigner_d_column(m, n, l, theta, col);
  int l0 = std::max(std::abs(m), std::abs(n));
  if (l < l0) return 0.0;
  return col[l - l0];
}

}  // namespace geolab
