// Benchmark of the OpenMP kernels against the serial reference paths:
// spin-weighted transforms (synthesis/analysis) and the dense Gram assembly.
#include <chrono>
#include <cstdio>

#include "geolab/glp.hpp"
#include "geolab/metric.hpp"
#include "geolab/par.hpp"
#include "geolab/sht.hpp"

using namespace geolab;

namespace {
template <class F>
double time_ms(F&& fn, int reps) {
  auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < reps; ++i) fn();
  auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}
}  // namespace

int main(int argc, char** argv) {
  int L = (argc > 1) ? std::atoi(argv[1]) : 31;
  int reps = (argc > 2) ? std::atoi(argv[2]) : 20;
  const auto& g = work_grid_for(L);
  SpinField f = random_band_limited(7, 1, 1, L, 1.0, L);
  std::vector<cplx> buf;
  detail::synthesis(f, g, buf);  // warm the wigner caches

  std::printf("geolab kernel benchmark, L = %d, grid %d x %d, threads = %d\n", L,
              g.n_theta, g.n_phi, hardware_threads());
  std::printf("%-28s %12s %12s %8s\n", "kernel", "serial ms", "omp ms", "speedup");

  double s1 = time_ms([&] {
    std::vector<cplx> out;
    detail::synthesis_serial(f, g, out);
  }, reps);
  double p1 = time_ms([&] {
    std::vector<cplx> out;
    detail::synthesis(f, g, out);
  }, reps);
  std::printf("%-28s %12.3f %12.3f %8.2f\n", "sht synthesis", s1, p1, s1 / p1);

  double s2 = time_ms([&] { detail::analysis_serial(buf, 1, L, g); }, reps);
  double p2 = time_ms([&] { detail::analysis(buf, 1, L, g); }, reps);
  std::printf("%-28s %12.3f %12.3f %8.2f\n", "sht analysis", s2, p2, s2 / p2);

  // bitwise agreement of the two paths
  std::vector<cplx> a, b;
  detail::synthesis(f, g, a);
  detail::synthesis_serial(f, g, b);
  bool same = (a == b);
  SpinField fa = detail::analysis(a, 1, L, g);
  SpinField fb = detail::analysis_serial(a, 1, L, g);
  same = same && (fa.a == fb.a);
  std::printf("parallel/serial transforms bitwise identical: %s\n",
              same ? "yes" : "NO");

  SpinField u = random_conformal_factor(3, 1, 4, 0.2, L);
  auto m = SurfaceMetric::conformal(u);
  const auto& gq = grid_for(2 * L + 48);
  const auto& gd = m.grid_data(gq);
  std::vector<cplx> w(gq.n_nodes());
  for (int i = 0; i < gq.n_nodes(); ++i) w[i] = std::exp(2.0 * gd.usamp[i]);
  double s3, p3;
  {
    bool& flag = parallel_enabled();
    flag = false;
    s3 = time_ms([&] { transfer_matrix(0, 0, L, w, gq); }, std::max(1, reps / 10));
    flag = true;
    p3 = time_ms([&] { transfer_matrix(0, 0, L, w, gq); }, std::max(1, reps / 10));
  }
  std::printf("%-28s %12.3f %12.3f %8.2f\n", "gram assembly", s3, p3, s3 / p3);
  return same ? 0 : 1;
}
