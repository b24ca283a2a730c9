#include "geolab/sht.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>

#include "geolab/par.hpp"
#include "geolab/wigner.hpp"
#include "json.hpp"

namespace geolab {

namespace {

struct DTable {
  int L = 0, spin = 0, n_theta = 0;
  // values[(i*(2L+1) + (m+L))] -> column over l = lmax(|m|,|s|) .. L
  std::vector<std::vector<double>> cols;
  const std::vector<double>& col(int i, int m) const {
    return cols[i * (2 * L + 1) + (m + L)];
  }
};

std::mutex table_mutex;
std::map<std::tuple<int, int, int>, DTable> dtables;
std::map<std::pair<int, int>, std::vector<cplx>> phase_tables;  // (n_phi, L)

const DTable& dtable(int L, int spin, const QuadratureGrid& g) {
  std::lock_guard<std::mutex> lock(table_mutex);
  auto key = std::make_tuple(L, spin, g.n_theta);
  auto it = dtables.find(key);
  if (it != dtables.end()) return it->second;
  DTable t;
  t.L = L;
  t.spin = spin;
  t.n_theta = g.n_theta;
  t.cols.resize(static_cast<size_t>(g.n_theta) * (2 * L + 1));
  for (int i = 0; i < g.n_theta; ++i)
    for (int m = -L; m <= L; ++m)
      wigner_d_column(m, -spin, L, g.theta[i], t.cols[i * (2 * L + 1) + (m + L)]);
  return dtables.emplace(key, std::move(t)).first->second;
}

// e^{i m phi_j} for m = 0..L
const std::vector<cplx>& phases(int L, const QuadratureGrid& g) {
  std::lock_guard<std::mutex> lock(table_mutex);
  auto key = std::make_pair(g.n_phi, L);
  auto it = phase_tables.find(key);
  if (it != phase_tables.end()) return it->second;
  std::vector<cplx> p(static_cast<size_t>(g.n_phi) * (L + 1));
  for (int j = 0; j < g.n_phi; ++j)
    for (int m = 0; m <= L; ++m)
      p[j * (L + 1) + m] = std::polar(1.0, m * g.phi[j]);
  return phase_tables.emplace(key, std::move(p)).first->second;
}

double norm_factor(int l) { return std::sqrt((2.0 * l + 1.0) / kFourPi); }

template <bool Parallel>
void synthesis_impl(const SpinField& f, const QuadratureGrid& g, std::vector<cplx>& out) {
  const int L = f.band_limit;
  const int s = f.spin;
  if (g.band_limit < L) throw std::invalid_argument("band limit exceeds grid capacity");
  const DTable& dt = dtable(L, s, g);
  const auto& ph = phases(L, g);
  const double sgn = (s % 2 == 0) ? 1.0 : -1.0;
  out.assign(g.n_nodes(), cplx(0.0, 0.0));
  auto row = [&](std::ptrdiff_t i) {
    std::vector<cplx> gm(2 * L + 1, cplx(0.0, 0.0));
    for (int m = -L; m <= L; ++m) {
      const auto& col = dt.col(static_cast<int>(i), m);
      int l0 = std::max(std::abs(m), std::abs(s));
      if (l0 < f.lmin()) l0 = f.lmin();
      cplx acc(0.0, 0.0);
      int base = std::max(std::abs(m), std::abs(s));
      for (int l = l0; l <= L; ++l)
        acc += f.at(l, m) * (sgn * norm_factor(l) * col[l - base]);
      gm[m + L] = acc;
    }
    for (int j = 0; j < g.n_phi; ++j) {
      cplx v = gm[L];  // m = 0
      for (int m = 1; m <= L; ++m) {
        cplx e = ph[j * (L + 1) + m];
        v += gm[m + L] * e + gm[-m + L] * std::conj(e);
      }
      out[g.node(static_cast<int>(i), j)] = v;
    }
  };
  if constexpr (Parallel)
    parallel_for(g.n_theta, row);
  else
    serial_for(g.n_theta, row);
}

template <bool Parallel>
SpinField analysis_impl(const std::vector<cplx>& samples, int spin, int L_out,
                        const QuadratureGrid& g) {
  if (static_cast<int>(samples.size()) != g.n_nodes())
    throw std::invalid_argument("sample dimension mismatch");
  if (L_out > g.band_limit) throw std::invalid_argument("band limit exceeds grid capacity");
  const int L = L_out;
  const DTable& dt = dtable(L, spin, g);
  const auto& ph = phases(L, g);
  const double sgn = (spin % 2 == 0) ? 1.0 : -1.0;
  // stage 1: phi transform per theta row
  std::vector<cplx> fm(static_cast<size_t>(g.n_theta) * (2 * L + 1));
  auto row = [&](std::ptrdiff_t i) {
    for (int m = -L; m <= L; ++m) {
      cplx acc(0.0, 0.0);
      for (int j = 0; j < g.n_phi; ++j) {
        cplx e = (m >= 0) ? std::conj(ph[j * (L + 1) + m]) : ph[j * (L + 1) - m];
        acc += samples[g.node(static_cast<int>(i), j)] * e;
      }
      fm[i * (2 * L + 1) + (m + L)] = acc;
    }
  };
  if constexpr (Parallel)
    parallel_for(g.n_theta, row);
  else
    serial_for(g.n_theta, row);

  SpinField out(spin, L);
  const double dphi = 2.0 * kPi / g.n_phi;
  auto mloop = [&](std::ptrdiff_t mi) {
    int m = static_cast<int>(mi) - L;
    int base = std::max(std::abs(m), std::abs(spin));
    for (int l = base; l <= L; ++l) {
      if (l < out.lmin()) continue;
      cplx acc(0.0, 0.0);
      for (int i = 0; i < g.n_theta; ++i)
        acc += fm[i * (2 * L + 1) + (m + L)] * (g.weight[i] * dt.col(i, m)[l - base]);
      out.at(l, m) = acc * (sgn * norm_factor(l) * dphi);
    }
  };
  if constexpr (Parallel)
    parallel_for(2 * L + 1, mloop);
  else
    serial_for(2 * L + 1, mloop);
  return out;
}

}  // namespace

namespace detail {

void synthesis(const SpinField& f, const QuadratureGrid& g, std::vector<cplx>& out) {
  synthesis_impl<true>(f, g, out);
}
void synthesis_serial(const SpinField& f, const QuadratureGrid& g, std::vector<cplx>& out) {
  synthesis_impl<false>(f, g, out);
}
SpinField analysis(const std::vector<cplx>& samples, int spin, int L_out,
                   const QuadratureGrid& g) {
  return analysis_impl<true>(samples, spin, L_out, g);
}
SpinField analysis_serial(const std::vector<cplx>& samples, int spin, int L_out,
                          const QuadratureGrid& g) {
  return analysis_impl<false>(samples, spin, L_out, g);
}

SpinField eth_any(const SpinField& f, EthDirection dir) {
  int s = f.spin;
  int s_out = (dir == EthDirection::raise) ? s + 1 : s - 1;
  if (std::abs(s_out) > 4) throw std::invalid_argument("spin overflow");
  SpinField out(s_out, f.band_limit);
  for (int l = std::max(f.lmin(), out.lmin()); l <= f.band_limit; ++l) {
    double fac;
    if (dir == EthDirection::raise)
      fac = std::sqrt(double(l - s) * double(l + s + 1));
    else
      fac = -std::sqrt(double(l + s) * double(l - s + 1));
    for (int m = -l; m <= l; ++m) out.at(l, m) = fac * f.at(l, m);
  }
  return out;
}

}  // namespace detail

SpinField forward_transform(const std::vector<cplx>& samples, int spin,
                            const QuadratureGrid& g) {
  if (std::abs(spin) > 2) throw std::invalid_argument("|spin| > 2");
  return detail::analysis(samples, spin, g.band_limit, g);
}

std::vector<cplx> inverse_transform(const SpinField& f, const QuadratureGrid& g) {
  if (std::abs(f.spin) > 2) throw std::invalid_argument("|spin| > 2");
  std::vector<cplx> out;
  detail::synthesis(f, g, out);
  return out;
}

SpinField eth(const SpinField& f, EthDirection dir) {
  int s_out = (dir == EthDirection::raise) ? f.spin + 1 : f.spin - 1;
  if (std::abs(s_out) > 2) throw std::invalid_argument("spin overflow");
  return detail::eth_any(f, dir);
}

SpinField round_laplacian(const SpinField& f) {
  SpinField out = f;
  int s = f.spin;
  for (int l = f.lmin(); l <= f.band_limit; ++l) {
    double mult = -(double(l) * (l + 1) - double(s) * s);
    for (int m = -l; m <= l; ++m) out.at(l, m) *= mult;
  }
  return out;
}

cplx integrate_round(const SpinField& f) {
  if (f.spin != 0) throw std::invalid_argument("integrate_round: nonzero spin");
  return std::sqrt(kFourPi) * f.at(0, 0);
}

cplx integrate_grid(const std::vector<cplx>& samples, const QuadratureGrid& g) {
  cplx acc(0.0, 0.0);
  for (int i = 0; i < g.n_theta; ++i) {
    cplx row(0.0, 0.0);
    for (int j = 0; j < g.n_phi; ++j) row += samples[g.node(i, j)];
    acc += g.node_measure(i) * row;
  }
  return acc;
}

SpinField conj_field(const SpinField& f) {
  SpinField out(-f.spin, f.band_limit);
  for (int l = f.lmin(); l <= f.band_limit; ++l)
    for (int m = -l; m <= l; ++m) {
      double sgn = ((f.spin + m) % 2 == 0) ? 1.0 : -1.0;
      out.at(l, m) = sgn * std::conj(f.at(l, -m));
    }
  return out;
}

SpinField random_band_limited(std::uint64_t seed, int spin, int l_lo, int l_hi,
                              double scale, int band_limit, bool real) {
  if (l_hi < l_lo || l_lo < std::abs(spin) || l_hi > band_limit)
    throw std::invalid_argument("empty or invalid band range");
  if (real && spin != 0) throw std::invalid_argument("real fields are spin 0");
  Rng rng(seed ^ (0x5851f42d4c957f2dull + 0x9e37ull * static_cast<std::uint64_t>(spin + 8)));
  SpinField f(spin, band_limit);
  for (int l = l_lo; l <= l_hi; ++l) {
    if (!real) {
      for (int m = -l; m <= l; ++m) f.at(l, m) = cplx(rng.gauss(), rng.gauss());
    } else {
      f.at(l, 0) = cplx(rng.gauss(), 0.0);
      for (int m = 1; m <= l; ++m) {
        cplx c(rng.gauss(), rng.gauss());
        f.at(l, m) = c;
        f.at(l, -m) = ((m % 2 == 0) ? 1.0 : -1.0) * std::conj(c);
      }
    }
  }
  double n = f.l2_norm();
  if (n > 0.0) f *= cplx(scale / n, 0.0);
  return f;
}

SpinField unit_harmonic(int spin, int l, int m, int band_limit) {
  SpinField f(spin, band_limit);
  f.at(l, m) = cplx(1.0, 0.0);
  return f;
}

cplx eval_harmonic(int spin, int l, int m, double theta, double phi) {
  double sgn = (spin % 2 == 0) ? 1.0 : -1.0;
  return sgn * norm_factor(l) * wigner_d(l, m, -spin, theta) * std::polar(1.0, m * phi);
}

SpinField real_harmonic(int l, int m, int band_limit) {
  SpinField f(0, band_limit);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  if (m == 0) {
    f.at(l, 0) = cplx(1.0, 0.0);
  } else if (m > 0) {
    f.at(l, m) = cplx(inv_sqrt2, 0.0);
    f.at(l, -m) = cplx(((m % 2 == 0) ? 1.0 : -1.0) * inv_sqrt2, 0.0);
  } else {
    int mm = -m;
    f.at(l, mm) = cplx(0.0, -inv_sqrt2);
    f.at(l, -mm) = cplx(0.0, ((mm % 2 == 0) ? 1.0 : -1.0) * inv_sqrt2);
  }
  return f;
}

cplx synthesize_at(const SpinField& f, double theta, double phi) {
  const int L = f.band_limit;
  const int s = f.spin;
  const double sgn = (s % 2 == 0) ? 1.0 : -1.0;
  std::vector<double> col;
  cplx v(0.0, 0.0);
  for (int m = -L; m <= L; ++m) {
    int base = std::max(std::abs(m), std::abs(s));
    if (base > L) continue;
    wigner_d_column(m, -s, L, theta, col);
    cplx acc(0.0, 0.0);
    for (int l = std::max(base, f.lmin()); l <= L; ++l)
      acc += f.at(l, m) * (sgn * norm_factor(l) * col[l - base]);
    v += acc * std::polar(1.0, m * phi);
  }
  return v;
}

void save_spin_field(const SpinField& f, const std::string& path) {
  nlohmann::json manifest = {
      {"format", "geolab.spinfield"},
      {"version", 1},
      {"spin", f.spin},
      {"band_limit", f.band_limit},
      {"layout", "l ascending from |spin|, m from -l to l, float64 LE re/im"},
      {"count", f.size()},
  };
  std::string header = manifest.dump();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  const char magic[8] = {'G', 'L', 'S', 'P', 'I', 'N', '0', '0'};
  out.write(magic, 8);
  std::uint64_t hlen = header.size();
  out.write(reinterpret_cast<const char*>(&hlen), 8);
  out.write(header.data(), hlen);
  out.write(reinterpret_cast<const char*>(f.a.data()), f.size() * sizeof(cplx));
}

SpinField load_spin_field(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  char magic[8];
  in.read(magic, 8);
  if (std::memcmp(magic, "GLSPIN00", 8) != 0) throw std::runtime_error("bad magic");
  std::uint64_t hlen = 0;
  in.read(reinterpret_cast<char*>(&hlen), 8);
  std::string header(hlen, '\0');
  in.read(header.data(), hlen);
  auto manifest = nlohmann::json::parse(header);
  SpinField f(manifest["spin"].get<int>(), manifest["band_limit"].get<int>());
  in.read(reinterpret_cast<char*>(f.a.data()), f.size() * sizeof(cplx));
  if (!in) throw std::runtime_error("truncated spin field blob");
  return f;
}

}  // namespace geolab
