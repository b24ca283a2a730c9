#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace geolab {

using cplx = std::complex<double>;

// Band-limited spin-weighted coefficient vector: one complex coefficient per
// (l, m) with |spin| <= l <= band_limit, |m| <= l.
//
// Convention (fixed here, validated against the finite-difference oracles in
// the test suite):
//   basis   sYlm(theta, phi) = (-1)^s sqrt((2l+1)/4pi) d^l_{m,-s}(theta) e^{im phi}
//   raise   (eth f)_{lm}    = +sqrt((l-s)(l+s+1)) f_{lm},  spin s -> s+1
//   lower   (ethbar f)_{lm} = -sqrt((l+s)(l-s+1)) f_{lm},  spin s -> s-1
//   conj    conj(sYlm) = (-1)^{s+m} (-s)Yl,-m
// The orthonormal dyad is (e_theta, e_phi), m = (e_theta + i e_phi)/sqrt(2),
// volume form eps(e_theta, e_phi) = -1.
struct SpinField {
  int spin = 0;
  int band_limit = 0;
  std::vector<cplx> a;

  SpinField() = default;
  SpinField(int s, int L) : spin(s), band_limit(L) {
    int lmin = std::abs(s);
    if (L < lmin) throw std::invalid_argument("band limit below |spin|");
    a.assign((L + 1) * (L + 1) - lmin * lmin, cplx(0.0, 0.0));
  }

  int lmin() const { return std::abs(spin); }
  int size() const { return static_cast<int>(a.size()); }

  int index(int l, int m) const {
    return l * l - lmin() * lmin() + (m + l);
  }
  cplx& at(int l, int m) { return a[index(l, m)]; }
  const cplx& at(int l, int m) const { return a[index(l, m)]; }

  SpinField& operator+=(const SpinField& o) {
    for (int i = 0; i < size(); ++i) a[i] += o.a[i];
    return *this;
  }
  SpinField& operator-=(const SpinField& o) {
    for (int i = 0; i < size(); ++i) a[i] -= o.a[i];
    return *this;
  }
  SpinField& operator*=(cplx c) {
    for (auto& v : a) v *= c;
    return *this;
  }
  friend SpinField operator+(SpinField f, const SpinField& g) { return f += g; }
  friend SpinField operator-(SpinField f, const SpinField& g) { return f -= g; }
  friend SpinField operator*(cplx c, SpinField f) { return f *= c; }

  double l2_norm() const {
    double s2 = 0.0;
    for (const auto& v : a) s2 += std::norm(v);
    return std::sqrt(s2);
  }
};

inline SpinField extend_band(const SpinField& f, int L) {
  if (L == f.band_limit) return f;
  if (L < f.band_limit) throw std::invalid_argument("extend_band: shrinking");
  SpinField out(f.spin, L);
  for (int l = f.lmin(); l <= f.band_limit; ++l)
    for (int m = -l; m <= l; ++m) out.at(l, m) = f.at(l, m);
  return out;
}

inline SpinField truncate_band(const SpinField& f, int L) {
  if (L >= f.band_limit) return extend_band(f, L);
  SpinField out(f.spin, L);
  for (int l = f.lmin(); l <= L; ++l)
    for (int m = -l; m <= l; ++m) out.at(l, m) = f.at(l, m);
  return out;
}

// coefficient-space hermitian inner product <f, g> = sum f conj(g)
inline cplx l2_inner(const SpinField& f, const SpinField& g) {
  cplx s(0.0, 0.0);
  for (int i = 0; i < f.size(); ++i) s += f.a[i] * std::conj(g.a[i]);
  return s;
}

// serialization: JSON manifest + little-endian float64 blob (re, im pairs)
void save_spin_field(const SpinField& f, const std::string& path);
SpinField load_spin_field(const std::string& path);

}  // namespace geolab
