#pragma once

#include <vector>

#include "geolab/grid.hpp"
#include "geolab/sht.hpp"
#include "geolab/spin_field.hpp"

namespace geolab {

// Covariant tensor of valence v <= 4 in spin-component form. Component words
// index the slots: bit (v-1-i) of the word is slot i, value 0 = projection on
// m = (e_theta + i e_phi)/sqrt(2), value 1 = projection on conj(m). The
// component at word w is a spin field with spin = (#m - #mbar).
struct SpinTensor {
  int valence = 0;
  int band_limit = 0;
  std::vector<SpinField> comp;

  SpinTensor() = default;
  SpinTensor(int v, int L);

  static int word_spin(int v, int w);
  int n_words() const { return 1 << valence; }

  SpinTensor& operator+=(const SpinTensor& o);
  SpinTensor& operator-=(const SpinTensor& o);
  SpinTensor& operator*=(double c);
  friend SpinTensor operator+(SpinTensor a, const SpinTensor& b) { return a += b; }
  friend SpinTensor operator-(SpinTensor a, const SpinTensor& b) { return a -= b; }
  friend SpinTensor operator*(double c, SpinTensor a) { return a *= c; }

  double l2_coeff_norm() const;  // coefficient magnitude, diagnostics only
};

inline SpinTensor extend_band_tensor(const SpinTensor& t, int L) {
  SpinTensor out(t.valence, L);
  for (int w = 0; w < t.n_words(); ++w) out.comp[w] = extend_band(t.comp[w], L);
  return out;
}

inline SpinTensor truncate_band_tensor(const SpinTensor& t, int L) {
  SpinTensor out(t.valence, L);
  for (int w = 0; w < t.n_words(); ++w) out.comp[w] = truncate_band(t.comp[w], L);
  return out;
}

SpinTensor scalar_tensor(const SpinField& f);            // valence 0
SpinTensor oneform_tensor(const SpinField& plus);        // real 1-form from spin+1 part
SpinTensor h2_tensor(const SpinField& plus2);            // real symmetric traceless 2-tensor
SpinTensor round_metric_tensor(int L);                   // round gamma-hat
SpinTensor round_epsilon_tensor(int L);                  // round volume form (eps(e_th,e_ph) = -1)

// exact round covariant differential; the derivative is the new slot 0
SpinTensor round_nabla(const SpinTensor& T);

// exact round-metric trace over two slots, and round-epsilon contraction
SpinField round_trace(const SpinTensor& T, int slot_i, int slot_j);
SpinField round_eps_trace(const SpinTensor& T, int slot_i, int slot_j);
// spin +2 component of the symmetric part of a valence-2 tensor
SpinField sym_mm_component(const SpinTensor& T);

// ---- pointwise frame-component algebra on a grid ----

struct GridTensor {
  int valence = 0;
  const QuadratureGrid* grid = nullptr;
  // comp[w][node], w over frame words (bit 0 = e_theta slot? no: bit value
  // 0 = e_theta, 1 = e_phi, slot i at bit (v-1-i))
  std::vector<std::vector<double>> comp;

  GridTensor() = default;
  GridTensor(int v, const QuadratureGrid& g);
  int n_words() const { return 1 << valence; }

  GridTensor& operator+=(const GridTensor& o);
  GridTensor& operator-=(const GridTensor& o);
  GridTensor& operator*=(double c);
  friend GridTensor operator+(GridTensor a, const GridTensor& b) { return a += b; }
  friend GridTensor operator-(GridTensor a, const GridTensor& b) { return a -= b; }
  friend GridTensor operator*(double c, GridTensor a) { return a *= c; }
};

// sampling (real tensors) and band-limited projection
GridTensor sample(const SpinTensor& T, const QuadratureGrid& g);
SpinTensor project(const GridTensor& G, int band_limit);

// pointwise products and contractions in the frame basis
GridTensor tensor_product(const GridTensor& A, const GridTensor& B);
GridTensor scalar_multiply(const std::vector<double>& s, const GridTensor& A);
// contract slots i < j with a per-node symmetric 2x2 form M (M00,M01,M11)
GridTensor contract(const GridTensor& A, int slot_i, int slot_j,
                    const std::vector<double>& M00, const std::vector<double>& M01,
                    const std::vector<double>& M11);
// contract slots i < j with a per-node antisymmetric form a*eps-hat
GridTensor contract_eps(const GridTensor& A, int slot_i, int slot_j,
                        const std::vector<double>& a);
// act on one slot with per-node matrix M[a][b]: out_..a.. = sum_b M(a,b) T_..b..
GridTensor slot_transform(const GridTensor& A, int slot,
                          const std::vector<double>& M00, const std::vector<double>& M01,
                          const std::vector<double>& M10, const std::vector<double>& M11);
// swap two slots
GridTensor transpose_slots(const GridTensor& A, int slot_i, int slot_j);

}  // namespace geolab
