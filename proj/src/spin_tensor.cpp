#include "geolab/spin_tensor.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

#include "geolab/par.hpp"

namespace geolab {

namespace {
inline int set_slot(int w, int v, int slot, int val) {
  int bit = v - 1 - slot;
  return (w & ~(1 << bit)) | (val << bit);
}
inline int get_slot(int w, int v, int slot) { return (w >> (v - 1 - slot)) & 1; }
}  // namespace

SpinTensor::SpinTensor(int v, int L) : valence(v), band_limit(L) {
  if (v < 0 || v > 4) throw std::invalid_argument("valence out of range");
  comp.reserve(1 << v);
  for (int w = 0; w < (1 << v); ++w) comp.emplace_back(word_spin(v, w), L);
}

int SpinTensor::word_spin(int v, int w) {
  return v - 2 * std::popcount(static_cast<unsigned>(w));
}

SpinTensor& SpinTensor::operator+=(const SpinTensor& o) {
  for (int w = 0; w < n_words(); ++w) comp[w] += o.comp[w];
  return *this;
}
SpinTensor& SpinTensor::operator-=(const SpinTensor& o) {
  for (int w = 0; w < n_words(); ++w) comp[w] -= o.comp[w];
  return *this;
}
SpinTensor& SpinTensor::operator*=(double c) {
  for (auto& f : comp) f *= cplx(c, 0.0);
  return *this;
}
double SpinTensor::l2_coeff_norm() const {
  double s = 0.0;
  for (const auto& f : comp) s += f.l2_norm() * f.l2_norm();
  return std::sqrt(s);
}

SpinTensor scalar_tensor(const SpinField& f) {
  if (f.spin != 0) throw std::invalid_argument("scalar_tensor: spin 0 required");
  SpinTensor t(0, f.band_limit);
  t.comp[0] = f;
  return t;
}

SpinTensor oneform_tensor(const SpinField& plus) {
  if (plus.spin != 1) throw std::invalid_argument("oneform_tensor: spin 1 required");
  SpinTensor t(1, plus.band_limit);
  t.comp[0] = plus;
  t.comp[1] = conj_field(plus);
  return t;
}

SpinTensor h2_tensor(const SpinField& plus2) {
  if (plus2.spin != 2) throw std::invalid_argument("h2_tensor: spin 2 required");
  SpinTensor t(2, plus2.band_limit);
  t.comp[0] = plus2;              // (m, m)
  t.comp[3] = conj_field(plus2);  // (mbar, mbar)
  return t;
}

SpinTensor round_metric_tensor(int L) {
  SpinTensor t(2, L);
  double c = std::sqrt(kFourPi);  // constant 1 has coefficient sqrt(4pi)
  t.comp[1].at(0, 0) = c;         // (m, mbar)
  t.comp[2].at(0, 0) = c;         // (mbar, m)
  return t;
}

SpinTensor round_epsilon_tensor(int L) {
  SpinTensor t(2, L);
  double c = std::sqrt(kFourPi);
  t.comp[1].at(0, 0) = cplx(0.0, c);   // eps(m, mbar) = +i
  t.comp[2].at(0, 0) = cplx(0.0, -c);  // eps(mbar, m) = -i
  return t;
}

SpinTensor round_nabla(const SpinTensor& T) {
  SpinTensor out(T.valence + 1, T.band_limit);
  const double c = -1.0 / std::sqrt(2.0);
  for (int w = 0; w < T.n_words(); ++w) {
    SpinField up = detail::eth_any(T.comp[w], EthDirection::raise);
    up *= cplx(c, 0.0);
    SpinField dn = detail::eth_any(T.comp[w], EthDirection::lower);
    dn *= cplx(c, 0.0);
    out.comp[w] = std::move(up);                // new slot 0 = m
    out.comp[w + T.n_words()] = std::move(dn);  // new slot 0 = mbar
  }
  return out;
}

namespace {
template <class Combine>
SpinTensor pair_trace(const SpinTensor& T, int slot_i, int slot_j, Combine&& cb) {
  int v = T.valence;
  if (v < 2) throw std::invalid_argument("trace needs valence >= 2");
  SpinTensor out(v - 2, T.band_limit);
  for (int w = 0; w < out.n_words(); ++w) {
    auto full = [&](int a, int b) {
      int fwd = 0, src = 0;
      for (int slot = 0; slot < v; ++slot) {
        int val;
        if (slot == slot_i)
          val = a;
        else if (slot == slot_j)
          val = b;
        else
          val = get_slot(w, v - 2, src++);
        fwd = set_slot(fwd, v, slot, val);
      }
      return fwd;
    };
    out.comp[w] = cb(T.comp[full(0, 1)], T.comp[full(1, 0)]);
  }
  return out;
}
}  // namespace

SpinField round_trace(const SpinTensor& T, int slot_i, int slot_j) {
  return pair_trace(T, slot_i, slot_j,
                    [](const SpinField& a, const SpinField& b) { return a + b; })
      .comp[0];
}

SpinField round_eps_trace(const SpinTensor& T, int slot_i, int slot_j) {
  return pair_trace(T, slot_i, slot_j,
                    [](const SpinField& a, const SpinField& b) {
                      SpinField d = b - a;
                      d *= cplx(0.0, 1.0);
                      return d;
                    })
      .comp[0];
}

SpinField sym_mm_component(const SpinTensor& T) {
  if (T.valence != 2) throw std::invalid_argument("valence 2 required");
  return T.comp[0];
}

// ---------------- GridTensor ----------------

GridTensor::GridTensor(int v, const QuadratureGrid& g) : valence(v), grid(&g) {
  comp.assign(1 << v, std::vector<double>(g.n_nodes(), 0.0));
}

GridTensor& GridTensor::operator+=(const GridTensor& o) {
  for (int w = 0; w < n_words(); ++w)
    for (size_t i = 0; i < comp[w].size(); ++i) comp[w][i] += o.comp[w][i];
  return *this;
}
GridTensor& GridTensor::operator-=(const GridTensor& o) {
  for (int w = 0; w < n_words(); ++w)
    for (size_t i = 0; i < comp[w].size(); ++i) comp[w][i] -= o.comp[w][i];
  return *this;
}
GridTensor& GridTensor::operator*=(double c) {
  for (auto& cw : comp)
    for (auto& x : cw) x *= c;
  return *this;
}

GridTensor sample(const SpinTensor& T, const QuadratureGrid& g) {
  int v = T.valence;
  GridTensor out(v, g);
  std::vector<std::vector<cplx>> mw(T.n_words());
  for (int w = 0; w < T.n_words(); ++w) detail::synthesis(T.comp[w], g, mw[w]);
  const double is2 = 1.0 / std::sqrt(2.0);
  int n = g.n_nodes();
  for (int fw = 0; fw < (1 << v); ++fw) {
    auto& dst = out.comp[fw];
    // precompute the change-of-basis factor per m-word
    std::vector<cplx> fac(1 << v, cplx(1.0, 0.0));
    for (int w = 0; w < (1 << v); ++w)
      for (int slot = 0; slot < v; ++slot) {
        int fbit = get_slot(fw, v, slot);
        int mbit = get_slot(w, v, slot);
        cplx c = (fbit == 0) ? cplx(is2, 0.0)
                             : ((mbit == 0) ? cplx(0.0, -is2) : cplx(0.0, is2));
        fac[w] *= c;
      }
    parallel_for(n, [&](std::ptrdiff_t node) {
      cplx acc(0.0, 0.0);
      for (int w = 0; w < (1 << v); ++w) acc += fac[w] * mw[w][node];
      dst[node] = acc.real();
    });
  }
  return out;
}

SpinTensor project(const GridTensor& G, int band_limit) {
  int v = G.valence;
  SpinTensor out(v, band_limit);
  const auto& g = *G.grid;
  int n = g.n_nodes();
  const double is2 = 1.0 / std::sqrt(2.0);
  for (int w = 0; w < (1 << v); ++w) {
    std::vector<cplx> fac(1 << v, cplx(1.0, 0.0));
    for (int fw = 0; fw < (1 << v); ++fw)
      for (int slot = 0; slot < v; ++slot) {
        int fbit = get_slot(fw, v, slot);
        int mbit = get_slot(w, v, slot);
        cplx c = (fbit == 0) ? cplx(is2, 0.0)
                             : ((mbit == 0) ? cplx(0.0, is2) : cplx(0.0, -is2));
        fac[fw] *= c;
      }
    std::vector<cplx> vals(n);
    parallel_for(n, [&](std::ptrdiff_t node) {
      cplx acc(0.0, 0.0);
      for (int fw = 0; fw < (1 << v); ++fw) acc += fac[fw] * G.comp[fw][node];
      vals[node] = acc;
    });
    out.comp[w] = detail::analysis(vals, SpinTensor::word_spin(v, w), band_limit, g);
  }
  return out;
}

GridTensor tensor_product(const GridTensor& A, const GridTensor& B) {
  GridTensor out(A.valence + B.valence, *A.grid);
  int nb = 1 << B.valence;
  for (int wa = 0; wa < A.n_words(); ++wa)
    for (int wb = 0; wb < B.n_words(); ++wb) {
      auto& dst = out.comp[wa * nb + wb];
      const auto& a = A.comp[wa];
      const auto& b = B.comp[wb];
      for (size_t i = 0; i < dst.size(); ++i) dst[i] = a[i] * b[i];
    }
  return out;
}

GridTensor scalar_multiply(const std::vector<double>& s, const GridTensor& A) {
  GridTensor out = A;
  for (auto& cw : out.comp)
    for (size_t i = 0; i < cw.size(); ++i) cw[i] *= s[i];
  return out;
}

GridTensor contract(const GridTensor& A, int slot_i, int slot_j,
                    const std::vector<double>& M00, const std::vector<double>& M01,
                    const std::vector<double>& M11) {
  int v = A.valence;
  GridTensor out(v - 2, *A.grid);
  size_t n = A.comp[0].size();
  for (int w = 0; w < out.n_words(); ++w) {
    auto full = [&](int a, int b) {
      int fwd = 0, src = 0;
      for (int slot = 0; slot < v; ++slot) {
        int val;
        if (slot == slot_i)
          val = a;
        else if (slot == slot_j)
          val = b;
        else
          val = get_slot(w, v - 2, src++);
        fwd = set_slot(fwd, v, slot, val);
      }
      return fwd;
    };
    const auto& t00 = A.comp[full(0, 0)];
    const auto& t01 = A.comp[full(0, 1)];
    const auto& t10 = A.comp[full(1, 0)];
    const auto& t11 = A.comp[full(1, 1)];
    auto& dst = out.comp[w];
    for (size_t i = 0; i < n; ++i)
      dst[i] = M00[i] * t00[i] + M01[i] * (t01[i] + t10[i]) + M11[i] * t11[i];
  }
  return out;
}

GridTensor contract_eps(const GridTensor& A, int slot_i, int slot_j,
                        const std::vector<double>& a) {
  int v = A.valence;
  GridTensor out(v - 2, *A.grid);
  size_t n = A.comp[0].size();
  for (int w = 0; w < out.n_words(); ++w) {
    auto full = [&](int x, int y) {
      int fwd = 0, src = 0;
      for (int slot = 0; slot < v; ++slot) {
        int val;
        if (slot == slot_i)
          val = x;
        else if (slot == slot_j)
          val = y;
        else
          val = get_slot(w, v - 2, src++);
        fwd = set_slot(fwd, v, slot, val);
      }
      return fwd;
    };
    // frame eps pattern: eps(th,ph) = -1, eps(ph,th) = +1
    const auto& t01 = A.comp[full(0, 1)];
    const auto& t10 = A.comp[full(1, 0)];
    auto& dst = out.comp[w];
    for (size_t i = 0; i < n; ++i) dst[i] = a[i] * (t10[i] - t01[i]);
  }
  return out;
}

GridTensor slot_transform(const GridTensor& A, int slot,
                          const std::vector<double>& M00, const std::vector<double>& M01,
                          const std::vector<double>& M10, const std::vector<double>& M11) {
  int v = A.valence;
  GridTensor out(v, *A.grid);
  size_t n = A.comp[0].size();
  for (int w = 0; w < A.n_words(); ++w) {
    int a = get_slot(w, v, slot);
    const auto& s0 = A.comp[set_slot(w, v, slot, 0)];
    const auto& s1 = A.comp[set_slot(w, v, slot, 1)];
    const auto& m0 = (a == 0) ? M00 : M10;
    const auto& m1 = (a == 0) ? M01 : M11;
    auto& dst = out.comp[w];
    for (size_t i = 0; i < n; ++i) dst[i] = m0[i] * s0[i] + m1[i] * s1[i];
  }
  return out;
}

GridTensor transpose_slots(const GridTensor& A, int slot_i, int slot_j) {
  int v = A.valence;
  GridTensor out(v, *A.grid);
  for (int w = 0; w < A.n_words(); ++w) {
    int a = get_slot(w, v, slot_i);
    int b = get_slot(w, v, slot_j);
    int sw = set_slot(set_slot(w, v, slot_i, b), v, slot_j, a);
    out.comp[sw] = A.comp[w];
  }
  return out;
}

}  // namespace geolab
