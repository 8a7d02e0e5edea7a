#pragma once

#include <bit>
#include <cassert>
#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "eta/mutation.hpp"
#include "eta/ratfun.hpp"

namespace eta {

// Basis (p,q)-covectors dz_I ^ dzbar_J are encoded as a pair of bitmasks
// over {0..n-1}; bit j set in I means the factor dz_{j+1} is present.
struct IdxPair {
  uint16_t I = 0, J = 0;
  bool operator<(const IdxPair& o) const {
    return I != o.I ? I < o.I : J < o.J;
  }
  bool operator==(const IdxPair& o) const { return I == o.I && J == o.J; }
};

struct Bidegree {
  int p = 0, q = 0;
  bool operator<(const Bidegree& o) const {
    return p != o.p ? p < o.p : q < o.q;
  }
  bool operator==(const Bidegree& o) const { return p == o.p && q == o.q; }
  int degree() const { return p + q; }
};

namespace sign_util {

// permutation sign of merging two strictly increasing index sets
inline int merge_sign(uint16_t a, uint16_t b) {
  // number of inversions: for each i in b, count elements of a above i
  int inv = 0;
  uint16_t bb = b;
  while (bb) {
    int i = std::countr_zero(bb);
    bb &= bb - 1;
    inv += std::popcount(uint16_t(a >> (i + 1)));
  }
  return (inv & 1) ? -1 : 1;
}

// sign and indices of (dz_I1 dzbar_J1) ^ (dz_I2 dzbar_J2); 0 on repetition
inline int wedge_sign(IdxPair a, IdxPair b, IdxPair* out) {
  if ((a.I & b.I) || (a.J & b.J)) return 0;
  int s = merge_sign(a.I, b.I) * merge_sign(a.J, b.J);
  // move dz_{I2} (|I2| factors) across dzbar_{J1} (|J1| factors)
  if (!mut::on("wedge-block-sign") &&
      ((std::popcount(a.J) * std::popcount(b.I)) & 1))
    s = -s;
  out->I = a.I | b.I;
  out->J = a.J | b.J;
  return s;
}

}  // namespace sign_util

// complex<double> lacks the member predicates the exact ring has; the numeric
// instantiation routes through these shims.
template <class K>
inline bool scalar_is_zero(const K& c) { return c.is_zero(); }
inline bool scalar_is_zero(const std::complex<double>& c) { return c == 0.0; }

template <class K>
inline K scalar_conj(const K& c) { return c.conj(); }
inline std::complex<double> scalar_conj(const std::complex<double>& c) {
  return std::conj(c);
}

// A mixed-bidegree differential form on a chart of C^n with coefficients in
// the scalar ring K (exact RatFun or complex<double> after evaluation).
template <class K>
struct FormT {
  int n = 0;
  std::map<Bidegree, std::map<IdxPair, K>> comps;

  FormT() = default;
  explicit FormT(int n_) : n(n_) {}

  static FormT scalar(int n, const K& c) {
    FormT f(n);
    f.add_term({0, 0}, {0, 0}, c);
    return f;
  }
  static FormT basis(int n, IdxPair ij, const K& c) {
    FormT f(n);
    f.add_term({std::popcount(ij.I), std::popcount(ij.J)}, ij, c);
    return f;
  }
  static FormT dz(int n, int j) { return basis(n, {uint16_t(1u << j), 0}, K(1)); }
  static FormT dzbar(int n, int j) { return basis(n, {0, uint16_t(1u << j)}, K(1)); }

  bool is_zero() const { return comps.empty(); }

  bool is_pure(Bidegree* out = nullptr) const {
    if (comps.size() != 1) return false;
    if (out) *out = comps.begin()->first;
    return true;
  }

  void add_term(Bidegree d, IdxPair ij, const K& c) {
    if (scalar_is_zero(c)) return;
    auto& m = comps[d];
    auto it = m.find(ij);
    if (it == m.end()) {
      m.emplace(ij, c);
    } else {
      it->second += c;
      if (scalar_is_zero(it->second)) m.erase(it);
    }
    if (comps[d].empty()) comps.erase(d);
  }

  FormT component(Bidegree d) const {
    FormT f(n);
    auto it = comps.find(d);
    if (it != comps.end()) f.comps[d] = it->second;
    return f;
  }

  std::vector<Bidegree> bidegrees() const {
    std::vector<Bidegree> r;
    for (auto& [d, m] : comps) r.push_back(d);
    return r;
  }

  FormT operator+(const FormT& o) const {
    check_dim(o);
    FormT r = *this;
    for (auto& [d, m] : o.comps)
      for (auto& [ij, c] : m) r.add_term(d, ij, c);
    return r;
  }
  FormT operator-(const FormT& o) const { return *this + o.scaled(K(-1)); }
  FormT operator-() const { return scaled(K(-1)); }

  FormT scaled(const K& c) const {
    FormT r(n);
    if (scalar_is_zero(c)) return r;
    for (auto& [d, m] : comps)
      for (auto& [ij, x] : m) r.add_term(d, ij, x * c);
    return r;
  }

  FormT wedge(const FormT& o) const {
    check_dim(o);
    FormT r(n);
    for (auto& [da, ma] : comps)
      for (auto& [ia, ca] : ma)
        for (auto& [db, mb] : o.comps)
          for (auto& [ib, cb] : mb) {
            IdxPair out;
            int s = sign_util::wedge_sign(ia, ib, &out);
            if (s == 0) continue;
            K c = ca * cb;
            if (s < 0) c = c * K(-1);
            r.add_term({da.p + db.p, da.q + db.q}, out, c);
          }
    return r;
  }

  FormT conj() const {
    FormT r(n);
    for (auto& [d, m] : comps)
      for (auto& [ij, c] : m) {
        // conj(dz_I ^ dzbar_J) = dz_J ^ dzbar_I up to reordering sign:
        // conjugation reverses nothing inside I or J but swaps the blocks;
        // moving dzbar_I (|I| factors) across dz_J (|J|) gives (-1)^{|I||J|}
        int s = ((d.p * d.q) & 1) ? -1 : 1;
        K cc = scalar_conj(c);
        if (s < 0) cc = cc * K(-1);
        r.add_term({d.q, d.p}, {ij.J, ij.I}, cc);
      }
    return r;
  }

  bool operator==(const FormT& o) const { return (*this - o).is_zero(); }

  std::string str() const;

 private:
  void check_dim(const FormT& o) const {
    if (n != o.n) throw std::invalid_argument("chart dimension mismatch");
  }
};

using Form = FormT<RatFun>;
using FormC = FormT<std::complex<double>>;

inline std::string basis_name(int n, IdxPair ij) {
  std::string s;
  for (int j = 0; j < n; ++j)
    if (ij.I & (1u << j)) s += (s.empty() ? "" : "^") + ("dz" + std::to_string(j + 1));
  for (int j = 0; j < n; ++j)
    if (ij.J & (1u << j)) s += (s.empty() ? "" : "^") + ("dw" + std::to_string(j + 1));
  return s.empty() ? "1" : s;
}

template <class K>
std::string FormT<K>::str() const {
  if (comps.empty()) return "0";
  std::string s;
  for (auto& [d, m] : comps)
    for (auto& [ij, c] : m) {
      if (!s.empty()) s += "  +  ";
      if constexpr (std::is_same_v<K, RatFun>) s += "(" + c.str() + ") ";
      else s += "(" + std::to_string(c.real()) + (c.imag() >= 0 ? "+" : "") +
                std::to_string(c.imag()) + "i) ";
      s += basis_name(n, ij);
    }
  return s;
}

// evaluation of an exact form at a chart point
inline FormC eval_form(const Form& u, const std::vector<std::complex<double>>& z) {
  FormC r(u.n);
  for (auto& [d, m] : u.comps)
    for (auto& [ij, c] : m) r.add_term(d, ij, c.eval(z));
  return r;
}

}  // namespace eta
