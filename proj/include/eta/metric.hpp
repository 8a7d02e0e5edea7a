#pragma once

#include <array>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "eta/form.hpp"

namespace eta {

// Normalization: |dz_j|^2 = 2 under the identity metric and
// omega = (i/2) sum g_{jk} dz_j ^ dzbar_k. The product of the two scales is
// forced by [L,Lambda] = (k-n)Id; the factor-2 split is pinned by the
// commutation-relation anchor tests (see README).
template <class K>
struct NormTraits;

template <>
struct NormTraits<RatFun> {
  static RatFun covector_norm2() { return RatFun(2); }
  static RatFun form_scale() { return RatFun::rational(1, 2); }
  static RatFun imag_unit() { return RatFun::i(); }
  static bool pivot_better(const RatFun&, const RatFun&) { return false; }
};
template <>
struct NormTraits<std::complex<double>> {
  static std::complex<double> covector_norm2() { return 2.0; }
  static std::complex<double> form_scale() { return 0.5; }
  static std::complex<double> imag_unit() { return {0.0, 1.0}; }
  static bool pivot_better(const std::complex<double>& cand,
                           const std::complex<double>& cur) {
    return std::abs(cand) > std::abs(cur);
  }
};

// Dense matrix with exact LU solves, small sizes only.
template <class K>
struct DenseMat {
  int rows = 0, cols = 0;
  std::vector<K> a;

  DenseMat() = default;
  DenseMat(int r, int c) : rows(r), cols(c), a(size_t(r) * c, K(0)) {}
  K& at(int i, int j) { return a[size_t(i) * cols + j]; }
  const K& at(int i, int j) const { return a[size_t(i) * cols + j]; }
};

// PA = LU with row pivoting; solve() handles one rhs at a time.
template <class K>
struct LUSolver {
  DenseMat<K> lu;
  std::vector<int> perm;

  explicit LUSolver(DenseMat<K> m) : lu(std::move(m)) {
    int n = lu.rows;
    perm.resize(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    for (int k = 0; k < n; ++k) {
      int piv = -1;
      for (int i = k; i < n; ++i) {
        const K& c = lu.at(i, k);
        if (scalar_is_zero(c)) continue;
        if (piv < 0 || NormTraits<K>::pivot_better(c, lu.at(piv, k))) piv = i;
      }
      if (piv < 0) throw std::domain_error("singular matrix in fiber solve");
      if (piv != k) {
        for (int j = 0; j < n; ++j) std::swap(lu.at(k, j), lu.at(piv, j));
        std::swap(perm[k], perm[piv]);
      }
      for (int i = k + 1; i < n; ++i) {
        if (scalar_is_zero(lu.at(i, k))) continue;
        K f = lu.at(i, k) / lu.at(k, k);
        lu.at(i, k) = f;
        for (int j = k + 1; j < n; ++j)
          lu.at(i, j) = lu.at(i, j) - f * lu.at(k, j);
      }
    }
  }

  std::vector<K> solve(const std::vector<K>& rhs) const {
    int n = lu.rows;
    std::vector<K> x(n, K(0));
    for (int i = 0; i < n; ++i) x[i] = rhs[size_t(perm[i])];
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < i; ++j) x[i] = x[i] - lu.at(i, j) * x[j];
    for (int i = n - 1; i >= 0; --i) {
      for (int j = i + 1; j < n; ++j) x[i] = x[i] - lu.at(i, j) * x[j];
      x[i] = x[i] / lu.at(i, i);
    }
    return x;
  }
};

inline std::vector<IdxPair> bidegree_basis(int n, int p, int q) {
  std::vector<uint16_t> ps, qs;
  for (uint16_t m = 0; m < (1u << n); ++m) {
    if (std::popcount(m) == p) ps.push_back(m);
    if (std::popcount(m) == q) qs.push_back(m);
  }
  std::vector<IdxPair> basis;
  for (auto i : ps)
    for (auto j : qs) basis.push_back({i, j});
  std::sort(basis.begin(), basis.end());
  return basis;
}

// Hermitian metric g_{jk} on a chart plus everything derived from it that the
// fiberwise operations need: dual covector Gram, per-bidegree Gram matrices
// with LU factorizations, the fundamental form and the volume coefficient.
// Built per trial; not meant to be shared across threads while still filling
// its lazy caches.
template <class K>
class MetricCtxT {
 public:
  MetricCtxT(int n, DenseMat<K> g) : n_(n), g_(std::move(g)) {
    if (g_.rows != n || g_.cols != n)
      throw std::invalid_argument("metric matrix dimension mismatch");
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        if (!scalar_is_zero(g_.at(j, k) - scalar_conj(g_.at(k, j))))
          throw std::invalid_argument("metric matrix is not Hermitian");
    K det = determinant(g_);
    if (scalar_is_zero(det))
      throw std::domain_error("metric has identically vanishing determinant");
    // dual Gram  <dz_j, dz_k> = c * (g^{-1})_{kj}
    DenseMat<K> adj = adjugate(g_);
    dual_ = DenseMat<K>(n, n);
    K c = NormTraits<K>::covector_norm2();
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) dual_.at(j, k) = c * adj.at(k, j) / det;
    // fundamental form and volume form
    K a = NormTraits<K>::form_scale();
    K i = NormTraits<K>::imag_unit();
    omega_ = FormT<K>(n);
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        omega_.add_term({1, 1}, {uint16_t(1u << j), uint16_t(1u << k)},
                        a * i * g_.at(j, k));
    FormT<K> dv = FormT<K>::scalar(n, K(1));
    K fact(1);
    for (int m = 1; m <= n; ++m) {
      dv = dv.wedge(omega_);
      fact = fact * K(m);
    }
    uint16_t full = uint16_t((1u << n) - 1);
    auto it = dv.comps.find(Bidegree{n, n});
    if (it == dv.comps.end())
      throw std::domain_error("degenerate metric: vanishing volume form");
    vol_ = it->second.at({full, full}) / fact;
  }

  static MetricCtxT identity(int n) {
    DenseMat<K> g(n, n);
    for (int j = 0; j < n; ++j) g.at(j, j) = K(1);
    return MetricCtxT(n, std::move(g));
  }

  int n() const { return n_; }
  const DenseMat<K>& g() const { return g_; }
  const FormT<K>& omega() const { return omega_; }
  const K& vol() const { return vol_; }

  const std::vector<IdxPair>& basis(int p, int q) const {
    auto key = Bidegree{p, q};
    auto it = bases_.find(key);
    if (it == bases_.end())
      it = bases_.emplace(key, bidegree_basis(n_, p, q)).first;
    return it->second;
  }

  // Gram matrix H_{AB} = <e_A, e_B> on the (p,q) basis
  const DenseMat<K>& gram(int p, int q) const {
    auto key = Bidegree{p, q};
    auto it = grams_.find(key);
    if (it != grams_.end()) return it->second;
    const auto& bs = basis(p, q);
    DenseMat<K> h(int(bs.size()), int(bs.size()));
    for (size_t r = 0; r < bs.size(); ++r)
      for (size_t s = 0; s < bs.size(); ++s)
        h.at(int(r), int(s)) = minor_det(bs[r].I, bs[s].I) *
                               scalar_conj(minor_det(bs[r].J, bs[s].J));
    return grams_.emplace(key, std::move(h)).first->second;
  }

  // Inverse Gram, exact and division-free: the (p,q) Gram is the tensor
  // product of compound matrices of the dual metric M, and the inverse of a
  // compound is the compound of the inverse (Cauchy-Binet), with
  // M^{-1} = (1/c) g^T. So the inverse Gram comes straight from minors of g.
  const DenseMat<K>& gram_inv(int p, int q) const {
    auto key = Bidegree{p, q};
    auto it = gram_invs_.find(key);
    if (it != gram_invs_.end()) return it->second;
    const auto& bs = basis(p, q);
    DenseMat<K> h(int(bs.size()), int(bs.size()));
    K c = NormTraits<K>::covector_norm2();
    K cinv = K(1) / c;
    K scale(1);
    for (int t = 0; t < p + q; ++t) scale = scale * cinv;
    for (size_t r = 0; r < bs.size(); ++r)
      for (size_t s = 0; s < bs.size(); ++s)
        h.at(int(r), int(s)) = scale * g_minor_t(bs[r].I, bs[s].I) *
                               scalar_conj(g_minor_t(bs[r].J, bs[s].J));
    return gram_invs_.emplace(key, std::move(h)).first->second;
  }

  // star transform on the (p,q) block: (star u) has, on the complement index
  // of basis slot a, the coefficient sum_b S_{ab} conj(u_b)
  const DenseMat<K>& star_mat(int p, int q) const {
    auto key = Bidegree{p, q};
    auto it = star_mats_.find(key);
    if (it != star_mats_.end()) return it->second;
    const auto& bs = basis(p, q);
    const auto& h = gram(p, q);
    DenseMat<K> s(int(bs.size()), int(bs.size()));
    for (size_t a = 0; a < bs.size(); ++a) {
      int sgn = complement_sign_of(bs[a]);
      if (mut::on("star-complement-sign")) sgn = 1;
      for (size_t b = 0; b < bs.size(); ++b) {
        K v = h.at(int(a), int(b)) * vol_;
        if (sgn < 0) v = K(0) - v;
        s.at(int(a), int(b)) = v;
      }
    }
    return star_mats_.emplace(key, std::move(s)).first->second;
  }

  int complement_sign_of(IdxPair a) const {
    uint16_t full = uint16_t((1u << n_) - 1);
    IdxPair comp{uint16_t(~a.I & full), uint16_t(~a.J & full)};
    IdxPair out;
    return sign_util::wedge_sign(a, comp, &out);
  }

  // Precomputed first-order adjoint transform (exact ring only):
  //   (del* v)_F = sum_B P_{FB} v_B + sum_{j,B} Q^j_{FB} dzbar_j(v_B)
  // derived from -star(del(star(v))) with the metric-dependent part
  // differentiated once at build time. `bar` selects delbar*.
  struct AdjMats {
    std::vector<IdxPair> out_basis;
    DenseMat<K> P;
    std::vector<DenseMat<K>> Q;
  };

  const AdjMats& adjoint_mats(bool bar, int p, int q) const {
    static_assert(std::is_same_v<K, RatFun>,
                  "first-order adjoints are exact-ring only");
    auto key = std::array<int, 3>{bar ? 1 : 0, p, q};
    auto it = adj_mats_.find(key);
    if (it != adj_mats_.end()) return it->second;
    uint16_t full = uint16_t((1u << n_) - 1);
    const auto& bs = basis(p, q);
    const auto& s = star_mat(p, q);
    int ep = bar ? n_ - p : n_ - p + 1;
    int eq = bar ? n_ - q + 1 : n_ - q;
    const auto& ebs = basis(ep, eq);
    const auto& sp = star_mat(ep, eq);
    AdjMats mats;
    int tp = bar ? p : p - 1, tq = bar ? q - 1 : q;
    const auto& tb = basis(tp, tq);
    mats.out_basis.resize(size_t(sp.rows));
    for (int f = 0; f < sp.rows; ++f)
      mats.out_basis[size_t(f)] = {uint16_t(~ebs[size_t(f)].I & full),
                                   uint16_t(~ebs[size_t(f)].J & full)};
    (void)tb;
    mats.P = DenseMat<K>(sp.rows, int(bs.size()));
    mats.Q.assign(size_t(n_), DenseMat<K>(sp.rows, int(bs.size())));
    for (size_t a = 0; a < bs.size(); ++a) {
      IdxPair ac{uint16_t(~bs[a].I & full), uint16_t(~bs[a].J & full)};
      for (int j = 0; j < n_; ++j) {
        IdxPair lead = bar ? IdxPair{0, uint16_t(1u << j)}
                           : IdxPair{uint16_t(1u << j), 0};
        IdxPair eix;
        int sgn = sign_util::wedge_sign(lead, ac, &eix);
        if (sgn == 0) continue;
        auto eit = std::lower_bound(ebs.begin(), ebs.end(), eix,
                                    [](IdxPair x, IdxPair y) { return x < y; });
        int e = int(eit - ebs.begin());
        for (size_t b = 0; b < bs.size(); ++b) {
          K sab = s.at(int(a), int(b));
          if (scalar_is_zero(sab)) continue;
          K dsab = bar ? sab.dzbar(j) : sab.dz(j);
          for (int f = 0; f < sp.rows; ++f) {
            K spfe = sp.at(f, e);
            if (scalar_is_zero(spfe)) continue;
            K base = K(0) - spfe;  // leading minus of -star(..)
            if (sgn < 0) base = K(0) - base;
            if (!scalar_is_zero(dsab))
              mats.P.at(f, int(b)) =
                  mats.P.at(f, int(b)) + base * scalar_conj(dsab);
            mats.Q[size_t(j)].at(f, int(b)) =
                mats.Q[size_t(j)].at(f, int(b)) + base * scalar_conj(sab);
          }
        }
      }
    }
    return adj_mats_.emplace(key, std::move(mats)).first->second;
  }

  // determinant of the g^T submatrix picked by row mask a, col mask b
  K g_minor_t(uint16_t a, uint16_t b) const {
    std::vector<int> ri, ci;
    for (int j = 0; j < n_; ++j) {
      if (a & (1u << j)) ri.push_back(j);
      if (b & (1u << j)) ci.push_back(j);
    }
    DenseMat<K> m(int(ri.size()), int(ci.size()));
    for (size_t r = 0; r < ri.size(); ++r)
      for (size_t s = 0; s < ci.size(); ++s)
        m.at(int(r), int(s)) = g_.at(ci[s], ri[r]);
    return determinant(m);
  }

  // determinant of the dual-Gram submatrix picked by row mask a, col mask b
  K minor_det(uint16_t a, uint16_t b) const {
    std::vector<int> ri, ci;
    for (int j = 0; j < n_; ++j) {
      if (a & (1u << j)) ri.push_back(j);
      if (b & (1u << j)) ci.push_back(j);
    }
    DenseMat<K> m(int(ri.size()), int(ci.size()));
    for (size_t r = 0; r < ri.size(); ++r)
      for (size_t s = 0; s < ci.size(); ++s)
        m.at(int(r), int(s)) = dual_.at(ri[r], ci[s]);
    return determinant(m);
  }

  static K determinant(const DenseMat<K>& m) {
    int n = m.rows;
    if (n == 0) return K(1);
    if (n == 1) return m.at(0, 0);
    K det(0);
    // Laplace expansion along the first row; fine for n <= 4
    for (int j = 0; j < n; ++j) {
      if (scalar_is_zero(m.at(0, j))) continue;
      DenseMat<K> sub(n - 1, n - 1);
      for (int r = 1; r < n; ++r) {
        int cc = 0;
        for (int c = 0; c < n; ++c) {
          if (c == j) continue;
          sub.at(r - 1, cc++) = m.at(r, c);
        }
      }
      K term = m.at(0, j) * determinant(sub);
      det = (j % 2 == 0) ? det + term : det - term;
    }
    return det;
  }

  static DenseMat<K> adjugate(const DenseMat<K>& m) {
    int n = m.rows;
    DenseMat<K> adj(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        DenseMat<K> sub(n - 1, n - 1);
        for (int r = 0, rr = 0; r < n; ++r) {
          if (r == i) continue;
          for (int c = 0, cc = 0; c < n; ++c) {
            if (c == j) continue;
            sub.at(rr, cc++) = m.at(r, c);
          }
          ++rr;
        }
        K cof = determinant(sub);
        if ((i + j) % 2) cof = K(0) - cof;
        adj.at(j, i) = cof;
      }
    return adj;
  }

 private:
  int n_;
  DenseMat<K> g_;
  DenseMat<K> dual_;
  FormT<K> omega_;
  K vol_;
  mutable std::map<Bidegree, std::vector<IdxPair>> bases_;
  mutable std::map<Bidegree, DenseMat<K>> grams_;
  mutable std::map<Bidegree, DenseMat<K>> gram_invs_;
  mutable std::map<Bidegree, DenseMat<K>> star_mats_;
  mutable std::map<std::array<int, 3>, AdjMats> adj_mats_;
};

using MetricCtx = MetricCtxT<RatFun>;
using MetricCtxC = MetricCtxT<std::complex<double>>;

// evaluate an exact metric at a chart point
inline MetricCtxC eval_metric(const MetricCtx& m,
                              const std::vector<std::complex<double>>& z) {
  DenseMat<std::complex<double>> g(m.n(), m.n());
  for (int j = 0; j < m.n(); ++j)
    for (int k = 0; k < m.n(); ++k) g.at(j, k) = m.g().at(j, k).eval(z);
  return MetricCtxC(m.n(), std::move(g));
}

}  // namespace eta
