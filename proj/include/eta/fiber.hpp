#pragma once

#include "eta/metric.hpp"

namespace eta {

// Fiberwise (zeroth-order) metric operations. Everything here is pure linear
// algebra in each bidegree; exact over RatFun, floating over complex<double>.

template <class K>
K pointwise_inner(const FormT<K>& u, const FormT<K>& v, const MetricCtxT<K>& m) {
  Bidegree du, dv;
  if (u.is_zero() || v.is_zero()) return K(0);
  if (!u.is_pure(&du) || !v.is_pure(&dv) || !(du == dv))
    throw std::invalid_argument("pointwise_inner: bidegree mismatch");
  const auto& h = m.gram(du.p, du.q);
  const auto& bs = m.basis(du.p, du.q);
  const auto& um = u.comps.at(du);
  const auto& vm = v.comps.at(dv);
  K s(0);
  for (size_t a = 0; a < bs.size(); ++a) {
    auto ua = um.find(bs[a]);
    if (ua == um.end()) continue;
    for (size_t b = 0; b < bs.size(); ++b) {
      auto vb = vm.find(bs[b]);
      if (vb == vm.end()) continue;
      s = s + ua->second * scalar_conj(vb->second) * h.at(int(a), int(b));
    }
  }
  return s;
}

// sign of e_A ^ e_{A^c} relative to dz_1..dz_n ^ dzbar_1..dzbar_n
inline int complement_sign(int n, IdxPair a) {
  uint16_t full = uint16_t((1u << n) - 1);
  IdxPair comp{uint16_t(~a.I & full), uint16_t(~a.J & full)};
  IdxPair out;
  int s = sign_util::wedge_sign(a, comp, &out);
  return s;
}

// conjugate-linear Hodge star: v ^ star(u) = <v,u> dV for all v; maps
// (p,q) to (n-p,n-q)
template <class K>
FormT<K> hodge_star(const FormT<K>& u, const MetricCtxT<K>& m) {
  int n = m.n();
  FormT<K> r(n);
  uint16_t full = uint16_t((1u << n) - 1);
  for (auto& [d, comp] : u.comps) {
    const auto& bs = m.basis(d.p, d.q);
    const auto& sm = m.star_mat(d.p, d.q);
    for (size_t a = 0; a < bs.size(); ++a) {
      K val(0);
      bool nonzero = false;
      for (size_t b = 0; b < bs.size(); ++b) {
        auto ub = comp.find(bs[b]);
        if (ub == comp.end()) continue;
        val = val + scalar_conj(ub->second) * sm.at(int(a), int(b));
        nonzero = true;
      }
      if (!nonzero || scalar_is_zero(val)) continue;
      IdxPair ac{uint16_t(~bs[a].I & full), uint16_t(~bs[a].J & full)};
      r.add_term({n - d.p, n - d.q}, ac, val);
    }
  }
  return r;
}

// C-linear star variant, star_lin(u) = star(conj u); maps (p,q) to (n-q,n-p)
template <class K>
FormT<K> hodge_star_linear(const FormT<K>& u, const MetricCtxT<K>& m) {
  return hodge_star(u.conj(), m);
}

template <class K>
FormT<K> lefschetz_L(const FormT<K>& u, const MetricCtxT<K>& m) {
  return m.omega().wedge(u);
}

// adjoint of (alpha ^ .) via exact Gram solves, one (a,b)x(p,q) block at a time
template <class K>
FormT<K> wedge_adjoint(const FormT<K>& alpha, const FormT<K>& u,
                       const MetricCtxT<K>& m) {
  FormT<K> r(m.n());
  for (auto& [da, ca] : alpha.comps) {
    FormT<K> apart(m.n());
    apart.comps[da] = ca;
    for (auto& [du, cu] : u.comps) {
      int tp = du.p - da.p, tq = du.q - da.q;
      if (tp < 0 || tq < 0) continue;
      const auto& tb = m.basis(tp, tq);
      if (tb.empty()) continue;
      FormT<K> upart(m.n());
      upart.comps[du] = cu;
      // rhs_D = <u, alpha ^ e_D>
      std::vector<K> rhs(tb.size(), K(0));
      for (size_t dd = 0; dd < tb.size(); ++dd) {
        FormT<K> ed = FormT<K>::basis(m.n(), tb[dd], K(1));
        FormT<K> wd = apart.wedge(ed);
        if (wd.is_zero()) continue;
        rhs[dd] = pointwise_inner(upart, wd, m);
      }
      bool all_zero = true;
      for (auto& x : rhs)
        if (!scalar_is_zero(x)) { all_zero = false; break; }
      if (all_zero) continue;
      // x_C = sum_D Hinv_{D,C} rhs_D solves  x^T H = rhs^T
      const auto& hinv = m.gram_inv(tp, tq);
      bool mut_t = mut::on("gram-inverse-transpose");
      for (size_t cix = 0; cix < tb.size(); ++cix) {
        K x(0);
        for (size_t dd = 0; dd < tb.size(); ++dd) {
          if (scalar_is_zero(rhs[dd])) continue;
          const K& hv = mut_t ? hinv.at(int(cix), int(dd))
                              : hinv.at(int(dd), int(cix));
          x = x + hv * rhs[dd];
        }
        r.add_term({tp, tq}, tb[cix], x);
      }
    }
  }
  return r;
}

template <class K>
FormT<K> lambda_op(const FormT<K>& u, const MetricCtxT<K>& m) {
  return wedge_adjoint(m.omega(), u, m);
}

// star-conjugation adjoints of del/delbar through the precomputed transform
inline Form first_order_star_adjoint(const Form& u, const MetricCtx& m,
                                     bool bar) {
  Form r(u.n);
  for (auto& [d, comp] : u.comps) {
    int tp = d.p - (bar ? 0 : 1), tq = d.q - (bar ? 1 : 0);
    if (tp < 0 || tq < 0) continue;
    const auto& mats = m.adjoint_mats(bar, d.p, d.q);
    const auto& bs = m.basis(d.p, d.q);
    for (size_t b = 0; b < bs.size(); ++b) {
      auto ub = comp.find(bs[b]);
      if (ub == comp.end()) continue;
      std::vector<RatFun> dv(size_t(u.n));
      bool flipd = mut::on("adjoint-deriv-conj");
      for (int j = 0; j < u.n; ++j)
        dv[size_t(j)] = (bar != flipd) ? ub->second.dz(j) : ub->second.dzbar(j);
      for (int f = 0; f < mats.P.rows; ++f) {
        RatFun acc = mats.P.at(f, int(b)) * ub->second;
        for (int j = 0; j < u.n; ++j) {
          if (dv[size_t(j)].is_zero()) continue;
          const RatFun& qjb = mats.Q[size_t(j)].at(f, int(b));
          if (qjb.is_zero()) continue;
          acc += qjb * dv[size_t(j)];
        }
        if (!acc.is_zero()) r.add_term({tp, tq}, mats.out_basis[size_t(f)], acc);
      }
    }
  }
  return r;
}

inline Form del_star(const Form& u, const MetricCtx& m) {
  return first_order_star_adjoint(u, m, false);
}
inline Form delbar_star(const Form& u, const MetricCtx& m) {
  return first_order_star_adjoint(u, m, true);
}

}  // namespace eta
