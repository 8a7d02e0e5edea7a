#include "eta/twisted.hpp"

namespace eta {

namespace {

// shared body: adjoint of (wedge by dz_j resp dzbar_j after d/dz_j resp
// d/dzbar_j), derived by integrating against the volume weight
Form first_order_star_ibp(const Form& v, const MetricCtx& m, bool bar) {
  int n = m.n();
  Form out(n);
  const RatFun& rho = m.vol();
  for (auto& [dv, comp] : v.comps) {
    int tp = dv.p - (bar ? 0 : 1), tq = dv.q - (bar ? 1 : 0);
    if (tp < 0 || tq < 0) continue;
    const auto& cb = m.basis(tp, tq);          // target basis (C)
    const auto& ab = m.basis(dv.p, dv.q);      // source basis (A)
    const auto& hp = m.gram(dv.p, dv.q);       // H' on (p,q)
    const auto& h = m.gram(tp, tq);            // H on target
    // W_{jC} = sum_A s^A_{jC} (sum_B H'_{AB} conj(v_B)) rho
    std::vector<RatFun> rhs(cb.size(), RatFun::zero());
    for (size_t ci = 0; ci < cb.size(); ++ci) {
      RatFun acc;
      for (int j = 0; j < n; ++j) {
        IdxPair lead = bar ? IdxPair{0, uint16_t(1u << j)}
                           : IdxPair{uint16_t(1u << j), 0};
        IdxPair aij;
        int s = sign_util::wedge_sign(lead, cb[ci], &aij);
        if (s == 0) continue;
        auto ait = std::find(ab.begin(), ab.end(), aij);
        if (ait == ab.end()) continue;
        size_t a = size_t(ait - ab.begin());
        RatFun w;
        for (size_t b = 0; b < ab.size(); ++b) {
          auto vb = comp.find(ab[b]);
          if (vb == comp.end()) continue;
          w += hp.at(int(a), int(b)) * vb->second.conj();
        }
        w = (w * rho).scaled(GQ(s));
        acc += bar ? w.dzbar(j) : w.dz(j);
      }
      rhs[ci] = -acc;
    }
    // solve  sum_D H_{CD} rho y_D = rhs_C,  then x_D = conj(y_D)
    DenseMat<RatFun> lhs(int(cb.size()), int(cb.size()));
    for (size_t r = 0; r < cb.size(); ++r)
      for (size_t c = 0; c < cb.size(); ++c)
        lhs.at(int(r), int(c)) = h.at(int(r), int(c)) * rho;
    LUSolver<RatFun> lu(std::move(lhs));
    auto y = lu.solve(rhs);
    for (size_t d = 0; d < cb.size(); ++d)
      out.add_term({tp, tq}, cb[d], y[d].conj());
  }
  return out;
}

}  // namespace

Form del_star_ibp(const Form& u, const MetricCtx& m) {
  return first_order_star_ibp(u, m, false);
}
Form delbar_star_ibp(const Form& u, const MetricCtx& m) {
  return first_order_star_ibp(u, m, true);
}

}  // namespace eta
