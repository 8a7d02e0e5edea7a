#pragma once

#include <functional>
#include <memory>

#include "eta/mutation.hpp"
#include "eta/operators.hpp"

namespace eta {

struct OpCtx {
  const MetricCtx* metric = nullptr;
  const Twist* twist = nullptr;
};

// Expression tree over the operator primitives. Conjugation and formal
// adjoints are build-time tree transforms (cj / adj below); an Adjoint node
// survives only on the irreducible leaves Del, Delbar and WedgeForm, where
// the evaluator applies the star formula resp. an exact fiber solve.
struct OpExpr;
using OpPtr = std::shared_ptr<const OpExpr>;

struct OpExpr {
  enum class Kind {
    Zero,
    Ident,
    Del,
    Delbar,
    TwistPow,    // multiply the (p,q)-part by (sign*eta)^{expfn(p,q,n)}
    WedgeForm,   // wedge from the left by a fixed form
    RingMul,     // multiply by a fixed ring element
    DegScale,    // multiply the (p,q)-part by the rational scalar sfn(p,q,n)
    ConstMul,    // scale by a Gaussian-rational constant
    Add,
    Compose,     // a after b
    Bracket,     // graded commutator [a, b]
    Adjoint,     // formal adjoint of a primitive leaf
    ConjWrap,    // u -> conj(a(conj u)), kept opaque on purpose
  } kind;

  OpPtr a, b;
  GQ cval;
  Form wform;
  RatFun rval;
  std::function<int(int p, int q, int n)> expfn;
  std::function<GQ(int p, int q, int n)> sfn;
  int tsign = 1;       // sign of the twist in TwistPow
  int wparity = 0;     // parity of the wedged form
  mutable int parity_cache = -2;

  explicit OpExpr(Kind k) : kind(k) {}
};

namespace op {

inline std::shared_ptr<OpExpr> make(OpExpr::Kind k) {
  return std::make_shared<OpExpr>(k);
}

inline OpPtr zero() { return make(OpExpr::Kind::Zero); }
inline OpPtr ident() { return make(OpExpr::Kind::Ident); }
inline OpPtr del() { return make(OpExpr::Kind::Del); }
inline OpPtr delbar() { return make(OpExpr::Kind::Delbar); }

inline OpPtr wedge(Form w) {
  auto e = std::make_shared<OpExpr>(OpExpr::Kind::WedgeForm);
  int par = -1;
  for (auto& [d, m] : w.comps) {
    int p2 = d.degree() & 1;
    if (par == -1) par = p2;
    else if (par != p2)
      throw std::invalid_argument("wedge operator needs pure parity form");
  }
  e->wform = std::move(w);
  e->wparity = par < 0 ? 0 : par;
  return e;
}

inline OpPtr mul(RatFun f) {
  auto e = std::make_shared<OpExpr>(OpExpr::Kind::RingMul);
  e->rval = std::move(f);
  return e;
}

inline OpPtr cmul(GQ c, OpPtr a) {
  auto e = std::make_shared<OpExpr>(OpExpr::Kind::ConstMul);
  e->cval = std::move(c);
  e->a = std::move(a);
  return e;
}

inline OpPtr deg_scale(std::function<GQ(int, int, int)> s) {
  auto e = std::make_shared<OpExpr>(OpExpr::Kind::DegScale);
  e->sfn = std::move(s);
  return e;
}

inline OpPtr twist_pow(std::function<int(int, int, int)> ex, int sign = 1) {
  auto e = std::make_shared<OpExpr>(OpExpr::Kind::TwistPow);
  e->expfn = std::move(ex);
  e->tsign = sign;
  return e;
}

inline OpPtr add(OpPtr a, OpPtr b) {
  if (a->kind == OpExpr::Kind::Zero) return b;
  if (b->kind == OpExpr::Kind::Zero) return a;
  auto e = make(OpExpr::Kind::Add);
  e->a = std::move(a);
  e->b = std::move(b);
  return OpPtr(std::move(e));
}
inline OpPtr sub(OpPtr a, OpPtr b) { return add(a, cmul(GQ(-1), b)); }

inline OpPtr compose(OpPtr a, OpPtr b) {
  if (a->kind == OpExpr::Kind::Zero || b->kind == OpExpr::Kind::Zero)
    return zero();
  if (a->kind == OpExpr::Kind::Ident) return b;
  if (b->kind == OpExpr::Kind::Ident) return a;
  auto e = make(OpExpr::Kind::Compose);
  e->a = std::move(a);
  e->b = std::move(b);
  return OpPtr(std::move(e));
}

inline OpPtr bracket(OpPtr a, OpPtr b) {
  auto e = make(OpExpr::Kind::Bracket);
  e->a = std::move(a);
  e->b = std::move(b);
  return OpPtr(std::move(e));
}

inline OpPtr adjoint_leaf(OpPtr a) {
  auto e = make(OpExpr::Kind::Adjoint);
  e->a = std::move(a);
  return OpPtr(std::move(e));
}

// literal conjugate sandwich; unlike cj() this is NOT simplified, so it can
// sit on one side of an identity that pins down what conjugation does
inline OpPtr conj_wrap(OpPtr a) {
  auto e = make(OpExpr::Kind::ConjWrap);
  e->a = std::move(a);
  return OpPtr(std::move(e));
}

int parity(const OpPtr& e);

inline int combine_parity(int pa, int pb, bool sum) {
  if (pa < 0) return pb;
  if (pb < 0) return pa;
  if (sum) return (pa + pb) & 1;
  if (pa != pb) throw std::logic_error("adding operators of mixed parity");
  return pa;
}

inline int parity(const OpPtr& e) {
  if (e->parity_cache != -2) return e->parity_cache;
  int r = 0;
  switch (e->kind) {
    case OpExpr::Kind::Zero: r = -1; break;
    case OpExpr::Kind::Ident:
    case OpExpr::Kind::TwistPow:
    case OpExpr::Kind::RingMul:
    case OpExpr::Kind::DegScale: r = 0; break;
    case OpExpr::Kind::Del:
    case OpExpr::Kind::Delbar: r = 1; break;
    case OpExpr::Kind::WedgeForm: r = e->wparity; break;
    case OpExpr::Kind::ConstMul:
    case OpExpr::Kind::Adjoint:
    case OpExpr::Kind::ConjWrap: r = parity(e->a); break;
    case OpExpr::Kind::Add: r = combine_parity(parity(e->a), parity(e->b), false); break;
    case OpExpr::Kind::Compose:
    case OpExpr::Kind::Bracket: r = combine_parity(parity(e->a), parity(e->b), true); break;
  }
  e->parity_cache = r;
  return r;
}

// formal adjoint, pushed down to the leaves
inline OpPtr adj(const OpPtr& e) {
  using K = OpExpr::Kind;
  switch (e->kind) {
    case K::Zero:
    case K::Ident:
    case K::DegScale:
    case K::TwistPow: return e;  // real diagonal operators are self-adjoint
    case K::Del:
    case K::Delbar:
    case K::WedgeForm: return adjoint_leaf(e);
    case K::RingMul: return mul(e->rval.conj());
    case K::ConstMul: return cmul(e->cval.conj(), adj(e->a));
    case K::Add: return add(adj(e->a), adj(e->b));
    case K::Compose:
      if (mut::on("adjoint-compose-order"))
        return compose(adj(e->a), adj(e->b));
      return compose(adj(e->b), adj(e->a));
    case K::Bracket: return bracket(adj(e->b), adj(e->a));
    case K::Adjoint: return e->a;
    case K::ConjWrap: return conj_wrap(adj(e->a));
  }
  throw std::logic_error("adj: unreachable");
}

// conjugate operator u -> conj(e(conj u)), pushed down to the leaves
inline OpPtr cj(const OpPtr& e) {
  using K = OpExpr::Kind;
  switch (e->kind) {
    case K::Zero:
    case K::Ident: return e;
    case K::Del: return delbar();
    case K::Delbar: return del();
    case K::WedgeForm: return wedge(e->wform.conj());
    case K::RingMul: return mul(e->rval.conj());
    case K::ConstMul: return cmul(e->cval.conj(), cj(e->a));
    case K::DegScale: {
      auto s = e->sfn;
      return deg_scale([s](int p, int q, int n) { return s(q, p, n); });
    }
    case K::TwistPow: {
      auto ex = e->expfn;
      return twist_pow([ex](int p, int q, int n) { return ex(q, p, n); },
                       e->tsign);
    }
    case K::Add: return add(cj(e->a), cj(e->b));
    case K::Compose: return compose(cj(e->a), cj(e->b));
    case K::Bracket: return bracket(cj(e->a), cj(e->b));
    case K::Adjoint: return adjoint_leaf(cj(e->a));
    case K::ConjWrap: return e->a;
  }
  throw std::logic_error("cj: unreachable");
}

}  // namespace op

Form eval_op(const OpPtr& e, const Form& u, const OpCtx& ctx);

namespace detail {

inline Form apply_twist_pow(const OpExpr& e, const Form& u, const OpCtx& ctx) {
  if (!ctx.twist) throw std::invalid_argument("expression needs a twist");
  Form r(u.n);
  for (auto& [d, m] : u.comps) {
    int ex = e.expfn(d.p, d.q, u.n);
    RatFun f = ctx.twist->pow(ex);
    // (-eta)^k = (-1)^k eta^k
    if (e.tsign < 0 && (ex & 1)) f = -f;
    for (auto& [ij, c] : m) r.add_term(d, ij, c * f);
  }
  return r;
}

inline Form apply_adjoint_leaf(const OpExpr& leaf, const Form& u,
                               const OpCtx& ctx) {
  const MetricCtx& m = *ctx.metric;
  switch (leaf.kind) {
    case OpExpr::Kind::Del:
      return del_star(u, m);
    case OpExpr::Kind::Delbar:
      return delbar_star(u, m);
    case OpExpr::Kind::WedgeForm:
      return wedge_adjoint(leaf.wform, u, m);
    default:
      throw std::logic_error("adjoint of non-primitive leaf");
  }
}

}  // namespace detail

inline Form eval_op(const OpPtr& e, const Form& u, const OpCtx& ctx) {
  using K = OpExpr::Kind;
  switch (e->kind) {
    case K::Zero: return Form(u.n);
    case K::Ident: return u;
    case K::Del: return del(u);
    case K::Delbar: return delbar(u);
    case K::TwistPow: return detail::apply_twist_pow(*e, u, ctx);
    case K::WedgeForm: return e->wform.wedge(u);
    case K::RingMul: return u.scaled(e->rval);
    case K::DegScale: {
      Form r(u.n);
      for (auto& [d, m] : u.comps) {
        GQ s = e->sfn(d.p, d.q, u.n);
        if (s.is_zero()) continue;
        for (auto& [ij, c] : m) r.add_term(d, ij, c * RatFun(s));
      }
      return r;
    }
    case K::ConstMul: return eval_op(e->a, u, ctx).scaled(RatFun(e->cval));
    case K::Add: return eval_op(e->a, u, ctx) + eval_op(e->b, u, ctx);
    case K::Compose: return eval_op(e->a, eval_op(e->b, u, ctx), ctx);
    case K::Bracket: {
      Form ab = eval_op(e->a, eval_op(e->b, u, ctx), ctx);
      Form ba = eval_op(e->b, eval_op(e->a, u, ctx), ctx);
      int sgn = (op::parity(e->a) == 1 && op::parity(e->b) == 1) ? 1 : -1;
      if (mut::on("bracket-parity")) sgn = -1;
      return sgn > 0 ? ab + ba : ab - ba;
    }
    case K::Adjoint: return detail::apply_adjoint_leaf(*e->a, u, ctx);
    case K::ConjWrap: return eval_op(e->a, u.conj(), ctx).conj();
  }
  throw std::logic_error("eval_op: unreachable");
}

}  // namespace eta
