#include "eta/registry.hpp"

#include <chrono>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "eta/mutation.hpp"

namespace eta {

using op::add;
using op::adj;
using op::adjoint_leaf;
using op::bracket;
using op::cj;
using op::cmul;
using op::compose;
using op::conj_wrap;
using op::deg_scale;
using op::del;
using op::delbar;
using op::ident;
using op::mul;
using op::sub;
using op::wedge;
using op::zero;
using tw::D01_conj;
using tw::D01_expl;
using tw::D10_conj;
using tw::D10_expl;
using tw::D_eta_conj;
using tw::D_eta_expl;
using tw::Dbar_minus_conj;
using tw::Dbar_minus_expl;
using tw::L_op;
using tw::Lambda_op;
using tw::conjD01_expl;
using tw::d_eta;
using tw::d_eta_eta_form;
using tw::d_op;
using tw::dbar_minus_eta;
using tw::dbar_minus_eta_eta_form;
using tw::deg_p;
using tw::deg_q;
using tw::tau01_bracket;
using tw::tau10_bracket;
using tw::tau_eta_bracket;
using tw::tau_eta_closed;
using tw::tau_op;
using tw::taubar_op;
using tw::theta;
using tw::theta_conj;
using tw::theta_inv;

namespace {

const GQ kI = GQ::i();

OpPtr scale_fun(const RatFun& f, OpPtr a) { return compose(mul(f), a); }

// n - p and friends as degree scalars (bound to the input component)
OpPtr deg_nmp() {
  return deg_scale([](int p, int, int n) { return GQ(n - p); });
}
OpPtr deg_pq_diff() {
  return deg_scale([](int p, int q, int) { return GQ(p - q); });
}
OpPtr deg_qp_diff() {
  return deg_scale([](int p, int q, int) { return GQ(q - p); });
}
OpPtr deg_total() {
  return deg_scale([](int p, int q, int) { return GQ(p + q); });
}

Form del_form(const CaseEnv& env, const RatFun& f) {
  Form r(env.n);
  for (int j = 0; j < env.n; ++j) {
    RatFun d = f.dz(j);
    if (!d.is_zero()) r.add_term({1, 0}, {uint16_t(1u << j), 0}, d);
  }
  return r;
}
Form delbar_form(const CaseEnv& env, const RatFun& f) {
  Form r(env.n);
  for (int j = 0; j < env.n; ++j) {
    RatFun d = f.dzbar(j);
    if (!d.is_zero()) r.add_term({0, 1}, {0, uint16_t(1u << j)}, d);
  }
  return r;
}

std::vector<IdentityCase> build_registry();

}  // namespace

const std::vector<IdentityCase>& all_identities() {
  static const std::vector<IdentityCase> reg = build_registry();
  return reg;
}

namespace {

IdentityCase mk(std::string id, std::string section, std::string statement,
                std::function<std::vector<SubCheck>(const CaseEnv&)> build,
                std::string twist_req = "generic", bool heavy = false,
                std::string special = "none") {
  IdentityCase c;
  c.id = std::move(id);
  c.section = std::move(section);
  c.statement = std::move(statement);
  c.metric_req = "generic";
  c.twist_req = std::move(twist_req);
  c.special_metric = std::move(special);
  c.heavy = heavy;
  c.build = std::move(build);
  return c;
}

std::vector<IdentityCase> build_registry() {
  std::vector<IdentityCase> reg;

  // ---- A: twisted operators and metrics ---------------------------------

  reg.push_back(mk("A1", "twist", "theta_eta o theta_{1/eta} = Id",
                   [](const CaseEnv& env) -> std::vector<SubCheck> {
                     (void)env;
                     return {{"composition", compose(theta(1), theta_inv(1)),
                              ident()},
                             {"reverse", compose(theta_inv(1), theta(1)),
                              ident()}};
                   }));

  reg.push_back(mk(
      "A2", "twist", "conj(theta_eta)(u^{p,q}) = eta^q u^{p,q}",
      [](const CaseEnv& env) -> std::vector<SubCheck> {
        (void)env;
        return {{"conjugate-exponent", conj_wrap(theta(1)), theta_conj(1)}};
      }));

  reg.push_back(mk(
      "A3", "twist",
      "theta_eta d theta_eta^{-1} = d_eta - (p/eta)(d_eta eta) ^ .",
      [](const CaseEnv& env) -> std::vector<SubCheck> {
        return {{"routes", D_eta_conj(), D_eta_expl(env.env())}};
      }));

  reg.push_back(mk("A4", "twist", "D_eta^2 = 0",
                   [](const CaseEnv& env) -> std::vector<SubCheck> {
                     OpPtr de = D_eta_expl(env.env());
                     OpPtr dc = D_eta_conj();
                     return {{"explicit", compose(de, de), zero()},
                             {"conjugated", compose(dc, dc), zero()}};
                   }));

  reg.push_back(mk(
      "A5", "twist",
      "conj(D_{-eta}) = del - eta delbar - (q/eta) del(eta)^. + q delbar(eta)^.",
      [](const CaseEnv& env) -> std::vector<SubCheck> {
        return {{"formula", conj_wrap(D_eta_conj(-1)),
                 Dbar_minus_expl(env.env())}};
      }));

  reg.push_back(mk(
      "A6", "twist",
      "del*(rho u) = rho del* u + [Lam, i delbar(rho)^.] u ;  "
      "delbar*(rho u) = rho delbar* u - [Lam, i del(rho)^.] u",
      [](const CaseEnv& env) -> std::vector<SubCheck> {
        OpEnv e = env.env();
        Form dr = del_form(env, env.rho), dbr = delbar_form(env, env.rho);
        return {{"del-star",
                 compose(adj(del()), mul(env.rho)),
                 add(compose(mul(env.rho), adj(del())),
                     bracket(Lambda_op(e), cmul(kI, wedge(dbr))))},
                {"delbar-star",
                 compose(adj(delbar()), mul(env.rho)),
                 sub(compose(mul(env.rho), adj(delbar())),
                     bracket(Lambda_op(e), cmul(kI, wedge(dr))))}};
      }));

  reg.push_back(mk(
      "A7", "twist",
      "del*_{omega_eta} = eta^2 del* - 2(n-p) eta [Lam, i delbar(eta)^.] ;  "
      "delbar*_{omega_eta} = delbar* + (2(n-p)/eta) [Lam, i del(eta)^.]",
      [](const CaseEnv& env) -> std::vector<SubCheck> {
        OpEnv e = env.env();
        const Twist& t = *env.twist;
        Form de = t.del_eta(), dbe = t.delbar_eta();
        OpPtr rhs1 =
            sub(compose(mul(t.eta * t.eta), adj(del())),
                cmul(GQ(2),
                     compose(mul(t.eta),
                             compose(bracket(Lambda_op(e), cmul(kI, wedge(dbe))),
                                     deg_nmp()))));
        OpPtr rhs2 =
            add(adj(delbar()),
                cmul(GQ(2),
                     compose(mul(t.inv()),
                             compose(bracket(Lambda_op(e), cmul(kI, wedge(de))),
                                     deg_nmp()))));
        return {{"del-star", tw::del_star_weighted(e, 1), rhs1},
                {"delbar-star", tw::delbar_star_weighted(e, 1), rhs2}};
      }));

  reg.push_back(mk(
      "A8", "twist", "D_eta^* = theta_eta T*_eta theta_eta^{-1}",
      [](const CaseEnv& env) -> std::vector<SubCheck> {
        OpEnv e = env.env();
        // checked as D_eta^* theta_eta = theta_eta T*_eta (same identity,
        // composed with the invertible theta_eta on the right)
        return {{"conjugation", compose(adj(D_eta_conj()), theta(1)),
                 compose(theta(1), tw::T_star(e, 1))}};
      }));

  reg.push_back(mk(
      "A9", "twist",
      "Delta_eta = theta_eta Delta_{omega_eta} theta_eta^{-1}, "
      "Delta_{omega_eta} = d T*_eta + T*_eta d",
      [](const CaseEnv& env) -> std::vector<SubCheck> {
        OpEnv e = env.env();
        OpPtr de = D_eta_expl(e);
        // Delta_eta theta_eta = theta_eta Delta_{omega_eta}
        return {{"laplacian-conjugation",
                 compose(bracket(de, adj(de)), theta(1)),
                 compose(theta(1), tw::laplace_omega_eta(e, 1))}};
      },
      "generic", true));

  // ---- B: commutation relations for D_eta and conj(D_{-eta}) ------------

  reg.push_back(mk(
      "B1", "commutation",
      "D_eta^* v = del*(eta v) + delbar* v - (p-1)(del(eta)^.)* v - "
      "(p/eta)(delbar(eta)^.)* v",
      [](const CaseEnv& env) -> std::vector<SubCheck> {
        const Twist& t = *env.twist;
        OpPtr rhs =
            sub(sub(add(compose(adj(del()), mul(t.eta)), adj(delbar())),
                    compose(adjoint_leaf(wedge(t.del_eta())),
                            deg_scale([](int p, int, int) { return GQ(p - 1); }))),
                compose(adjoint_leaf(wedge(t.delbar_eta())),
                        compose(mul(t.inv()), deg_p())));
        return {{"expansion", adj(D_eta_conj()), rhs}};
      }));

  reg.push_back(mk(
      "B2", "commutation",
      "D_eta^* + (eta tau + conj(tau))^* = -i[Lam, conj(D_{-eta})] - "
      "(k/eta)[Lam, i conj(d_{-eta})(eta)^.] - (i/eta) conj(d_{-eta})(eta)^Lam"
      "  (k = input degree)",
      [](const CaseEnv& env) -> std::vector<SubCheck> {
        OpEnv e = env.env();
        const Twist& t = *env.twist;
        Form dbe = dbar_minus_eta_eta_form(e);
        OpPtr lhs = add(adj(D_eta_conj()),
                        adj(add(compose(mul(t.eta), tau_op(e)), taubar_op(e))));
        OpPtr t1 = cmul(-kI, bracket(Lambda_op(e), Dbar_minus_conj()));
        OpPtr t2 = cmul(GQ(-1),
                        compose(bracket(Lambda_op(e), cmul(kI, wedge(dbe))),
                                compose(deg_total(), mul(t.inv()))));
        OpPtr t3 = cmul(-kI, compose(mul(t.inv()),
                                     compose(wedge(dbe), Lambda_op(e))));
        return {{"preliminary-relation", lhs, add(add(t1, t2), t3)}};
      }));

  reg.push_back(mk(
      "B3", "commutation",
      "tau_eta = eta tau + conj(tau) + i omega^(delbar(eta)^.)* - "
      "(i/eta)(del(eta)^.)*(omega^.) - (n-k-1) del(eta)^. - "
      "((n-k)/eta) delbar(eta)^.",
      [](const CaseEnv& env) -> std::vector<SubCheck> {
        OpEnv e = env.env();
        return {{"closed-form", tau_eta_bracket(e), tau_eta_closed(e)}};
      }));

  reg.push_back(mk(
      "B4", "commutation",
      "the four eta-twisted commutation relations (a)-(d)",
      [](const CaseEnv& env) -> std::vector<SubCheck> {
        OpEnv e = env.env();
        const Twist& t = *env.twist;
        Form dee = d_eta_eta_form(e), dbe = dbar_minus_eta_eta_form(e);
        OpPtr lam = Lambda_op(e), L = L_op(e);
        OpPtr taue = tau_eta_bracket(e);
        OpPtr taubar_m = cj(tau_eta_bracket(e, -1));
        std::vector<SubCheck> out;
        out.emplace_back(
            "(a)", add(adj(D_eta_conj()), adj(taue)),
            add(cmul(-kI, bracket(lam, Dbar_minus_conj())),
                cmul(GQ(env.n),
                     compose(mul(t.inv()),
                             bracket(cmul(kI, wedge(dbe)), lam)))));
        out.emplace_back(
            "(b)", add(adj(Dbar_minus_conj()), adj(taubar_m)),
            sub(cmul(kI, bracket(lam, D_eta_conj())),
                cmul(GQ(env.n),
                     compose(mul(t.inv()),
                             bracket(cmul(kI, wedge(dee)), lam)))));
        out.emplace_back(
            "(c)", add(D_eta_expl(e), taue),
            sub(cmul(kI, bracket(adj(Dbar_minus_conj()), L)),
                cmul(GQ(env.n),
                     compose(mul(t.inv()),
                             bracket(L, cmul(kI, adjoint_leaf(wedge(dbe))))))));
        out.emplace_back(
            "(d)", add(Dbar_minus_expl(e), taubar_m),
            add(cmul(-kI, bracket(adj(D_eta_conj()), L)),
                cmul(GQ(env.n),
                     compose(mul(t.inv()),
                             bracket(L, cmul(kI, adjoint_leaf(wedge(dee))))))));
        return out;
      }));

  reg.push_back(mk(
      "B5", "commutation",
      "rough eta-BKN: Delta_eta = conj(Delta_{-eta}) + i[[D_eta, conj(D_{-eta})], Lam] "
      "+ [conj(D_{-eta}), conj(tau_{-eta})*] - [D_eta, tau_eta*] "
      "+ n[D_eta, (1/eta)[i conj(d_{-eta})(eta)^., Lam]] "
      "+ n[conj(D_{-eta}), (1/eta)[i d_eta(eta)^., Lam]]",
      [](const CaseEnv& env) -> std::vector<SubCheck> {
        OpEnv e = env.env();
        const Twist& t = *env.twist;
        Form dee = d_eta_eta_form(e), dbe = dbar_minus_eta_eta_form(e);
        OpPtr lam = Lambda_op(e);
        OpPtr De = D_eta_expl(e), Dbm = Dbar_minus_expl(e);
        OpPtr taue = tau_eta_bracket(e);
        OpPtr taubar_m = cj(tau_eta_bracket(e, -1));
        OpPtr rhs = add(
            add(bracket(Dbm, adj(Dbm)),
                cmul(kI, bracket(bracket(De, Dbm), lam))),
            add(sub(bracket(Dbm, adj(taubar_m)), bracket(De, adj(taue))),
                add(cmul(GQ(env.n),
                         bracket(De, compose(mul(t.inv()),
                                             bracket(cmul(kI, wedge(dbe)), lam)))),
                    cmul(GQ(env.n),
                         bracket(Dbm,
                                 compose(mul(t.inv()),
                                         bracket(cmul(kI, wedge(dee)), lam)))))));
        return {{"rough-BKN", bracket(De, adj(De)), rhs}};
      },
      "generic", true));

  reg.push_back(mk(
      "B6", "commutation",
      "[L, tau_eta] = 3 D_eta(omega)^. ;  [Lam, tau_eta] = 2i conj(tau_{-eta})* ;  "
      "[D_eta, conj(D_{-eta})*] = -[D_eta, conj(tau_{-eta})*] - "
      "[D_eta, (n/eta)(conj(d_{-eta})(eta)^.)*] ;  and the S_omega identity",
      [](const CaseEnv& env) -> std::vector<SubCheck> {
        OpEnv e = env.env();
        const Twist& t = *env.twist;
        OpPtr lam = Lambda_op(e), L = L_op(e);
        OpPtr De = D_eta_expl(e), Dbm = Dbar_minus_expl(e);
        OpPtr taue = tau_eta_bracket(e);
        OpPtr taubar_m = cj(tau_eta_bracket(e, -1));
        Form dw = tw::D_eta_omega_form(e);
        Form dee = d_eta_eta_form(e), dbe = dbar_minus_eta_eta_form(e);
        std::vector<SubCheck> out;
        out.emplace_back("(i)", bracket(L, taue), cmul(GQ(3), wedge(dw)));
        out.emplace_back("(ii)", bracket(lam, taue),
                         cmul(GQ(0) + GQ(2) * kI, adj(taubar_m)));
        out.emplace_back(
            "(iii)", bracket(De, adj(Dbm)),
            sub(cmul(GQ(-1), bracket(De, adj(taubar_m))),
                bracket(De, cmul(GQ(env.n),
                                 compose(mul(t.inv()),
                                         adjoint_leaf(wedge(dbe)))))));
        out.emplace_back(
            "(iv)",
            sub(add(bracket(De, adj(De)), bracket(De, adj(taue))),
                bracket(Dbm, adj(taubar_m))),
            add(add(bracket(add(De, taue), adj(add(De, taue))),
                    tw::S_omega(e)),
                cmul(GQ(env.n),
                     compose(mul(t.inv()),
                             bracket(taue, adjoint_leaf(wedge(dee)))))));
        return out;
      },
      "generic", true));

  reg.push_back(mk(
      "B7", "commutation",
      "refined eta-BKN: Delta_eta = [conj(D_{-eta}) + conj(tau_{-eta}), "
      "(conj(D_{-eta}) + conj(tau_{-eta}))*] + T_omega^(eta) "
      "+ i[[D_eta, conj(D_{-eta})], Lam] "
      "+ n[conj(D_{-eta}) + conj(tau_{-eta}), (1/eta)(conj(d_{-eta})(eta)^.)*] "
      "- n[D_eta, (1/eta)(d_eta(eta)^.)*]  ;  T_omega^(eta) = conj(S_omega^(-eta))",
      [](const CaseEnv& env) -> std::vector<SubCheck> {
        OpEnv e = env.env();
        const Twist& t = *env.twist;
        OpPtr lam = Lambda_op(e);
        OpPtr De = D_eta_expl(e), Dbm = Dbar_minus_expl(e);
        OpPtr taubar_m = cj(tau_eta_bracket(e, -1));
        Form dee = d_eta_eta_form(e), dbe = dbar_minus_eta_eta_form(e);
        OpPtr dbm_t = add(Dbm, taubar_m);
        OpPtr rhs = add(
            add(bracket(dbm_t, adj(dbm_t)), tw::T_omega_eta_def(e)),
            add(cmul(kI, bracket(bracket(De, Dbm), lam)),
                sub(cmul(GQ(env.n),
                         bracket(dbm_t, compose(mul(t.inv()),
                                                adjoint_leaf(wedge(dbe))))),
                    cmul(GQ(env.n),
                         bracket(De, compose(mul(t.inv()),
                                             adjoint_leaf(wedge(dee))))))));
        return {{"refined-BKN", bracket(De, adj(De)), rhs},
                {"T-consistency", tw::T_omega_eta_def(e),
                 tw::T_omega_eta_closed(e)}};
      },
      "generic", true));

  reg.push_back(mk(
      "B8", "commutation",
      "[D_eta, conj(D_{-eta})] and i[[D_eta, conj(D_{-eta})], Lam] closed forms",
      [](const CaseEnv& env) -> std::vector<SubCheck> {
        OpEnv e = env.env();
        const Twist& t = *env.twist;
        RatFun inv = t.inv();
        RatFun em = t.eta - inv, ep = t.eta + inv;
        Form de = t.del_eta(), dbe = t.delbar_eta();
        Form dde = del(dbe);  // del delbar eta
        Form dd = de.wedge(dbe);
        OpPtr lam = Lambda_op(e);
        OpPtr lhs1 = bracket(D_eta_expl(e), Dbar_minus_expl(e));
        OpPtr rhs1 = add(
            sub(compose(mul(em), compose(wedge(dbe), del())),
                compose(mul(ep), compose(wedge(de), delbar()))),
            add(compose(mul(inv * inv * RatFun(2)),
                        compose(wedge(dd), deg_pq_diff())),
                compose(mul(ep), compose(wedge(dde), deg_qp_diff()))));
        OpPtr lhs2 = cmul(kI, bracket(bracket(D_eta_expl(e), Dbar_minus_expl(e)), lam));
        OpPtr rhs2 = add(
            sub(compose(mul(em),
                        add(compose(bracket(cmul(kI, wedge(dbe)), lam), del()),
                            compose(cmul(kI, wedge(dbe)), bracket(del(), lam)))),
                compose(mul(ep),
                        add(compose(bracket(cmul(kI, wedge(de)), lam), delbar()),
                            compose(cmul(kI, wedge(de)), bracket(delbar(), lam))))),
            add(compose(mul(inv * inv * RatFun(2)),
                        compose(bracket(cmul(kI, wedge(dd)), lam), deg_pq_diff())),
                compose(mul(ep),
                        compose(bracket(cmul(kI, wedge(dde)), lam), deg_qp_diff()))));
        return {{"zeroth-order", lhs1, rhs1}, {"with-Lambda", lhs2, rhs2}};
      }));

  reg.push_back(mk(
      "B9", "commutation",
      "[D_eta(omega)^., conj(D_{-eta})] = (conj(D_{-eta})D_eta(omega))^. ;  "
      "[L, D_eta] = -D_eta(omega)^. ;  [conj(D_{-eta}), L] = conj(D_{-eta})(omega)^.",
      [](const CaseEnv& env) -> std::vector<SubCheck> {
        OpEnv e = env.env();
        Form dw = tw::D_eta_omega_form(e);
        Form dbw = tw::Dbar_minus_omega_form(e);
        Form ddw = eval_op(Dbar_minus_expl(e), dw, e.ctx());
        return {{"product-rule", bracket(wedge(dw), Dbar_minus_expl(e)),
                 wedge(ddw)},
                {"L-bracket", bracket(L_op(e), D_eta_expl(e)),
                 cmul(GQ(-1), wedge(dw))},
                {"L-bracket-conj", bracket(Dbar_minus_expl(e), L_op(e)),
                 wedge(dbw)}};
      }));

  // ---- C: bidegree decomposition ----------------------------------------

  reg.push_back(mk(
      "C1", "bidegree",
      "tau = conj(tau_eta^{0,1}) + [Lam, (1/eta) del(eta)^omega^.] and the "
      "three companion bidegree formulae",
      [](const CaseEnv& env) -> std::vector<SubCheck> {
        OpEnv e = env.env();
        const Twist& t = *env.twist;
        Form de_w = t.del_eta().scaled(t.inv()).wedge(e.metric->omega());
        Form dbe_w = t.delbar_eta().scaled(t.inv()).wedge(e.metric->omega());
        OpPtr lam = Lambda_op(e);
        std::vector<SubCheck> out;
        out.emplace_back("tau", tau_op(e),
                         add(conj_wrap(tau01_bracket(e)),
                             bracket(lam, wedge(de_w))));
        out.emplace_back("taubar", taubar_op(e),
                         add(tau01_bracket(e), bracket(lam, wedge(dbe_w))));
        out.emplace_back(
            "D01+tau01",
            add(D01_expl(e), tau01_bracket(e)),
            sub(sub(add(delbar(), taubar_op(e)),
                    compose(wedge(t.delbar_eta()),
                            compose(mul(t.inv()), deg_p()))),
                bracket(lam, wedge(dbe_w))));
        out.emplace_back(
            "conj-D01+tau01",
            add(conjD01_expl(e), conj_wrap(tau01_bracket(e))),
            sub(sub(add(del(), tau_op(e)),
                    compose(wedge(t.del_eta()),
                            compose(mul(t.inv()), deg_q()))),
                bracket(lam, wedge(de_w))));
        out.emplace_back("tau10-split", tau10_bracket(e),
                         sub(compose(mul(t.eta), tau_op(e)),
                             bracket(lam, wedge(t.del_eta().wedge(
                                              e.metric->omega())))));
        return out;
      }));

  reg.push_back(mk(
      "C2", "bidegree",
      "(D_eta^{1,0})^2 = 0 ;  D^{1,0}D^{0,1} + D^{0,1}D^{1,0} = 0 ;  "
      "(D_eta^{0,1})^2 = 0",
      [](const CaseEnv& env) -> std::vector<SubCheck> {
        OpEnv e = env.env();
        OpPtr a = D10_expl(e), b = D01_expl(e);
        return {{"(i)", compose(a, a), zero()},
                {"(ii)", bracket(a, b), zero()},
                {"(iii)", compose(b, b), zero()}};
      }));

  reg.push_back(mk(
      "C3", "bidegree",
      "conj(D_eta^{0,1}) = del - (q/eta) del(eta)^. and its adjoint formula",
      [](const CaseEnv& env) -> std::vector<SubCheck> {
        OpEnv e = env.env();
        const Twist& t = *env.twist;
        OpPtr rhs_adj =
            sub(adj(del()), compose(adjoint_leaf(wedge(t.del_eta())),
                                    compose(mul(t.inv()), deg_q())));
        return {{"conjugate", conj_wrap(D01_conj()), conjD01_expl(e)},
                {"adjoint", adj(conj_wrap(D01_conj())), rhs_adj}};
      }));

  reg.push_back(mk(
      "C4", "bidegree",
      "conj(D^{0,1}_eta)* + conj(tau^{0,1}_eta)* = (del* + tau*) - "
      "(q/eta)(del(eta)^.)* - [((1/eta) del(eta)^omega^.)*, omega^.]",
      [](const CaseEnv& env) -> std::vector<SubCheck> {
        OpEnv e = env.env();
        const Twist& t = *env.twist;
        Form de_w = t.del_eta().scaled(t.inv()).wedge(e.metric->omega());
        OpPtr rhs = sub(
            sub(add(adj(del()), adj(tau_op(e))),
                compose(adjoint_leaf(wedge(t.del_eta())),
                        compose(mul(t.inv()), deg_q()))),
            bracket(adjoint_leaf(wedge(de_w)), L_op(e)));
        return {{"formula",
                 add(adj(conj_wrap(D01_conj())), adj(conj_wrap(tau01_bracket(e)))),
                 rhs}};
      }));

  reg.push_back(mk(
      "C5", "bidegree",
      "D^{1,0}_eta = theta_eta del theta_eta^{-1} and "
      "D^{0,1}_eta = theta_eta delbar theta_eta^{-1}",
      [](const CaseEnv& env) -> std::vector<SubCheck> {
        OpEnv e = env.env();
        return {{"(1,0)", D10_expl(e), D10_conj()},
                {"(0,1)", D01_expl(e), D01_conj()}};
      }));

  reg.push_back(mk(
      "C6", "bidegree",
      "D_eta^{0,1} = D_{-eta}^{0,1} ;  tau_eta^{0,1} = tau_{-eta}^{0,1} ;  "
      "Delta'_eta = Delta'_{-eta}",
      [](const CaseEnv& env) -> std::vector<SubCheck> {
        OpEnv e = env.env();
        return {{"operator", D01_expl(e, 1), D01_expl(e, -1)},
                {"torsion", tau01_bracket(e, 1), tau01_bracket(e, -1)},
                {"laplacian", tw::laplace_eta_10conj(e, 1),
                 tw::laplace_eta_10conj(e, -1)}};
      },
      "generic", true));

  reg.push_back(mk(
      "C7", "bidegree",
      "the eight bidegree eta-twisted commutation relations (a')-(d'')",
      [](const CaseEnv& env) -> std::vector<SubCheck> {
        OpEnv e = env.env();
        const Twist& t = *env.twist;
        OpPtr lam = Lambda_op(e), L = L_op(e);
        // twisted 1-forms: d'_eta eta = eta del eta ; d''_eta eta = delbar eta
        // conj(d'_{-eta}) eta = -eta delbar eta ; conj(d''_{-eta}) eta = del eta
        Form dpe = t.del_eta().scaled(t.eta);
        Form dppe = t.delbar_eta();
        Form cdpm = t.delbar_eta().scaled(-t.eta);
        Form cdppm = t.del_eta();
        OpPtr t10 = tau10_bracket(e), t01 = tau01_bracket(e);
        OpPtr ct10m = cj(tau10_bracket(e, -1)), ct01m = cj(tau01_bracket(e, -1));
        auto nscale = [&](Form w, bool left_bracket) {
          OpPtr b = left_bracket ? bracket(cmul(kI, wedge(w)), lam)
                                 : bracket(lam, cmul(kI, wedge(w)));
          (void)left_bracket;
          return cmul(GQ(env.n), compose(mul(t.inv()), b));
        };
        std::vector<SubCheck> out;
        out.emplace_back("(a')", add(adj(D10_expl(e)), adj(t10)),
                         add(cmul(-kI, bracket(lam, conj_wrap(D10_conj(-1)))),
                             nscale(cdpm, true)));
        out.emplace_back("(a'')", add(adj(D01_expl(e)), adj(t01)),
                         add(cmul(-kI, bracket(lam, conj_wrap(D01_conj(-1)))),
                             nscale(cdppm, true)));
        out.emplace_back("(b')",
                         add(adj(conj_wrap(D10_conj(-1))), adj(ct10m)),
                         sub(cmul(kI, bracket(lam, D10_expl(e))),
                             nscale(dpe, true)));
        out.emplace_back("(b'')",
                         add(adj(conj_wrap(D01_conj(-1))), adj(ct01m)),
                         sub(cmul(kI, bracket(lam, D01_expl(e))),
                             nscale(dppe, true)));
        out.emplace_back(
            "(c')", add(D10_expl(e), t10),
            sub(cmul(kI, bracket(adj(conj_wrap(D10_conj(-1))), L)),
                cmul(GQ(env.n),
                     compose(mul(t.inv()),
                             bracket(L, cmul(kI, adjoint_leaf(wedge(cdpm))))))));
        out.emplace_back(
            "(c'')", add(D01_expl(e), t01),
            sub(cmul(kI, bracket(adj(conj_wrap(D01_conj(-1))), L)),
                cmul(GQ(env.n),
                     compose(mul(t.inv()),
                             bracket(L, cmul(kI, adjoint_leaf(wedge(cdppm))))))));
        out.emplace_back(
            "(d')", add(conj_wrap(D10_conj(-1)), ct10m),
            add(cmul(-kI, bracket(adj(D10_expl(e)), L)),
                cmul(GQ(env.n),
                     compose(mul(t.inv()),
                             bracket(L, cmul(kI, adjoint_leaf(wedge(dpe))))))));
        out.emplace_back(
            "(d'')", add(conj_wrap(D01_conj(-1)), ct01m),
            add(cmul(-kI, bracket(adj(D01_expl(e)), L)),
                cmul(GQ(env.n),
                     compose(mul(t.inv()),
                             bracket(L, cmul(kI, adjoint_leaf(wedge(dppe))))))));
        return out;
      }));

  reg.push_back(mk(
      "C8", "bidegree",
      "rough bidegree eta-BKN: Delta''_eta = Delta'_eta + "
      "i[[D^{0,1}, conj(D^{0,1})], Lam] + [conj(D^{0,1}), conj(tau^{0,1})*] - "
      "[D^{0,1}, (tau^{0,1})*] + n[D^{0,1}, (i/eta)[del(eta)^., Lam]] + "
      "n[conj(D^{0,1}), (i/eta)[delbar(eta)^., Lam]]",
      [](const CaseEnv& env) -> std::vector<SubCheck> {
        OpEnv e = env.env();
        const Twist& t = *env.twist;
        OpPtr lam = Lambda_op(e);
        OpPtr D01 = D01_expl(e), cD01 = conjD01_expl(e);
        OpPtr t01 = tau01_bracket(e);
        OpPtr ct01 = cj(tau01_bracket(e));
        OpPtr rhs = add(
            add(bracket(cD01, adj(cD01)),
                cmul(kI, bracket(bracket(D01, cD01), lam))),
            add(sub(bracket(cD01, adj(ct01)), bracket(D01, adj(t01))),
                add(cmul(GQ(env.n),
                         bracket(D01, compose(mul(t.inv()),
                                              bracket(cmul(kI, wedge(t.del_eta())),
                                                      lam)))),
                    cmul(GQ(env.n),
                         bracket(cD01,
                                 compose(mul(t.inv()),
                                         bracket(cmul(kI, wedge(t.delbar_eta())),
                                                 lam)))))));
        return {{"rough-BKN-bidegree", bracket(D01, adj(D01)), rhs}};
      },
      "generic", true));

  reg.push_back(mk(
      "C9", "bidegree",
      "[L, tau^{0,1}] = 3 D^{0,1}(omega)^. ;  [Lam, tau^{0,1}] = "
      "2i conj(tau^{0,1}_{-eta})* ;  the D^{0,1} analogue of the preliminary "
      "identities with S_omega^(eta)''",
      [](const CaseEnv& env) -> std::vector<SubCheck> {
        OpEnv e = env.env();
        const Twist& t = *env.twist;
        OpPtr lam = Lambda_op(e), L = L_op(e);
        OpPtr D01 = D01_expl(e), cD01m = conj_wrap(D01_conj(-1));
        OpPtr t01 = tau01_bracket(e);
        OpPtr ct01m = cj(tau01_bracket(e, -1));
        Form dw = tw::D01_omega_form(e);
        std::vector<SubCheck> out;
        out.emplace_back("(i)", bracket(L, t01), cmul(GQ(3), wedge(dw)));
        out.emplace_back("(ii)", bracket(lam, t01),
                         cmul(GQ(2) * kI, adj(ct01m)));
        out.emplace_back(
            "(iii)", bracket(D01, adj(cD01m)),
            sub(cmul(GQ(-1), bracket(D01, adj(ct01m))),
                bracket(D01, cmul(GQ(env.n),
                                  compose(mul(t.inv()),
                                          adjoint_leaf(wedge(t.del_eta())))))));
        out.emplace_back(
            "(iv)",
            sub(add(bracket(D01, adj(D01)), bracket(D01, adj(t01))),
                bracket(cD01m, adj(ct01m))),
            add(add(bracket(add(D01, t01), adj(add(D01, t01))),
                    tw::S_omega_01(e)),
                cmul(GQ(env.n),
                     compose(mul(t.inv()),
                             bracket(t01, adjoint_leaf(wedge(t.delbar_eta())))))));
        return out;
      },
      "generic", true));

  reg.push_back(mk(
      "C10", "bidegree",
      "refined bidegree eta-BKN with T_omega^(eta)'' = conj(S_omega^(-eta)'')",
      [](const CaseEnv& env) -> std::vector<SubCheck> {
        OpEnv e = env.env();
        const Twist& t = *env.twist;
        OpPtr lam = Lambda_op(e);
        OpPtr D01 = D01_expl(e), cD01 = conjD01_expl(e);
        OpPtr ct01 = cj(tau01_bracket(e));
        OpPtr cpart = add(cD01, ct01);
        OpPtr rhs = add(
            add(bracket(cpart, adj(cpart)), tw::T_omega_01_def(e)),
            add(cmul(kI, bracket(bracket(D01, cD01), lam)),
                sub(cmul(GQ(env.n),
                         bracket(cpart,
                                 compose(mul(t.inv()),
                                         adjoint_leaf(wedge(t.del_eta()))))),
                    cmul(GQ(env.n),
                         bracket(D01,
                                 compose(mul(t.inv()),
                                         adjoint_leaf(wedge(t.delbar_eta()))))))));
        return {{"refined-BKN-bidegree", bracket(D01, adj(D01)), rhs},
                {"T''-consistency", tw::T_omega_01_def(e),
                 tw::T_omega_01_closed(e)}};
      },
      "generic", true));

  reg.push_back(mk(
      "C11", "bidegree",
      "curvature operator closed forms and the eta-hessian of omega: "
      "D^{0,1}conj(D^{0,1}) omega = eta^2 delbar((1/eta) del((1/eta) omega))",
      [](const CaseEnv& env) -> std::vector<SubCheck> {
        OpEnv e = env.env();
        const Twist& t = *env.twist;
        RatFun inv = t.inv();
        Form de = t.del_eta(), dbe = t.delbar_eta();
        Form dde = del(dbe);
        Form dd = de.wedge(dbe);
        Form gamma_like =
            dd.scaled(RatFun(2) * inv) - dde;  // (2/eta) del^delbar - deldelbar
        OpPtr lam = Lambda_op(e);
        OpPtr D01 = D01_expl(e), cD01 = conjD01_expl(e);
        OpPtr lhs1 = cmul(kI, bracket(D01, cD01));
        OpPtr rhs1 = add(
            cmul(GQ(-1),
                 compose(mul(inv), add(compose(cmul(kI, wedge(dbe)), del()),
                                       compose(cmul(kI, wedge(de)), delbar())))),
            compose(mul(inv),
                    compose(cmul(kI, wedge(gamma_like)), deg_pq_diff())));
        OpPtr lhs2 = cmul(kI, bracket(bracket(D01, cD01), lam));
        OpPtr rhs2 = add(
            add(compose(mul(inv),
                        add(compose(bracket(lam, cmul(kI, wedge(dbe))), del()),
                            compose(bracket(lam, cmul(kI, wedge(de))), delbar()))),
                compose(mul(inv),
                        add(compose(cmul(kI, wedge(dbe)), bracket(lam, del())),
                            compose(cmul(kI, wedge(de)), bracket(lam, delbar()))))),
            compose(bracket(wedge(tw::gamma_eta_form(e)), lam), deg_pq_diff()));
        // (ii) the eta-hessian of omega, three expressions
        const Form& w = e.metric->omega();
        Form lhs3 = eval_op(D01, eval_op(cD01, w, e.ctx()), e.ctx());
        Form route =
            delbar(del(w.scaled(inv)).scaled(inv)).scaled(t.eta * t.eta);
        Form expanded = -del(delbar(w)) -
                        (dbe.wedge(del(w)).scaled(RatFun(2)) -
                         de.wedge(delbar(w)))
                            .scaled(inv) +
                        (dde - dd.scaled(RatFun(3) * inv))
                            .scaled(inv)
                            .wedge(w);
        return {{"zeroth-order", lhs1, rhs1},
                {"with-Lambda", lhs2, rhs2},
                {"eta-hessian", lhs3, route},
                {"eta-hessian-expanded", lhs3, expanded}};
      }));

  reg.push_back(mk(
      "C12", "bidegree",
      "the phi-substitutions for eta = e^{-phi}: (1/eta)i del(eta) = -i del(phi), "
      "(1/eta)i delbar(eta) = -i delbar(phi), (1/eta)i deldelbar(eta) = "
      "i del(phi)^delbar(phi) - i deldelbar(phi), gamma_eta = "
      "i del(phi)^delbar(phi) + i deldelbar(phi)",
      [](const CaseEnv& env) -> std::vector<SubCheck> {
        OpEnv e = env.env();
        const Twist& t = *env.twist;
        RatFun inv = t.inv();
        // phi = -log eta entered through its rational derivatives
        Form dphi = t.del_eta().scaled(-inv);
        Form dbphi = t.delbar_eta().scaled(-inv);
        Form ddbphi = -del(t.delbar_eta().scaled(inv));
        const GQ i = kI;
        Form lhs1 = t.del_eta().scaled(RatFun(i) * inv);
        Form rhs1 = dphi.scaled(RatFun(i)).scaled(RatFun(GQ(-1)));
        Form lhs2 = t.delbar_eta().scaled(RatFun(i) * inv);
        Form rhs2 = dbphi.scaled(RatFun(i)).scaled(RatFun(GQ(-1)));
        Form lhs3 = del(t.delbar_eta()).scaled(RatFun(i) * inv);
        Form rhs3 = dphi.wedge(dbphi).scaled(RatFun(i)) -
                    ddbphi.scaled(RatFun(i));
        Form lhs4 = tw::gamma_eta_form(e);
        Form rhs4 = dphi.wedge(dbphi).scaled(RatFun(i)) +
                    ddbphi.scaled(RatFun(i));
        return {{"del-phi", lhs1, rhs1},
                {"delbar-phi", lhs2, rhs2},
                {"hessian-phi", lhs3, rhs3},
                {"gamma-phi", lhs4, rhs4}};
      }));

  // ---- D: the gamma_eta metric ------------------------------------------

  reg.push_back(mk(
      "D1", "special",
      "conj(D^{0,1}_eta) gamma_eta = 0 and d((1/eta) gamma_eta) = 0",
      [](const CaseEnv& env) -> std::vector<SubCheck> {
        OpEnv e = env.env();
        const Twist& t = *env.twist;
        Form g = tw::gamma_eta_form(e);
        Form z(env.n);
        Form lhs1 = eval_op(conjD01_expl(e), g, e.ctx());
        Form scaledg = g.scaled(t.inv());
        Form lhs2 = del(scaledg) + delbar(scaledg);
        Form dde = del(t.delbar_eta());
        Form aux1 = del(g);
        Form aux2 = t.del_eta()
                        .wedge(dde.scaled(RatFun(kI)))
                        .scaled(-(t.inv() * t.inv()));
        return {{"eta-closed", lhs1, z},
                {"scaled-d-closed", lhs2, z},
                {"del-gamma", aux1, aux2},
                {"del-gamma-alt", aux1, t.del_eta().scaled(t.inv()).wedge(g)}};
      }));

  reg.push_back(mk(
      "D2", "special",
      "with omega = gamma_eta: tau = [Lam, (1/eta) del(eta)^omega^.], "
      "tau_eta^{0,1} = 0 and T_omega^(eta)'' = 0",
      [](const CaseEnv& env) -> std::vector<SubCheck> {
        OpEnv e = env.env();
        const Twist& t = *env.twist;
        Form de_w = t.del_eta().scaled(t.inv()).wedge(e.metric->omega());
        Form z(env.n);
        return {{"torsion", tau_op(e), bracket(Lambda_op(e), wedge(de_w))},
                {"tau01-vanishes", tau01_bracket(e), zero()},
                {"D01-omega", tw::D01_omega_form(e), z},
                {"T''-vanishes", tw::T_omega_01_def(e), zero()}};
      },
      "generic", false, "gamma_eta"));

  reg.push_back(mk(
      "D3", "special",
      "with omega = gamma_eta: the simplified refined BKN and the curvature "
      "split i[[D^{0,1}, conj(D^{0,1})], Lam] = A + (p-q)(p+q-n) Id",
      [](const CaseEnv& env) -> std::vector<SubCheck> {
        OpEnv e = env.env();
        const Twist& t = *env.twist;
        OpPtr lam = Lambda_op(e);
        OpPtr D01 = D01_expl(e), cD01 = conjD01_expl(e);
        OpPtr ct01 = cj(tau01_bracket(e));
        OpPtr cpart = add(cD01, ct01);
        OpPtr simplified = add(
            add(bracket(cD01, adj(cD01)),
                cmul(kI, bracket(bracket(D01, cD01), lam))),
            sub(cmul(GQ(env.n),
                     bracket(cpart, compose(mul(t.inv()),
                                            adjoint_leaf(wedge(t.del_eta()))))),
                cmul(GQ(env.n),
                     bracket(D01, compose(mul(t.inv()),
                                          adjoint_leaf(wedge(t.delbar_eta())))))));
        RatFun inv = t.inv();
        Form de = t.del_eta(), dbe = t.delbar_eta();
        OpPtr a_op = add(
            compose(mul(inv), add(compose(bracket(lam, cmul(kI, wedge(dbe))), del()),
                                  compose(bracket(lam, cmul(kI, wedge(de))), delbar()))),
            compose(mul(inv), add(compose(cmul(kI, wedge(dbe)), bracket(lam, del())),
                                  compose(cmul(kI, wedge(de)), bracket(lam, delbar())))));
        OpPtr split_scalar = deg_scale([](int p, int q, int n) {
          return GQ((p - q) * (p + q - n));
        });
        return {{"simplified-BKN", bracket(D01, adj(D01)), simplified},
                {"curvature-split", cmul(kI, bracket(bracket(D01, cD01), lam)),
                 add(a_op, split_scalar)},
                {"gamma-lefschetz",
                 compose(bracket(wedge(tw::gamma_eta_form(e)), lam),
                         deg_pq_diff()),
                 split_scalar}};
      },
      "generic", true, "gamma_eta"));

  // ---- F: standard commutation relations --------------------------------

  reg.push_back(mk(
      "F1", "appendix",
      "(del + tau)* = i[Lam, delbar] ;  (delbar + conj(tau))* = -i[Lam, del] ;  "
      "del + tau = -i[delbar*, L] ;  delbar + conj(tau) = i[del*, L]",
      [](const CaseEnv& env) -> std::vector<SubCheck> {
        OpEnv e = env.env();
        OpPtr lam = Lambda_op(e), L = L_op(e);
        return {{"(i)", adj(add(del(), tau_op(e))),
                 cmul(kI, bracket(lam, delbar()))},
                {"(ii)", adj(add(delbar(), taubar_op(e))),
                 cmul(-kI, bracket(lam, del()))},
                {"(iii)", add(del(), tau_op(e)),
                 cmul(-kI, bracket(adj(delbar()), L))},
                {"(iv)", add(delbar(), taubar_op(e)),
                 cmul(kI, bracket(adj(del()), L))}};
      },
      "none"));

  reg.push_back(mk(
      "F2", "appendix",
      "Delta'' = Delta' + [del, tau*] - [delbar, conj(tau)*]",
      [](const CaseEnv& env) -> std::vector<SubCheck> {
        OpEnv e = env.env();
        OpPtr rhs = add(bracket(del(), adj(del())),
                        sub(bracket(del(), adj(tau_op(e))),
                            bracket(delbar(), adj(taubar_op(e)))));
        return {{"BKN", bracket(delbar(), adj(delbar())), rhs}};
      },
      "none"));

  reg.push_back(mk(
      "F3", "appendix",
      "Delta'' = [del + tau, (del + tau)*] + T_omega,  "
      "T_omega = [Lam, [Lam, (i/2) del delbar omega ^ .]] - "
      "[del(omega)^., (del(omega)^.)*]",
      [](const CaseEnv& env) -> std::vector<SubCheck> {
        OpEnv e = env.env();
        const Form& w = e.metric->omega();
        OpPtr lam = Lambda_op(e);
        Form ddw = del(delbar(w));
        OpPtr t_om = sub(bracket(lam, bracket(lam, cmul(GQ(mpq_class(0), mpq_class(1, 2)),
                                                        wedge(ddw)))),
                         bracket(wedge(del(w)), adj(wedge(del(w)))));
        OpPtr dt = add(del(), tau_op(e));
        return {{"refined", bracket(delbar(), adj(delbar())),
                 add(bracket(dt, adj(dt)), t_om)}};
      },
      "none"));

  reg.push_back(mk(
      "F4", "appendix",
      "[L, tau] = 3 del(omega)^. ;  [Lam, tau] = -2i conj(tau)* ;  "
      "[del, conj(tau)*] = -[del, delbar*] = [tau, delbar*] ;  "
      "-[delbar, conj(tau)*] = [tau, (del + tau)*] + T_omega",
      [](const CaseEnv& env) -> std::vector<SubCheck> {
        OpEnv e = env.env();
        const Form& w = e.metric->omega();
        OpPtr lam = Lambda_op(e), L = L_op(e);
        Form ddw = del(delbar(w));
        OpPtr t_om = sub(bracket(lam, bracket(lam, cmul(GQ(mpq_class(0), mpq_class(1, 2)),
                                                        wedge(ddw)))),
                         bracket(wedge(del(w)), adj(wedge(del(w)))));
        OpPtr dt = add(del(), tau_op(e));
        return {{"(i)", bracket(L, tau_op(e)), cmul(GQ(3), wedge(del(w)))},
                {"(ii)", bracket(lam, tau_op(e)),
                 cmul(GQ(-2) * kI, adj(taubar_op(e)))},
                {"(iii)a", bracket(del(), adj(taubar_op(e))),
                 cmul(GQ(-1), bracket(del(), adj(delbar())))},
                {"(iii)b", bracket(del(), adj(taubar_op(e))),
                 bracket(tau_op(e), adj(delbar()))},
                {"(iv)", cmul(GQ(-1), bracket(delbar(), adj(taubar_op(e)))),
                 add(bracket(tau_op(e), adj(dt)), t_om)}};
      },
      "none"));

  reg.push_back(mk(
      "F5", "appendix",
      "[del, delbar* + conj(tau)*] = 0 and [delbar, del* + tau*] = 0",
      [](const CaseEnv& env) -> std::vector<SubCheck> {
        OpEnv e = env.env();
        return {{"first", bracket(del(), add(adj(delbar()), adj(taubar_op(e)))),
                 zero()},
                {"second", bracket(delbar(), add(adj(del()), adj(tau_op(e)))),
                 zero()}};
      },
      "none"));

  reg.push_back(mk(
      "F6", "appendix",
      "[del(eta)^., Lam] = i(delbar(eta)^.)* ;  [delbar(eta)^., Lam] = "
      "-i(del(eta)^.)* ;  [L, (del(eta)^.)*] = -i delbar(eta)^. ;  "
      "[(delbar(eta)^.)*, L] = -i del(eta)^. ;  and the two expansions of "
      "[i del(eta)^delbar(eta)^., Lam]",
      [](const CaseEnv& env) -> std::vector<SubCheck> {
        OpEnv e = env.env();
        const Twist& t = *env.twist;
        OpPtr lam = Lambda_op(e), L = L_op(e);
        Form de = t.del_eta(), dbe = t.delbar_eta();
        Form dd = de.wedge(dbe);
        OpPtr wde = wedge(de), wdbe = wedge(dbe);
        std::vector<SubCheck> out;
        out.emplace_back("(a1)", bracket(wde, lam),
                         cmul(kI, adjoint_leaf(wdbe)));
        out.emplace_back("(a2)", bracket(wdbe, lam),
                         cmul(-kI, adjoint_leaf(wde)));
        out.emplace_back("(a3)", bracket(L, adjoint_leaf(wde)),
                         cmul(-kI, wdbe));
        out.emplace_back("(a4)", bracket(adjoint_leaf(wdbe), L),
                         cmul(-kI, wde));
        out.emplace_back(
            "(b1)", bracket(cmul(kI, wedge(dd)), lam),
            sub(compose(wde, adjoint_leaf(wde)),
                compose(adjoint_leaf(wdbe), wdbe)));
        out.emplace_back(
            "(b2)", bracket(cmul(kI, wedge(dd)), lam),
            sub(compose(wdbe, adjoint_leaf(wdbe)),
                compose(adjoint_leaf(wde), wde)));
        return out;
      }));

  reg.push_back(mk(
      "F7", "appendix",
      "[Lam, i d_eta(eta)^.] = -(conj(d_{-eta})(eta)^.)* and "
      "[Lam, i conj(d_{-eta})(eta)^.] = (d_eta(eta)^.)*",
      [](const CaseEnv& env) -> std::vector<SubCheck> {
        OpEnv e = env.env();
        Form dee = d_eta_eta_form(e), dbe = dbar_minus_eta_eta_form(e);
        OpPtr lam = Lambda_op(e);
        return {{"(a)", bracket(lam, cmul(kI, wedge(dee))),
                 cmul(GQ(-1), adjoint_leaf(wedge(dbe)))},
                {"(b)", bracket(lam, cmul(kI, wedge(dbe))),
                 adjoint_leaf(wedge(dee))}};
      }));

  return reg;
}

}  // namespace

// ---- checker --------------------------------------------------------------

namespace {

uint64_t mix(uint64_t a, uint64_t b) {
  a ^= b + 0x9e3779b97f4a7c15ull + (a << 6) + (a >> 2);
  return a;
}

uint64_t case_seed(const std::string& id, uint64_t seed, int trial) {
  uint64_t h = seed;
  for (char c : id) h = mix(h, uint64_t(uint8_t(c)));
  return mix(h, uint64_t(trial) + 1);
}

CaseEnv make_env(const IdentityCase& c, const CheckOptions& opt, int trial) {
  for (int attempt = 0;; ++attempt) {
    try {
      CaseEnv env;
      env.n = opt.n;
      env.deg_bound = opt.deg_bound;
      env.seed = case_seed(c.id, opt.seed, trial) + uint64_t(attempt) * 7919;
      env.heavy = c.heavy;
      env.twist = std::make_shared<Twist>(
          random_twist(opt.n, opt.deg_bound, env.seed));
      TrialRng rng(mix(env.seed, 0xabcdefull));
      env.rho = random_ratfun(rng, opt.n, opt.deg_bound, true);
      if (c.special_metric == "gamma_eta") {
        // omega := gamma_eta, entries read off the curvature form
        Form g = tw::gamma_eta_form(OpEnv{nullptr, env.twist.get()});
        DenseMat<RatFun> mat(opt.n, opt.n);
        auto it = g.comps.find(Bidegree{1, 1});
        if (it == g.comps.end()) throw std::domain_error("gamma degenerate");
        RatFun two(2);  // omega = (i/2) sum g dz^dw  =>  g = 2 * Gamma
        for (int j = 0; j < opt.n; ++j)
          for (int k = 0; k < opt.n; ++k) {
            IdxPair ij{uint16_t(1u << j), uint16_t(1u << k)};
            auto cit = it->second.find(ij);
            RatFun coeff = cit == it->second.end() ? RatFun() : cit->second;
            // coefficient is i*Gamma_{jk}; divide out the i and scale
            mat.at(j, k) = coeff * RatFun(GQ(mpq_class(0), mpq_class(-1))) * two;
          }
        env.metric = std::make_shared<MetricCtx>(opt.n, std::move(mat));
      } else if (opt.metric_override == "flat" || c.metric_req == "flat") {
        env.metric = std::make_shared<MetricCtx>(MetricCtx::identity(opt.n));
      } else {
        env.metric = std::make_shared<MetricCtx>(
            random_metric(opt.n, opt.deg_bound, env.seed, true));
      }
      return env;
    } catch (const std::exception&) {
      if (attempt >= opt.max_setup_retries) throw;
    }
  }
}

// trial form: full random form, or a sparse one for the heavy cases
Form trial_form(const CaseEnv& env, int p, int q, uint64_t salt) {
  if (!env.heavy) return random_form(env.n, p, q, env.deg_bound, salt);
  auto basis = bidegree_basis(env.n, p, q);
  TrialRng rng(mix(salt, 0x5151ull));
  Form f(env.n);
  size_t picks = std::min<size_t>(2, basis.size());
  for (size_t t = 0; t < picks; ++t) {
    size_t ix = size_t(rng.rng() % basis.size());
    f.add_term({p, q}, basis[ix],
               random_ratfun(rng, env.n, env.deg_bound, false));
  }
  if (f.is_zero()) f.add_term({p, q}, basis.front(), RatFun::one());
  return f;
}

std::string first_residual_component(const Form& r) {
  for (auto& [d, m] : r.comps)
    for (auto& [ij, c] : m) {
      std::ostringstream os;
      os << basis_name(r.n, ij) << " : " << c.str();
      return os.str();
    }
  return "";
}

}  // namespace

IdentityReport check_identity(const IdentityCase& c, const CheckOptions& opt) {
  auto t0 = std::chrono::steady_clock::now();
  IdentityReport rep;
  rep.id = c.id;
  rep.statement = c.statement;
  rep.trials = opt.trials;
  for (int trial = 0; trial < opt.trials && rep.pass; ++trial) {
    CaseEnv env = make_env(c, opt, trial);
    std::vector<SubCheck> subs = c.build(env);
    OpCtx ctx = env.ctx();
    for (auto& sub : subs) {
      if (!rep.pass) break;
      if (sub.forms) {
        ++rep.checks_run;
        Form r = sub.forms->first - sub.forms->second;
        if (!r.is_zero()) {
          rep.pass = false;
          rep.counterexample = Counterexample{
              sub.name, env.seed, trial, -1, -1, first_residual_component(r)};
        }
        continue;
      }
      for (int p = 0; p <= opt.n && rep.pass; ++p)
        for (int q = 0; q <= opt.n && rep.pass; ++q) {
          Form u = trial_form(env, p, q,
                              mix(env.seed, uint64_t(p * 131 + q * 17)));
          ++rep.checks_run;
          Form r = eval_op(sub.lhs, u, ctx) - eval_op(sub.rhs, u, ctx);
          if (!r.is_zero()) {
            rep.pass = false;
            rep.counterexample = Counterexample{
                sub.name, env.seed, trial, p, q, first_residual_component(r)};
          }
        }
    }
  }
  rep.millis = std::chrono::duration<double, std::milli>(
                   std::chrono::steady_clock::now() - t0)
                   .count();
  return rep;
}

RegistryFilter parse_filter(const std::vector<std::string>& kv) {
  RegistryFilter f;
  for (auto& item : kv) {
    auto eq = item.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("bad filter item (want key=value): " + item);
    std::string k = item.substr(0, eq), v = item.substr(eq + 1);
    if (k == "id") f.id = v;
    else if (k == "section") f.section = v;
    else if (k == "metric") f.metric = v;
    else if (k == "twist") f.twist = v;
    else if (k == "special_metric") f.special_metric = v;
    else throw std::invalid_argument("unknown filter key: " + k);
  }
  return f;
}

std::vector<const IdentityCase*> list_identities(const RegistryFilter& f) {
  std::vector<const IdentityCase*> out;
  for (auto& c : all_identities()) {
    if (!f.id.empty() && c.id != f.id) continue;
    if (!f.section.empty() && c.section != f.section) continue;
    if (!f.metric.empty() && c.metric_req != f.metric) continue;
    if (!f.twist.empty() && c.twist_req != f.twist) continue;
    if (!f.special_metric.empty() && c.special_metric != f.special_metric)
      continue;
    out.push_back(&c);
  }
  return out;  // registry order is id order by construction
}

SuiteReport run_suite(const RegistryFilter& filter, const CheckOptions& opt,
                      ExecPolicy policy) {
  SuiteReport rep;
  rep.n = opt.n;
  rep.trials = opt.trials;
  rep.seed = opt.seed;
  rep.degree_bound = opt.deg_bound;
  rep.metric_override = opt.metric_override;
  auto cases = list_identities(filter);
  rep.cases.resize(cases.size());
  if (policy == ExecPolicy::OpenMP) {
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < long(cases.size()); ++i)
      rep.cases[size_t(i)] = check_identity(*cases[size_t(i)], opt);
  } else {
    for (size_t i = 0; i < cases.size(); ++i)
      rep.cases[i] = check_identity(*cases[i], opt);
  }
  return rep;
}

std::string registry_fingerprint() {
  std::ostringstream os;
  for (auto& c : all_identities())
    os << c.id << '|' << c.section << '|' << c.statement << '|'
       << c.special_metric << ';';
  return os.str();
}

}  // namespace eta
