#pragma once

#include <random>

#include "eta/fiber.hpp"
#include "eta/mutation.hpp"

namespace eta {

// coefficientwise d/dz_j wedged with dz_j
inline Form del(const Form& u) {
  Form r(u.n);
  for (auto& [d, m] : u.comps)
    for (auto& [ij, c] : m)
      for (int j = 0; j < u.n; ++j) {
        RatFun dc = mut::on("del-conj-deriv") ? c.dzbar(j) : c.dz(j);
        if (dc.is_zero()) continue;
        IdxPair out;
        int s = sign_util::wedge_sign({uint16_t(1u << j), 0}, ij, &out);
        if (s == 0) continue;
        r.add_term({d.p + 1, d.q}, out, s < 0 ? -dc : dc);
      }
  return r;
}

inline Form delbar(const Form& u) {
  Form r(u.n);
  for (auto& [d, m] : u.comps)
    for (auto& [ij, c] : m)
      for (int j = 0; j < u.n; ++j) {
        RatFun dc = c.dzbar(j);
        if (dc.is_zero()) continue;
        IdxPair out;
        int s = sign_util::wedge_sign({0, uint16_t(1u << j)}, ij, &out);
        if (s == 0) continue;
        r.add_term({d.p, d.q + 1}, out, s < 0 ? -dc : dc);
      }
  return r;
}

inline Form d_total(const Form& u) { return del(u) + delbar(u); }

// Twist function eta: real-valued, invertible in the coefficient field.
struct Twist {
  RatFun eta;
  int n = 0;
  // cache of eta^k (k may be negative); a trial reuses powers heavily
  mutable std::shared_ptr<std::map<int, RatFun>> pow_cache =
      std::make_shared<std::map<int, RatFun>>();

  Twist() = default;
  Twist(RatFun e, int n_) : eta(std::move(e)), n(n_) {
    if (eta.is_zero()) throw std::invalid_argument("twist must be nonzero");
    if (!eta.is_real())
      throw std::invalid_argument("twist must be real-valued (eta = conj eta)");
  }

  const RatFun& pow(int k) const {
    auto it = pow_cache->find(k);
    if (it != pow_cache->end()) return it->second;
    RatFun v;
    if (k == 0) v = RatFun::one();
    else if (k > 0) v = pow(k - 1) * eta;
    else v = pow(k + 1) * eta.inverse();
    return pow_cache->emplace(k, std::move(v)).first->second;
  }
  static Twist constant(long num, long den, int n) {
    return Twist(RatFun::rational(num, den), n);
  }

  bool is_constant() const { return eta.is_constant(); }
  RatFun inv() const { return eta.inverse(); }
  Form del_eta() const {
    Form r(n);
    for (int j = 0; j < n; ++j) {
      RatFun d = eta.dz(j);
      if (!d.is_zero()) r.add_term({1, 0}, {uint16_t(1u << j), 0}, d);
    }
    return r;
  }
  Form delbar_eta() const {
    Form r(n);
    for (int j = 0; j < n; ++j) {
      RatFun d = eta.dzbar(j);
      if (!d.is_zero()) r.add_term({0, 1}, {0, uint16_t(1u << j)}, d);
    }
    return r;
  }
  Form deldelbar_eta() const { return del(delbar_eta()); }

  // positivity (or negativity) spot check on a handful of chart points
  bool has_constant_sign(double radius = 0.4) const {
    int sign = 0;
    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> uni(-radius, radius);
    for (int t = 0; t < 16; ++t) {
      std::vector<std::complex<double>> z(static_cast<size_t>(n), 0.0);
      for (auto& zz : z) zz = {uni(rng), uni(rng)};
      double v = eta.eval(z).real();
      if (std::abs(v) < 1e-12) return false;
      int s = v > 0 ? 1 : -1;
      if (sign == 0) sign = s;
      else if (sign != s) return false;
    }
    return true;
  }
};

// theta_eta: multiply the (p,q)-component by eta^p (conjugated variant: eta^q)
inline Form theta_apply(const Form& u, const RatFun& eta, int expnum,
                        bool use_q) {
  Form r(u.n);
  RatFun inv;
  bool have_inv = false;
  for (auto& [d, m] : u.comps) {
    int e = (use_q ? d.q : d.p) * expnum;
    RatFun f = RatFun::one();
    if (e > 0) {
      for (int t = 0; t < e; ++t) f = f * eta;
    } else if (e < 0) {
      if (!have_inv) { inv = eta.inverse(); have_inv = true; }
      for (int t = 0; t < -e; ++t) f = f * inv;
    }
    for (auto& [ij, c] : m) r.add_term(d, ij, c * f);
  }
  return r;
}

inline Form theta_eta(const Form& u, const Twist& tw) {
  return theta_apply(u, tw.eta, 1, false);
}
inline Form theta_eta_inv(const Form& u, const Twist& tw) {
  return theta_apply(u, tw.eta, -1, false);
}
inline Form theta_eta_conj(const Form& u, const Twist& tw) {
  return theta_apply(u, tw.eta, 1, true);
}

// ---- deterministic random generators for trials -------------------------

struct TrialRng {
  std::mt19937_64 rng;
  explicit TrialRng(uint64_t seed) : rng(seed) {}

  GQ small_rational(int num_range = 4, int den_max = 3) {
    std::uniform_int_distribution<int> num(-num_range, num_range);
    std::uniform_int_distribution<int> den(1, den_max);
    return GQ::rational(num(rng), den(rng));
  }
  GQ small_gaussian(int num_range = 4, int den_max = 3) {
    return small_rational(num_range, den_max) +
           GQ::i() * GQ(small_rational(num_range, den_max));
  }
};

// random polynomial of total degree <= deg_bound, a few terms
inline Poly random_poly(TrialRng& rng, int n, int deg_bound, bool real_valued) {
  Poly p;
  std::uniform_int_distribution<int> var(0, n - 1);
  std::uniform_int_distribution<int> deg(0, deg_bound);
  int terms = 2 + int(rng.rng() % 3);
  for (int t = 0; t < terms; ++t) {
    uint64_t key = 0;
    int d = deg(rng.rng);
    for (int e = 0; e < d; ++e) {
      int j = var(rng.rng);
      key = mono::mul(key, (rng.rng() & 1) ? mono::var_z(j) : mono::var_zbar(j));
    }
    GQ c = real_valued ? rng.small_rational() : rng.small_gaussian();
    p = p + Poly::monomial(key, c);
  }
  if (real_valued) p = p + p.conj();  // force conj-symmetry
  return p;
}

// denominator from the fixed nonvanishing family 1 + sum m_j z_j zbar_j
inline Poly family_denominator(TrialRng& rng, int n) {
  Poly p = Poly::one();
  for (int j = 0; j < n; ++j) {
    std::uniform_int_distribution<int> num(1, 3);
    GQ m = GQ::rational(num(rng.rng), 4);
    p = p + Poly::monomial(mono::mul(mono::var_z(j), mono::var_zbar(j)), m);
  }
  return p;
}

inline RatFun random_ratfun(TrialRng& rng, int n, int deg_bound,
                            bool real_valued) {
  Poly num = random_poly(rng, n, deg_bound, real_valued);
  if (num.is_zero()) num = Poly::one();
  if (rng.rng() & 1) return RatFun::fraction(num, family_denominator(rng, n));
  return RatFun(num);
}

// spec operation random_form: deterministic in (p,q,ring-params,seed)
inline Form random_form(int n, int p, int q, int deg_bound, uint64_t seed) {
  TrialRng rng(seed * 0x9e3779b97f4a7c15ull + uint64_t(p) * 131 + uint64_t(q));
  Form f(n);
  for (auto ij : bidegree_basis(n, p, q))
    f.add_term({p, q}, ij, random_ratfun(rng, n, deg_bound, false));
  if (f.is_zero()) f.add_term({p, q}, bidegree_basis(n, p, q).front(), RatFun::one());
  return f;
}

// real positive-at-samples twist with representable reciprocal
inline Twist random_twist(int n, int deg_bound, uint64_t seed) {
  TrialRng rng(seed * 0xbf58476d1ce4e5b9ull + 7);
  for (int attempt = 0; attempt < 64; ++attempt) {
    Poly num = random_poly(rng, n, deg_bound, true);
    // recentre around a positive constant so samples keep one sign
    Poly shifted = num + Poly::constant(GQ(3));
    RatFun eta = RatFun::fraction(shifted, family_denominator(rng, n));
    Twist tw(eta, n);
    if (tw.has_constant_sign()) return tw;
  }
  throw std::runtime_error("could not sample a sign-definite twist");
}

// identity plus a random Hermitian rational-function perturbation
inline MetricCtx random_metric(int n, int deg_bound, uint64_t seed,
                               bool generic) {
  DenseMat<RatFun> g(n, n);
  for (int j = 0; j < n; ++j) g.at(j, j) = RatFun(1);
  if (generic) {
    TrialRng rng(seed * 0x94d049bb133111ebull + 13);
    // one random diagonal bump and one off-diagonal entry keep the exact
    // arithmetic tractable while exercising every metric-dependent path
    std::uniform_int_distribution<int> pick(0, n - 1);
    int dj = pick(rng.rng);
    Poly diag = random_poly(rng, n, deg_bound, true);
    g.at(dj, dj) = g.at(dj, dj) + RatFun(diag * diag.conj()).scaled(
                                      GQ::rational(1, 8)) +
                   RatFun::rational(1, 2);
    int a = pick(rng.rng), b = pick(rng.rng);
    if (a != b) {
      RatFun off = RatFun(random_poly(rng, n, deg_bound, false))
                       .scaled(GQ::rational(1, 6));
      g.at(a, b) = g.at(a, b) + off;
      g.at(b, a) = g.at(b, a) + off.conj();
    }
  }
  return MetricCtx(n, std::move(g));
}

}  // namespace eta
