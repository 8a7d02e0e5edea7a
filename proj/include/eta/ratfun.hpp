#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "eta/poly.hpp"

namespace eta {

// Rational function num / prod(factors[i]^exp[i]) over Gaussian rationals.
// The denominator is kept as a multiset of monic non-constant factors; every
// factor that exactly divides the numerator is cancelled on normalization.
// Equality is exact via subtraction (identity checks only ever need the
// numerator-is-zero test, which is unconditionally exact).
class RatFun {
 public:
  struct Factor {
    Poly base;  // monic, non-constant
    int exp;
  };

  RatFun() = default;
  RatFun(const Poly& p) : num_(p) {}
  RatFun(const GQ& c) : num_(Poly(c)) {}
  RatFun(long c) : num_(Poly(GQ(c))) {}

  static RatFun zero() { return RatFun(); }
  static RatFun one() { return RatFun(GQ::one()); }
  static RatFun i() { return RatFun(GQ::i()); }
  static RatFun rational(long n, long d) { return RatFun(GQ::rational(n, d)); }
  static RatFun z(int j) { return RatFun(Poly::z(j)); }
  static RatFun zbar(int j) { return RatFun(Poly::zbar(j)); }

  static RatFun fraction(Poly num, Poly den) {
    RatFun r(std::move(num));
    return r / RatFun(std::move(den));
  }

  const Poly& num() const { return num_; }
  const std::vector<Factor>& den() const { return den_; }
  bool is_zero() const { return num_.is_zero(); }
  bool is_constant() const { return den_.empty() && num_.is_constant(); }
  GQ constant_value() const { return num_.constant_value(); }

  Poly den_expanded() const {
    Poly d = Poly::one();
    for (auto& f : den_)
      for (int e = 0; e < f.exp; ++e) d = d * f.base;
    return d;
  }

  RatFun operator-() const {
    RatFun r = *this;
    r.num_ = -r.num_;
    return r;
  }

  RatFun operator+(const RatFun& o) const {
    if (is_zero()) return o;
    if (o.is_zero()) return *this;
    RatFun r;
    if (same_den(o)) {
      // both sides already reduced over the same factors; skip the
      // cancellation probe, a sum is almost never newly divisible
      r.num_ = num_ + o.num_;
      if (!r.num_.is_zero()) r.den_ = den_;
      return r;
    }
    r.den_ = merge_lcm(den_, o.den_);
    Poly a = num_ * cofactor(r.den_, den_);
    Poly b = o.num_ * cofactor(r.den_, o.den_);
    r.num_ = a + b;
    r.normalize();
    return r;
  }

  bool same_den(const RatFun& o) const {
    if (den_.size() != o.den_.size()) return false;
    for (size_t i = 0; i < den_.size(); ++i)
      if (den_[i].exp != o.den_[i].exp || !(den_[i].base == o.den_[i].base))
        return false;
    return true;
  }
  RatFun operator-(const RatFun& o) const { return *this + (-o); }

  RatFun operator*(const RatFun& o) const {
    if (is_zero() || o.is_zero()) return RatFun();
    RatFun r;
    r.num_ = num_ * o.num_;
    r.den_ = merge_mul(den_, o.den_);
    r.normalize();
    return r;
  }

  RatFun operator/(const RatFun& o) const {
    if (o.is_zero()) throw std::domain_error("division by zero rational function");
    if (is_zero()) return RatFun();
    RatFun r;
    r.num_ = num_ * o.den_expanded();
    r.den_ = den_;
    if (!o.num_.is_constant()) {
      GQ lead = o.num_.leading().second;
      push_factor(r.den_, o.num_.scaled(GQ::one() / lead), 1);
      r.num_ = r.num_.scaled(GQ::one() / lead);
    } else {
      r.num_ = r.num_.scaled(GQ::one() / o.num_.constant_value());
    }
    r.normalize();
    return r;
  }

  RatFun inverse() const { return RatFun::one() / *this; }

  RatFun scaled(const GQ& c) const {
    if (c.is_zero()) return RatFun();
    RatFun r = *this;
    r.num_ = r.num_.scaled(c);
    return r;
  }

  RatFun& operator+=(const RatFun& o) { return *this = *this + o; }
  RatFun& operator-=(const RatFun& o) { return *this = *this - o; }
  RatFun& operator*=(const RatFun& o) { return *this = *this * o; }

  RatFun conj() const {
    RatFun r;
    r.num_ = num_.conj();
    for (auto& f : den_) {
      Poly b = f.base.conj();
      GQ lead = b.leading().second;
      if (!(lead == GQ::one())) {
        b = b.scaled(GQ::one() / lead);
        for (int e = 0; e < f.exp; ++e) r.num_ = r.num_.scaled(GQ::one() / lead);
      }
      push_factor(r.den_, b, f.exp);
    }
    sort_factors(r.den_);
    r.normalize();
    return r;
  }

  // d/dz_j and d/dzbar_j via the quotient rule on the factored form; only
  // factors actually depending on the variable enter the rule
  RatFun deriv(int j, bool bar) const {
    if (is_zero()) return RatFun();
    auto d = [&](const Poly& p) { return bar ? p.deriv_zbar(j) : p.deriv_z(j); };
    std::vector<size_t> act;
    std::vector<Poly> dact;
    for (size_t i = 0; i < den_.size(); ++i) {
      Poly df = d(den_[i].base);
      if (!df.is_zero()) {
        act.push_back(i);
        dact.push_back(std::move(df));
      }
    }
    RatFun r;
    Poly prod_act = Poly::one();
    for (size_t i : act) prod_act = prod_act * den_[i].base;
    Poly out = d(num_) * prod_act;
    for (size_t a = 0; a < act.size(); ++a) {
      Poly rest = Poly::one();
      for (size_t b = 0; b < act.size(); ++b)
        if (b != a) rest = rest * den_[act[b]].base;
      out = out - num_.scaled(GQ(den_[act[a]].exp)) * dact[a] * rest;
    }
    r.num_ = out;
    for (size_t i = 0; i < den_.size(); ++i) {
      bool active = std::find(act.begin(), act.end(), i) != act.end();
      push_factor(r.den_, den_[i].base, den_[i].exp + (active ? 1 : 0));
    }
    sort_factors(r.den_);
    r.normalize();
    return r;
  }
  RatFun dz(int j) const { return deriv(j, false); }
  RatFun dzbar(int j) const { return deriv(j, true); }

  std::complex<double> eval(const std::vector<std::complex<double>>& z) const {
    std::complex<double> v = num_.eval(z);
    for (auto& f : den_) {
      std::complex<double> b = f.base.eval(z);
      for (int e = 0; e < f.exp; ++e) v /= b;
    }
    return v;
  }

  bool operator==(const RatFun& o) const { return (*this - o).is_zero(); }
  bool operator!=(const RatFun& o) const { return !(*this == o); }

  bool is_real() const { return *this == conj(); }

  bool identical(const RatFun& o) const {
    // syntactic comparison (used by determinism tests)
    if (!(num_ == o.num_) || den_.size() != o.den_.size()) return false;
    for (size_t i = 0; i < den_.size(); ++i)
      if (den_[i].exp != o.den_[i].exp || !(den_[i].base == o.den_[i].base))
        return false;
    return true;
  }

  std::string str() const {
    if (den_.empty()) return num_.str();
    std::string s = "(" + num_.str() + ") / (";
    for (size_t i = 0; i < den_.size(); ++i) {
      if (i) s += " * ";
      s += "[" + den_[i].base.str() + "]";
      if (den_[i].exp > 1) s += "^" + std::to_string(den_[i].exp);
    }
    return s + ")";
  }

 private:
  Poly num_;
  std::vector<Factor> den_;

  static void sort_factors(std::vector<Factor>& fs) {
    std::sort(fs.begin(), fs.end(), [](const Factor& a, const Factor& b) {
      return a.base.cmp(b.base) < 0;
    });
  }

  static void push_factor(std::vector<Factor>& fs, const Poly& base, int exp) {
    for (auto& f : fs)
      if (f.base == base) {
        f.exp += exp;
        return;
      }
    fs.push_back({base, exp});
  }

  static std::vector<Factor> merge_lcm(const std::vector<Factor>& a,
                                       const std::vector<Factor>& b) {
    std::vector<Factor> r = a;
    for (auto& f : b) {
      bool found = false;
      for (auto& g : r)
        if (g.base == f.base) {
          g.exp = std::max(g.exp, f.exp);
          found = true;
          break;
        }
      if (!found) r.push_back(f);
    }
    sort_factors(r);
    return r;
  }

  static std::vector<Factor> merge_mul(const std::vector<Factor>& a,
                                       const std::vector<Factor>& b) {
    std::vector<Factor> r = a;
    for (auto& f : b) push_factor(r, f.base, f.exp);
    sort_factors(r);
    return r;
  }

  // prod over full, of base^(full.exp - part.exp)
  static Poly cofactor(const std::vector<Factor>& full,
                       const std::vector<Factor>& part) {
    Poly p = Poly::one();
    for (auto& f : full) {
      int have = 0;
      for (auto& g : part)
        if (g.base == f.base) have = g.exp;
      for (int e = have; e < f.exp; ++e) p = p * f.base;
    }
    return p;
  }

  void normalize() {
    if (num_.is_zero()) {
      den_.clear();
      return;
    }
    for (size_t i = 0; i < den_.size();) {
      bool cancelled = false;
      while (den_[i].exp > 0) {
        auto q = num_.div_exact(den_[i].base, 4 * num_.size() + 32);
        if (!q) break;
        num_ = *q;
        --den_[i].exp;
        cancelled = true;
      }
      if (den_[i].exp == 0) {
        den_.erase(den_.begin() + long(i));
      } else {
        ++i;
      }
      (void)cancelled;
    }
  }
};

inline RatFun operator*(const GQ& c, const RatFun& f) { return RatFun(c) * f; }
inline RatFun operator*(long c, const RatFun& f) { return RatFun(c) * f; }

}  // namespace eta
