#pragma once

#include <algorithm>
#include <cassert>
#include <complex>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "eta/gq.hpp"

namespace eta {

// Monomials in z_1..z_n, zbar_1..zbar_n for n <= 4, packed into a uint64:
// byte j (j = 0..3) holds the exponent of z_{j+1}, byte 4+j the exponent of
// zbar_{j+1}. Exponents are capped at 127 so that packed addition never
// carries across fields. The numeric order on packed keys is a monomial
// order (compatible with multiplication), which makes single-divisor exact
// division terminate.
namespace mono {

constexpr int kMaxVars = 4;
constexpr uint64_t kHighBits = 0x8080808080808080ull;

inline uint64_t var_z(int j) { return uint64_t(1) << (8 * j); }
inline uint64_t var_zbar(int j) { return uint64_t(1) << (8 * (kMaxVars + j)); }

inline int exp_z(uint64_t m, int j) { return int((m >> (8 * j)) & 0xff); }
inline int exp_zbar(uint64_t m, int j) {
  return int((m >> (8 * (kMaxVars + j))) & 0xff);
}

inline uint64_t mul(uint64_t a, uint64_t b) {
  uint64_t s = a + b;
  if (s & kHighBits) throw std::overflow_error("monomial exponent overflow");
  return s;
}

inline bool divides(uint64_t a, uint64_t b) {
  // does a divide b, i.e. every exponent of a <= that of b?
  // per-byte comparison via borrow detection on b - a
  for (int i = 0; i < 8; ++i)
    if (((a >> (8 * i)) & 0xff) > ((b >> (8 * i)) & 0xff)) return false;
  return true;
}

inline uint64_t div(uint64_t b, uint64_t a) { return b - a; }

inline uint64_t conj(uint64_t m) {
  return (m >> 32) | (m << 32);  // swap z and zbar blocks
}

inline int total_degree(uint64_t m) {
  int d = 0;
  for (int i = 0; i < 8; ++i) d += int((m >> (8 * i)) & 0xff);
  return d;
}

}  // namespace mono

// Sparse multivariate polynomial over GQ, terms sorted by packed key.
class Poly {
 public:
  using Term = std::pair<uint64_t, GQ>;

  Poly() = default;
  explicit Poly(const GQ& c) {
    if (!c.is_zero()) terms_.push_back({0, c});
  }
  static Poly constant(const GQ& c) { return Poly(c); }
  static Poly one() { return Poly(GQ::one()); }
  static Poly z(int j) { return monomial(mono::var_z(j), GQ::one()); }
  static Poly zbar(int j) { return monomial(mono::var_zbar(j), GQ::one()); }
  static Poly monomial(uint64_t key, const GQ& c) {
    Poly p;
    if (!c.is_zero()) p.terms_.push_back({key, c});
    return p;
  }

  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const {
    return terms_.empty() || (terms_.size() == 1 && terms_[0].first == 0);
  }
  GQ constant_value() const {
    return terms_.empty() ? GQ::zero() : terms_[0].second;
  }
  const Term& leading() const { return terms_.back(); }
  size_t size() const { return terms_.size(); }

  int total_degree() const {
    int d = 0;
    for (auto& t : terms_) d = std::max(d, mono::total_degree(t.first));
    return d;
  }

  Poly operator-() const {
    Poly r = *this;
    for (auto& t : r.terms_) t.second = -t.second;
    return r;
  }

  Poly operator+(const Poly& o) const {
    Poly r;
    r.terms_.reserve(terms_.size() + o.terms_.size());
    size_t i = 0, j = 0;
    while (i < terms_.size() || j < o.terms_.size()) {
      if (j == o.terms_.size() ||
          (i < terms_.size() && terms_[i].first < o.terms_[j].first)) {
        r.terms_.push_back(terms_[i++]);
      } else if (i == terms_.size() || o.terms_[j].first < terms_[i].first) {
        r.terms_.push_back(o.terms_[j++]);
      } else {
        GQ c = terms_[i].second + o.terms_[j].second;
        if (!c.is_zero()) r.terms_.push_back({terms_[i].first, c});
        ++i;
        ++j;
      }
    }
    return r;
  }
  Poly operator-(const Poly& o) const { return *this + (-o); }

  Poly operator*(const Poly& o) const {
    if (is_zero() || o.is_zero()) return Poly();
    // accumulate into a flat vector, then sort+combine
    std::vector<Term> acc;
    acc.reserve(terms_.size() * o.terms_.size());
    for (auto& a : terms_)
      for (auto& b : o.terms_)
        acc.push_back({mono::mul(a.first, b.first), a.second * b.second});
    std::sort(acc.begin(), acc.end(),
              [](const Term& x, const Term& y) { return x.first < y.first; });
    Poly r;
    r.terms_.reserve(acc.size());
    for (auto& t : acc) {
      if (!r.terms_.empty() && r.terms_.back().first == t.first) {
        r.terms_.back().second += t.second;
        if (r.terms_.back().second.is_zero()) r.terms_.pop_back();
      } else if (!t.second.is_zero()) {
        r.terms_.push_back(t);
      }
    }
    return r;
  }

  Poly scaled(const GQ& c) const {
    if (c.is_zero()) return Poly();
    Poly r = *this;
    for (auto& t : r.terms_) t.second *= c;
    return r;
  }

  // per-variable degree profile, packed like a monomial key
  uint64_t degree_profile() const {
    uint64_t prof = 0;
    for (auto& t : terms_)
      for (int i = 0; i < 8; ++i) {
        uint64_t e = (t.first >> (8 * i)) & 0xff;
        uint64_t cur = (prof >> (8 * i)) & 0xff;
        if (e > cur) prof = (prof & ~(0xffull << (8 * i))) | (e << (8 * i));
      }
    return prof;
  }

  // exact division; nullopt when o does not divide *this. `budget` caps the
  // reduction steps: callers that use division opportunistically (fraction
  // cancellation) give up early instead of chasing a failing reduction.
  std::optional<Poly> div_exact(const Poly& o, size_t budget = 0) const {
    if (o.is_zero()) throw std::domain_error("division by zero polynomial");
    if (is_zero()) return Poly();
    // cheap rejects: both extreme terms of a product factor through, and the
    // divisor's degree profile must fit inside ours
    if (!mono::divides(o.terms_.back().first, terms_.back().first))
      return std::nullopt;
    if (!mono::divides(o.terms_.front().first, terms_.front().first))
      return std::nullopt;
    if (!mono::divides(o.degree_profile(), degree_profile()))
      return std::nullopt;
    std::map<uint64_t, GQ> rem;
    for (auto& t : terms_) rem.emplace(t.first, t.second);
    Poly quot;
    const Term& lead = o.leading();
    size_t steps = 0;
    while (!rem.empty()) {
      if (budget && ++steps > budget) return std::nullopt;
      auto top = std::prev(rem.end());
      if (!mono::divides(lead.first, top->first)) return std::nullopt;
      GQ c = top->second / lead.second;
      uint64_t k = mono::div(top->first, lead.first);
      quot.terms_.push_back({k, c});
      for (auto& t : o.terms_) {
        uint64_t key = mono::mul(k, t.first);
        auto it = rem.find(key);
        if (it == rem.end()) {
          rem.emplace(key, -(c * t.second));
        } else {
          it->second -= c * t.second;
          if (it->second.is_zero()) rem.erase(it);
        }
      }
    }
    std::sort(quot.terms_.begin(), quot.terms_.end(),
              [](const Term& x, const Term& y) { return x.first < y.first; });
    return quot;
  }

  Poly deriv_z(int j) const {
    Poly r;
    for (auto& t : terms_) {
      int e = mono::exp_z(t.first, j);
      if (e == 0) continue;
      r.terms_.push_back({t.first - mono::var_z(j), t.second * GQ(e)});
    }
    return r;
  }
  Poly deriv_zbar(int j) const {
    Poly r;
    for (auto& t : terms_) {
      int e = mono::exp_zbar(t.first, j);
      if (e == 0) continue;
      r.terms_.push_back({t.first - mono::var_zbar(j), t.second * GQ(e)});
    }
    return r;
  }

  Poly conj() const {
    Poly r;
    r.terms_.reserve(terms_.size());
    for (auto& t : terms_) r.terms_.push_back({mono::conj(t.first), t.second.conj()});
    std::sort(r.terms_.begin(), r.terms_.end(),
              [](const Term& x, const Term& y) { return x.first < y.first; });
    return r;
  }

  std::complex<double> eval(const std::vector<std::complex<double>>& z) const {
    std::complex<double> s = 0;
    for (auto& t : terms_) {
      std::complex<double> m = t.second.to_complex();
      for (size_t j = 0; j < z.size(); ++j) {
        for (int e = 0; e < mono::exp_z(t.first, int(j)); ++e) m *= z[j];
        for (int e = 0; e < mono::exp_zbar(t.first, int(j)); ++e)
          m *= std::conj(z[j]);
      }
      s += m;
    }
    return s;
  }

  bool operator==(const Poly& o) const {
    if (terms_.size() != o.terms_.size()) return false;
    for (size_t i = 0; i < terms_.size(); ++i)
      if (terms_[i].first != o.terms_[i].first ||
          terms_[i].second != o.terms_[i].second)
        return false;
    return true;
  }

  // canonical total order (for sorting denominator factors)
  int cmp(const Poly& o) const {
    if (terms_.size() != o.terms_.size())
      return terms_.size() < o.terms_.size() ? -1 : 1;
    for (size_t i = 0; i < terms_.size(); ++i) {
      if (terms_[i].first != o.terms_[i].first)
        return terms_[i].first < o.terms_[i].first ? -1 : 1;
      int c = terms_[i].second.cmp(o.terms_[i].second);
      if (c != 0) return c;
    }
    return 0;
  }

  std::string str() const {
    if (is_zero()) return "0";
    std::string s;
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
      if (!s.empty()) s += " + ";
      std::string m;
      for (int j = 0; j < mono::kMaxVars; ++j) {
        int e = mono::exp_z(it->first, j);
        if (e > 0) {
          m += "z" + std::to_string(j + 1);
          if (e > 1) m += "^" + std::to_string(e);
        }
      }
      for (int j = 0; j < mono::kMaxVars; ++j) {
        int e = mono::exp_zbar(it->first, j);
        if (e > 0) {
          m += "w" + std::to_string(j + 1);  // w_j stands for zbar_j
          if (e > 1) m += "^" + std::to_string(e);
        }
      }
      std::string c = it->second.str();
      if (m.empty()) s += "(" + c + ")";
      else s += "(" + c + ")" + m;
    }
    return s;
  }

 private:
  std::vector<Term> terms_;
};

}  // namespace eta
