#pragma once

#include <gmpxx.h>
#include <cmath>
#include <complex>
#include <cstdint>
#include <string>

namespace eta {

// Gaussian rational: a + b*i with a, b in Q. Exact field arithmetic.
struct GQ {
  mpq_class re, im;

  GQ() : re(0), im(0) {}
  GQ(long r) : re(r), im(0) {}
  GQ(const mpq_class& r) : re(r), im(0) {}
  GQ(mpq_class r, mpq_class i) : re(std::move(r)), im(std::move(i)) {}

  static GQ zero() { return GQ(); }
  static GQ one() { return GQ(1); }
  static GQ i() { return GQ(mpq_class(0), mpq_class(1)); }
  static GQ rational(long num, long den) {
    mpq_class q(num, den);
    q.canonicalize();
    return GQ(q);
  }

  bool is_zero() const { return re == 0 && im == 0; }
  bool is_real() const { return im == 0; }

  GQ conj() const { return GQ(re, -im); }

  GQ operator-() const { return GQ(-re, -im); }
  GQ operator+(const GQ& o) const { return GQ(re + o.re, im + o.im); }
  GQ operator-(const GQ& o) const { return GQ(re - o.re, im - o.im); }
  GQ operator*(const GQ& o) const {
    return GQ(re * o.re - im * o.im, re * o.im + im * o.re);
  }
  GQ operator/(const GQ& o) const {
    mpq_class n = o.re * o.re + o.im * o.im;  // |o|^2, nonzero for o != 0
    return GQ((re * o.re + im * o.im) / n, (im * o.re - re * o.im) / n);
  }
  GQ& operator+=(const GQ& o) { re += o.re; im += o.im; return *this; }
  GQ& operator-=(const GQ& o) { re -= o.re; im -= o.im; return *this; }
  GQ& operator*=(const GQ& o) { return *this = *this * o; }

  bool operator==(const GQ& o) const { return re == o.re && im == o.im; }
  bool operator!=(const GQ& o) const { return !(*this == o); }

  // total order used only for canonical sorting of printouts/factors
  int cmp(const GQ& o) const {
    int c = ::cmp(re, o.re);
    if (c != 0) return c;
    return ::cmp(im, o.im);
  }

  std::complex<double> to_complex() const {
    return {re.get_d(), im.get_d()};
  }

  std::string str() const {
    if (is_zero()) return "0";
    std::string s;
    if (re != 0) s += re.get_str();
    if (im != 0) {
      if (!s.empty() && im > 0) s += "+";
      if (im == 1) s += "i";
      else if (im == -1) s += "-i";
      else s += im.get_str() + "*i";
    }
    return s;
  }
};

inline GQ operator*(long a, const GQ& b) { return GQ(a) * b; }

}  // namespace eta
