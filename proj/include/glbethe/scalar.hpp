#pragma once
// Scalar fields used by the templated matrix code: double-precision complex
// numbers and exact Gaussian rationals.

#include <boost/multiprecision/gmp.hpp>

#include <cmath>
#include <complex>
#include <cstdint>
#include <ostream>
#include <string>

namespace glb {

using cplx = std::complex<double>;
inline constexpr cplx I{0.0, 1.0};

using rational = boost::multiprecision::mpq_rational;

// Exact element of Q(i).
struct GaussianRational {
  rational re{0};
  rational im{0};

  GaussianRational() = default;
  GaussianRational(long long r) : re(r), im(0) {}  // NOLINT(google-explicit-constructor)
  GaussianRational(rational r, rational i) : re(std::move(r)), im(std::move(i)) {}

  static GaussianRational frac(long long num, long long den, long long inum = 0, long long iden = 1) {
    return {rational(num) / den, rational(inum) / iden};
  }

  GaussianRational& operator+=(const GaussianRational& o) { re += o.re; im += o.im; return *this; }
  GaussianRational& operator-=(const GaussianRational& o) { re -= o.re; im -= o.im; return *this; }
  GaussianRational& operator*=(const GaussianRational& o) {
    rational r = re * o.re - im * o.im;
    rational i = re * o.im + im * o.re;
    re = std::move(r);
    im = std::move(i);
    return *this;
  }
  GaussianRational& operator/=(const GaussianRational& o) {
    rational d = o.re * o.re + o.im * o.im;
    rational r = (re * o.re + im * o.im) / d;
    rational i = (im * o.re - re * o.im) / d;
    re = std::move(r);
    im = std::move(i);
    return *this;
  }
  friend GaussianRational operator+(GaussianRational a, const GaussianRational& b) { return a += b; }
  friend GaussianRational operator-(GaussianRational a, const GaussianRational& b) { return a -= b; }
  friend GaussianRational operator*(GaussianRational a, const GaussianRational& b) { return a *= b; }
  friend GaussianRational operator/(GaussianRational a, const GaussianRational& b) { return a /= b; }
  friend GaussianRational operator-(const GaussianRational& a) { return {-a.re, -a.im}; }
  friend bool operator==(const GaussianRational& a, const GaussianRational& b) {
    return a.re == b.re && a.im == b.im;
  }
  bool is_zero() const { return re == 0 && im == 0; }
  cplx to_complex() const {
    return {static_cast<double>(re), static_cast<double>(im)};
  }
  friend std::ostream& operator<<(std::ostream& os, const GaussianRational& z) {
    return os << z.re << (z.im < 0 ? "" : "+") << z.im << "i";
  }
};

template <class T>
struct Field;

template <>
struct Field<cplx> {
  static cplx zero() { return {0.0, 0.0}; }
  static cplx one() { return {1.0, 0.0}; }
  static cplx imag_unit() { return I; }
  static cplx from_int(long long v) { return {static_cast<double>(v), 0.0}; }
  static bool is_zero(const cplx& z) { return z == cplx{}; }
  static double magnitude(const cplx& z) { return std::abs(z); }
  static cplx to_complex(const cplx& z) { return z; }
};

template <>
struct Field<GaussianRational> {
  static GaussianRational zero() { return {}; }
  static GaussianRational one() { return GaussianRational(1); }
  static GaussianRational imag_unit() { return {rational(0), rational(1)}; }
  static GaussianRational from_int(long long v) { return GaussianRational(v); }
  static bool is_zero(const GaussianRational& z) { return z.is_zero(); }
  static double magnitude(const GaussianRational& z) { return std::abs(z.to_complex()); }
  static cplx to_complex(const GaussianRational& z) { return z.to_complex(); }
};

}  // namespace glb
