#pragma once

// Coefficient rings used by the symbolic layer.
//
// Two rings are supported: exact complex rationals (QComplex, backed by
// boost::multiprecision::cpp_rational) and floating complex numbers
// (std::complex<double>). Everything above this header is written against
// coeff_traits<C> so both modes share one implementation.

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <complex>
#include <concepts>
#include <cstdint>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>

#include "ncq/errors.hpp"

namespace ncq {

using Rational = boost::multiprecision::cpp_rational;

/// Exact Gaussian rational re + i*im.
struct QComplex {
  Rational re{0};
  Rational im{0};

  QComplex() = default;
  QComplex(int r) : re(r) {}  // NOLINT(google-explicit-constructor)
  QComplex(Rational r) : re(std::move(r)) {}  // NOLINT(google-explicit-constructor)
  QComplex(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {}

  QComplex& operator+=(const QComplex& o) {
    re += o.re;
    im += o.im;
    return *this;
  }
  QComplex& operator-=(const QComplex& o) {
    re -= o.re;
    im -= o.im;
    return *this;
  }
  QComplex& operator*=(const QComplex& o) {
    Rational r = re * o.re - im * o.im;
    Rational i = re * o.im + im * o.re;
    re = std::move(r);
    im = std::move(i);
    return *this;
  }
  QComplex& operator/=(const QComplex& o) {
    const Rational den = o.re * o.re + o.im * o.im;
    if (den == 0) throw DomainError("QComplex: division by zero");
    Rational r = (re * o.re + im * o.im) / den;
    Rational i = (im * o.re - re * o.im) / den;
    re = std::move(r);
    im = std::move(i);
    return *this;
  }

  friend QComplex operator+(QComplex a, const QComplex& b) { return a += b; }
  friend QComplex operator-(QComplex a, const QComplex& b) { return a -= b; }
  friend QComplex operator*(QComplex a, const QComplex& b) { return a *= b; }
  friend QComplex operator/(QComplex a, const QComplex& b) { return a /= b; }
  friend QComplex operator-(const QComplex& a) { return {-a.re, -a.im}; }
  friend bool operator==(const QComplex& a, const QComplex& b) {
    return a.re == b.re && a.im == b.im;
  }

  friend std::ostream& operator<<(std::ostream& os, const QComplex& z) {
    os << "(" << z.re << "," << z.im << ")";
    return os;
  }
};

/// Parses "3", "-0.25", "1.5e-3", "7/8" into an exact rational.
inline Rational parseRational(std::string_view text) {
  std::string s(text);
  auto fail = [&] { throw ParameterError("not a rational literal: '" + s + "'"); };
  if (s.empty()) fail();
  if (auto slash = s.find('/'); slash != std::string::npos) {
    Rational num = parseRational(s.substr(0, slash));
    Rational den = parseRational(s.substr(slash + 1));
    if (den == 0) fail();
    return num / den;
  }
  std::size_t pos = 0;
  bool negative = false;
  if (s[pos] == '+' || s[pos] == '-') negative = s[pos++] == '-';
  boost::multiprecision::cpp_int mantissa = 0;
  long exponent = 0;
  bool digits = false;
  bool afterPoint = false;
  for (; pos < s.size(); ++pos) {
    const char c = s[pos];
    if (c >= '0' && c <= '9') {
      mantissa = mantissa * 10 + (c - '0');
      digits = true;
      if (afterPoint) --exponent;
    } else if (c == '.' && !afterPoint) {
      afterPoint = true;
    } else {
      break;
    }
  }
  if (!digits) fail();
  if (pos < s.size()) {
    if (s[pos] != 'e' && s[pos] != 'E') fail();
    ++pos;
    std::size_t used = 0;
    long e = 0;
    try {
      e = std::stol(s.substr(pos), &used);
    } catch (const std::exception&) {
      fail();
    }
    if (pos + used != s.size() || e > 400 || e < -400) fail();
    exponent += e;
  }
  Rational value(mantissa);
  boost::multiprecision::cpp_int ten = 1;
  for (long k = 0; k < std::labs(exponent); ++k) ten *= 10;
  if (exponent >= 0) {
    value *= Rational(ten);
  } else {
    value /= Rational(ten);
  }
  return negative ? Rational(-value) : value;
}

template <class C>
struct coeff_traits;

template <>
struct coeff_traits<QComplex> {
  using real_type = Rational;
  static constexpr bool exact = true;

  static QComplex zero() { return {}; }
  static QComplex one() { return {1}; }
  static QComplex i() { return {Rational(0), Rational(1)}; }
  static QComplex fromReal(const Rational& r) { return {r}; }
  static QComplex fromParts(const Rational& r, const Rational& im) { return {r, im}; }
  static QComplex fromInt(long v) { return {Rational(v)}; }
  static bool isZero(const QComplex& c) { return c.re == 0 && c.im == 0; }
  static bool isRealZero(const Rational& r) { return r == 0; }
  static Rational re(const QComplex& c) { return c.re; }
  static Rational im(const QComplex& c) { return c.im; }
  static QComplex conj(const QComplex& c) { return {c.re, -c.im}; }
  static double toDouble(const Rational& r) { return r.convert_to<double>(); }
  static std::complex<double> toComplex(const QComplex& c) {
    return {toDouble(c.re), toDouble(c.im)};
  }
  static bool less(const QComplex& a, const QComplex& b) {
    if (a.re != b.re) return a.re < b.re;
    return a.im < b.im;
  }
  static std::string realToString(const Rational& r) {
    std::ostringstream os;
    os << r;
    return os.str();
  }
  static Rational parseReal(std::string_view s) { return parseRational(s); }
};

template <>
struct coeff_traits<std::complex<double>> {
  using real_type = double;
  using C = std::complex<double>;
  static constexpr bool exact = false;
  /// Symbolic-zero threshold for floating coefficients.
  static constexpr double kZeroTol = 1e-12;

  static C zero() { return {0.0, 0.0}; }
  static C one() { return {1.0, 0.0}; }
  static C i() { return {0.0, 1.0}; }
  static C fromReal(double r) { return {r, 0.0}; }
  static C fromParts(double r, double im) { return {r, im}; }
  static C fromInt(long v) { return {static_cast<double>(v), 0.0}; }
  static bool isZero(const C& c) { return std::abs(c) < kZeroTol; }
  static bool isRealZero(double r) { return std::abs(r) < kZeroTol; }
  static double re(const C& c) { return c.real(); }
  static double im(const C& c) { return c.imag(); }
  static C conj(const C& c) { return std::conj(c); }
  static double toDouble(double r) { return r; }
  static C toComplex(const C& c) { return c; }
  static bool less(const C& a, const C& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  }
  static std::string realToString(double r) {
    std::ostringstream os;
    os.precision(17);
    os << r;
    return os.str();
  }
  static double parseReal(std::string_view s) { return parseRational(s).convert_to<double>(); }
};

template <class C>
concept Coefficient = requires { typename coeff_traits<C>::real_type; };

template <Coefficient C>
using real_t = typename coeff_traits<C>::real_type;

/// Comparator for coefficient values used as map keys (shift amounts etc).
template <Coefficient C>
struct CoeffLess {
  bool operator()(const C& a, const C& b) const { return coeff_traits<C>::less(a, b); }
};

}  // namespace ncq
