#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <string_view>

#include "corepo/error.hpp"

namespace corepo {

// Exact rational arithmetic on 64-bit numerator/denominator. Denominator is
// always positive and gcd(num, den) == 1. Intermediate products use 128-bit
// arithmetic; results that do not fit in 64 bits throw rational_overflow.
// Division by zero throws rational_divzero so callers can distinguish it
// from malformed input.

struct rational_overflow : std::range_error {
  rational_overflow() : std::range_error("rational overflow") {}
};

struct rational_divzero : std::domain_error {
  rational_divzero() : std::domain_error("rational division by zero") {}
};

class Rational {
 public:
  Rational() : num_(0), den_(1) {}
  explicit Rational(std::int64_t n) : num_(n), den_(1) {}
  Rational(std::int64_t n, std::int64_t d) {
    if (d == 0) throw rational_divzero();
    __int128 nn = n;
    __int128 dd = d;
    if (dd < 0) {
      nn = -nn;
      dd = -dd;
    }
    assign(nn, dd);
  }

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }

  bool is_integer() const { return den_ == 1; }

  Rational operator+(const Rational& o) const {
    __int128 n = (__int128)num_ * o.den_ + (__int128)o.num_ * den_;
    __int128 d = (__int128)den_ * o.den_;
    return from128(n, d);
  }
  Rational operator-(const Rational& o) const {
    __int128 n = (__int128)num_ * o.den_ - (__int128)o.num_ * den_;
    __int128 d = (__int128)den_ * o.den_;
    return from128(n, d);
  }
  Rational operator*(const Rational& o) const {
    __int128 n = (__int128)num_ * o.num_;
    __int128 d = (__int128)den_ * o.den_;
    return from128(n, d);
  }
  Rational operator/(const Rational& o) const {
    if (o.num_ == 0) throw rational_divzero();
    __int128 n = (__int128)num_ * o.den_;
    __int128 d = (__int128)den_ * o.num_;
    if (d < 0) {
      n = -n;
      d = -d;
    }
    return from128(n, d);
  }

  bool operator==(const Rational& o) const { return num_ == o.num_ && den_ == o.den_; }
  bool operator!=(const Rational& o) const { return !(*this == o); }

  // Canonical text form: "n" for integers, "n/d" otherwise.
  std::string str() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
  }

 private:
  static Rational from128(__int128 n, __int128 d) {
    Rational r;
    r.assign(n, d);
    return r;
  }

  void assign(__int128 n, __int128 d) {
    __int128 g = gcd128(n < 0 ? -n : n, d);
    if (g > 1) {
      n /= g;
      d /= g;
    }
    constexpr __int128 lo = INT64_MIN;
    constexpr __int128 hi = INT64_MAX;
    if (n < lo || n > hi || d < 1 || d > hi) throw rational_overflow();
    num_ = (std::int64_t)n;
    den_ = (std::int64_t)d;
  }

  static __int128 gcd128(__int128 a, __int128 b) {
    while (b != 0) {
      __int128 t = a % b;
      a = b;
      b = t;
    }
    return a == 0 ? 1 : a;
  }

  std::int64_t num_;
  std::int64_t den_;
};

namespace detail {

inline bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (c < '0' || c > '9') return false;
  return true;
}

inline std::int64_t parse_i64(std::string_view s) {
  // Caller guarantees an optional sign followed by digits.
  bool neg = false;
  std::size_t i = 0;
  if (i < s.size() && (s[i] == '+' || s[i] == '-')) {
    neg = s[i] == '-';
    ++i;
  }
  __int128 v = 0;
  for (; i < s.size(); ++i) {
    v = v * 10 + (s[i] - '0');
    if (v > (__int128)INT64_MAX + 1) throw rational_overflow();
  }
  if (neg) v = -v;
  if (v < INT64_MIN || v > INT64_MAX) throw rational_overflow();
  return (std::int64_t)v;
}

}  // namespace detail

// Parses an integer ("-3"), decimal ("2.50"), or fraction ("3/4") into an
// exact rational. Throws corepo::Error(InputMalformed) when the text is not
// one of those forms and rational_overflow when it does not fit.
inline Rational parse_rational(std::string_view s) {
  std::size_t start = 0;
  bool neg = false;
  if (start < s.size() && (s[start] == '+' || s[start] == '-')) {
    neg = s[start] == '-';
    ++start;
  }
  std::string_view body = s.substr(start);
  if (body.empty()) raise(ErrorKind::InputMalformed, "empty number");

  auto slash = body.find('/');
  if (slash != std::string_view::npos) {
    std::string_view a = body.substr(0, slash);
    std::string_view b = body.substr(slash + 1);
    if (!detail::all_digits(a) || !detail::all_digits(b))
      raise(ErrorKind::InputMalformed, "malformed fraction: " + std::string(s));
    std::int64_t n = detail::parse_i64(a);
    std::int64_t d = detail::parse_i64(b);
    if (d == 0) throw rational_divzero();
    Rational r(n, d);
    return neg ? Rational(0) - r : r;
  }

  auto dot = body.find('.');
  if (dot != std::string_view::npos) {
    std::string_view ip = body.substr(0, dot);
    std::string_view fp = body.substr(dot + 1);
    if (ip.empty() && fp.empty())
      raise(ErrorKind::InputMalformed, "malformed decimal: " + std::string(s));
    if (!ip.empty() && !detail::all_digits(ip))
      raise(ErrorKind::InputMalformed, "malformed decimal: " + std::string(s));
    if (!fp.empty() && !detail::all_digits(fp))
      raise(ErrorKind::InputMalformed, "malformed decimal: " + std::string(s));
    __int128 n = 0;
    for (char c : ip) {
      n = n * 10 + (c - '0');
      if (n > INT64_MAX) throw rational_overflow();
    }
    __int128 d = 1;
    for (char c : fp) {
      n = n * 10 + (c - '0');
      d *= 10;
      if (n > INT64_MAX || d > INT64_MAX) throw rational_overflow();
    }
    Rational r((std::int64_t)n, (std::int64_t)d);
    return neg ? Rational(0) - r : r;
  }

  if (!detail::all_digits(body))
    raise(ErrorKind::InputMalformed, "malformed integer: " + std::string(s));
  std::int64_t n = detail::parse_i64(body);
  Rational r(n);
  return neg ? Rational(0) - r : r;
}

}  // namespace corepo
