#pragma once

#include <gmpxx.h>

#include <cmath>
#include <complex>
#include <concepts>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

namespace gaudin {

/// Base exception for everything thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Rational = mpq_class;
using Complex = std::complex<double>;

/// Complex number with exact rational real and imaginary parts.
class GaussianRational {
 public:
  GaussianRational() = default;
  GaussianRational(long v) : re_(v) {}  // NOLINT
  GaussianRational(const Rational& re) : re_(re) {}  // NOLINT
  GaussianRational(Rational re, Rational im) : re_(std::move(re)), im_(std::move(im)) {}

  const Rational& real() const { return re_; }
  const Rational& imag() const { return im_; }

  bool is_zero() const { return sgn(re_) == 0 && sgn(im_) == 0; }
  bool is_real() const { return sgn(im_) == 0; }

  GaussianRational conj() const { return {re_, -im_}; }
  Rational norm2() const { return Rational(re_ * re_ + im_ * im_); }

  GaussianRational& operator+=(const GaussianRational& o) {
    re_ += o.re_;
    im_ += o.im_;
    return *this;
  }
  GaussianRational& operator-=(const GaussianRational& o) {
    re_ -= o.re_;
    im_ -= o.im_;
    return *this;
  }
  GaussianRational& operator*=(const GaussianRational& o) {
    if (o.is_real()) {
      re_ *= o.re_;
      im_ *= o.re_;
      return *this;
    }
    if (is_real()) {
      im_ = re_ * o.im_;
      re_ *= o.re_;
      return *this;
    }
    Rational r = re_ * o.re_ - im_ * o.im_;
    Rational i = re_ * o.im_ + im_ * o.re_;
    re_ = std::move(r);
    im_ = std::move(i);
    return *this;
  }
  GaussianRational& operator/=(const GaussianRational& o) {
    if (o.is_zero()) throw Error("division by zero in Gaussian rational");
    if (o.is_real()) {
      re_ /= o.re_;
      im_ /= o.re_;
      return *this;
    }
    Rational n = o.norm2();
    *this *= o.conj();
    re_ /= n;
    im_ /= n;
    return *this;
  }

  friend GaussianRational operator+(GaussianRational a, const GaussianRational& b) { return a += b; }
  friend GaussianRational operator-(GaussianRational a, const GaussianRational& b) { return a -= b; }
  friend GaussianRational operator*(GaussianRational a, const GaussianRational& b) { return a *= b; }
  friend GaussianRational operator/(GaussianRational a, const GaussianRational& b) { return a /= b; }
  friend GaussianRational operator-(const GaussianRational& a) { return {-a.re_, -a.im_}; }
  friend bool operator==(const GaussianRational& a, const GaussianRational& b) {
    return a.re_ == b.re_ && a.im_ == b.im_;
  }

  Complex to_complex() const { return {re_.get_d(), im_.get_d()}; }

  std::string str() const {
    if (is_real()) return re_.get_str();
    std::string out = sgn(re_) == 0 ? "" : re_.get_str();
    if (sgn(im_) > 0 && !out.empty()) out += "+";
    return out + im_.get_str() + "i";
  }

 private:
  Rational re_{0};
  Rational im_{0};
};

enum class FieldTag { gaussian_rational, complex_double };

/// Scalar fields usable for operators: exact Gaussian rationals or complex doubles.
template <class S>
struct FieldTraits;

template <>
struct FieldTraits<GaussianRational> {
  static constexpr FieldTag tag = FieldTag::gaussian_rational;
  static constexpr bool exact = true;
  static bool is_zero(const GaussianRational& x) { return x.is_zero(); }
  static GaussianRational from(const GaussianRational& x) { return x; }
  static Complex to_complex(const GaussianRational& x) { return x.to_complex(); }
  static GaussianRational conj(const GaussianRational& x) { return x.conj(); }
  static double magnitude(const GaussianRational& x) { return std::abs(x.to_complex()); }
};

template <>
struct FieldTraits<Complex> {
  static constexpr FieldTag tag = FieldTag::complex_double;
  static constexpr bool exact = false;
  static bool is_zero(const Complex& x) { return x == Complex(0.0, 0.0); }
  static Complex from(const GaussianRational& x) { return x.to_complex(); }
  static Complex to_complex(const Complex& x) { return x; }
  static Complex conj(const Complex& x) { return std::conj(x); }
  static double magnitude(const Complex& x) { return std::abs(x); }
};

template <class S>
concept Field = requires { FieldTraits<S>::tag; };

template <Field S>
inline constexpr bool is_exact_v = FieldTraits<S>::exact;

template <Field S>
S scalar_from(const GaussianRational& x) {
  return FieldTraits<S>::from(x);
}

template <Field S>
S scalar_from(const Rational& x) {
  return FieldTraits<S>::from(GaussianRational(x));
}

template <Field S>
S scalar_from(long x) {
  return FieldTraits<S>::from(GaussianRational(x));
}

template <Field S>
bool scalar_is_zero(const S& x) {
  return FieldTraits<S>::is_zero(x);
}

inline std::string to_string(const GaussianRational& x) { return x.str(); }

inline std::string to_string(const Complex& x) {
  char buf[96];
  if (x.imag() == 0.0)
    std::snprintf(buf, sizeof buf, "%.17g", x.real());
  else
    std::snprintf(buf, sizeof buf, "%.17g%+.17gi", x.real(), x.imag());
  return buf;
}

namespace detail {

inline bool is_digit(char c) { return c >= '0' && c <= '9'; }

/// Parses a real literal ("3", "-2/7", "0.125", "1e-3") into an exact rational.
inline Rational parse_real(std::string_view s) {
  if (s.empty()) throw Error("empty number");
  std::string t(s);
  if (auto slash = t.find('/'); slash != std::string::npos) {
    if (t[0] == '+') t.erase(0, 1);
    Rational q;
    if (q.set_str(t, 10) != 0) throw Error("malformed rational '" + t + "'");
    if (sgn(q.get_den()) == 0) throw Error("zero denominator in '" + t + "'");
    q.canonicalize();
    return q;
  }
  std::size_t pos = 0;
  bool neg = false;
  if (t[pos] == '+' || t[pos] == '-') neg = t[pos++] == '-';
  std::string digits;
  long frac_digits = 0;
  bool seen_dot = false, any = false;
  for (; pos < t.size(); ++pos) {
    char c = t[pos];
    if (is_digit(c)) {
      digits += c;
      any = true;
      if (seen_dot) ++frac_digits;
    } else if (c == '.' && !seen_dot) {
      seen_dot = true;
    } else {
      break;
    }
  }
  if (!any) throw Error("malformed number '" + t + "'");
  long exponent = 0;
  if (pos < t.size()) {
    if (t[pos] != 'e' && t[pos] != 'E') throw Error("malformed number '" + t + "'");
    try {
      std::size_t used = 0;
      exponent = std::stol(t.substr(pos + 1), &used);
      if (used != t.size() - pos - 1) throw Error("malformed exponent in '" + t + "'");
    } catch (const std::logic_error&) {
      throw Error("malformed exponent in '" + t + "'");
    }
  }
  mpz_class num(digits, 10);
  long e = exponent - frac_digits;
  mpz_class ten_pow;
  mpz_ui_pow_ui(ten_pow.get_mpz_t(), 10, static_cast<unsigned long>(e < 0 ? -e : e));
  Rational q = e >= 0 ? Rational(num * ten_pow) : Rational(num, ten_pow);
  q.canonicalize();
  return neg ? Rational(-q) : q;
}

}  // namespace detail

/// Parses "a", "bi", "a+bi", "a-bi" where a and b are real literals.
/// Returns the exact value and whether any decimal notation was used.
struct ParsedNumber {
  GaussianRational value;
  bool decimal = false;
};

inline ParsedNumber parse_number(std::string_view text) {
  std::string s;
  for (char c : text)
    if (c != ' ' && c != '\t') s += c;
  if (s.empty()) throw Error("empty number");
  ParsedNumber out;
  out.decimal = s.find('.') != std::string::npos || s.find('e') != std::string::npos ||
                s.find('E') != std::string::npos;
  if (s.back() != 'i') {
    out.value = GaussianRational(detail::parse_real(s));
    return out;
  }
  s.pop_back();
  // split at the last sign that is not a leading sign or part of an exponent
  std::size_t split = std::string::npos;
  for (std::size_t k = s.size(); k-- > 1;) {
    if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
      split = k;
      break;
    }
  }
  auto imag_of = [](const std::string& part) -> Rational {
    if (part.empty() || part == "+") return Rational(1);
    if (part == "-") return Rational(-1);
    return detail::parse_real(part);
  };
  if (split == std::string::npos) {
    out.value = GaussianRational(Rational(0), imag_of(s));
  } else {
    out.value = GaussianRational(detail::parse_real(s.substr(0, split)), imag_of(s.substr(split)));
  }
  return out;
}

/// Uniform random rational p/q with |p| <= numerator_bound, 1 <= q <= denominator_bound.
inline Rational random_rational(std::mt19937_64& rng, long numerator_bound, long denominator_bound) {
  std::uniform_int_distribution<long> num(-numerator_bound, numerator_bound);
  std::uniform_int_distribution<long> den(1, denominator_bound);
  Rational q(num(rng), den(rng));
  q.canonicalize();
  return q;
}

}  // namespace gaudin
