#pragma once

// Exact coefficients in the field Q(i, sqrt3).

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <functional>
#include <ostream>
#include <stdexcept>
#include <string>

namespace phb {

using Rational = boost::multiprecision::cpp_rational;

/// Element (a + b*s3) + i*(c + d*s3) of Q(i, sqrt3), where s3 = sqrt(3).
class Scalar {
public:
  Scalar() = default;
  Scalar(long long v) : a_(v) {}
  Scalar(Rational v) : a_(std::move(v)) {}
  Scalar(Rational a, Rational b, Rational c, Rational d)
      : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)), d_(std::move(d)) {}

  static Scalar rational(long long num, long long den = 1) {
    return Scalar(Rational(num, den));
  }
  static Scalar i() { return Scalar(0, 0, 1, 0); }
  static Scalar s3() { return Scalar(0, 1, 0, 0); }

  const Rational& re_rat() const { return a_; }
  const Rational& re_s3() const { return b_; }
  const Rational& im_rat() const { return c_; }
  const Rational& im_s3() const { return d_; }

  bool is_zero() const { return a_ == 0 && b_ == 0 && c_ == 0 && d_ == 0; }
  bool is_one() const { return a_ == 1 && b_ == 0 && c_ == 0 && d_ == 0; }
  bool is_real() const { return c_ == 0 && d_ == 0; }
  bool is_rational() const { return b_ == 0 && c_ == 0 && d_ == 0; }

  Scalar conj() const { return Scalar(a_, b_, -c_, -d_); }
  Scalar real_part() const { return Scalar(a_, b_, 0, 0); }
  Scalar imag_part() const { return Scalar(c_, d_, 0, 0); }

  Scalar operator-() const { return Scalar(-a_, -b_, -c_, -d_); }

  Scalar& operator+=(const Scalar& o) {
    a_ += o.a_;
    b_ += o.b_;
    c_ += o.c_;
    d_ += o.d_;
    return *this;
  }
  Scalar& operator-=(const Scalar& o) {
    a_ -= o.a_;
    b_ -= o.b_;
    c_ -= o.c_;
    d_ -= o.d_;
    return *this;
  }
  Scalar& operator*=(const Scalar& o) { return *this = *this * o; }
  Scalar& operator/=(const Scalar& o) { return *this = *this / o; }

  friend Scalar operator+(Scalar x, const Scalar& y) { return x += y; }
  friend Scalar operator-(Scalar x, const Scalar& y) { return x -= y; }

  friend Scalar operator*(const Scalar& x, const Scalar& y) {
    // (p + i q)(r + i t) with p, q, r, t in Q(s3).
    auto [pr_a, pr_b] = mul_q3(x.a_, x.b_, y.a_, y.b_);
    auto [qt_a, qt_b] = mul_q3(x.c_, x.d_, y.c_, y.d_);
    auto [pt_a, pt_b] = mul_q3(x.a_, x.b_, y.c_, y.d_);
    auto [qr_a, qr_b] = mul_q3(x.c_, x.d_, y.a_, y.b_);
    return Scalar(pr_a - qt_a, pr_b - qt_b, pt_a + qr_a, pt_b + qr_b);
  }

  friend Scalar operator/(const Scalar& x, const Scalar& y) { return x * y.inverse(); }

  Scalar inverse() const {
    if (is_zero()) throw std::domain_error("division by zero in Q(i,s3)");
    // |z|^2 = p^2 + q^2 lies in Q(s3); invert it via its Galois conjugate.
    auto [pp_a, pp_b] = mul_q3(a_, b_, a_, b_);
    auto [qq_a, qq_b] = mul_q3(c_, d_, c_, d_);
    Rational n_a = pp_a + qq_a, n_b = pp_b + qq_b;
    Rational norm = n_a * n_a - 3 * n_b * n_b;
    Rational inv_a = n_a / norm, inv_b = -n_b / norm;
    Scalar inv_abs2(inv_a, inv_b, 0, 0);
    return conj() * inv_abs2;
  }

  Scalar pow(unsigned n) const {
    Scalar r(1), base = *this;
    while (n) {
      if (n & 1u) r *= base;
      base *= base;
      n >>= 1;
    }
    return r;
  }

  /// Floating-point value, for numeric cross-checks only.
  std::pair<double, double> to_complex() const {
    const double s = 1.7320508075688772;
    return {static_cast<double>(a_) + s * static_cast<double>(b_),
            static_cast<double>(c_) + s * static_cast<double>(d_)};
  }

  friend bool operator==(const Scalar&, const Scalar&) = default;

  friend std::strong_ordering operator<=>(const Scalar& x, const Scalar& y) {
    for (auto [l, r] : {std::pair{&x.a_, &y.a_}, {&x.b_, &y.b_}, {&x.c_, &y.c_}, {&x.d_, &y.d_}}) {
      if (*l < *r) return std::strong_ordering::less;
      if (*r < *l) return std::strong_ordering::greater;
    }
    return std::strong_ordering::equal;
  }

  /// Number of nonzero components among (1, s3, i, i*s3).
  int component_count() const {
    return (a_ != 0) + (b_ != 0) + (c_ != 0) + (d_ != 0);
  }

  /// Canonical text: "3/8", "-i", "2*s3", "(1/2 + 1/2*i*s3)".
  std::string str() const;

private:
  static std::pair<Rational, Rational> mul_q3(const Rational& a, const Rational& b,
                                              const Rational& c, const Rational& d) {
    return {a * c + 3 * b * d, a * d + b * c};
  }

  Rational a_{0}, b_{0}, c_{0}, d_{0};
};

namespace detail {

inline std::string rational_str(const Rational& r) {
  return r.str();
}

// One component "q*unit" with the sign folded into q.
inline std::string component_str(const Rational& q, const char* unit) {
  if (*unit == '\0') return rational_str(q);
  if (q == 1) return unit;
  if (q == -1) return std::string("-") + unit;
  return rational_str(q) + "*" + unit;
}

}  // namespace detail

inline std::string Scalar::str() const {
  if (is_zero()) return "0";
  const std::pair<const Rational*, const char*> parts[] = {
      {&a_, ""}, {&b_, "s3"}, {&c_, "i"}, {&d_, "i*s3"}};
  std::string out;
  for (auto [q, unit] : parts) {
    if (*q == 0) continue;
    std::string c = detail::component_str(*q, unit);
    if (out.empty()) {
      out = c;
    } else if (c.front() == '-') {
      out += " - " + c.substr(1);
    } else {
      out += " + " + c;
    }
  }
  if (component_count() > 1) out = "(" + out + ")";
  return out;
}

inline std::ostream& operator<<(std::ostream& os, const Scalar& s) { return os << s.str(); }

}  // namespace phb
