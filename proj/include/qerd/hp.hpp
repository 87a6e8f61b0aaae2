#pragma once

// Arbitrary-precision real and complex scalars backed by MPFR.
//
// Every value owns an mpfr_t. New values (and the results of arithmetic) are
// created at the calling thread's working precision, which is set with a
// PrecisionScope; copies keep the precision of their source. The working
// precision is thread-local, so independent evaluations at different
// precisions can run concurrently.

#include <cstdint>  // before mpfr.h, enables the intmax_t interface

#include <mpfr.h>

#include <compare>
#include <iosfwd>
#include <string>
#include <string_view>

namespace qerd::hp {

/// Working precision of the calling thread, in decimal digits.
unsigned working_digits();
/// Working precision of the calling thread, in bits.
mpfr_prec_t working_bits();

/// Sets the calling thread's working precision for the lifetime of the scope.
class PrecisionScope {
 public:
  explicit PrecisionScope(unsigned digits);
  ~PrecisionScope();
  PrecisionScope(const PrecisionScope&) = delete;
  PrecisionScope& operator=(const PrecisionScope&) = delete;

 private:
  unsigned saved_digits_;
};

class Real {
 public:
  Real();
  Real(int v);
  Real(long v);
  Real(long long v);
  Real(unsigned v);
  Real(unsigned long v);
  Real(double v);
  explicit Real(std::string_view decimal);

  Real(const Real& other);
  Real(Real&& other) noexcept;
  Real& operator=(const Real& other);
  Real& operator=(Real&& other) noexcept;
  ~Real();

  Real& operator+=(const Real& o);
  Real& operator-=(const Real& o);
  Real& operator*=(const Real& o);
  Real& operator/=(const Real& o);
  Real operator-() const;

  friend Real operator+(Real a, const Real& b) { return a += b; }
  friend Real operator-(Real a, const Real& b) { return a -= b; }
  friend Real operator*(Real a, const Real& b) { return a *= b; }
  friend Real operator/(Real a, const Real& b) { return a /= b; }

  friend bool operator==(const Real& a, const Real& b);
  friend std::partial_ordering operator<=>(const Real& a, const Real& b);

  bool is_zero() const;
  bool is_finite() const;
  int sign() const;
  mpfr_prec_t precision_bits() const;

  double to_double() const;
  long to_long() const;  // rounds to nearest
  /// Scientific notation with `digits` significant digits (0 = full precision).
  std::string to_string(unsigned digits = 0) const;

  mpfr_srcptr get() const { return v_; }
  mpfr_ptr get() { return v_; }

 private:
  mpfr_t v_;
};

Real abs(const Real& x);
Real sqrt(const Real& x);
Real exp(const Real& x);
Real log(const Real& x);
Real sin(const Real& x);
Real cos(const Real& x);
Real atan2(const Real& y, const Real& x);
Real pow(const Real& x, const Real& y);
Real pow(const Real& x, long n);
Real round(const Real& x);
Real gamma(const Real& x);
Real pi();
Real max(const Real& a, const Real& b);
Real min(const Real& a, const Real& b);
/// 10^e at working precision.
Real pow10(long e);

std::ostream& operator<<(std::ostream& os, const Real& x);

class Complex {
 public:
  Complex() = default;
  Complex(Real re) : re_(std::move(re)) {}
  Complex(Real re, Real im) : re_(std::move(re)), im_(std::move(im)) {}
  Complex(int v) : re_(v) {}
  Complex(long v) : re_(v) {}
  Complex(double v) : re_(v) {}

  const Real& re() const { return re_; }
  const Real& im() const { return im_; }

  Complex& operator+=(const Complex& o);
  Complex& operator-=(const Complex& o);
  Complex& operator*=(const Complex& o);
  Complex& operator/=(const Complex& o);
  Complex& operator*=(const Real& o);
  Complex& operator/=(const Real& o);
  Complex operator-() const { return {-re_, -im_}; }

  friend Complex operator+(Complex a, const Complex& b) { return a += b; }
  friend Complex operator-(Complex a, const Complex& b) { return a -= b; }
  friend Complex operator*(Complex a, const Complex& b) { return a *= b; }
  friend Complex operator/(Complex a, const Complex& b) { return a /= b; }
  friend Complex operator*(Complex a, const Real& b) { return a *= b; }
  friend Complex operator*(const Real& b, Complex a) { return a *= b; }
  friend Complex operator/(Complex a, const Real& b) { return a /= b; }

  friend bool operator==(const Complex& a, const Complex& b) {
    return a.re_ == b.re_ && a.im_ == b.im_;
  }

  bool is_zero() const { return re_.is_zero() && im_.is_zero(); }
  bool is_real() const { return im_.is_zero(); }

 private:
  Real re_;
  Real im_;
};

Complex conj(const Complex& z);
Real abs(const Complex& z);
Real norm(const Complex& z);  // |z|^2
Real arg(const Complex& z);
Complex exp(const Complex& z);
/// Principal branch, arg in (-pi, pi].
Complex log(const Complex& z);
Complex sqrt(const Complex& z);
/// Principal branch z^w = exp(w log z); 0^w = 0 for Re w > 0, 1 for w = 0.
Complex pow(const Complex& z, const Complex& w);
Complex pow(const Complex& z, long n);
Complex polar(const Real& r, const Real& theta);

std::ostream& operator<<(std::ostream& os, const Complex& z);

}  // namespace qerd::hp
