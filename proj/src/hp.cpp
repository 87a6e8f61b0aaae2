#include "qerd/hp.hpp"

#include <cmath>
#include <cstdlib>
#include <memory>
#include <ostream>
#include <stdexcept>

namespace qerd::hp {

namespace {

thread_local unsigned tl_digits = 70;

mpfr_prec_t digits_to_bits(unsigned digits) {
  return static_cast<mpfr_prec_t>(std::ceil(digits * 3.3219280948873623)) + 8;
}

constexpr mpfr_rnd_t kRnd = MPFR_RNDN;

}  // namespace

unsigned working_digits() { return tl_digits; }
mpfr_prec_t working_bits() { return digits_to_bits(tl_digits); }

PrecisionScope::PrecisionScope(unsigned digits) : saved_digits_(tl_digits) {
  if (digits == 0) throw std::invalid_argument("precision must be positive");
  tl_digits = digits;
}
PrecisionScope::~PrecisionScope() { tl_digits = saved_digits_; }

Real::Real() {
  mpfr_init2(v_, working_bits());
  mpfr_set_zero(v_, 1);
}
Real::Real(int v) : Real(static_cast<long>(v)) {}
Real::Real(long v) {
  mpfr_init2(v_, working_bits());
  mpfr_set_si(v_, v, kRnd);
}
Real::Real(long long v) {
  mpfr_init2(v_, working_bits());
  mpfr_set_sj(v_, static_cast<intmax_t>(v), kRnd);
}
Real::Real(unsigned v) : Real(static_cast<unsigned long>(v)) {}
Real::Real(unsigned long v) {
  mpfr_init2(v_, working_bits());
  mpfr_set_ui(v_, v, kRnd);
}
Real::Real(double v) {
  mpfr_init2(v_, working_bits());
  mpfr_set_d(v_, v, kRnd);
}
Real::Real(std::string_view decimal) {
  mpfr_init2(v_, working_bits());
  std::string s(decimal);
  if (mpfr_set_str(v_, s.c_str(), 10, kRnd) != 0) {
    mpfr_clear(v_);
    throw std::invalid_argument("not a decimal number: '" + s + "'");
  }
}

Real::Real(const Real& other) {
  mpfr_init2(v_, mpfr_get_prec(other.v_));
  mpfr_set(v_, other.v_, kRnd);
}
Real::Real(Real&& other) noexcept {
  // Steal the limbs and leave `other` as a valid one-limb zero.
  *v_ = *other.v_;
  mpfr_init2(other.v_, MPFR_PREC_MIN);
  mpfr_set_zero(other.v_, 1);
}
Real& Real::operator=(const Real& other) {
  if (this != &other) {
    if (mpfr_get_prec(v_) != mpfr_get_prec(other.v_)) mpfr_set_prec(v_, mpfr_get_prec(other.v_));
    mpfr_set(v_, other.v_, kRnd);
  }
  return *this;
}
Real& Real::operator=(Real&& other) noexcept {
  if (this != &other) mpfr_swap(v_, other.v_);
  return *this;
}
Real::~Real() { mpfr_clear(v_); }

Real& Real::operator+=(const Real& o) {
  mpfr_add(v_, v_, o.v_, kRnd);
  return *this;
}
Real& Real::operator-=(const Real& o) {
  mpfr_sub(v_, v_, o.v_, kRnd);
  return *this;
}
Real& Real::operator*=(const Real& o) {
  mpfr_mul(v_, v_, o.v_, kRnd);
  return *this;
}
Real& Real::operator/=(const Real& o) {
  mpfr_div(v_, v_, o.v_, kRnd);
  return *this;
}
Real Real::operator-() const {
  Real r;
  mpfr_neg(r.v_, v_, kRnd);
  return r;
}

bool operator==(const Real& a, const Real& b) { return mpfr_equal_p(a.v_, b.v_) != 0; }
std::partial_ordering operator<=>(const Real& a, const Real& b) {
  if (mpfr_unordered_p(a.v_, b.v_)) return std::partial_ordering::unordered;
  int c = mpfr_cmp(a.v_, b.v_);
  if (c < 0) return std::partial_ordering::less;
  if (c > 0) return std::partial_ordering::greater;
  return std::partial_ordering::equivalent;
}

bool Real::is_zero() const { return mpfr_zero_p(v_) != 0; }
bool Real::is_finite() const { return mpfr_number_p(v_) != 0; }
int Real::sign() const { return mpfr_sgn(v_); }
mpfr_prec_t Real::precision_bits() const { return mpfr_get_prec(v_); }
double Real::to_double() const { return mpfr_get_d(v_, kRnd); }
long Real::to_long() const { return mpfr_get_si(v_, kRnd); }

std::string Real::to_string(unsigned digits) const {
  if (mpfr_nan_p(v_)) return "nan";
  if (mpfr_inf_p(v_)) return mpfr_sgn(v_) > 0 ? "inf" : "-inf";
  if (digits == 0) digits = static_cast<unsigned>(mpfr_get_prec(v_) * 0.30102999566398120) + 1;
  char* buf = nullptr;
  if (mpfr_asprintf(&buf, "%.*Re", static_cast<int>(digits) - 1, v_) < 0) {
    throw std::runtime_error("mpfr_asprintf failed");
  }
  std::unique_ptr<char, decltype(&mpfr_free_str)> owned(buf, &mpfr_free_str);
  return std::string(buf);
}

namespace {
template <typename F>
Real unary(const Real& x, F f) {
  Real r;
  f(r.get(), x.get(), kRnd);
  return r;
}
}  // namespace

Real abs(const Real& x) { return unary(x, mpfr_abs); }
Real sqrt(const Real& x) { return unary(x, mpfr_sqrt); }
Real exp(const Real& x) { return unary(x, mpfr_exp); }
Real log(const Real& x) { return unary(x, mpfr_log); }
Real sin(const Real& x) { return unary(x, mpfr_sin); }
Real cos(const Real& x) { return unary(x, mpfr_cos); }
Real atan2(const Real& y, const Real& x) {
  Real r;
  mpfr_atan2(r.get(), y.get(), x.get(), kRnd);
  return r;
}
Real pow(const Real& x, const Real& y) {
  Real r;
  mpfr_pow(r.get(), x.get(), y.get(), kRnd);
  return r;
}
Real pow(const Real& x, long n) {
  Real r;
  mpfr_pow_si(r.get(), x.get(), n, kRnd);
  return r;
}
Real round(const Real& x) {
  Real r;
  mpfr_round(r.get(), x.get());
  return r;
}
Real gamma(const Real& x) { return unary(x, mpfr_gamma); }
Real pi() {
  Real r;
  mpfr_const_pi(r.get(), kRnd);
  return r;
}
Real max(const Real& a, const Real& b) { return a < b ? b : a; }
Real min(const Real& a, const Real& b) { return b < a ? b : a; }
Real pow10(long e) { return pow(Real(10), e); }

std::ostream& operator<<(std::ostream& os, const Real& x) { return os << x.to_string(); }

// ---------------------------------------------------------------------------

Complex& Complex::operator+=(const Complex& o) {
  re_ += o.re_;
  im_ += o.im_;
  return *this;
}
Complex& Complex::operator-=(const Complex& o) {
  re_ -= o.re_;
  im_ -= o.im_;
  return *this;
}
Complex& Complex::operator*=(const Complex& o) {
  if (o.im_.is_zero()) return *this *= o.re_;
  if (im_.is_zero()) {
    Real r = re_;
    re_ = r * o.re_;
    im_ = r * o.im_;
    return *this;
  }
  Real re = re_ * o.re_ - im_ * o.im_;
  im_ = re_ * o.im_ + im_ * o.re_;
  re_ = std::move(re);
  return *this;
}
Complex& Complex::operator/=(const Complex& o) {
  if (o.im_.is_zero()) return *this /= o.re_;
  Real d = norm(o);
  Real re = (re_ * o.re_ + im_ * o.im_) / d;
  im_ = (im_ * o.re_ - re_ * o.im_) / d;
  re_ = std::move(re);
  return *this;
}
Complex& Complex::operator*=(const Real& o) {
  re_ *= o;
  if (!im_.is_zero()) im_ *= o;
  return *this;
}
Complex& Complex::operator/=(const Real& o) {
  re_ /= o;
  if (!im_.is_zero()) im_ /= o;
  return *this;
}

Complex conj(const Complex& z) { return {z.re(), -z.im()}; }
Real norm(const Complex& z) { return z.re() * z.re() + z.im() * z.im(); }
Real abs(const Complex& z) {
  if (z.im().is_zero()) return abs(z.re());
  Real r;
  mpfr_hypot(r.get(), z.re().get(), z.im().get(), kRnd);
  return r;
}
Real arg(const Complex& z) { return atan2(z.im(), z.re()); }

Complex exp(const Complex& z) {
  Real m = exp(z.re());
  if (z.im().is_zero()) return Complex(m);
  return {m * cos(z.im()), m * sin(z.im())};
}

Complex log(const Complex& z) {
  if (z.im().is_zero() && z.re().sign() > 0) return Complex(log(z.re()));
  return {log(abs(z)), arg(z)};
}

Complex sqrt(const Complex& z) {
  if (z.im().is_zero() && z.re().sign() >= 0) return Complex(sqrt(z.re()));
  Real r = abs(z);
  Real a = sqrt((r + z.re()) / Real(2));
  Real b = sqrt((r - z.re()) / Real(2));
  if (z.im().sign() < 0) b = -b;
  return {a, b};
}

Complex pow(const Complex& z, const Complex& w) {
  if (w.is_zero()) return Complex(1);
  if (z.is_zero()) return Complex(0);
  return exp(w * log(z));
}

Complex pow(const Complex& z, long n) {
  if (n < 0) return Complex(1) / pow(z, -n);
  Complex result(1);
  Complex base = z;
  while (n > 0) {
    if (n & 1) result *= base;
    n >>= 1;
    if (n) base *= base;
  }
  return result;
}

Complex polar(const Real& r, const Real& theta) { return {r * cos(theta), r * sin(theta)}; }

std::ostream& operator<<(std::ostream& os, const Complex& z) {
  return os << z.re().to_string() << ' ' << z.im().to_string();
}

}  // namespace qerd::hp
