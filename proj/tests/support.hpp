#pragma once

#include <random>
#include <string>
#include <string_view>

#include <doctest.h>

#include "qerd/qseries.hpp"

namespace qerd::test {

inline Real abs_diff(const Complex& a, const Complex& b) { return hp::abs(a - b); }

inline bool within(const Complex& a, const Complex& b, const char* tol) {
  return hp::abs(a - b) < Real(tol);
}

inline std::string show(const Complex& z) {
  return z.re().to_string(20) + (z.im().is_zero() ? "" : " + " + z.im().to_string(20) + "i");
}

#define CHECK_CLOSE(a, b, tol)                                                     \
  do {                                                                             \
    const ::qerd::Complex ca_ = (a), cb_ = (b);                                    \
    INFO("lhs = ", ::qerd::test::show(ca_), ", rhs = ", ::qerd::test::show(cb_)); \
    CHECK(::qerd::test::within(ca_, cb_, tol));                                    \
  } while (0)

// A context accurate enough for 1e-40 comparisons against the oracles.
inline QContext tight(std::string_view q) { return QContext(q, 60, "1e-45"); }

// Fixed-seed random reals in [lo, hi], rounded to six decimals so that the
// generated cases read well in failure messages.
class Sampler {
 public:
  explicit Sampler(unsigned seed) : gen_(seed) {}
  Real uniform(double lo, double hi) {
    std::uniform_real_distribution<double> d(lo, hi);
    return Real(std::to_string(d(gen_)));
  }
  long integer(long lo, long hi) {
    std::uniform_int_distribution<long> d(lo, hi);
    return d(gen_);
  }

 private:
  std::mt19937 gen_;
};

// (a;q)_k as a plain product.
inline Complex product(const Complex& a, const Real& q, long k) {
  Complex r(1);
  Real qi(1);
  for (long i = 0; i < k; ++i) {
    r *= Complex(1) - a * Complex(qi);
    qi *= q;
  }
  return r;
}

}  // namespace qerd::test
