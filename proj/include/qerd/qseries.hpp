#pragma once

// q-shifted factorials, basic hypergeometric series, the big q-exponential
// and Jackson's q-integral, evaluated at arbitrary precision with explicit
// tail bounds.

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qerd/errors.hpp"
#include "qerd/hp.hpp"

namespace qerd {

using hp::Complex;
using hp::Real;

/// Evaluation context: the base q, the decimal precision and the target
/// absolute accuracy. All arithmetic runs at precision_digits + kGuardDigits.
class QContext {
 public:
  static constexpr unsigned kGuardDigits = 20;
  static constexpr unsigned kDefaultDigits = 50;
  static constexpr std::string_view kDefaultTolerance = "1e-30";

  explicit QContext(std::string_view q, unsigned precision_digits = kDefaultDigits,
                    std::string_view tolerance = kDefaultTolerance);

  const Real& q() const { return q_; }
  const Real& log_q() const { return log_q_; }
  const Real& tolerance() const { return tolerance_; }
  /// Truncation target for internal sums: tolerance * 1e-10, but never below
  /// what the working precision can resolve.
  const Real& series_target() const { return target_; }
  unsigned precision_digits() const { return digits_; }
  unsigned working_digits() const { return digits_ + kGuardDigits; }
  const std::string& q_text() const { return q_text_; }
  const std::string& tolerance_text() const { return tolerance_text_; }

  /// Same precision and tolerance with the base replaced by q^2.
  QContext squared() const;

 private:
  QContext() = default;
  void finish();

  std::string q_text_;
  std::string tolerance_text_;
  unsigned digits_ = kDefaultDigits;
  Real q_;
  Real log_q_;
  Real tolerance_;
  Real target_;
};

/// RAII guard putting the calling thread at the context's working precision.
class WorkingPrecision {
 public:
  explicit WorkingPrecision(const QContext& ctx) : scope_(ctx.working_digits()) {}

 private:
  hp::PrecisionScope scope_;
};

struct SeriesValue {
  Complex value;
  Real tail_bound;
  long terms_used = 0;
};

/// Length of a q-shifted factorial; std::nullopt means infinity.
using Length = std::optional<long>;
inline constexpr Length kInfinite = std::nullopt;

struct PhiParams {
  std::vector<Complex> numerators;
  std::vector<Complex> denominators;
  Complex argument;
  /// Return (b_1;q)_inf times the series, which is entire in b_1.
  bool regularize_first_denominator = false;
};

/// q^sigma on the principal branch, exp(sigma ln q).
Complex qpower(const Complex& sigma, const QContext& ctx);
Real qpower(long n, const QContext& ctx);

/// If a = q^{-n} (relative tolerance) for some 0 <= n <= cap, returns n.
std::optional<long> match_q_minus_natural(const Complex& a, const QContext& ctx,
                                          long cap = 200);

SeriesValue qpochhammer(const Complex& a, Length k, const QContext& ctx);
SeriesValue qpochhammer_multi(const std::vector<Complex>& as, Length k, const QContext& ctx);

/// r phi s per the standard definition including the factor
/// ((-1)^k q^{k(k-1)/2})^{1+s-r}.
SeriesValue basic_hypergeometric(const PhiParams& p, const QContext& ctx);

/// E_{q^2}(z) = (-z; q^2)_inf, with q taken from ctx.
SeriesValue big_q_exponential(const Complex& z, const QContext& ctx);

/// (1-q) sum_{k=kmin}^{kmax} f(q^k) q^k. f receives the lattice index k.
/// The reported tail is a heuristic geometric extrapolation from the two
/// outermost samples at each end.
SeriesValue jackson_q_integral(const std::function<Complex(long)>& f, long kmin, long kmax,
                               const QContext& ctx);

/// Cached q-shifted factorials at integer powers of the base:
/// (q;q)_k and (q^j;q)_inf, the latter exactly zero for j <= 0.
class PowerPochhammer {
 public:
  explicit PowerPochhammer(const QContext& ctx);

  const Real& q_factorial(long k);           // (q;q)_k
  Real infinite(long j);                     // (q^j;q)_inf
  const Real& q_factorial_infinite() const { return qq_inf_; }
  const QContext& context() const { return ctx_; }

 private:
  QContext ctx_;
  Real qq_inf_;
  std::vector<Real> fact_;  // (q;q)_k, k = 0..size-1
};

}  // namespace qerd
