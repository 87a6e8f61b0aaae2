#include "qerd/qseries.hpp"

#include <cmath>
#include <sstream>

namespace qerd {

namespace {

constexpr long kMaxSeriesTerms = 200000;

Real parse_real(std::string_view text, const char* what) {
  try {
    return Real(text);
  } catch (const std::invalid_argument&) {
    throw Error(ErrorKind::InvalidContext, std::string(what) + " is not a number: " +
                                               std::string(text));
  }
}

}  // namespace

QContext::QContext(std::string_view q, unsigned precision_digits, std::string_view tolerance)
    : q_text_(q), tolerance_text_(tolerance), digits_(precision_digits) {
  if (precision_digits == 0) throw Error(ErrorKind::InvalidContext, "precision must be positive");
  hp::PrecisionScope scope(working_digits());
  q_ = parse_real(q, "q");
  tolerance_ = parse_real(tolerance, "tolerance");
  finish();
}

void QContext::finish() {
  hp::PrecisionScope scope(working_digits());
  if (!(q_ > Real(0) && q_ < Real(1))) {
    throw Error(ErrorKind::InvalidContext, "q must lie strictly inside (0,1), got " + q_text_);
  }
  if (!(tolerance_ > Real(0))) throw Error(ErrorKind::InvalidContext, "tolerance must be positive");
  // Guard digits: tolerance >= 10^(10 - precision_digits).
  if (tolerance_ < hp::pow10(10 - static_cast<long>(digits_))) {
    std::ostringstream msg;
    msg << "tolerance " << tolerance_text_ << " is below 1e" << (10 - static_cast<long>(digits_))
        << " allowed at " << digits_ << " digits";
    throw Error(ErrorKind::InvalidContext, msg.str());
  }
  log_q_ = hp::log(q_);
  target_ = hp::max(tolerance_ * hp::pow10(-10), hp::pow10(-static_cast<long>(digits_) - 5));
}

QContext QContext::squared() const {
  QContext c;
  c.digits_ = digits_;
  c.tolerance_text_ = tolerance_text_;
  c.tolerance_ = tolerance_;
  {
    hp::PrecisionScope scope(working_digits());
    c.q_ = q_ * q_;
    c.q_text_ = "(" + q_text_ + ")^2";
  }
  c.finish();
  return c;
}

Complex qpower(const Complex& sigma, const QContext& ctx) {
  WorkingPrecision wp(ctx);
  if (sigma.is_real()) return Complex(hp::exp(sigma.re() * ctx.log_q()));
  return hp::exp(sigma * ctx.log_q());
}

Real qpower(long n, const QContext& ctx) {
  WorkingPrecision wp(ctx);
  return hp::pow(ctx.q(), n);
}

std::optional<long> match_q_minus_natural(const Complex& a, const QContext& ctx, long cap) {
  WorkingPrecision wp(ctx);
  const Real& tol = ctx.tolerance();
  // q^{-n} >= 1 is real, so a must be close to the positive real axis.
  if (a.re() < Real(1) - tol) return std::nullopt;
  if (hp::abs(a.im()) > tol * hp::abs(a.re())) return std::nullopt;
  Real guess = -hp::log(a.re()) / ctx.log_q();
  long centre = hp::round(guess).to_long();
  for (long n = std::max(0L, centre - 1); n <= std::min(cap, centre + 1); ++n) {
    Real target = hp::pow(ctx.q(), -n);
    if (hp::abs(a - Complex(target)) < tol * target) return n;
  }
  return std::nullopt;
}

SeriesValue qpochhammer(const Complex& a, Length k, const QContext& ctx) {
  WorkingPrecision wp(ctx);
  SeriesValue out{Complex(1), Real(0), 0};
  if (k) {
    if (*k < 0) throw Error(ErrorKind::InvalidArgument, "q-Pochhammer length must be >= 0");
    Complex aqi = a;
    for (long i = 0; i < *k; ++i) {
      out.value *= Complex(1) - aqi;
      aqi *= ctx.q();
    }
    out.terms_used = *k;
    return out;
  }
  if (a.is_zero()) return out;

  // Infinite product. With t = |a| q^N < 1/2 the remainder R = prod_{i>=N}
  // (1 - a q^i) satisfies |log R| <= s = 2t/(1-q), so |R - 1| <= e^s - 1.
  const Real one_minus_q = Real(1) - ctx.q();
  Real t = hp::abs(a);
  Complex aqi = a;
  long i = 0;
  for (;; ++i) {
    if (t < Real(0.5)) {
      Real s = Real(2) * t / one_minus_q;
      if (s < Real(1)) {
        Real rel = hp::exp(s) - Real(1);
        if (rel <= ctx.series_target()) {
          out.tail_bound = hp::abs(out.value) * rel;
          break;
        }
      }
    }
    if (i >= kMaxSeriesTerms) {
      throw Error(ErrorKind::TruncationInsufficient, "infinite q-Pochhammer did not converge");
    }
    out.value *= Complex(1) - aqi;
    aqi *= ctx.q();
    t *= ctx.q();
  }
  out.terms_used = i;
  return out;
}

SeriesValue qpochhammer_multi(const std::vector<Complex>& as, Length k, const QContext& ctx) {
  if (as.empty()) throw Error(ErrorKind::InvalidArgument, "qpochhammer_multi needs parameters");
  WorkingPrecision wp(ctx);
  SeriesValue out{Complex(1), Real(0), 0};
  // First-order propagation: |prod (v_i + e_i) - prod v_i| ~ sum |e_i| prod_{j!=i} |v_j|.
  std::vector<SeriesValue> parts;
  parts.reserve(as.size());
  for (const auto& a : as) parts.push_back(qpochhammer(a, k, ctx));
  for (std::size_t i = 0; i < parts.size(); ++i) {
    out.value *= parts[i].value;
    out.terms_used = std::max(out.terms_used, parts[i].terms_used);
    if (parts[i].tail_bound.is_zero()) continue;
    Real others(1);
    for (std::size_t j = 0; j < parts.size(); ++j) {
      if (j != i) others *= hp::abs(parts[j].value) + parts[j].tail_bound;
    }
    out.tail_bound += parts[i].tail_bound * others;
  }
  return out;
}

SeriesValue basic_hypergeometric(const PhiParams& p, const QContext& ctx) {
  WorkingPrecision wp(ctx);
  const std::size_t r = p.numerators.size();
  const std::size_t s = p.denominators.size();
  const long excess = 1 + static_cast<long>(s) - static_cast<long>(r);  // 1+s-r
  const Real& q = ctx.q();
  const Real& tol = ctx.tolerance();
  const bool regularize = p.regularize_first_denominator && s > 0;

  // Termination: some a_i = q^{-n}.
  std::optional<long> stop;
  for (const auto& a : p.numerators) {
    if (auto n = match_q_minus_natural(a, ctx)) {
      if (!stop || *n < *stop) stop = n;
    }
  }
  if (!stop) {
    if (excess < 0) {
      throw Error(ErrorKind::DivergentSeries, "r > s+1 and the series does not terminate");
    }
    if (excess == 0 && !(hp::abs(p.argument) < Real(1))) {
      throw Error(ErrorKind::DivergentSeries, "r = s+1 requires |z| < 1 for a nonterminating series");
    }
  }

  // b_1 = q^{1-n}, n >= 1, under regularization: the sum starts at k = n.
  std::optional<long> first_pole;
  for (std::size_t j = 0; j < s; ++j) {
    auto n = match_q_minus_natural(p.denominators[j], ctx);
    if (!n) continue;
    if (j == 0 && regularize) {
      first_pole = *n + 1;
    } else {
      throw Error(ErrorKind::NearPoleDenominator,
                  "denominator parameter lies in q^{-N} (index " + std::to_string(j) + ")");
    }
  }

  const long start = first_pole.value_or(0);
  SeriesValue out{Complex(0), Real(0), 0};
  if (stop && *stop < start) return out;

  const std::size_t den_from = first_pole ? 1 : 0;
  const Complex& z = p.argument;

  // Term at k = start, computed directly.
  Complex term(1);
  {
    Real qk(1);
    for (long k = 0; k < start; ++k) {
      Complex f(1);
      for (const auto& a : p.numerators) f *= Complex(1) - a * qk;
      for (std::size_t j = den_from; j < s; ++j) f /= Complex(1) - p.denominators[j] * qk;
      f *= z / (Real(1) - qk * q);
      if (excess != 0) f *= Complex(hp::pow(-qk, excess));
      term *= f;
      qk *= q;
    }
    if (first_pole) term *= Complex(PowerPochhammer(ctx).q_factorial_infinite());
  }

  Real qk = hp::pow(q, start);  // q^k for the current k
  Complex sum(0);
  long k = start;
  for (;; ++k) {
    if (k - start > kMaxSeriesTerms) {
      throw Error(ErrorKind::TruncationInsufficient, "basic hypergeometric series too slow");
    }
    if (stop && k > *stop) {
      out.tail_bound = Real(0);
      break;
    }
    if (!stop) {
      // Ratio bound for every later term from k on.
      Real rho = hp::abs(z) / (Real(1) - qk * q);
      bool usable = true;
      for (const auto& a : p.numerators) rho *= Real(1) + hp::abs(a) * qk;
      for (std::size_t j = den_from; j < s; ++j) {
        Real d = Real(1) - hp::abs(p.denominators[j]) * qk;
        if (!(d > Real(0))) {
          usable = false;
          break;
        }
        rho /= d;
      }
      if (first_pole) {
        Real d = Real(1) - qk * q * hp::pow(q, -start);  // 1 - q^{k+1-n}
        if (!(d > Real(0))) usable = false;
        else rho /= d;
      }
      if (excess > 0) rho *= hp::pow(qk, excess);
      if (usable && rho < Real(1)) {
        Real tail = hp::abs(term) / (Real(1) - rho);
        Real scale = hp::max(Real(1), hp::abs(sum));
        if (tail <= ctx.series_target() * scale) {
          out.tail_bound = tail;
          break;
        }
      }
    }
    sum += term;
    // Ratio t_{k+1} / t_k.
    Complex f(1);
    for (const auto& a : p.numerators) f *= Complex(1) - a * qk;
    for (std::size_t j = den_from; j < s; ++j) {
      Complex d = Complex(1) - p.denominators[j] * qk;
      if (hp::abs(d) < tol) {
        throw Error(ErrorKind::NearPoleDenominator,
                    "(b;q)_k passes within tolerance of zero at k=" + std::to_string(k));
      }
      f /= d;
    }
    if (first_pole) f /= Complex(Real(1) - hp::pow(q, k + 1 - start));
    f *= z / (Real(1) - qk * q);
    if (excess != 0) f *= Complex(hp::pow(-qk, excess));
    term *= f;
    qk *= q;
  }
  out.terms_used = k - start;
  out.value = std::move(sum);

  if (regularize && !first_pole) {
    SeriesValue b1 = qpochhammer(p.denominators[0], kInfinite, ctx);
    out.tail_bound = out.tail_bound * hp::abs(b1.value) + b1.tail_bound * hp::abs(out.value);
    out.value *= b1.value;
  }
  if (out.tail_bound > tol) {
    throw Error(ErrorKind::TruncationInsufficient, "series tail bound exceeds tolerance");
  }
  return out;
}

SeriesValue big_q_exponential(const Complex& z, const QContext& ctx) {
  return qpochhammer(-z, kInfinite, ctx.squared());
}

SeriesValue jackson_q_integral(const std::function<Complex(long)>& f, long kmin, long kmax,
                               const QContext& ctx) {
  if (kmax < kmin) throw Error(ErrorKind::InvalidArgument, "empty Jackson window");
  WorkingPrecision wp(ctx);
  const Real& q = ctx.q();
  Complex sum(0);
  std::vector<Complex> samples;
  samples.reserve(static_cast<std::size_t>(kmax - kmin + 1));
  Real qk = hp::pow(q, kmin);
  for (long k = kmin; k <= kmax; ++k) {
    Complex t = f(k) * qk;
    sum += t;
    samples.push_back(std::move(t));
    qk *= q;
  }
  // Geometric extrapolation past each end from the two outermost samples.
  auto extrapolate = [&](const Complex& edge, const Complex& inner) {
    Real e = hp::abs(edge);
    if (e.is_zero()) return Real(0);
    Real i = hp::abs(inner);
    if (i.is_zero()) return e;
    Real rho = e / i;
    if (!(rho < Real(1))) return Real(1) / Real(0);  // +inf: no decay visible
    return e * rho / (Real(1) - rho);
  };
  Real tail(0);
  if (samples.size() >= 2) {
    tail = extrapolate(samples.front(), samples[1]) +
           extrapolate(samples.back(), samples[samples.size() - 2]);
  } else {
    tail = hp::abs(samples.front());
  }
  Real scale = Real(1) - q;
  return {sum * scale, tail * scale, kmax - kmin + 1};
}

PowerPochhammer::PowerPochhammer(const QContext& ctx) : ctx_(ctx) {
  WorkingPrecision wp(ctx_);
  qq_inf_ = qpochhammer(Complex(ctx_.q()), kInfinite, ctx_).value.re();
  fact_.emplace_back(1);
}

const Real& PowerPochhammer::q_factorial(long k) {
  if (k < 0) throw Error(ErrorKind::InvalidArgument, "(q;q)_k needs k >= 0");
  if (static_cast<std::size_t>(k) >= fact_.size()) {
    WorkingPrecision wp(ctx_);
    Real qi = hp::pow(ctx_.q(), static_cast<long>(fact_.size()));
    while (static_cast<std::size_t>(k) >= fact_.size()) {
      fact_.push_back(fact_.back() * (Real(1) - qi));
      qi *= ctx_.q();
    }
  }
  return fact_[static_cast<std::size_t>(k)];
}

Real PowerPochhammer::infinite(long j) {
  if (j <= 0) return Real(0);
  WorkingPrecision wp(ctx_);
  return qq_inf_ / q_factorial(j - 1);
}

}  // namespace qerd
