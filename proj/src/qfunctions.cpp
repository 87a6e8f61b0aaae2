#include "qerd/qfunctions.hpp"

#include <map>

namespace qerd {

namespace {

constexpr long kMaxTerms = 100000;

Complex minus_one_power(long k) { return Complex(k % 2 == 0 ? 1 : -1); }

}  // namespace

// ---------------------------------------------------------------------------
// Wall polynomials

WallPolynomial::WallPolynomial(long n, const Complex& a, WallNormalization normalization,
                               const QContext& ctx) {
  if (n < 0) throw Error(ErrorKind::InvalidArgument, "Wall polynomial degree must be >= 0");
  WorkingPrecision wp(ctx);
  const Real& q = ctx.q();
  const Real& tol = ctx.tolerance();
  coeffs_.reserve(static_cast<std::size_t>(n + 1));

  // c_k = (q^{-n};q)_k q^k / (q;q)_k, times 1/(aq;q)_k (plain) or (aq^{k+1};q)_{n-k} (tilde).
  Complex head(1);
  Real qk(1);
  const Real q_minus_n = hp::pow(q, -n);
  if (normalization == WallNormalization::plain) {
    Complex den(1);
    for (long k = 0; k <= n; ++k) {
      coeffs_.push_back(head / den);
      head *= Complex((Real(1) - q_minus_n * qk) * q / (Real(1) - qk * q));
      Complex f = Complex(1) - a * (qk * q);
      if (k < n && hp::abs(f) < tol) {
        throw Error(ErrorKind::NearPoleDenominator, "aq lies in q^{-N} for the plain Wall form");
      }
      den *= f;
      qk *= q;
    }
    return;
  }

  // Tail products (a q^{k+1};q)_{n-k}, built from the top down.
  std::vector<Complex> tail(static_cast<std::size_t>(n + 1), Complex(1));
  for (long k = n - 1; k >= 0; --k) {
    tail[static_cast<std::size_t>(k)] =
        tail[static_cast<std::size_t>(k + 1)] * (Complex(1) - a * hp::pow(q, k + 1));
  }
  Complex scale(1);
  if (normalization == WallNormalization::check) {
    scale = qpochhammer(a * hp::pow(q, n + 1), kInfinite, ctx).value;
  }
  for (long k = 0; k <= n; ++k) {
    coeffs_.push_back(head * tail[static_cast<std::size_t>(k)] * scale);
    head *= Complex((Real(1) - q_minus_n * qk) * q / (Real(1) - qk * q));
    qk *= q;
  }
}

Complex WallPolynomial::operator()(const Complex& x) const {
  Complex acc(0);
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
    acc *= x;
    acc += *it;
  }
  return acc;
}

Real WallPolynomial::majorant(const Real& r) const {
  Real acc(0);
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
    acc *= r;
    acc += hp::abs(*it);
  }
  return acc;
}

Complex wall_polynomial(const WallParams& p, const QContext& ctx) {
  WorkingPrecision wp(ctx);
  if (p.n < 0) throw Error(ErrorKind::InvalidArgument, "Wall polynomial degree must be >= 0");
  if (p.normalization == WallNormalization::plain) {
    PhiParams phi;
    phi.numerators = {Complex(qpower(-p.n, ctx)), Complex(0)};
    phi.denominators = {p.a * ctx.q()};
    phi.argument = p.x * ctx.q();
    return basic_hypergeometric(phi, ctx).value;
  }
  return WallPolynomial(p.n, p.a, p.normalization, ctx)(p.x);
}

Complex wall_polynomial_3phi2(long n, const Complex& a, const Complex& x, const QContext& ctx) {
  WorkingPrecision wp(ctx);
  if (a.is_zero() || x.is_zero()) {
    throw Error(ErrorKind::InvalidArgument, "the 3phi2 form needs a and x nonzero");
  }
  const Real& q = ctx.q();
  const Complex q_minus_n(qpower(-n, ctx));
  PhiParams phi;
  phi.numerators = {q_minus_n, q_minus_n / a, Complex(1) / x};
  phi.denominators = {Complex(0), Complex(0)};
  phi.argument = Complex(q);
  Complex series = basic_hypergeometric(phi, ctx).value;
  Complex pre = minus_one_power(n) * Complex(hp::pow(q, n * (n + 1) / 2)) * hp::pow(a * x, n);
  pre /= qpochhammer(a * q, n, ctx).value;
  return pre * series;
}

Complex wall_polynomial_recurrence(long n, const Complex& a, const Complex& x, const QContext& ctx) {
  WorkingPrecision wp(ctx);
  if (n < 0) throw Error(ErrorKind::InvalidArgument, "Wall polynomial degree must be >= 0");
  const Real& q = ctx.q();
  Complex prev(0);
  Complex cur(1);
  Real qj(1);
  for (long j = 0; j < n; ++j) {
    Complex A = Complex(qj) * (Complex(1) - a * (qj * q));
    Complex C = a * (qj * (Real(1) - qj));
    if (hp::abs(A) < ctx.tolerance()) {
      throw Error(ErrorKind::NearPoleDenominator, "Wall recurrence coefficient A_n vanishes");
    }
    Complex next = ((A + C - x) * cur - C * prev) / A;
    prev = std::move(cur);
    cur = std::move(next);
    qj *= q;
  }
  return cur;
}

Complex wall_orthogonality_sum(long n, long m, const Real& a, bool dual, long truncation,
                               const QContext& ctx) {
  WorkingPrecision wp(ctx);
  const Real& q = ctx.q();
  const Real aq = a * q;
  if (!(a > Real(0) && aq < Real(1))) {
    throw Error(ErrorKind::InvalidArgument, "Wall orthogonality needs 0 < a < 1/q");
  }
  if (n < 0 || m < 0 || truncation < 0) {
    throw Error(ErrorKind::InvalidArgument, "indices and truncation must be >= 0");
  }
  const bool automatic = truncation == 0;
  const long cap = automatic ? kMaxTerms : truncation;
  PowerPochhammer pp(ctx);
  const Real aq_inf = qpochhammer(Complex(aq), kInfinite, ctx).value.re();

  if (!dual) {
    WallPolynomial pn(n, Complex(a), WallNormalization::plain, ctx);
    WallPolynomial pm(m, Complex(a), WallNormalization::plain, ctx);
    Complex sum(0);
    Real weight(1);  // (aq)^k / (q;q)_k
    Real qk(1);
    Real tail;
    long k = 0;
    for (; k <= cap; ++k) {
      sum += Complex(weight) * pn(Complex(qk)) * pm(Complex(qk));
      // For x <= q^{k+1}: |p_n(x)| <= majorant, and (aq)^j/(q;q)_j <= (aq)^j/(q;q)_inf.
      Real next = qk * q;
      tail = pn.majorant(next) * pm.majorant(next) * hp::pow(aq, k + 1) /
             (pp.q_factorial_infinite() * (Real(1) - aq));
      if (automatic && tail <= ctx.series_target()) break;
      weight *= aq / (Real(1) - next);
      qk = std::move(next);
    }
    if (tail > ctx.tolerance()) {
      throw Error(ErrorKind::TruncationInsufficient,
                  "Wall orthogonality tail bound exceeds tolerance at truncation " +
                      std::to_string(truncation));
    }
    if (n == m) {
      Real target = hp::pow(aq, n) * pp.q_factorial(n) /
                    (qpochhammer(Complex(aq), n, ctx).value.re() * aq_inf);
      sum -= Complex(target);
    }
    return sum;
  }

  // Dual relation over the degree; p_n(q^k) through the 3phi2 form, which
  // terminates after min(n, k) + 1 terms and stays well conditioned.
  const long k = n;
  const long l = m;
  const Complex xk(hp::pow(q, k));
  const Complex xl(hp::pow(q, l));
  Complex sum(0);
  Real weight(1);  // (aq;q)_j / ((aq)^j (q;q)_j)
  Real prev_abs(-1);
  Real estimate(1);
  long j = 0;
  for (; j <= cap; ++j) {
    Complex term = Complex(weight) * wall_polynomial_3phi2(j, Complex(a), xk, ctx) *
                   wall_polynomial_3phi2(j, Complex(a), xl, ctx);
    sum += term;
    Real cur = hp::abs(term);
    // Geometric extrapolation from the last ratio; the terms decay like q^{j^2/2}.
    if (prev_abs > Real(0) && j > std::max(k, l) + 1) {
      Real rho = cur / prev_abs;
      estimate = rho < Real(1) ? cur * rho / (Real(1) - rho) : Real(1);
      if (automatic && estimate <= ctx.series_target()) break;
    }
    prev_abs = cur;
    Real qj1 = hp::pow(q, j + 1);
    weight *= (Real(1) - aq * hp::pow(q, j)) / (aq * (Real(1) - qj1));
  }
  if (estimate > ctx.tolerance()) {
    throw Error(ErrorKind::TruncationInsufficient,
                "dual Wall orthogonality tail estimate exceeds tolerance");
  }
  if (k == l) sum -= Complex(hp::pow(aq, -k) * pp.q_factorial(k) / aq_inf);
  return sum;
}

// ---------------------------------------------------------------------------
// q-Bessel functions

Complex qbessel(const QBesselParams& p, const QContext& ctx, QBase base) {
  WorkingPrecision wp(ctx);
  const QContext bctx = base == QBase::q_squared ? ctx.squared() : ctx;
  std::optional<long> int_order;
  {
    Real r = hp::round(p.nu.re());
    if (hp::abs(p.nu - Complex(r)) < ctx.tolerance()) int_order = r.to_long();
  }
  if (p.x.is_zero()) {
    if (int_order && *int_order == 0) return Complex(1);
    if (int_order || p.nu.re() > Real(0)) return Complex(0);
    throw Error(ErrorKind::InvalidArgument, "J_nu(0) is singular for Re nu <= 0, nu not integer");
  }
  if (!int_order && p.x.re().sign() < 0 &&
      hp::abs(p.x.im()) <= ctx.tolerance() * hp::abs(p.x.re())) {
    throw Error(ErrorKind::BranchCut, "x^nu on the negative real axis");
  }
  const Real& Q = bctx.q();
  PhiParams phi;
  phi.numerators = {Complex(0)};
  phi.denominators = {int_order ? Complex(hp::pow(Q, *int_order + 1)) : qpower(p.nu + Complex(1), bctx)};
  phi.argument = p.x * p.x * Q;
  phi.regularize_first_denominator = true;
  Complex series = basic_hypergeometric(phi, bctx).value;
  Complex xnu = int_order ? hp::pow(p.x, *int_order) : hp::pow(p.x, p.nu);
  return xnu * series / PowerPochhammer(bctx).q_factorial_infinite();
}

Complex qbessel_integer_order(long order, const Complex& x, const QContext& ctx) {
  if (order < 0) throw Error(ErrorKind::InvalidArgument, "qbessel_integer_order needs order >= 0");
  WorkingPrecision wp(ctx);
  PowerPochhammer table(ctx.squared());
  const Real& q = ctx.q();
  const Real& Q = table.context().q();
  const Complex x2 = x * x;
  const Real ax2 = hp::norm(x);
  Complex term = Complex(1) / Complex(table.q_factorial(order));
  Complex sum(0);
  Real Qk1 = Q;  // Q^{k+1}
  for (long k = 0; k < kMaxTerms; ++k) {
    // |t_{j+1}/t_j| <= q^{2k+2}|x|^2 / ((1-Q^{k+1})(1-Q^{N+k+1})) for all j >= k.
    Real rho = Qk1 * ax2 / ((Real(1) - Qk1) * (Real(1) - Qk1 * hp::pow(Q, order)));
    if (rho < Real(1)) {
      Real tail = hp::abs(term) / (Real(1) - rho);
      if (tail <= ctx.series_target() * hp::max(Real(1), hp::abs(sum))) break;
    }
    sum += term;
    term *= -x2 * Complex(Qk1 / ((Real(1) - Qk1) * (Real(1) - Qk1 * hp::pow(Q, order))));
    Qk1 *= Q;
  }
  (void)q;
  return hp::pow(x, order) * sum;
}

namespace {

Real int_lattice_direct(long order, long m, const QContext& ctx, PowerPochhammer& table) {
  // q^{mN} sum_k (-1)^k q^{k(k+1)+2mk} / ((Q;Q)_k (Q;Q)_{N+k})
  const Real& q = ctx.q();
  const Real Q = q * q;
  Real term = Real(1) / table.q_factorial(order);
  Real sum(0);
  const Real step0 = hp::pow(q, 2 + 2 * m);  // q^{2k+2+2m} at k = 0
  Real step = step0;
  for (long k = 0; k < kMaxTerms; ++k) {
    Real d = (Real(1) - hp::pow(Q, k + 1)) * (Real(1) - hp::pow(Q, order + k + 1));
    Real rho = step / d;
    if (rho < Real(1)) {
      Real tail = hp::abs(term) / (Real(1) - rho);
      if (tail <= ctx.series_target() * hp::max(Real(1), hp::abs(sum))) break;
    }
    sum += term;
    term *= -rho;
    step *= Q;
  }
  return hp::pow(q, m * order) * sum;
}

}  // namespace

Real qbessel_int_lattice(long order, long m, const QContext& ctx) {
  PowerPochhammer table(ctx.squared());
  return qbessel_int_lattice(order, m, ctx, table);
}

Real qbessel_int_lattice(long order, long m, const QContext& ctx, PowerPochhammer& table) {
  WorkingPrecision wp(ctx);
  Real factor(1);
  const Real minus_q = -ctx.q();
  for (;;) {
    if (order < 0) {
      factor *= hp::pow(minus_q, -order);
      m -= order;
      order = -order;
      continue;
    }
    if (m < 0) {
      std::swap(order, m);
      continue;
    }
    break;
  }
  return factor * int_lattice_direct(order, m, ctx, table);
}

QBesselLattice::QBesselLattice(const Complex& nu, const QContext& ctx) : ctx_(ctx), nu_(nu) {
  WorkingPrecision wp(ctx_);
  Real r = hp::round(nu.re());
  if (hp::abs(nu - Complex(r)) < ctx_.tolerance()) {
    integer_order_ = r.to_long();
    return;
  }
  const QContext sq = ctx_.squared();
  Complex b = qpower(Complex(2) * nu + Complex(2), ctx_);
  b_inf_over_qq_inf_ = qpochhammer(b, kInfinite, sq).value / PowerPochhammer(sq).q_factorial_infinite();
}

Complex QBesselLattice::direct(long m) const {
  // m >= 0: x = q^m, x^nu = exp(m nu ln q).
  const QContext sq = ctx_.squared();
  PhiParams phi;
  phi.numerators = {Complex(0)};
  phi.denominators = {qpower(Complex(2) * nu_ + Complex(2), ctx_)};
  phi.argument = Complex(hp::pow(ctx_.q(), 2 + 2 * m));
  Complex series = basic_hypergeometric(phi, sq).value;
  return qpower(nu_ * Complex(m), ctx_) * b_inf_over_qq_inf_ * series;
}

Complex QBesselLattice::operator()(long m) const {
  WorkingPrecision wp(ctx_);
  if (integer_order_) return Complex(qbessel_int_lattice(*integer_order_, m, ctx_));
  if (m >= 0) return direct(m);
  // J_nu(q^m) = J_m(q^nu) = (-q)^{|m|} J_{|m|}(q^{nu+|m|}).
  const long n = -m;
  Complex x = qpower(nu_ + Complex(n), ctx_);
  return Complex(hp::pow(-ctx_.q(), n)) * qbessel_integer_order(n, x, ctx_);
}

SeriesValue qbessel_orthogonality_residual(long n, long m, long l, long window,
                                           const QContext& ctx) {
  if (window < 0) throw Error(ErrorKind::InvalidArgument, "window must be >= 0");
  WorkingPrecision wp(ctx);
  PowerPochhammer table(ctx.squared());
  auto term = [&](long k) {
    return hp::pow(ctx.q(), 2 * k + n + m) * qbessel_int_lattice(k + n, l, ctx, table) *
           qbessel_int_lattice(k + m, l, ctx, table);
  };
  Real sum(0);
  for (long k = -window; k <= window; ++k) sum += term(k);
  Real edge = hp::abs(term(-window)) + hp::abs(term(window));
  if (edge > ctx.tolerance()) {
    throw Error(ErrorKind::TruncationInsufficient,
                "q-Bessel orthogonality: edge terms " + edge.to_string(6));
  }
  if (n == m) sum -= Real(1);
  return {Complex(sum), edge, 2 * window + 1};
}

LatticeSamples qhankel_transform(const LatticeSamples& f, const Complex& nu,
                                 HankelDirection /*direction*/, long out_first, long out_last,
                                 const QContext& ctx) {
  if (f.values.empty() || out_last < out_first) {
    throw Error(ErrorKind::InvalidArgument, "empty q-Hankel window");
  }
  WorkingPrecision wp(ctx);
  if (!(nu.re() > Real(-1))) {
    throw Error(ErrorKind::DivergentParameters, "q-Hankel transform needs Re nu > -1");
  }
  QBesselLattice kernel(nu, ctx);
  std::map<long, Complex> cache;
  auto J = [&](long m) -> const Complex& {
    auto it = cache.find(m);
    if (it == cache.end()) it = cache.emplace(m, kernel(m)).first;
    return it->second;
  };
  const Real q2 = ctx.q() * ctx.q();
  std::vector<Real> weights;  // q^{2k}
  weights.reserve(f.values.size());
  for (long k = f.first; k <= f.last(); ++k) weights.push_back(hp::pow(q2, k));

  LatticeSamples g{out_first, {}};
  g.values.reserve(static_cast<std::size_t>(out_last - out_first + 1));
  for (long n = out_first; n <= out_last; ++n) {
    Complex sum(0);
    for (long k = f.first; k <= f.last(); ++k) {
      const Complex& fk = f.at(k);
      if (fk.is_zero()) continue;
      sum += Complex(weights[static_cast<std::size_t>(k - f.first)]) * J(k + n) * fk;
    }
    // Edge samples stand in for the part of f outside the window.
    Real edge = hp::abs(Complex(weights.front()) * J(f.first + n) * f.values.front());
    if (f.values.size() > 1) {
      edge += hp::abs(Complex(weights.back()) * J(f.last() + n) * f.values.back());
    }
    if (edge > ctx.tolerance()) {
      throw Error(ErrorKind::TruncationInsufficient,
                  "input window edge contributes " + edge.to_string(6) + " at n=" +
                      std::to_string(n));
    }
    g.values.push_back(std::move(sum));
  }
  return g;
}

// ---------------------------------------------------------------------------
// Classical functions

Real laguerre(long n, const Real& alpha, const Real& x, const QContext& ctx) {
  if (n < 0) throw Error(ErrorKind::InvalidArgument, "Laguerre degree must be >= 0");
  WorkingPrecision wp(ctx);
  Real prev(1);
  if (n == 0) return prev;
  Real cur = Real(1) + alpha - x;
  for (long j = 1; j < n; ++j) {
    // (j+1) L_{j+1} = (2j+1+alpha-x) L_j - (j+alpha) L_{j-1}
    Real next = ((Real(2 * j + 1) + alpha - x) * cur - (Real(j) + alpha) * prev) / Real(j + 1);
    prev = std::move(cur);
    cur = std::move(next);
  }
  return cur;
}

Real bessel_j(const Real& nu, const Real& x, const QContext& ctx) {
  WorkingPrecision wp(ctx);
  if (!(nu > Real(-1)) || x.sign() < 0) {
    throw Error(ErrorKind::InvalidArgument, "bessel_j needs nu > -1 and x >= 0");
  }
  if (x.is_zero()) return nu.is_zero() ? Real(1) : Real(0);
  const Real h2 = x * x / Real(4);
  Real term = hp::pow(x / Real(2), nu) / hp::gamma(nu + Real(1));
  Real sum(0);
  for (long k = 0; k < kMaxTerms; ++k) {
    Real rho = h2 / (Real(k + 1) * (Real(k + 1) + nu));
    if (rho < Real(1)) {
      Real tail = hp::abs(term) / (Real(1) - rho);
      if (tail <= ctx.series_target() * hp::max(Real(1), hp::abs(sum))) break;
    }
    sum += term;
    term *= -rho;
  }
  return sum;
}

}  // namespace qerd
