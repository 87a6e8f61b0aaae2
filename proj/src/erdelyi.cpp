#include "qerd/erdelyi.hpp"

#include <algorithm>
#include <cmath>

namespace qerd {

namespace {

constexpr long kLhsCap = 200000;
constexpr long kBesselCap = 20000;
constexpr long kScalarCap = 4000;

bool is_integer(const Complex& z) {
  return z.im().is_zero() && z.re() == hp::round(z.re());
}

Complex principal_power(const Complex& z, const Complex& nu) {
  if (z.is_zero()) {
    if (nu.is_zero()) return Complex(1);
    if (nu.re() > Real(0)) return Complex(0);
    throw Error(ErrorKind::InvalidArgument, "z = 0 needs Re nu > 0 or nu = 0");
  }
  if (z.im().is_zero() && z.re() < Real(0) && !is_integer(nu)) {
    throw Error(ErrorKind::BranchCut, "z on the negative real axis");
  }
  return hp::pow(z, nu);
}

Real signed_q_power(const Real& q, long e) {
  Real r = hp::pow(q, e);
  return (e % 2 == 0) ? r : -r;
}

void check_params(const ErdelyiParams& p) {
  if (p.n < 0 || p.m < 0) throw Error(ErrorKind::InvalidArgument, "degrees must be >= 0");
  if (!(p.nu.re() > Real(-1))) {
    throw Error(ErrorKind::DivergentParameters, "the sum diverges for Re nu <= -1");
  }
}

// J_nu(z x^{1/2}; Q) / (z x^{1/2})^nu = sum_j d_j x^j for 0 <= x <= 1, with
//   d_j = (-1)^j Q^{j(j-1)/2} (Q z^2)^j (Q^{nu+1+j};Q)_inf / ((Q;Q)_j (Q;Q)_inf).
// Coefficients are kept until the ratio bound
//   |d_{j+1}/d_j| <= Q^{j+1}|z|^2 / ((1-|b|Q^j)(1-Q^{j+1})),  b = Q^{nu+1},
// shows the rest is negligible; that rest is kept in `remainder`.
class BesselSeries {
 public:
  BesselSeries(const Complex& nu, const Complex& z, const QContext& ctx) {
    const QContext cq = ctx.squared();
    const Real& Q = cq.q();
    const Complex b = qpower(Complex(2) * nu + Complex(2), ctx);
    const Real abs_b = hp::abs(b);
    const Complex z2 = z * z;
    const Real abs_z2 = hp::abs(z2);
    const Real floor = ctx.series_target() * Real(1e-5);

    Complex d = qpochhammer(b, kInfinite, cq).value / qpochhammer(Complex(Q), kInfinite, cq).value;
    Real Qj(1);  // Q^j
    for (long j = 0;; ++j) {
      coeffs_.push_back(d);
      abs_.push_back(hp::abs(d));
      if (z2.is_zero()) break;
      Real Qj1 = Qj * Q;
      Real rho = Qj1 * abs_z2 / ((Real(1) - abs_b * Qj) * (Real(1) - Qj1));
      if (rho > Real(0) && rho < Real(0.5)) {
        Real rest = abs_.back() * rho / (Real(1) - rho);
        if (rest <= floor) {
          remainder_ = std::move(rest);
          break;
        }
      }
      if (j >= kBesselCap) {
        throw Error(ErrorKind::TruncationInsufficient, "q-Bessel series needs too many terms");
      }
      d *= -(Qj1 * z2) / ((Real(1) - Qj1) * (Complex(1) - b * Complex(Qj)));
      Qj = std::move(Qj1);
    }
    // Suffix sums in log form, for cheap cutoffs at small x.
    Real acc = remainder_;
    log_suffix_.assign(abs_.size(), 0.0);
    for (std::size_t j = abs_.size(); j-- > 0;) {
      acc += abs_[j];
      log_suffix_[j] = acc.is_zero() ? -1e300 : hp::log(acc).to_double();
    }
    log_floor_ = hp::log(floor).to_double();
  }

  /// sum_j d_j x^j for x = Q^p, up to an error of at most the series floor.
  Complex operator()(const Real& x, double log_x) const {
    Complex sum(0);
    Real xj(1);
    for (std::size_t j = 0; j < coeffs_.size(); ++j) {
      if (j > 0 && log_suffix_[j] + static_cast<double>(j) * log_x <= log_floor_) break;
      sum += coeffs_[j] * xj;
      xj *= x;
    }
    return sum;
  }

  /// sum_j |d_j| r^j plus the dropped remainder.
  Real majorant(const Real& r, double log_r) const {
    Real sum = remainder_;
    Real rj(1);
    for (std::size_t j = 0; j < abs_.size(); ++j) {
      if (j > 0 && log_suffix_[j] + static_cast<double>(j) * log_r <= log_floor_) {
        sum += hp::exp(Real(log_suffix_[j] + static_cast<double>(j) * log_r));
        break;
      }
      sum += abs_[j] * rj;
      rj *= r;
    }
    return sum;
  }

 private:
  std::vector<Complex> coeffs_;
  std::vector<Real> abs_;
  std::vector<double> log_suffix_;
  Real remainder_{0};
  double log_floor_ = 0.0;
};

// The sum part of the theorem's left side, without the factor z^nu.
SeriesValue lhs_sum(const ErdelyiParams& p, const Complex& znu, const QContext& ctx) {
  const QContext cq = ctx.squared();
  const Real& Q = cq.q();
  const double log_Q = cq.log_q().to_double();
  WallPolynomial wn(p.n, qpower(Complex(2) * p.sigma, ctx), WallNormalization::tilde, cq);
  WallPolynomial wm(p.m, qpower(Complex(2) * (p.nu - p.sigma), ctx), WallNormalization::tilde, cq);
  BesselSeries bessel(p.nu, p.z, ctx);

  const Complex step = qpower(Complex(2) + Complex(2) * p.nu, ctx);  // Q^{1+nu}
  const Real rate = hp::abs(step);
  const Real geometric = Real(1) / (Real(1) - rate);
  const Real abs_znu = hp::abs(znu);
  const Real target = ctx.series_target();

  Complex sum(0);
  Complex weight(1);                                           // Q^{p(1+nu)}
  Real pinf = qpochhammer(Complex(Q), kInfinite, cq).value.re();  // (Q^{p+1};Q)_inf
  Real x(1);                                                   // Q^p
  Real tail(1);
  long p_index = 0;
  for (;; ++p_index) {
    const double log_x = static_cast<double>(p_index) * log_Q;
    Complex cx(x);
    sum += weight * pinf * wn(cx) * wm(cx) * bessel(x, log_x);

    // |term_p'| <= |Q^{p'(1+nu)}| M_n(Q^{p+1}) M_m(Q^{p+1}) D(Q^{p+1}) for p' > p.
    Real x1 = x * Q;
    Real rate_next = hp::abs(weight) * rate;
    tail = abs_znu * rate_next * geometric * wn.majorant(x1) * wm.majorant(x1) *
           bessel.majorant(x1, log_x + log_Q);
    if (tail <= target) break;
    if (p_index >= kLhsCap) {
      throw Error(ErrorKind::TruncationInsufficient,
                  "lhs sum: tail " + tail.to_string(6) + " after " + std::to_string(kLhsCap) +
                      " terms");
    }
    weight *= step;
    pinf /= Real(1) - x1;
    x = std::move(x1);
  }
  // Cutoffs inside the q-Bessel sums, at most the series floor per term.
  Real cutoff = abs_znu * geometric * wn.majorant(Real(1)) * wm.majorant(Real(1)) * target *
                Real(1e-5);
  return {sum, tail + cutoff, p_index + 1};
}

Complex rhs_from(const ErdelyiParams& p, const Complex& znu, const Complex& y,
                 const Complex& product, const QContext& ctx) {
  const QContext cq = ctx.squared();
  const long nm = p.n + p.m;
  Complex pref = Complex(signed_q_power(ctx.q(), nm) * hp::pow(ctx.q(), (p.m - p.n) * (p.m - p.n)));
  pref *= qpower(Complex(2 * p.n) * p.sigma + Complex(2 * p.m) * (p.nu - p.sigma), ctx);
  WallPolynomial wn(p.n, qpower(Complex(2) * (p.nu - p.sigma + Complex(p.m - p.n)), ctx),
                    WallNormalization::tilde, cq);
  WallPolynomial wm(p.m, qpower(Complex(2) * (p.sigma + Complex(p.n - p.m)), ctx),
                    WallNormalization::tilde, cq);
  return pref * znu * product * wn(y) * wm(y);
}

}  // namespace

SeriesValue erdelyi_lhs(const ErdelyiParams& p, const QContext& ctx) {
  WorkingPrecision wp(ctx);
  check_params(p);
  Complex znu = principal_power(p.z, p.nu);
  SeriesValue s = lhs_sum(p, znu, ctx);
  s.value *= znu;
  return s;
}

Complex erdelyi_rhs(const ErdelyiParams& p, const QContext& ctx) {
  WorkingPrecision wp(ctx);
  if (p.n < 0 || p.m < 0) throw Error(ErrorKind::InvalidArgument, "degrees must be >= 0");
  const QContext cq = ctx.squared();
  Complex znu = principal_power(p.z, p.nu);
  Complex y = p.z * p.z * Complex(qpower(p.n + p.m, cq));
  Complex product = qpochhammer(y * Complex(cq.q()), kInfinite, cq).value;
  return rhs_from(p, znu, y, product, ctx);
}

Complex erdelyi_rhs_lattice(const ErdelyiParams& p, long z_exponent, const QContext& ctx) {
  WorkingPrecision wp(ctx);
  if (p.n < 0 || p.m < 0) throw Error(ErrorKind::InvalidArgument, "degrees must be >= 0");
  const QContext cq = ctx.squared();
  PowerPochhammer table(cq);
  const long nm = p.n + p.m;
  Complex znu = qpower(Complex(z_exponent) * p.nu, ctx);
  Complex y(qpower(z_exponent + nm, cq));
  Complex product(table.infinite(z_exponent + 1 + nm));
  ErdelyiParams shifted = p;
  shifted.z = Complex(qpower(z_exponent, ctx));
  return rhs_from(shifted, znu, y, product, ctx);
}

QIntegralValue erdelyi_qintegral(const ErdelyiParams& p,
                                 std::optional<std::pair<long, long>> window, const QContext& ctx) {
  WorkingPrecision wp(ctx);
  check_params(p);
  const QContext cq = ctx.squared();
  const Real& q = ctx.q();
  long kmin = -3;
  long kmax = 0;
  if (window) {
    std::tie(kmin, kmax) = *window;
    if (kmax < kmin) throw Error(ErrorKind::InvalidArgument, "empty q-integral window");
  } else {
    // The integrand decays like q^{k(2+2 Re nu)}.
    double decay = (Real(2) + Real(2) * p.nu.re()).to_double() * ctx.log_q().to_double();
    kmax = static_cast<long>(std::ceil(hp::log(ctx.series_target()).to_double() / decay)) + 5;
  }

  const Complex an = qpower(Complex(2) * p.sigma, ctx);
  const Complex am = qpower(Complex(2) * (p.nu - p.sigma), ctx);
  WallPolynomial wn(p.n, an, WallNormalization::check, cq);
  WallPolynomial wm(p.m, am, WallNormalization::check, cq);
  PowerPochhammer table(cq);

  auto integrand = [&](long k) -> Complex {
    Real e = table.infinite(k + 1);  // E_{q^2}(-q^2 x^2) at x = q^k
    if (e.is_zero()) return Complex(0);
    Real x = qpower(k, ctx);
    Complex x2(x * x);
    Complex j = qbessel({p.nu, p.z * Complex(x)}, ctx);
    return qpower(Complex(k) * p.nu, ctx) * e * wn(x2) * wm(x2) * j * x;
  };
  QIntegralValue out;
  out.lhs = jackson_q_integral(integrand, kmin, kmax, ctx);
  const Real scale = Real(1) / (Real(1) - q);
  out.lhs.value *= scale;
  out.lhs.tail_bound *= scale;

  // check = tilde * (Q^{n+1} a;Q)_inf
  Complex norm = qpochhammer(an * Complex(qpower(p.n + 1, cq)), kInfinite, cq).value *
                 qpochhammer(am * Complex(qpower(p.m + 1, cq)), kInfinite, cq).value;
  out.rhs = erdelyi_rhs(p, ctx) * norm;
  out.reduced_lhs = erdelyi_lhs(p, ctx).value * norm;
  return out;
}

namespace {

struct ScalarSides {
  Real lhs;
  Real rhs;
  Real tail;
  long terms = 0;
};

ScalarSides scalar_sides(long a, long c, long e, long y, long w, long l, KernelEvaluator& eval) {
  if (std::min({a, c, e, y}) < 0) throw Error(ErrorKind::InvalidArgument, "a, c, e, y must be >= 0");
  const QContext& ctx = eval.context();
  WorkingPrecision wp(ctx);
  // |P+(y,p,e)|, |P0| <= 1 and the bound for P+(p,a,c) shrinks by q^{1+|a-c|} per step.
  const Real geometric = Real(1) / (Real(1) - hp::pow(ctx.q(), 1 + std::abs(a - c)));
  const long order = a - c + e - y + w;
  ScalarSides s;
  long p = 0;
  for (;; ++p) {
    s.lhs += eval.plus(p, a, c) * eval.plus(y, p, e) * eval.zero(p - l - y - e, order, w);
    s.tail = eval.plus_bound(p + 1, a, c) * geometric;
    if (s.tail <= ctx.series_target()) break;
    if (p >= kScalarCap) {
      throw Error(ErrorKind::TruncationInsufficient, "scalar identity sum does not settle");
    }
  }
  s.terms = p + 1;
  const long r = c - l - e - w;
  if (r >= 0) s.rhs = eval.plus(r, c, e) * eval.plus(y, a, r);
  return s;
}

}  // namespace

ResidualValue scalar_identity_residual(long a, long c, long e, long y, long w, long l,
                                       KernelEvaluator& eval) {
  ScalarSides s = scalar_sides(a, c, e, y, w, l, eval);
  WorkingPrecision wp(eval.context());
  return {s.lhs - s.rhs, s.tail, s.terms};
}

LatticeConsistency lattice_continuum_residual(long a, long c, long e, long y, long w, long l,
                                              KernelEvaluator& eval) {
  const QContext& ctx = eval.context();
  if (a - c + e - y < 0) throw Error(ErrorKind::InvalidArgument, "needs a - c + e - y >= 0");
  ScalarSides s = scalar_sides(a, c, e, y, w, l, eval);
  WorkingPrecision wp(ctx);
  const long zexp = -l - y - e - w;
  ErdelyiParams p;
  p.n = c;
  p.m = y;
  p.sigma = Complex(a - c);
  p.nu = Complex(a - c + e - y);
  p.z = Complex(qpower(zexp, ctx));

  const Real& q = ctx.q();
  Real k = signed_q_power(q, zexp - c) * hp::pow(q, -c * (a - c) - y * (e - y));
  k *= hp::sqrt(eval.pinf(c + 1) / eval.pinf(a + 1) * eval.pinf(y + 1) / eval.pinf(e + 1));
  k *= eval.pinf(a + 1) * eval.pinf(e + 1) / (eval.pinf(1) * eval.pinf(1));

  Complex lhs = erdelyi_lhs(p, ctx).value * k;
  Complex rhs = erdelyi_rhs_lattice(p, zexp, ctx) * k;
  return {hp::abs(Complex(s.lhs) - lhs), hp::abs(Complex(s.rhs) - rhs)};
}

Real inverse_hankel_check(long n, long m, const Complex& nu, const Complex& sigma, long r_first,
                          long r_last, long k_first, long k_last, const QContext& ctx) {
  WorkingPrecision wp(ctx);
  if (n < 0 || m < 0) throw Error(ErrorKind::InvalidArgument, "degrees must be >= 0");
  if (r_last < r_first || k_last < k_first) {
    throw Error(ErrorKind::InvalidArgument, "empty window");
  }
  const QContext cq = ctx.squared();
  ErdelyiParams p;
  p.n = n;
  p.m = m;
  p.nu = nu;
  p.sigma = sigma;
  LatticeSamples g{r_first, {}};
  for (long r = r_first; r <= r_last; ++r) g.values.push_back(erdelyi_rhs_lattice(p, r, ctx));
  LatticeSamples f = qhankel_transform(g, nu, HankelDirection::inverse, k_first, k_last, ctx);

  WallPolynomial wn(n, qpower(Complex(2) * sigma, ctx), WallNormalization::tilde, cq);
  WallPolynomial wm(m, qpower(Complex(2) * (nu - sigma), ctx), WallNormalization::tilde, cq);
  PowerPochhammer table(cq);
  Real worst(0);
  for (long k = k_first; k <= k_last; ++k) {
    Complex expected(0);
    if (k >= 0) {
      Complex x(qpower(k, cq));
      expected = qpower(Complex(k) * nu, ctx) * table.infinite(k + 1) * wn(x) * wm(x);
    }
    worst = hp::max(worst, hp::abs(f.at(k) - expected));
  }
  return worst;
}

std::vector<std::pair<Complex, Complex>> erdelyi_series_coefficients(long n, const Complex& nu,
                                                                     const Complex& sigma, long max_j,
                                                                     const QContext& ctx) {
  WorkingPrecision wp(ctx);
  if (n < 0 || max_j < 0) throw Error(ErrorKind::InvalidArgument, "n and max_j must be >= 0");
  if (!(nu.re() > Real(-1))) throw Error(ErrorKind::DivergentParameters, "needs Re nu > -1");
  const QContext cq = ctx.squared();
  const Real& Q = cq.q();
  PowerPochhammer table(cq);
  const Complex b = qpower(Complex(2) * nu + Complex(2), ctx);
  const Complex b_inf = qpochhammer(b, kInfinite, cq).value;
  WallPolynomial wn(n, qpower(Complex(2) * sigma, ctx), WallNormalization::tilde, cq);

  // Right side over z^nu: pref (w Q^{1+n};Q)_inf pt_n(w Q^n; Q^{nu-sigma-n}), w = z^2.
  Complex pref = Complex(signed_q_power(ctx.q(), n) * hp::pow(ctx.q(), n * n)) *
                 qpower(Complex(2 * n) * sigma, ctx);
  WallPolynomial wr(n, qpower(Complex(2) * (nu - sigma - Complex(n)), ctx),
                    WallNormalization::tilde, cq);
  const auto& c = wr.coefficients();

  std::vector<std::pair<Complex, Complex>> out;
  Complex b_shift = b_inf;  // (b Q^j;Q)_inf
  for (long j = 0; j <= max_j; ++j) {
    // Left: d_j sum_p Q^{p(1+nu+j)} (Q^{p+1};Q)_inf pt_n(Q^p)
    Complex step = qpower(Complex(2) * (Complex(1 + j) + nu), ctx);
    const Real rate = hp::abs(step);
    Complex weight(1);
    Complex s(0);
    Real x(1);
    for (long p = 0;; ++p) {
      s += weight * table.infinite(p + 1) * wn(Complex(x));
      Real x1 = x * Q;
      Real tail = hp::abs(weight) * rate / (Real(1) - rate) * wn.majorant(x1);
      if (tail <= ctx.series_target()) break;
      if (p >= kLhsCap) throw Error(ErrorKind::TruncationInsufficient, "coefficient sum");
      weight *= step;
      x = std::move(x1);
    }
    Real dj = hp::pow(Q, j * (j - 1) / 2 + j) / (table.q_factorial(j) * table.q_factorial_infinite());
    if (j % 2 == 1) dj = -dj;
    Complex lhs = Complex(dj) * b_shift * s;

    Complex rhs(0);
    for (long i = 0; i <= std::min<long>(j, static_cast<long>(c.size()) - 1); ++i) {
      long k = j - i;
      Real ek = hp::pow(Q, k * (k - 1) / 2 + (1 + n) * k) / table.q_factorial(k);
      if (k % 2 == 1) ek = -ek;
      rhs += c[static_cast<std::size_t>(i)] * Complex(hp::pow(Q, n * i) * ek);
    }
    out.emplace_back(std::move(lhs), pref * rhs);
    b_shift /= Complex(1) - b * Complex(hp::pow(Q, j));
  }
  return out;
}

Real classical_erdelyi_rhs(long n, long m, const Real& nu, const Real& sigma, const Real& y,
                           const QContext& ctx) {
  WorkingPrecision wp(ctx);
  Real y2 = y * y;
  Real v = hp::pow(y, nu) * hp::exp(-y2) / Real(2) *
           laguerre(m, sigma - Real(m - n), y2, ctx) *
           laguerre(n, nu - sigma + Real(m - n), y2, ctx);
  return (n + m) % 2 == 0 ? v : -v;
}

std::vector<ClassicalLimitRow> classical_limit_table(long n, long m, const Real& nu,
                                                     const Real& sigma, const Real& y,
                                                     const std::vector<std::string>& q_values,
                                                     unsigned digits, std::string_view tolerance) {
  std::vector<ClassicalLimitRow> rows;
  for (const auto& qt : q_values) {
    QContext ctx(qt, digits, tolerance);
    WorkingPrecision wp(ctx);
    const QContext cq = ctx.squared();
    const Real& Q = cq.q();
    const Real s = Real(1) - Q;
    ErdelyiParams p;
    p.n = n;
    p.m = m;
    p.nu = Complex(nu);
    p.sigma = Complex(sigma);
    p.z = Complex(y * hp::sqrt(s));
    Complex lhs = erdelyi_lhs(p, ctx).value;

    // (Q^{a+1};Q)_k / L_k^{(a)}(0) -> k! (1-Q)^k
    const Real an = nu - sigma + Real(m - n);
    const Real am = sigma + Real(n - m);
    Real denom = Real(2) * hp::pow(s, nu / Real(2));
    denom *= qpochhammer(qpower(Complex(Real(2) * (an + Real(1))), ctx), n, cq).value.re() /
             laguerre(n, an, Real(0), ctx);
    denom *= qpochhammer(qpower(Complex(Real(2) * (am + Real(1))), ctx), m, cq).value.re() /
             laguerre(m, am, Real(0), ctx);
    if (denom.is_zero() || !denom.is_finite()) {
      throw Error(ErrorKind::InvalidArgument, "degenerate Laguerre parameter in classical limit");
    }
    ClassicalLimitRow row;
    row.q = qt;
    row.q_side = lhs / denom;
    row.classical = classical_erdelyi_rhs(n, m, nu, sigma, y, ctx);
    row.gap = hp::abs(row.q_side - Complex(row.classical));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace qerd
