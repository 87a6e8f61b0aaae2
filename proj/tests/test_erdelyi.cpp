#include "support.hpp"

#include "qerd/erdelyi.hpp"

using namespace qerd;
using qerd::test::Sampler;

namespace {

// Everything below is summed term by term, independently of the library's
// series machinery, in base Q = q^2.

Complex qpow(const Complex& e, const Real& Q) { return hp::exp(e * Complex(hp::log(Q))); }

Complex pinf(const Complex& a, const Real& Q) {
  Complex r(1);
  Real qi(1);
  for (int i = 0; i < 600; ++i) {
    r *= Complex(1) - a * Complex(qi);
    qi *= Q;
  }
  return r;
}

// tilde Wall polynomial (Qa;Q)_n 2phi1(Q^{-n}, 0; Qa; Q, Qx), summed directly
Complex wall_tilde(long n, const Complex& a, const Complex& x, const Real& Q) {
  Complex sum(0), term(1);
  for (long k = 0; k <= n; ++k) {
    sum += term;
    // (Q^{-n};Q)_{k+1}/(Q^{-n};Q)_k = 1 - Q^{k-n}
    term *= Complex(Real(1) - hp::pow(Q, k - n)) * Complex(Q) * x /
            (Complex(Real(1) - hp::pow(Q, k + 1)) * (Complex(1) - a * Complex(hp::pow(Q, k + 1))));
  }
  return test::product(a * Complex(Q), Q, n) * sum;
}

Complex bessel(const Complex& nu, const Complex& x, const Real& Q) {
  Complex b = qpow(nu + Complex(1), Q);
  Complex sum(0), term(1), w = Complex(Q) * x * x;
  Real qk(1);
  for (long k = 0; k < 200; ++k) {
    sum += term;
    term *= -Complex(qk) * w / (Complex(Real(1) - qk * Q) * (Complex(1) - b * Complex(qk)));
    qk *= Q;
  }
  return hp::pow(x, nu) * pinf(b, Q) / pinf(Complex(Q), Q) * sum;
}

Complex lhs_oracle(const ErdelyiParams& e, const Real& q, long terms) {
  const Real Q = q * q;
  Complex sum(0);
  for (long p = 0; p < terms; ++p) {
    Complex x(hp::pow(Q, p));
    sum += Complex(hp::pow(Q, p)) * qpow(Complex(p) * e.nu, q) * pinf(Complex(hp::pow(Q, p + 1)), Q) *
           wall_tilde(e.n, qpow(e.sigma, Q), x, Q) * wall_tilde(e.m, qpow(e.nu - e.sigma, Q), x, Q) *
           bessel(e.nu, e.z * Complex(hp::pow(q, p)), Q);
  }
  return sum;
}

Complex rhs_oracle(const ErdelyiParams& e, const Real& q) {
  const Real Q = q * q;
  const long n = e.n, m = e.m;
  Real sign = ((n + m) % 2 == 0) ? Real(1) : Real(-1);
  Complex z2 = e.z * e.z, x = z2 * Complex(hp::pow(Q, n + m));
  return Complex(sign * hp::pow(q, n + m + (m - n) * (m - n))) *
         qpow(Complex(n) * e.sigma + Complex(m) * (e.nu - e.sigma), Q) * hp::pow(e.z, e.nu) *
         pinf(z2 * Complex(hp::pow(Q, 1 + n + m)), Q) *
         wall_tilde(n, qpow(e.nu - e.sigma + Complex(m - n), Q), x, Q) *
         wall_tilde(m, qpow(e.sigma + Complex(n - m), Q), x, Q);
}

ErdelyiParams params(long n, long m, const char* nu, const char* sigma, const Complex& z) {
  return {n, m, Complex(Real(nu)), Complex(Real(sigma)), z};
}

}  // namespace

TEST_SUITE("erdelyi") {

TEST_CASE("worked example against brute-force sums") {
  QContext ctx = test::tight("0.6");
  WorkingPrecision wp(ctx);
  ErdelyiParams e = params(1, 2, "0.5", "0.3", Complex(Real("0.7")));
  Complex lhs = lhs_oracle(e, ctx.q(), 120);
  Complex rhs = rhs_oracle(e, ctx.q());
  CHECK_CLOSE(lhs, rhs, "1e-40");
  CHECK_CLOSE(erdelyi_lhs(e, ctx).value, lhs, "1e-40");
  CHECK_CLOSE(erdelyi_rhs(e, ctx), rhs, "1e-40");
  CHECK_CLOSE(rhs, Complex(Real("-6.0229494547444395186436746803591525380e-3")), "1e-40");
}

TEST_CASE("both sides against the oracles on sampled parameters") {
  for (const char* qt : {"0.3", "0.6", "0.9"}) {
    QContext ctx = test::tight(qt);
    WorkingPrecision wp(ctx);
    Sampler s(31);
    const long terms = qt[2] == '9' ? 1200 : 150;
    for (int i = 0; i < 4; ++i) {
      ErdelyiParams e{s.integer(0, 3), s.integer(0, 3), Complex(s.uniform(-0.5, 2.5)),
                      Complex(s.uniform(-1, 1), s.uniform(-0.5, 0.5)),
                      Complex(s.uniform(0.2, 1.8), s.uniform(-0.5, 0.5))};
      CAPTURE(qt);
      CAPTURE(i);
      Complex rhs = rhs_oracle(e, ctx.q());
      CHECK_CLOSE(erdelyi_rhs(e, ctx), rhs, "1e-38");
      if (qt[2] != '9') CHECK_CLOSE(lhs_oracle(e, ctx.q(), terms), rhs, "1e-38");
      SeriesValue lhs = erdelyi_lhs(e, ctx);
      CHECK_CLOSE(lhs.value, rhs, "1e-36");
      CHECK(lhs.tail_bound < Real("1e-44"));
    }
  }
}

TEST_CASE("n = m = 0 reduces to a single product") {
  QContext ctx = test::tight("0.5");
  WorkingPrecision wp(ctx);
  const Real Q = ctx.q() * ctx.q();
  for (const char* nu : {"0", "0.5", "2"}) {
    for (const Complex& z : {Complex(Real("0.4")), Complex(Real("1.1"), Real("0.3"))}) {
      ErdelyiParams e = params(0, 0, nu, "0.3", z);
      Complex expected = hp::pow(z, e.nu) * pinf(z * z * Complex(Q), Q);
      CHECK_CLOSE(erdelyi_lhs(e, ctx).value, expected, "1e-40");
    }
  }
  // z = 0, nu = 0: only the J_0(0) = 1 term structure survives
  ErdelyiParams e = params(2, 1, "0", "0.3", Complex(0));
  CHECK_CLOSE(erdelyi_lhs(e, ctx).value, erdelyi_rhs(e, ctx), "1e-40");
  CHECK_CLOSE(erdelyi_rhs(e, ctx), rhs_oracle(e, ctx.q()), "1e-40");
}

TEST_CASE("right side is symmetric under (n, sigma) <-> (m, nu - sigma)") {
  QContext ctx = test::tight("0.4");
  WorkingPrecision wp(ctx);
  Sampler s(8);
  for (int i = 0; i < 10; ++i) {
    ErdelyiParams e{s.integer(0, 4), s.integer(0, 4), Complex(s.uniform(0, 2)), Complex(s.uniform(-1, 1)),
                    Complex(s.uniform(0.1, 2))};
    ErdelyiParams swapped{e.m, e.n, e.nu, e.nu - e.sigma, e.z};
    CHECK_CLOSE(erdelyi_rhs(e, ctx), erdelyi_rhs(swapped, ctx), "1e-40");
  }
}

TEST_CASE("parameter errors") {
  QContext ctx("0.5");
  WorkingPrecision wp(ctx);
  auto kind_of = [](auto f) {
    try {
      f();
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::InvalidArgument;
  };
  ErdelyiParams divergent = params(0, 0, "-1.5", "0.3", Complex(Real("0.5")));
  CHECK(kind_of([&] { erdelyi_lhs(divergent, ctx); }) == ErrorKind::DivergentParameters);
  ErdelyiParams cut = params(1, 1, "0.5", "0.3", Complex(Real("-0.5")));
  CHECK(kind_of([&] { erdelyi_rhs(cut, ctx); }) == ErrorKind::BranchCut);
  CHECK(kind_of([&] { erdelyi_lhs(cut, ctx); }) == ErrorKind::BranchCut);
  // integer order has no cut
  ErdelyiParams fine = params(1, 1, "1", "0.3", Complex(Real("-0.5")));
  CHECK_CLOSE(erdelyi_lhs(fine, ctx).value, erdelyi_rhs(fine, ctx), "1e-28");
}

TEST_CASE("Jackson integral form") {
  QContext ctx("0.6");
  WorkingPrecision wp(ctx);
  ErdelyiParams e = params(1, 2, "0.5", "0.3", Complex(Real("0.7")));
  QIntegralValue v = erdelyi_qintegral(e, std::nullopt, ctx);
  const Complex expected(Real("-4.858361188792822022319179881062323189030e-3"));
  CHECK_CLOSE(v.rhs, expected, "1e-30");
  CHECK_CLOSE(v.lhs.value, expected, "1e-30");
  CHECK_CLOSE(v.reduced_lhs, expected, "1e-30");
  // complex sigma and negative nu
  QContext c3("0.3");
  WorkingPrecision wp3(c3);
  for (auto ep : {ErdelyiParams{2, 1, Complex(Real("0.4")), Complex(Real("0.4"), Real("0.9")), Complex(Real("1.1"))},
                  ErdelyiParams{1, 1, Complex(Real("-0.5")), Complex(Real("0.3")), Complex(Real("0.7"))}}) {
    QIntegralValue w = erdelyi_qintegral(ep, std::nullopt, c3);
    CHECK_CLOSE(w.lhs.value, w.rhs, "1e-30");
    CHECK_CLOSE(w.reduced_lhs, w.rhs, "1e-30");
  }
}

TEST_CASE("lattice identity and its continuum counterpart") {
  QContext ctx("0.3", 50, "1e-25");
  WorkingPrecision wp(ctx);
  KernelEvaluator eval(ctx);
  for (long a = 0; a <= 2; ++a)
    for (long c = 0; c <= 2; ++c)
      for (long w = -2; w <= 2; ++w) {
        const long e = 1, y = 1, l = 0;
        CHECK(hp::abs(scalar_identity_residual(a, c, e, y, w, l, eval).residual) < Real("1e-25"));
        if (a - c + e - y >= 0) {
          LatticeConsistency g = lattice_continuum_residual(a, c, e, y, w, l, eval);
          CHECK(g.lhs_gap < Real("1e-25"));
          CHECK(g.rhs_gap < Real("1e-25"));
        }
      }
}

TEST_CASE("right side on the lattice has exact zeros") {
  QContext ctx("0.5");
  WorkingPrecision wp(ctx);
  ErdelyiParams e = params(1, 1, "1", "0.3", Complex(0));
  CHECK(erdelyi_rhs_lattice(e, -3, ctx).is_zero());
  CHECK(erdelyi_rhs_lattice(e, -5, ctx).is_zero());
  e.z = Complex(qpower(2, ctx));
  CHECK_CLOSE(erdelyi_rhs_lattice(e, 2, ctx), erdelyi_rhs(e, ctx), "1e-28");
}

TEST_CASE("inverse q-Hankel transform of the right side") {
  QContext ctx("0.3", 50, "1e-25");
  WorkingPrecision wp(ctx);
  CHECK(inverse_hankel_check(1, 0, Complex(Real("0.5")), Complex(Real("0.2")), -40, 40, -10, 10, ctx) <
        Real("1e-25"));
  CHECK(inverse_hankel_check(0, 1, Complex(Real("1.5")), Complex(Real("0.2")), -40, 40, -10, 10, ctx) <
        Real("1e-25"));
  CHECK_THROWS_AS(inverse_hankel_check(1, 0, Complex(Real("0.5")), Complex(Real("0.2")), -3, 3, -1, 1, ctx),
                  Error);
}

TEST_CASE("power series coefficients in z^2 agree") {
  QContext ctx = test::tight("0.5");
  WorkingPrecision wp(ctx);
  for (long n = 0; n <= 3; ++n) {
    auto coeffs = erdelyi_series_coefficients(n, Complex(Real("0.7")), Complex(Real("0.2")), 5, ctx);
    CHECK(coeffs.size() == 6);
    for (const auto& [l, r] : coeffs) CHECK_CLOSE(l, r, "1e-38");
  }
}

TEST_CASE("classical limit") {
  QContext ctx("0.5", 30, "1e-20");
  WorkingPrecision wp(ctx);
  Real y("0.8");
  for (const char* nu : {"0", "1", "1.5"}) {
    Real expected = hp::pow(y, Real(nu)) * hp::exp(-y * y) / Real(2);
    CHECK_CLOSE(Complex(classical_erdelyi_rhs(0, 0, Real(nu), Real(0), y, ctx)), Complex(expected), "1e-25");
  }
  // n = 0, m = 1: L_1^{(sigma-1)}(y^2) = sigma - y^2, L_0 = 1
  Real l1 = Real("0.3") - y * y, l0(1);
  CHECK_CLOSE(Complex(classical_erdelyi_rhs(0, 1, Real(1), Real("0.3"), y, ctx)),
              Complex(-l1 * l0 * y * hp::exp(-y * y) / Real(2)), "1e-25");
  auto rows = classical_limit_table(1, 0, Real(1), Real("0.3"), y, {"0.9", "0.99"}, 30, "1e-20");
  REQUIRE(rows.size() == 2);
  CHECK(rows[1].gap < rows[0].gap);
  CHECK(rows[1].gap < Real("2e-2"));
}

}  // TEST_SUITE
