#include "support.hpp"

using namespace qerd;
using qerd::test::Sampler;

TEST_SUITE("qseries") {

TEST_CASE("context validation") {
  CHECK_THROWS_AS(QContext("1.2"), Error);
  CHECK_THROWS_AS(QContext("0"), Error);
  CHECK_THROWS_AS(QContext("abc"), Error);
  // tolerance below what 50 digits can certify
  try {
    QContext ctx("0.5", 50, "1e-60");
    FAIL("expected InvalidContext");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidContext);
  }
  QContext ctx("0.5", 50, "1e-30");
  CHECK(ctx.working_digits() == 70);
  CHECK(ctx.squared().q() == Real("0.25"));
}

TEST_CASE("finite products against the plain product") {
  QContext ctx = test::tight("0.7");
  WorkingPrecision wp(ctx);
  Sampler s(11);
  for (int i = 0; i < 20; ++i) {
    Complex a(s.uniform(-2, 2), s.uniform(-2, 2));
    long k = s.integer(0, 30);
    CHECK_CLOSE(qpochhammer(a, k, ctx).value, test::product(a, ctx.q(), k), "1e-40");
  }
}

TEST_CASE("product splitting (a;q)_{n+m} = (a;q)_n (aq^n;q)_m") {
  QContext ctx = test::tight("0.45");
  WorkingPrecision wp(ctx);
  Sampler s(7);
  for (int i = 0; i < 25; ++i) {
    Complex a(s.uniform(-1.5, 1.5), s.uniform(-1.5, 1.5));
    long n = s.integer(0, 12), m = s.integer(0, 12);
    Complex left = qpochhammer(a, n + m, ctx).value;
    Complex right = qpochhammer(a, n, ctx).value *
                    qpochhammer(a * Complex(qpower(n, ctx)), m, ctx).value;
    CHECK_CLOSE(left, right, "1e-40");
  }
}

TEST_CASE("(q;q)_inf against Euler's pentagonal series") {
  for (const char* qt : {"0.1", "0.5", "0.9"}) {
    QContext ctx = test::tight(qt);
    WorkingPrecision wp(ctx);
    const Real& q = ctx.q();
    Real sum(1);
    for (long k = 1; k < 400; ++k) {
      Real sign = (k % 2 == 0) ? Real(1) : Real(-1);
      sum += sign * (hp::pow(q, k * (3 * k - 1) / 2) + hp::pow(q, k * (3 * k + 1) / 2));
    }
    CHECK_CLOSE(qpochhammer(Complex(q), kInfinite, ctx).value, sum, "1e-40");
  }
}

TEST_CASE("(a;q)_inf against Euler's expansion") {
  QContext ctx = test::tight("0.6");
  WorkingPrecision wp(ctx);
  Sampler s(3);
  for (int i = 0; i < 10; ++i) {
    Complex a(s.uniform(-3, 3), s.uniform(-3, 3));
    // sum_k (-a)^k q^{k(k-1)/2} / (q;q)_k
    Complex sum(0), term(1);
    for (long k = 0; k < 300; ++k) {
      sum += term;
      term *= -a * Complex(hp::pow(ctx.q(), k)) / Complex(Real(1) - hp::pow(ctx.q(), k + 1));
    }
    CHECK_CLOSE(qpochhammer(a, kInfinite, ctx).value, sum, "1e-40");
  }
  CHECK_CLOSE(qpochhammer(Complex(0), kInfinite, ctx).value, Complex(1), "1e-40");
}

TEST_CASE("q-binomial theorem for 1phi0") {
  QContext ctx = test::tight("0.5");
  WorkingPrecision wp(ctx);
  Sampler s(5);
  for (int i = 0; i < 10; ++i) {
    Complex a(s.uniform(-2, 2), s.uniform(-1, 1));
    Complex z(s.uniform(-0.8, 0.8), s.uniform(-0.1, 0.1));
    PhiParams p{{a}, {}, z};
    Complex expected = qpochhammer(a * z, kInfinite, ctx).value / qpochhammer(z, kInfinite, ctx).value;
    CHECK_CLOSE(basic_hypergeometric(p, ctx).value, expected, "1e-40");
  }
}

TEST_CASE("q-Gauss summation for 2phi1") {
  QContext ctx = test::tight("0.3");
  WorkingPrecision wp(ctx);
  Complex a(Real("0.2")), b(Real("-0.4")), c(Real("0.05"), Real("0.02"));
  PhiParams p{{a, b}, {c}, c / (a * b)};
  Complex expected = qpochhammer_multi({c / a, c / b}, kInfinite, ctx).value /
                     qpochhammer_multi({c, c / (a * b)}, kInfinite, ctx).value;
  CHECK_CLOSE(basic_hypergeometric(p, ctx).value, expected, "1e-40");
}

TEST_CASE("terminating series and q^{-N} detection") {
  QContext ctx("0.5");
  WorkingPrecision wp(ctx);
  CHECK(match_q_minus_natural(Complex(Real(8)), ctx) == std::optional<long>(3));
  CHECK_FALSE(match_q_minus_natural(Complex(Real(7)), ctx).has_value());
  // q-Chu-Vandermonde: 2phi1(q^{-n}, b; c; q, q) = (c/b;q)_n b^n / (c;q)_n
  const long n = 4;
  Complex b(Real("0.3")), c(Real("0.7"));
  PhiParams p{{Complex(qpower(-n, ctx)), b}, {c}, Complex(ctx.q())};
  SeriesValue v = basic_hypergeometric(p, ctx);
  Complex expected = qpochhammer(c / b, n, ctx).value * hp::pow(b, n) / qpochhammer(c, n, ctx).value;
  CHECK_CLOSE(v.value, expected, "1e-40");
  CHECK(v.terms_used == n + 1);
}

TEST_CASE("big q-exponential") {
  QContext ctx = test::tight("0.6");
  WorkingPrecision wp(ctx);
  Complex z(Real("1.3"), Real("-0.4"));
  // E_{q^2}(z) = sum_k q^{k(k-1)} z^k / (q^2;q^2)_k
  const Real Q = ctx.q() * ctx.q();
  Complex sum(0), term(1);
  for (long k = 0; k < 200; ++k) {
    sum += term;
    term *= z * Complex(hp::pow(Q, k)) / Complex(Real(1) - hp::pow(Q, k + 1));
  }
  CHECK_CLOSE(big_q_exponential(z, ctx).value, sum, "1e-40");
}

TEST_CASE("Jackson integral of x on (0,1]") {
  QContext ctx("0.5");
  WorkingPrecision wp(ctx);
  auto f = [&](long k) { return Complex(hp::pow(ctx.q(), k)); };
  // (1-q) sum q^{2k} = 1/(1+q) = 2/3
  SeriesValue v = jackson_q_integral(f, 0, 120, ctx);
  CHECK_CLOSE(v.value, Complex(Real(2) / Real(3)), "1e-40");
  auto zero = [](long) { return Complex(0); };
  CHECK(jackson_q_integral(zero, -5, 5, ctx).value.is_zero());
}

TEST_CASE("power table gives exact zeros") {
  QContext ctx = test::tight("0.5");
  WorkingPrecision wp(ctx);
  PowerPochhammer t(ctx);
  CHECK(t.infinite(0).is_zero());
  CHECK(t.infinite(-3).is_zero());
  CHECK_CLOSE(Complex(t.infinite(4)), qpochhammer(Complex(hp::pow(ctx.q(), 4)), kInfinite, ctx).value, "1e-40");
  CHECK_CLOSE(Complex(t.q_factorial(6)), test::product(Complex(ctx.q()), ctx.q(), 6), "1e-40");
}

}  // TEST_SUITE
