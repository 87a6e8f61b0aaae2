#include "support.hpp"

#include "qerd/kernels.hpp"
#include "qerd/qfunctions.hpp"

using namespace qerd;

namespace {

Real pinf(long j, const QContext& ctx) {
  return qpochhammer(Complex(qpower(2 * j, ctx)), kInfinite, ctx.squared()).value.re();
}

Real neg_q_power(long e, const QContext& ctx) {
  Real r = qpower(e, ctx);
  return (e % 2 == 0) ? r : -r;
}

// P+ from its definition for v >= w, with the Wall polynomial taken from the
// three-term recurrence.
Real plus_oracle(long p, long v, long w, const QContext& ctx) {
  const QContext cq = ctx.squared();
  Real wall = wall_polynomial_recurrence(w, Complex(qpower(2 * (v - w), ctx)),
                                         Complex(qpower(2 * p, ctx)), cq)
                  .re();
  return neg_q_power(p - w, ctx) * qpower((p - w) * (v - w), ctx) *
         hp::sqrt(pinf(p + 1, ctx) * pinf(w + 1, ctx) / pinf(v + 1, ctx)) * pinf(v - w + 1, ctx) /
         pinf(1, ctx) * wall;
}

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("P+ at the origin") {
  QContext ctx = test::tight("0.5");
  WorkingPrecision wp(ctx);
  CHECK_CLOSE(Complex(kernel_plus(0, 0, 0, ctx)), Complex(hp::sqrt(pinf(1, ctx))), "1e-40");
}

TEST_CASE("P+ against its definition") {
  for (const char* q : {"0.3", "0.6"}) {
    QContext ctx = test::tight(q);
    WorkingPrecision wp(ctx);
    KernelEvaluator eval(ctx);
    for (long p = 0; p <= 6; ++p)
      for (long v = 0; v <= 6; ++v)
        for (long w = 0; w <= v; ++w) {
          CAPTURE(p);
          CAPTURE(v);
          CAPTURE(w);
          Real expected = plus_oracle(p, v, w, ctx);
          CHECK_CLOSE(Complex(eval.plus(p, v, w)), Complex(expected), "1e-38");
          CHECK_CLOSE(Complex(eval.plus_direct(p, v, w)), Complex(expected), "1e-38");
        }
  }
}

TEST_CASE("P(p,v,w)(-q)^{-p} is symmetric") {
  QContext ctx = test::tight("0.4");
  WorkingPrecision wp(ctx);
  KernelEvaluator eval(ctx);
  auto sym_plus = [&](long p, long v, long w) { return eval.plus(p, v, w) / neg_q_power(p, ctx); };
  auto sym_zero = [&](long p, long v, long w) { return eval.zero(p, v, w) / neg_q_power(p, ctx); };
  for (long p = 0; p <= 4; ++p)
    for (long v = 0; v <= 4; ++v)
      for (long w = 0; w <= 4; ++w) {
        Complex base(sym_plus(p, v, w));
        CHECK_CLOSE(Complex(sym_plus(v, p, w)), base, "1e-38");
        CHECK_CLOSE(Complex(sym_plus(w, v, p)), base, "1e-38");
        CHECK_CLOSE(Complex(sym_plus(p, w, v)), base, "1e-38");
        Complex z(sym_zero(p - 2, v - 2, w - 2));
        CHECK_CLOSE(Complex(sym_zero(v - 2, p - 2, w - 2)), z, "1e-38");
        CHECK_CLOSE(Complex(sym_zero(w - 2, v - 2, p - 2)), z, "1e-38");
      }
}

TEST_CASE("P0 against the q-Bessel function") {
  QContext ctx = test::tight("0.5");
  WorkingPrecision wp(ctx);
  for (long p = -2; p <= 3; ++p)
    for (long v = -3; v <= 3; ++v)
      for (long w = -3; w <= 3; ++w) {
        if (p - w < -2) continue;
        Complex j = qbessel({Complex(v - w), Complex(qpower(p - w, ctx))}, ctx);
        CHECK_CLOSE(Complex(kernel_zero(p, v, w, ctx)), Complex(neg_q_power(p - w, ctx)) * j, "1e-38");
      }
}

TEST_CASE("P+ bound and argument checks") {
  QContext ctx("0.6");
  WorkingPrecision wp(ctx);
  KernelEvaluator eval(ctx);
  for (long p = 0; p <= 30; p += 3)
    for (long v = 0; v <= 5; ++v)
      for (long w = 0; w <= 5; ++w) CHECK(hp::abs(eval.plus(p, v, w)) <= eval.plus_bound(p, v, w));
  CHECK_THROWS_AS(eval.plus(-1, 0, 0), Error);
  CHECK_THROWS_AS(kernel_plus(0, 0, -2, ctx), Error);
}

TEST_CASE("orthogonality of both kernels") {
  QContext ctx("0.5", 50, "1e-25");
  WorkingPrecision wp(ctx);
  KernelEvaluator eval(ctx);
  for (KernelKind kind : {KernelKind::plus, KernelKind::zero}) {
    long lo = kind == KernelKind::plus ? 0 : -3;
    for (long v = lo; v <= 3; ++v)
      for (long w = lo; w <= 3; ++w)
        for (long v2 = lo; v2 <= 3; ++v2) {
          long w2 = v2 - v + w;
          if (w2 < lo || w2 > 3) continue;
          KernelOrthogonalityArgs a;
          a.kind = kind;
          a.v = v;
          a.w = w;
          a.v2 = v2;
          a.w2 = w2;
          CHECK(hp::abs(kernel_orthogonality_residual(a, eval).residual) < Real("1e-25"));
        }
    for (long p = lo; p <= 3; ++p)
      for (long p2 = lo; p2 <= 3; ++p2)
        for (long t = -3; t <= 3; ++t) {
          KernelOrthogonalityArgs a;
          a.kind = kind;
          a.mode = OrthogonalityMode::second;
          a.p = p;
          a.p2 = p2;
          a.t = t;
          CHECK(hp::abs(kernel_orthogonality_residual(a, eval).residual) < Real("1e-25"));
        }
  }
  // a deliberately short sum
  KernelOrthogonalityArgs a;
  a.truncation = 2;
  CHECK_THROWS_AS(kernel_orthogonality_residual(a, eval), Error);
}

TEST_CASE("P+ contracts to P0") {
  QContext ctx("0.3");
  WorkingPrecision wp(ctx);
  KernelEvaluator eval(ctx);
  for (long p = -3; p <= 3; ++p)
    for (long v = -3; v <= 3; ++v)
      for (long w = -3; w <= 3; ++w)
        CHECK(hp::abs(kernel_contraction_residual(p, v, w, 40, eval)) < Real("1e-15"));
  // the gap shrinks with N
  Real coarse = hp::abs(kernel_contraction_residual(0, 1, 0, 5, eval));
  Real fine = hp::abs(kernel_contraction_residual(0, 1, 0, 10, eval));
  CHECK(fine < coarse);
}

}  // TEST_SUITE
