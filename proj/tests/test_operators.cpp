#include "support.hpp"

#include <sstream>

#include "qerd/operators.hpp"

using namespace qerd;

namespace {

Real diff(const SparseVector& a, const SparseVector& b) { return max_abs_diff(a, b); }

SparseVector basis(std::initializer_list<long> i) { return SparseVector{{BasisIndex(i), Complex(1)}}; }

}  // namespace

TEST_SUITE("operators") {

TEST_CASE("basis indices and windows") {
  BasisIndex a{1, -2, 3};
  CHECK(a.size() == 3);
  CHECK(a[1] == -2);
  CHECK(a.to_string() == "1 -2 3");
  CHECK(BasisIndex{0, 1} < BasisIndex{1, 0});
  std::vector<LegSpec> legs{LegSpec::natural(2), LegSpec::integer(-1, 1)};
  auto idx = window_indices(legs);
  CHECK(idx.size() == 9);
  CHECK(idx.front() == BasisIndex{0, -1});
  CHECK(idx.back() == BasisIndex{2, 1});
  CHECK(in_window(BasisIndex{1, 0}, legs));
  CHECK_FALSE(in_window(BasisIndex{3, 0}, legs));
}

TEST_CASE("W+ column matches the kernel and is normalized") {
  QContext ctx("0.3");
  WorkingPrecision wp(ctx);
  KernelEvaluator eval(ctx);
  LinearMap w = maps::w_plus(eval);
  SparseVector col = w.apply(BasisIndex{0, 0, 0, 0});
  for (long p = 0; p < 5; ++p) {
    CHECK_CLOSE(col.at(BasisIndex{-p, p, p, 0}), Complex(kernel_plus(p, 0, 0, ctx)), "1e-40");
  }
  CHECK_CLOSE(Complex(norm2(col)), Complex(1), "1e-28");
}

TEST_CASE("W+ and W0 are unitary on basis vectors") {
  QContext ctx("0.3");
  WorkingPrecision wp(ctx);
  KernelEvaluator eval(ctx);
  LinearMap wp_ = maps::w_plus(eval), wps = maps::w_plus_adjoint(eval);
  LinearMap w0 = maps::w_zero(eval), w0s = maps::w_zero_adjoint(eval);
  for (auto i : {BasisIndex{0, 0, 0, 0}, BasisIndex{2, -1, 1, 3}, BasisIndex{1, 4, 3, -2}}) {
    SparseVector e{{i, Complex(1)}};
    CHECK(diff(compose(wps, wp_).apply(e), e) < Real("1e-28"));
    CHECK(diff(compose(w0s, w0).apply(e), e) < Real("1e-28"));
  }
  for (auto i : {BasisIndex{0, 0, 0, 0}, BasisIndex{-2, 1, 1, -1}}) {
    SparseVector e{{i, Complex(1)}};
    CHECK(diff(compose(w0, w0s).apply(e), e) < Real("1e-28"));
  }
}

TEST_CASE("materialized W+ has a small Gram defect") {
  QContext ctx("0.3");
  WorkingPrecision wp(ctx);
  KernelEvaluator eval(ctx);
  const long pad = kernel_padding(ctx) + 4;
  std::vector<LegSpec> dom{LegSpec::natural(2), LegSpec::integer(-1, 1), LegSpec::natural(2),
                           LegSpec::integer(-1, 1)};
  std::vector<LegSpec> cod{LegSpec::integer(-pad, pad), LegSpec::integer(-pad, pad), LegSpec::natural(pad),
                           LegSpec::integer(-pad, pad)};
  SparseOperator w = build_w_plus(dom, cod, eval);
  CHECK(w.columns().size() == 81);
  CHECK(w.gram_defect() < Real("1e-28"));
  CHECK(w.max_deficit() < Real("1e-28"));

  // a narrow codomain loses weight and says so
  std::vector<LegSpec> narrow{LegSpec::integer(-1, 1), LegSpec::integer(-1, 1), LegSpec::natural(1),
                              LegSpec::integer(-1, 1)};
  SparseOperator cut = build_w_plus(dom, narrow, eval);
  CHECK(cut.max_deficit() > Real("1e-3"));
}

TEST_CASE("export and import round trip") {
  QContext ctx("0.3");
  WorkingPrecision wp(ctx);
  std::vector<LegSpec> legs{LegSpec::natural(4), LegSpec::integer(-2, 2)};
  Su2Generators su2 = build_su2_generators(legs, ctx);
  std::stringstream buf;
  su2.alpha.export_text(buf);
  SparseOperator back = SparseOperator::import_text(buf, legs, legs);
  CHECK(back.entry_count() == su2.alpha.entry_count());
  for (const auto& [i, col] : su2.alpha.columns()) CHECK(diff(back.column(i), col) < Real("1e-60"));
}

TEST_CASE("materialized maps refuse inputs outside their window") {
  QContext ctx("0.3");
  WorkingPrecision wp(ctx);
  std::vector<LegSpec> legs{LegSpec::natural(2), LegSpec::integer(-2, 2)};
  Su2Generators su2 = build_su2_generators(legs, ctx);
  LinearMap a = su2.alpha.as_map(Real("1e-40"));
  CHECK_NOTHROW(a.apply(BasisIndex{1, 0}));
  try {
    a.apply(BasisIndex{5, 0});
    FAIL("expected WindowTooSmall");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::WindowTooSmall);
  }
  // negligible weight outside the window is dropped
  SparseVector x{{BasisIndex{1, 0}, Complex(1)}, {BasisIndex{9, 0}, Complex(Real("1e-50"))}};
  CHECK_NOTHROW(a.apply(x));
}

TEST_CASE("SU(2) relations on basis vectors") {
  QContext ctx("0.6");
  WorkingPrecision wp(ctx);
  LinearMap a = maps::alpha(ctx), as = maps::alpha_adjoint(ctx);
  LinearMap c = maps::gamma(ctx), cs = maps::gamma_adjoint(ctx);
  const Complex q(ctx.q());
  for (long n = 0; n <= 6; ++n)
    for (long k = -2; k <= 2; ++k) {
      SparseVector e = basis({n, k});
      SparseVector left = compose(as, a).apply(e);
      axpy(left, Complex(1), compose(cs, c).apply(e));
      CHECK(diff(left, e) < Real("1e-60"));
      SparseVector right = compose(a, as).apply(e);
      axpy(right, q * q, compose(cs, c).apply(e));
      CHECK(diff(right, e) < Real("1e-60"));
      SparseVector ac = compose(a, c).apply(e), ca = compose(c, a).apply(e);
      for (auto& [i, v] : ca) v *= q;
      CHECK(diff(ac, ca) < Real("1e-60"));
    }
}

TEST_CASE("Podles relations and conjugation by U") {
  QContext ctx("0.6");
  WorkingPrecision wp(ctx);
  LinearMap X = maps::podles_x(ctx), Y = maps::podles_y(ctx), Z = maps::podles_z(ctx);
  const Real q2 = ctx.q() * ctx.q();
  for (long n = 0; n <= 8; ++n) {
    SparseVector e = basis({n});
    // XZ = q^2 ZX
    SparseVector xz = compose(X, Z).apply(e), zx = compose(Z, X).apply(e);
    for (auto& [i, v] : zx) v *= Complex(q2);
    CHECK(diff(xz, zx) < Real("1e-60"));
    // YX = q^{-2} (Z - Z^2)
    SparseVector yx = compose(Y, X).apply(e);
    Real zn = hp::pow(q2, n);
    SparseVector expected{{BasisIndex{n}, Complex((zn - zn * zn) / q2)}};
    CHECK(diff(yx, expected) < Real("1e-60"));
    // XY = Z - q^2 Z^2
    CHECK(diff(compose(X, Y).apply(e), SparseVector{{BasisIndex{n}, Complex(zn - q2 * zn * zn)}}) <
          Real("1e-60"));
  }
  LinearMap a = maps::alpha(ctx), cs = maps::gamma_adjoint(ctx);
  LinearMap lhs = compose(maps::u(ctx), compose(tensor(X, identity_map(1)), maps::u_adjoint(ctx)));
  for (long n = 0; n <= 5; ++n)
    for (long k = -3; k <= 3; ++k) {
      SparseVector e = basis({n, k});
      SparseVector r = compose(cs, a).apply(e);
      for (auto& [i, v] : r) v = -v;
      CHECK(diff(lhs.apply(e), r) < Real("1e-60"));
    }
}

TEST_CASE("G^(l) is G^(0) followed by a shift") {
  QContext ctx("0.3");
  WorkingPrecision wp(ctx);
  KernelEvaluator eval(ctx);
  for (long l : {-2, 1, 3}) {
    LinearMap shifted = compose(embed(maps::shift_v(l), {0, 1}, 3), maps::g(0, eval));
    for (auto i : {BasisIndex{0, 0, 0}, BasisIndex{2, -1, 1}, BasisIndex{1, 3, 4}}) {
      CHECK(diff(maps::g(l, eval).apply(i), shifted.apply(i)) < Real("1e-60"));
    }
  }
}

TEST_CASE("comultiplication of v under W0") {
  QContext ctx("0.3");
  WorkingPrecision wp(ctx);
  KernelEvaluator eval(ctx);
  const long k = 1, pad = kernel_padding(ctx) + k + 4;
  std::vector<LegSpec> dom(4, LegSpec::integer(-k, k));
  SparseOperator v = SparseOperator::materialize(
      maps::shift_v(1), {LegSpec::integer(-pad, pad), LegSpec::integer(-pad, pad)},
      {LegSpec::integer(-pad - 1, pad), LegSpec::integer(-pad, pad)});
  SparseOperator d = comultiply(Comultiplication::zero, v, dom, eval);
  LinearMap expected = tensor(maps::shift_v(1), maps::shift_v(1));
  for (const auto& i : window_indices(dom)) CHECK(diff(d.column(i), expected.column(i)) < Real("1e-28"));
}

TEST_CASE("coaction on the Podles sphere") {
  QContext ctx("0.3", 50, "1e-25");
  WorkingPrecision wp(ctx);
  KernelEvaluator eval(ctx);
  std::vector<LegSpec> dom{LegSpec::natural(1), LegSpec::integer(-1, 1), LegSpec::natural(1)};
  for (PodlesElement x : {PodlesElement::x, PodlesElement::y, PodlesElement::z, PodlesElement::one_minus_z}) {
    CHECK(verify_coaction(x, dom, eval) < Real("1e-25"));
  }
}

TEST_CASE("corepresentation identity on basis vectors") {
  QContext ctx("0.3", 50, "1e-25");
  WorkingPrecision wp(ctx);
  KernelEvaluator eval(ctx);
  const long a = 1, b = 1, c = 0, d = -1, e = 2, l = 2;
  for (long y = 0; y <= 2; ++y)
    for (long w = -2; w <= 2; ++w) {
      const long u = w + a - c + e - y;
      const long v = b + c - l - y - e - w;
      const long x = d + y + e - a + l + u;
      ResidualValue r = verify_corepresentation(l, BasisIndex{a, b, c, d, e}, BasisIndex{u, v, w, x, y}, eval);
      CHECK(hp::abs(r.residual) < Real("1e-25"));
    }
  // both sides vanish off the selection rules
  ResidualValue off = verify_corepresentation(0, BasisIndex{0, 0, 0, 0, 0}, BasisIndex{0, 5, 0, 0, 0}, eval);
  CHECK(off.residual.is_zero());
}

}  // TEST_SUITE
