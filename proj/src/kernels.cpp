#include "qerd/kernels.hpp"

#include <algorithm>

#include "qerd/qfunctions.hpp"

namespace qerd {

namespace {

constexpr long kAutoCap = 400;

Real signed_q_power(const Real& q, long e) {
  Real r = hp::pow(q, e);
  return (e % 2 == 0) ? r : -r;
}

// Sums term(start), term(start + step), ... until the ratio-extrapolated tail
// and the last two terms fall below the series target (automatic mode), or
// for exactly max_steps + 1 terms.
struct DirectionalSum {
  Real sum;
  Real tail;
  long terms = 0;
};

template <typename F>
DirectionalSum sum_direction(F&& term, long start, long step, long max_steps, bool automatic,
                             long min_steps, const QContext& ctx) {
  DirectionalSum out;
  Real prev(-1);
  Real estimate(1);
  for (long i = 0; i <= max_steps; ++i) {
    Real t = term(start + i * step);
    out.sum += t;
    ++out.terms;
    Real cur = hp::abs(t);
    if (i >= min_steps && prev >= Real(0)) {
      if (cur.is_zero() && prev.is_zero()) {
        estimate = Real(0);
      } else if (!prev.is_zero() && cur < prev) {
        Real rho = cur / prev;
        estimate = hp::max(cur * rho / (Real(1) - rho), cur);
      } else {
        estimate = Real(1);
      }
      if (automatic && estimate <= ctx.series_target() && prev <= ctx.series_target()) break;
    }
    prev = std::move(cur);
  }
  out.tail = std::move(estimate);
  return out;
}

void check_tail(const Real& tail, const QContext& ctx, const char* what) {
  if (tail > ctx.tolerance()) {
    throw Error(ErrorKind::TruncationInsufficient,
                std::string(what) + ": tail estimate " + tail.to_string(6) + " exceeds tolerance");
  }
}

}  // namespace

KernelEvaluator::KernelEvaluator(const QContext& ctx) : ctx_(ctx), table_(ctx.squared()) {}

Real KernelEvaluator::prefactor(long p, long v, long w) {
  // (-q)^{p-w} q^{(p-w)(v-w)} sqrt(...) / (q^2;q^2)_inf
  const Real& q = ctx_.q();
  Real ratio = pinf(p + 1) * pinf(w + 1) / pinf(v + 1);
  if (!(ratio > Real(0))) {
    throw Error(ErrorKind::InvalidArgument, "non-positive radicand in P+");
  }
  return signed_q_power(q, p - w) * hp::pow(q, (p - w) * (v - w)) * hp::sqrt(ratio) /
         table_.q_factorial_infinite();
}

Real KernelEvaluator::wall_check_sum(long p, long v, long w) {
  // sum_k (q^{-2w};q^2)_k / (q^2;q^2)_k q^{2k(p+1)} (q^{2(v-w+1+k)};q^2)_inf
  const Real& Q = table_.context().q();
  const Real x = hp::pow(Q, p + 1);
  Real coeff(1);  // (Q^{-w};Q)_k / (Q;Q)_k
  Real xk(1);
  Real sum(0);
  for (long k = 0; k <= w; ++k) {
    long j = v - w + 1 + k;
    if (j > 0) sum += coeff * xk * pinf(j);
    coeff *= (Real(1) - hp::pow(Q, k - w)) / (Real(1) - hp::pow(Q, k + 1));
    xk *= x;
  }
  return sum;
}

Real KernelEvaluator::plus_direct(long p, long v, long w) {
  if (p < 0 || v < 0 || w < 0) throw Error(ErrorKind::InvalidArgument, "P+ needs p, v, w >= 0");
  WorkingPrecision wp(ctx_);
  return prefactor(p, v, w) * wall_check_sum(p, v, w);
}

const Real& KernelEvaluator::plus(long p, long v, long w) {
  if (p < 0 || v < 0 || w < 0) throw Error(ErrorKind::InvalidArgument, "P+ needs p, v, w >= 0");
  // P+(p,v,w) (-q)^{-p} is symmetric; evaluate at the sorted triple.
  std::array<long, 3> s{p, v, w};
  std::sort(s.begin(), s.end(), std::greater<>());
  std::array<long, 3> key{p, v, w};
  auto it = plus_cache_.find(key);
  if (it != plus_cache_.end()) return it->second;
  WorkingPrecision wp(ctx_);
  std::array<long, 3> canon_key = s;
  auto cit = plus_cache_.find(canon_key);
  if (cit == plus_cache_.end()) {
    Real value = prefactor(s[0], s[1], s[2]) * wall_check_sum(s[0], s[1], s[2]);
    cit = plus_cache_.emplace(canon_key, std::move(value)).first;
  }
  if (key == canon_key) return cit->second;
  Real value = signed_q_power(ctx_.q(), p - s[0]) * cit->second;
  return plus_cache_.emplace(key, std::move(value)).first->second;
}

const Real& KernelEvaluator::zero(long p, long v, long w) {
  WorkingPrecision wp(ctx_);
  std::array<long, 2> key{v - w, p - w};
  auto it = bessel_cache_.find(key);
  if (it == bessel_cache_.end()) {
    Real j = qbessel_int_lattice(key[0], key[1], ctx_, table_);
    it = bessel_cache_.emplace(key, signed_q_power(ctx_.q(), key[1]) * j).first;
  }
  return it->second;
}

Real KernelEvaluator::plus_bound(long p, long v, long w) {
  WorkingPrecision wp(ctx_);
  const Real& q = ctx_.q();
  const Real& Q = table_.context().q();
  const long t = v - w;
  const Real x = hp::pow(Q, p + 1);
  Real coeff(1);
  Real sum(0);
  for (long k = 0; k <= w; ++k) {
    if (k >= -t) sum += hp::abs(coeff) * hp::pow(x, k);
    coeff *= (Real(1) - hp::pow(Q, k - w)) / (Real(1) - hp::pow(Q, k + 1));
  }
  return hp::pow(q, (p - w) * (1 + t)) * sum /
         (hp::sqrt(pinf(v + 1)) * table_.q_factorial_infinite());
}

Real kernel_plus(long p, long v, long w, const QContext& ctx) {
  KernelEvaluator eval(ctx);
  return eval.plus(p, v, w);
}

Real kernel_zero(long p, long v, long w, const QContext& ctx) {
  KernelEvaluator eval(ctx);
  return eval.zero(p, v, w);
}

ResidualValue kernel_orthogonality_residual(const KernelOrthogonalityArgs& a,
                                            KernelEvaluator& eval) {
  const QContext& ctx = eval.context();
  WorkingPrecision wp(ctx);
  const bool automatic = a.truncation == 0;
  if (a.truncation < 0) throw Error(ErrorKind::InvalidArgument, "truncation must be >= 0");
  const long cap = automatic ? kAutoCap : a.truncation;
  ResidualValue out;

  if (a.mode == OrthogonalityMode::first && a.v - a.w != a.v2 - a.w2) {
    throw Error(ErrorKind::InvalidArgument, "first-mode orthogonality needs v - w = v' - w'");
  }

  if (a.kind == KernelKind::plus) {
    if (a.mode == OrthogonalityMode::first) {
      if (std::min({a.v, a.w, a.v2, a.w2}) < 0) {
        throw Error(ErrorKind::InvalidArgument, "P+ indices must be >= 0");
      }
      // |P+(p,v,w)| <= B(p) with B(p+1) <= q^{1+|t|} B(p), hence
      // sum_{p>T} |P P'| <= B(T+1) B'(T+1) / (1 - q^{2+2|t|}).
      const long t = a.v - a.w;
      const Real rho = hp::pow(ctx.q(), 2 + 2 * std::abs(t));
      Real sum(0);
      Real tail(1);
      long p = 0;
      for (; p <= cap; ++p) {
        sum += eval.plus(p, a.v, a.w) * eval.plus(p, a.v2, a.w2);
        tail = eval.plus_bound(p + 1, a.v, a.w) * eval.plus_bound(p + 1, a.v2, a.w2) /
               (Real(1) - rho);
        if (automatic && tail <= ctx.series_target()) break;
      }
      check_tail(tail, ctx, "P+ orthogonality");
      if (a.v == a.v2) sum -= Real(1);
      out.residual = std::move(sum);
      out.tail_bound = std::move(tail);
      out.terms_used = std::min(p, cap) + 1;
      return out;
    }
    if (std::min(a.p, a.p2) < 0) throw Error(ErrorKind::InvalidArgument, "P+ indices must be >= 0");
    const long w0 = std::max(0L, -a.t);
    auto term = [&](long w) { return eval.plus(a.p, w + a.t, w) * eval.plus(a.p2, w + a.t, w); };
    const long min_steps = std::max(a.p, a.p2) + 2;
    DirectionalSum s = sum_direction(term, w0, 1, cap, automatic, min_steps, ctx);
    check_tail(s.tail, ctx, "P+ dual orthogonality");
    if (a.p == a.p2) s.sum -= Real(1);
    return {std::move(s.sum), std::move(s.tail), s.terms};
  }

  // Zero kernel: both sums run over Z, outward from the centre of the kernel.
  long center;
  std::function<Real(long)> term;
  if (a.mode == OrthogonalityMode::first) {
    center = a.w;
    term = [&](long p) { return eval.zero(p, a.v, a.w) * eval.zero(p, a.v2, a.w2); };
  } else {
    center = a.p;
    term = [&](long w) { return eval.zero(a.p, w + a.t, w) * eval.zero(a.p2, w + a.t, w); };
  }
  const long min_steps = std::abs(a.v2 - a.v) + std::abs(a.p2 - a.p) + std::abs(a.t) + 2;
  DirectionalSum up = sum_direction(term, center, 1, cap, automatic, min_steps, ctx);
  DirectionalSum down = sum_direction(term, center - 1, -1, cap, automatic, min_steps, ctx);
  Real tail = up.tail + down.tail;
  check_tail(tail, ctx, "P0 orthogonality");
  Real sum = up.sum + down.sum;
  bool diagonal = a.mode == OrthogonalityMode::first ? a.v == a.v2 : a.p == a.p2;
  if (diagonal) sum -= Real(1);
  return {std::move(sum), std::move(tail), up.terms + down.terms};
}

ResidualValue kernel_orthogonality_residual(const KernelOrthogonalityArgs& args,
                                            const QContext& ctx) {
  KernelEvaluator eval(ctx);
  return kernel_orthogonality_residual(args, eval);
}

Real kernel_contraction_residual(long p, long v, long w, long N, KernelEvaluator& eval) {
  if (N < 0 || p + N < 0 || v + N < 0 || w + N < 0) {
    throw Error(ErrorKind::InvalidArgument, "contraction needs p+N, v+N, w+N >= 0");
  }
  WorkingPrecision wp(eval.context());
  return eval.plus(p + N, v + N, w + N) - eval.zero(p, v, w);
}

Real kernel_contraction_residual(long p, long v, long w, long N, const QContext& ctx) {
  KernelEvaluator eval(ctx);
  return kernel_contraction_residual(p, v, w, N, eval);
}

}  // namespace qerd
