#pragma once

// Matrix kernels of the multiplicative unitaries of SU_q(2) and E_q(2):
//
//   P+(p,v,w) = (-q)^{p-w} q^{(p-w)(v-w)} sqrt((q^{2p+2},q^{2w+2};q^2)_inf / (q^{2v+2};q^2)_inf)
//               (q^{2v-2w+2};q^2)_inf / (q^2;q^2)_inf  p_w(q^{2p}; q^{2v-2w}; q^2),   p,v,w >= 0
//   P0(p,v,w) = (-q)^{p-w} J_{v-w}(q^{p-w}; q^2),                                   p,v,w in Z
//
// Both are real. P(p,v,w)(-q)^{-p} is symmetric in (p,v,w) for either kernel.

#include <array>
#include <unordered_map>

#include "qerd/qseries.hpp"

namespace qerd {

enum class KernelKind { plus, zero };
enum class OrthogonalityMode { first, second };

/// Kernel values with per-object memoization. Not thread-safe: give each
/// worker thread its own evaluator.
class KernelEvaluator {
 public:
  explicit KernelEvaluator(const QContext& ctx);

  const QContext& context() const { return ctx_; }

  /// P+ through the permutation with p >= v >= w, where the Wall sum has no
  /// cancellation. Throws InvalidArgument on negative indices.
  const Real& plus(long p, long v, long w);
  /// P+ straight from the defining formula, with the regularized Wall form
  /// (q^{2v-2w+2};q^2)_inf p_w when v < w. Exposed as a cross-check.
  Real plus_direct(long p, long v, long w);
  const Real& zero(long p, long v, long w);

  /// An upper bound for |P+(p,v,w)| that decays like q^{p(1+|v-w|)} in p.
  Real plus_bound(long p, long v, long w);

  /// (q^{2j};q^2)_inf, zero for j <= 0.
  Real pinf(long j) { return table_.infinite(j); }

 private:
  struct KeyHash {
    template <std::size_t N>
    std::size_t operator()(const std::array<long, N>& k) const noexcept {
      std::size_t h = 1469598103934665603ull;
      for (long x : k) h = (h ^ static_cast<std::size_t>(x)) * 1099511628211ull;
      return h;
    }
  };

  Real wall_check_sum(long p, long v, long w);  // (q^{2v-2w+2};q^2)_inf p_w(q^{2p}; q^{2v-2w}; q^2)
  Real prefactor(long p, long v, long w);

  QContext ctx_;
  PowerPochhammer table_;  // base q^2
  std::unordered_map<std::array<long, 3>, Real, KeyHash> plus_cache_;
  std::unordered_map<std::array<long, 2>, Real, KeyHash> bessel_cache_;  // (order, m) -> J
};

Real kernel_plus(long p, long v, long w, const QContext& ctx);
Real kernel_zero(long p, long v, long w, const QContext& ctx);

struct KernelOrthogonalityArgs {
  KernelKind kind = KernelKind::plus;
  OrthogonalityMode mode = OrthogonalityMode::first;
  // first mode:  (v, w) and (v2, w2) with v - w = v2 - w2; sum over p.
  // second mode: p, p2 and t; sum over v - w = t.
  long v = 0, w = 0, v2 = 0, w2 = 0;
  long p = 0, p2 = 0, t = 0;
  /// 0 = automatic; otherwise the summation index runs over at most this
  /// many steps on each side of its starting point.
  long truncation = 0;
};

struct ResidualValue {
  Real residual;
  Real tail_bound;
  long terms_used = 0;
};

/// sum - delta for the kernel orthogonality relations. The plus kernel in
/// first mode has a rigorous geometric tail bound; the other sums decay
/// super-geometrically and use a ratio-extrapolated tail estimate.
ResidualValue kernel_orthogonality_residual(const KernelOrthogonalityArgs& args,
                                            KernelEvaluator& eval);
ResidualValue kernel_orthogonality_residual(const KernelOrthogonalityArgs& args,
                                            const QContext& ctx);

/// P+(p+N, v+N, w+N) - P0(p, v, w).
Real kernel_contraction_residual(long p, long v, long w, long N, KernelEvaluator& eval);
Real kernel_contraction_residual(long p, long v, long w, long N, const QContext& ctx);

}  // namespace qerd
