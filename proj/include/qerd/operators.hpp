#pragma once

// Sparse realizations of the operators on tensor products of l^2(N) and
// l^2(Z): the multiplicative unitaries W+ and W0, the projective
// corepresentation G^(l), the SU_q(2) and Podles sphere generators, and the
// comultiplications obtained by conjugation.
//
// Operators come in two flavours. A LinearMap produces any column on demand
// and is exact up to the series target of the context. A SparseOperator is
// a LinearMap materialized on a finite window of basis vectors; applying it
// to a vector with weight outside its window throws WindowTooSmall.

#include <array>
#include <compare>
#include <functional>
#include <initializer_list>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "qerd/kernels.hpp"

namespace qerd {

enum class LegKind { natural, integer };

struct LegSpec {
  LegKind kind = LegKind::integer;
  long lo = 0;
  long hi = 0;

  static LegSpec natural(long hi) { return {LegKind::natural, 0, hi}; }
  static LegSpec integer(long lo, long hi) { return {LegKind::integer, lo, hi}; }
  bool contains(long i) const { return i >= lo && i <= hi; }
  long size() const { return hi - lo + 1; }
};

/// e_{i_1, ..., i_n} for up to five tensor legs.
class BasisIndex {
 public:
  static constexpr std::size_t kMaxLegs = 5;

  BasisIndex() = default;
  BasisIndex(std::initializer_list<long> idx);
  explicit BasisIndex(const std::vector<long>& idx);

  std::size_t size() const { return n_; }
  long operator[](std::size_t i) const { return v_[i]; }
  long& operator[](std::size_t i) { return v_[i]; }

  friend bool operator==(const BasisIndex&, const BasisIndex&) = default;
  friend std::strong_ordering operator<=>(const BasisIndex& a, const BasisIndex& b) {
    if (auto c = a.n_ <=> b.n_; c != 0) return c;
    for (std::size_t i = 0; i < a.n_; ++i) {
      if (auto c = a.v_[i] <=> b.v_[i]; c != 0) return c;
    }
    return std::strong_ordering::equal;
  }

  std::string to_string() const;

 private:
  std::array<long, kMaxLegs> v_{};
  std::size_t n_ = 0;
};

bool in_window(const BasisIndex& idx, const std::vector<LegSpec>& legs);
/// All basis indices of a product window, in lexicographic order.
std::vector<BasisIndex> window_indices(const std::vector<LegSpec>& legs);

using SparseVector = std::map<BasisIndex, Complex>;

void axpy(SparseVector& y, const Complex& a, const SparseVector& x);
Real norm2(const SparseVector& x);
Complex inner(const SparseVector& x, const SparseVector& y);  // <x, y>, antilinear in x
Real max_abs_diff(const SparseVector& x, const SparseVector& y);

class LinearMap {
 public:
  using Column = std::function<SparseVector(const BasisIndex&)>;
  using Domain = std::function<bool(const BasisIndex&)>;

  LinearMap() = default;
  LinearMap(std::size_t arity, Column column, Domain domain = {}, Real threshold = Real(0))
      : arity_(arity), column_(std::move(column)), domain_(std::move(domain)),
        threshold_(std::move(threshold)) {}

  std::size_t arity() const { return arity_; }
  SparseVector column(const BasisIndex& i) const { return column_(i); }
  bool defined_at(const BasisIndex& i) const { return !domain_ || domain_(i); }

  /// Applies the map to x. Basis vectors outside the domain are skipped when
  /// their coefficient is at most the threshold, otherwise WindowTooSmall.
  SparseVector apply(const SparseVector& x) const;
  SparseVector apply(const BasisIndex& i) const { return apply(SparseVector{{i, Complex(1)}}); }

 private:
  std::size_t arity_ = 0;
  Column column_;
  Domain domain_;
  Real threshold_;
};

/// a o b
LinearMap compose(const LinearMap& a, const LinearMap& b);
/// sum_i c_i A_i
LinearMap combine(const std::vector<std::pair<Complex, LinearMap>>& terms);
/// The operator acting on the legs listed in `positions` (in order) of an
/// `arity`-leg space, identity elsewhere. op must preserve the leg count.
LinearMap embed(const LinearMap& op, const std::vector<std::size_t>& positions, std::size_t arity);
/// a (x) b on arity(a) + arity(b) legs.
LinearMap tensor(const LinearMap& a, const LinearMap& b);
LinearMap identity_map(std::size_t arity);

/// Exact (series-truncated) operators. The evaluator must outlive the map.
namespace maps {
LinearMap w_plus(KernelEvaluator& eval);
LinearMap w_plus_adjoint(KernelEvaluator& eval);
LinearMap w_zero(KernelEvaluator& eval);
LinearMap w_zero_adjoint(KernelEvaluator& eval);
LinearMap g(long l, KernelEvaluator& eval);
LinearMap g_adjoint(long l, KernelEvaluator& eval);

LinearMap alpha(const QContext& ctx);
LinearMap alpha_adjoint(const QContext& ctx);
LinearMap gamma(const QContext& ctx);
LinearMap gamma_adjoint(const QContext& ctx);
LinearMap podles_x(const QContext& ctx);
LinearMap podles_y(const QContext& ctx);
LinearMap podles_z(const QContext& ctx);
LinearMap u(const QContext& ctx);
LinearMap u_adjoint(const QContext& ctx);
/// v e_{m,k} = e_{m-1,k} on l^2(Z) (x) l^2(Z), and its powers.
LinearMap shift_v(long power = 1);
}  // namespace maps

/// A LinearMap materialized on a window of basis vectors. Outputs outside the
/// codomain window are dropped; the dropped squared norm of each column is
/// kept as its truncation deficit.
class SparseOperator {
 public:
  SparseOperator() = default;
  SparseOperator(std::vector<LegSpec> domain, std::vector<LegSpec> codomain)
      : domain_(std::move(domain)), codomain_(std::move(codomain)) {}

  static SparseOperator materialize(const LinearMap& map, std::vector<LegSpec> domain,
                                    std::vector<LegSpec> codomain);

  const std::vector<LegSpec>& domain() const { return domain_; }
  const std::vector<LegSpec>& codomain() const { return codomain_; }
  const std::map<BasisIndex, SparseVector>& columns() const { return columns_; }
  const SparseVector& column(const BasisIndex& i) const;
  Real deficit(const BasisIndex& i) const;
  Real max_deficit() const;
  std::size_t entry_count() const;

  void set_column(const BasisIndex& i, SparseVector col, Real deficit = Real(0));

  /// Entries outside the window are rejected above `threshold`.
  LinearMap as_map(const Real& threshold) const;
  /// Conjugate transpose of the stored matrix.
  SparseOperator adjoint() const;

  /// max |<col_i, col_j> - delta_ij| - sqrt(deficit_i deficit_j) over the
  /// sampled columns (all columns when `sample` is empty).
  Real gram_defect(const std::vector<BasisIndex>& sample = {}) const;

  /// One line per entry: "in | out | re im", full precision.
  void export_text(std::ostream& os) const;
  static SparseOperator import_text(std::istream& is, std::vector<LegSpec> domain,
                                    std::vector<LegSpec> codomain);

 private:
  std::vector<LegSpec> domain_;
  std::vector<LegSpec> codomain_;
  std::map<BasisIndex, SparseVector> columns_;
  std::map<BasisIndex, Real> deficits_;
};

/// W+ on (N,Z,N,Z) -> (Z,Z,N,Z).
SparseOperator build_w_plus(const std::vector<LegSpec>& domain,
                            const std::vector<LegSpec>& codomain, KernelEvaluator& eval);
/// W0 on Z^4 -> Z^4.
SparseOperator build_w_zero(const std::vector<LegSpec>& domain,
                            const std::vector<LegSpec>& codomain, KernelEvaluator& eval);
/// G^(l) on (N,Z,N) -> (Z,Z,N).
SparseOperator build_g(long l, const std::vector<LegSpec>& domain,
                       const std::vector<LegSpec>& codomain, KernelEvaluator& eval);

struct Su2Generators {
  SparseOperator alpha;
  SparseOperator gamma;
};
/// alpha and gamma on an (N,Z) window; the codomain equals the domain.
Su2Generators build_su2_generators(const std::vector<LegSpec>& legs, const QContext& ctx);

struct PodlesGenerators {
  SparseOperator x, y, z;  // on l^2(N)
  SparseOperator u;        // on l^2(N) (x) l^2(Z)
};
PodlesGenerators build_podles_generators(const LegSpec& leg, const std::vector<LegSpec>& u_legs,
                                         const QContext& ctx);

enum class Comultiplication { plus, zero, link };

/// Delta(x) = W_a^* (1 (x) x) W_b with (a,b) = (+,+), (0,0) or (0,+), on the
/// columns of `domain`. x must be materialized on a window large enough
/// that the weight W_b e puts outside it is below the context tolerance.
SparseOperator comultiply(Comultiplication which, const SparseOperator& x,
                          const std::vector<LegSpec>& domain, KernelEvaluator& eval);

/// Number of lattice steps after which a kernel column has decayed below the
/// context's series target; a sensible padding for materialized windows.
long kernel_padding(const QContext& ctx, long order = 0);

/// <e_probe, LHS e_sample> - <e_probe, RHS e_sample> for
///   W0_{12}^* G^(l)_{23} W+_{12} = G^(l)_{13} G^(l)_{23},
/// sample = (a,b,c,d,e), probe = (u,v,w,x,y), from the explicit expansions of
/// both sides on basis vectors.
ResidualValue verify_corepresentation(long l, const BasisIndex& sample, const BasisIndex& probe,
                                      KernelEvaluator& eval);

/// Both sides of the corepresentation identity as LinearMaps on
/// (N,Z,N,Z,N) -> (Z,Z,Z,Z,N).
std::pair<LinearMap, LinearMap> corepresentation_maps(long l, KernelEvaluator& eval);

enum class PodlesElement { x, y, z, one_minus_z };  // one_minus_z = 1 - (1+q^2) Z

/// max over the interior basis vectors of `domain` (N,Z,N) of
/// |G^*(1 (x) x)G e - Upsilon(x) e|, with Upsilon from the coaction matrix.
Real verify_coaction(PodlesElement x, const std::vector<LegSpec>& domain, KernelEvaluator& eval);

}  // namespace qerd
