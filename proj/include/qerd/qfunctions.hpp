#pragma once

// Wall polynomials, 1phi1 (Hahn-Exton) q-Bessel functions, the q-Hankel
// transform on q^Z, and the classical Laguerre / Bessel functions used for
// q -> 1 limit checks.
//
// Wall polynomials are evaluated in the context's own base. The q-Bessel
// functions and the q-Hankel transform take q from the context and work in
// base q^2 unless asked otherwise.

#include <vector>

#include "qerd/qseries.hpp"

namespace qerd {

enum class WallNormalization {
  plain,  // p_n(x;a;q)
  tilde,  // (qa;q)_n p_n(x;a;q)
  check,  // (qa;q)_inf p_n(x;a;q)
};

struct WallParams {
  long n = 0;
  Complex a;
  Complex x;
  WallNormalization normalization = WallNormalization::plain;
};

/// p_n(x;a;q) = 2phi1(q^{-n}, 0; aq; q, qx), scaled per the normalization.
/// The tilde and check forms are entire in a; the plain form throws
/// NearPoleDenominator when aq lies in q^{-N}.
Complex wall_polynomial(const WallParams& p, const QContext& ctx);

/// Plain p_n through its terminating 3phi2(q^{-n}, q^{-n}/a, 1/x; 0, 0; q, q)
/// representation. Requires a, x nonzero.
Complex wall_polynomial_3phi2(long n, const Complex& a, const Complex& x, const QContext& ctx);

/// Plain p_n via the three-term recurrence
///   -x p_n = A_n p_{n+1} - (A_n + C_n) p_n + C_n p_{n-1},
///   A_n = q^n (1 - a q^{n+1}),  C_n = a q^n (1 - q^n).
Complex wall_polynomial_recurrence(long n, const Complex& a, const Complex& x, const QContext& ctx);

/// Polynomial in x with precomputed coefficients, for repeated evaluation.
class WallPolynomial {
 public:
  WallPolynomial(long n, const Complex& a, WallNormalization normalization, const QContext& ctx);

  Complex operator()(const Complex& x) const;
  /// sum |c_j| r^j, an upper bound for |p(x)| on |x| <= r.
  Real majorant(const Real& r) const;
  long degree() const { return static_cast<long>(coeffs_.size()) - 1; }
  const std::vector<Complex>& coefficients() const { return coeffs_; }

 private:
  std::vector<Complex> coeffs_;
};

/// Orthogonality defect of the Wall polynomials (0 < a < 1/q).
///   primal: sum_k (aq)^k/(q;q)_k p_n(q^k) p_m(q^k) - delta_nm (aq)^n (q;q)_n / ((aq;q)_n (aq;q)_inf)
///   dual:   sum_n (aq;q)_n/((aq)^n (q;q)_n) p_n(q^k) p_n(q^l) - delta_kl (aq)^{-k} (q;q)_k/(aq;q)_inf
/// In dual mode (n, m) play the role of (k, l). truncation = 0 picks the
/// number of terms automatically; otherwise the sum runs over 0..truncation
/// and TruncationInsufficient is thrown when the tail bound exceeds tolerance.
Complex wall_orthogonality_sum(long n, long m, const Real& a, bool dual, long truncation,
                               const QContext& ctx);

enum class QBase { q, q_squared };

struct QBesselParams {
  Complex nu;
  Complex x;
};

/// J_nu(x; Q) = x^nu (Q^{nu+1};Q)_inf/(Q;Q)_inf 1phi1(0; Q^{nu+1}; Q, Q x^2) with
/// Q = q^2 by default. Integer orders go through the regularized series.
/// Non-integer orders throw BranchCut on the negative real axis.
Complex qbessel(const QBesselParams& p, const QContext& ctx, QBase base = QBase::q_squared);

/// J_nu(q^m; q^2) on the lattice, evaluated through the order/argument
/// symmetry so that the underlying series always has argument of modulus <= 1.
class QBesselLattice {
 public:
  QBesselLattice(const Complex& nu, const QContext& ctx);

  Complex operator()(long m) const;

 private:
  Complex direct(long m) const;

  QContext ctx_;
  Complex nu_;
  std::optional<long> integer_order_;
  Complex b_inf_over_qq_inf_;  // (q^{2nu+2};q^2)_inf / (q^2;q^2)_inf
};

/// J_N(x; q^2) for integer order N >= 0 through
///   x^N sum_k (-1)^k q^{k(k+1)} x^{2k} / ((q^2;q^2)_k (q^2;q^2)_{N+k}).
Complex qbessel_integer_order(long order, const Complex& x, const QContext& ctx);

/// J_N(q^m; q^2) for integer N and m, reduced to the well-conditioned
/// N >= 0, m >= 0 case by the symmetries J_N(q^m) = J_m(q^N) and
/// J_{-n}(w) = (-q)^n J_n(w q^n).
Real qbessel_int_lattice(long order, long m, const QContext& ctx);
/// Same, reusing a (q^2;q^2)_k table built from ctx.squared().
Real qbessel_int_lattice(long order, long m, const QContext& ctx, PowerPochhammer& table_q2);

/// sum_{|k| <= window} q^{k+n} J_{k+n}(q^l;q^2) q^{k+m} J_{k+m}(q^l;q^2) - delta_nm.
/// The tail bound is the size of the two outermost terms; TruncationInsufficient
/// when it exceeds the tolerance.
SeriesValue qbessel_orthogonality_residual(long n, long m, long l, long window,
                                           const QContext& ctx);

/// Samples of a function on the lattice points q^k, k = first .. first+size-1.
struct LatticeSamples {
  long first = 0;
  std::vector<Complex> values;

  long last() const { return first + static_cast<long>(values.size()) - 1; }
  const Complex& at(long k) const { return values.at(static_cast<std::size_t>(k - first)); }
};

enum class HankelDirection { forward, inverse };

/// g(q^n) = sum_k q^{2k} J_nu(q^{k+n}; q^2) f(q^k) for n in [out_first, out_last].
/// Both directions use the same kernel. Throws TruncationInsufficient when a
/// sample on the edge of the input window still contributes more than the
/// tolerance to some output.
LatticeSamples qhankel_transform(const LatticeSamples& f, const Complex& nu,
                                 HankelDirection direction, long out_first, long out_last,
                                 const QContext& ctx);

/// Classical Laguerre polynomial L_n^{(alpha)}(x) by its three-term recurrence.
Real laguerre(long n, const Real& alpha, const Real& x, const QContext& ctx);

/// Classical Bessel J_nu(x), nu > -1, x >= 0, by its power series.
Real bessel_j(const Real& nu, const Real& x, const QContext& ctx);

}  // namespace qerd
