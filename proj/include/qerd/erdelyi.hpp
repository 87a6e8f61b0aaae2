#pragma once

// The q-analogue of Erdelyi's Hankel transform of a product of two Laguerre
// polynomials, in base Q = q^2:
//
//   sum_{p>=0} Q^p q^{p nu} (Q^{1+p};Q)_inf pt_n(Q^p; Q^sigma) pt_m(Q^p; Q^{nu-sigma}) J_nu(z q^p; Q)
//     = (-q)^{n+m} z^nu q^{(m-n)^2} Q^{n sigma + m(nu-sigma)} (z^2 Q^{1+n+m};Q)_inf
//       pt_n(z^2 Q^{n+m}; Q^{nu-sigma+m-n}) pt_m(z^2 Q^{n+m}; Q^{sigma+n-m})
//
// with pt the tilde-normalized Wall polynomials, together with the lattice
// identity it is derived from and the checks built around it.

#include <optional>
#include <utility>
#include <vector>

#include "qerd/kernels.hpp"
#include "qerd/qfunctions.hpp"

namespace qerd {

struct ErdelyiParams {
  long n = 0;
  long m = 0;
  Complex nu;
  Complex sigma;
  Complex z;
};

/// The p-sum with a rigorous tail bound. Throws DivergentParameters when
/// Re nu <= -1 and TruncationInsufficient when the term cap is reached.
SeriesValue erdelyi_lhs(const ErdelyiParams& p, const QContext& ctx);

/// The closed form. z^nu on the principal branch; BranchCut on the negative
/// real axis for non-integer nu.
Complex erdelyi_rhs(const ErdelyiParams& p, const QContext& ctx);

/// The closed form at z = q^{z_exponent}, with the infinite product taken as
/// an exact zero when z_exponent + 1 + n + m <= 0. p.z is ignored.
Complex erdelyi_rhs_lattice(const ErdelyiParams& p, long z_exponent, const QContext& ctx);

/// Jackson q-integral form with check-normalized Wall polynomials
/// pc_n(x;a;q) = (qa;q)_inf p_n(x;a;q):
///   1/(1-q) int_0^inf x^nu E_Q(-Q x^2) pc_n(x^2; Q^sigma) pc_m(x^2; Q^{nu-sigma}) J_nu(zx;Q) x d_qx
struct QIntegralValue {
  SeriesValue lhs;      // Jackson sum over the window, integrand evaluated pointwise
  Complex rhs;          // closed form with check normalization
  Complex reduced_lhs;  // erdelyi_lhs times (Q^{sigma+n+1}, Q^{nu-sigma+m+1};Q)_inf
};
/// window = lattice range [kmin, kmax] of x = q^k; chosen from the decay rate
/// when absent.
QIntegralValue erdelyi_qintegral(const ErdelyiParams& p,
                                 std::optional<std::pair<long, long>> window, const QContext& ctx);

/// sum_{p>=0} P+(p,a,c) P+(y,p,e) P0(p-l-y-e, a-c+e-y+w, w) minus
/// P+(c-l-e-w, c, e) P+(y, a, c-l-e-w) (zero when c-l-e-w < 0).
ResidualValue scalar_identity_residual(long a, long c, long e, long y, long w, long l,
                                       KernelEvaluator& eval);

/// The lattice identity above against the theorem at
/// (n, sigma, m, nu - sigma, z) = (c, a-c, y, e-y, q^{-l-y-e-w}), once the
/// kernel prefactors are divided out. Needs nu = a-c+e-y >= 0.
struct LatticeConsistency {
  Real lhs_gap;  // |lattice sum - K * theorem lhs|
  Real rhs_gap;  // |lattice rhs - K * theorem rhs|
};
LatticeConsistency lattice_continuum_residual(long a, long c, long e, long y, long w, long l,
                                              KernelEvaluator& eval);

/// Transforms g(q^r) = rhs(z = q^r), r in [r_first, r_last], back with the
/// q-Hankel kernel and compares with the lhs integrand
///   f(q^k) = q^{k nu} (q^{2+2k};q^2)_inf pt_n(q^{2k}) pt_m(q^{2k})  (k >= 0; 0 for k < 0)
/// on k in [k_first, k_last]. Returns the largest deviation.
Real inverse_hankel_check(long n, long m, const Complex& nu, const Complex& sigma, long r_first,
                          long r_last, long k_first, long k_last, const QContext& ctx);

/// Coefficients of z^{2j}, j = 0..max_j, of both sides divided by z^nu at
/// m = 0, where both are power series in z^2.
std::vector<std::pair<Complex, Complex>> erdelyi_series_coefficients(long n, const Complex& nu,
                                                                     const Complex& sigma, long max_j,
                                                                     const QContext& ctx);

struct ClassicalLimitRow {
  std::string q;
  Complex q_side;      // scaled direct sum
  Real classical;      // (-1)^{m+n}/2 y^nu e^{-y^2} L_m^{(sigma-m+n)}(y^2) L_n^{(nu-sigma+m-n)}(y^2)
  Real gap;
};

/// The theorem at z = y sqrt(1-q^2), with the left side divided by
///   2 (1-q^2)^{nu/2} (Q^{a_n+1};Q)_n (Q^{a_m+1};Q)_m / (L_n^{(a_n)}(0) L_m^{(a_m)}(0)),
/// a_n = nu-sigma+m-n, a_m = sigma+n-m, tends to the classical right side.
std::vector<ClassicalLimitRow> classical_limit_table(long n, long m, const Real& nu,
                                                     const Real& sigma, const Real& y,
                                                     const std::vector<std::string>& q_values,
                                                     unsigned digits, std::string_view tolerance);

/// Right side of the classical formula.
Real classical_erdelyi_rhs(long n, long m, const Real& nu, const Real& sigma, const Real& y,
                           const QContext& ctx);

}  // namespace qerd
