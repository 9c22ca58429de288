#ifndef HESSFLOW_LAX_HPP
#define HESSFLOW_LAX_HPP

#include <vector>

#include "hessflow/dynamics.hpp"
#include "hessflow/liealg.hpp"

namespace hessflow {

/// Matrix polynomial in the spectral parameter with skew (n+1)x(n+1)
/// coefficients; coeffs[k] multiplies lambda^k.
struct LaxPolynomial {
  std::vector<Mat> coeffs;

  int degree() const { return static_cast<int>(coeffs.size()) - 1; }
  Mat eval(double lambda) const;
  double max_coeff_norm(int from_degree = 0) const;
};

struct LaxPair {
  LaxPolynomial l;  // gamma* + lambda m* + lambda^2 (GM/a) r*
  LaxPolynomial a;  // omega* + lambda GM r*
};

/// so(n+1) embeddings and the pair itself; omega = A_op(m).
LaxPair build_lax(const EulerPoissonState& s, const InertiaOperator& a_op, double a,
                  const BodyParams& params);

/// R(lambda) = L' - [L, A] with L' assembled analytically from the
/// Euler-Poisson field; degree <= 3 coefficient list.
LaxPolynomial lax_residual(const EulerPoissonState& s, const InertiaOperator& a_op, double a,
                           const BodyParams& params);

/// Finite-difference cross-check of L' along the flow (step h).
LaxPolynomial lax_residual_fd(const EulerPoissonState& s, const InertiaOperator& a_op, double a,
                              const BodyParams& params, double h = 1e-5);

/// det(L(lambda) - mu Id).
double spectral_poly(const LaxPolynomial& l, double lambda, double mu);

/// Coefficients of the spectral curve on the invariant set:
/// det(L - mu Id) = (-mu)^{n-3} (mu^4 + mu^2 P(lambda) + Q(lambda)^2),
/// P = c0 + c2 lambda^2 + c4 lambda^4, Q = q lambda.
struct SpectralData {
  double c0, c2, c4, q;
  double fit_residual;
};

/// Extracts (c0, c2, c4, q) by exact solves at integer lambda nodes; a fit
/// residual above 1e-8 signals an off-invariant-set state.
SpectralData spectral_invariants(const EulerPoissonState& s, const InertiaOperator& a_op, double a,
                                 const BodyParams& params);

}  // namespace hessflow

#endif
