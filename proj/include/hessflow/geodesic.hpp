#ifndef HESSFLOW_GEODESIC_HPP
#define HESSFLOW_GEODESIC_HPP

#include <optional>
#include <vector>

#include "hessflow/dynamics.hpp"
#include "hessflow/liealg.hpp"

namespace hessflow {

/// Sectional operator A_{a,b,C} = ad_a^-1 o ad_b o pr_d + C o pr_{g_a},
/// where g_a is the isotropy algebra of a, d its Killing-orthogonal
/// complement, b lies in the center of g_a and C is symmetric on g_a
/// (given as a matrix in the centralizer basis of a).
class SectionalOperator {
public:
  SectionalOperator(const SkewMatrix& a, const SkewMatrix& b, const Mat& c);

  int n() const { return a_.dim(); }
  const SkewMatrix& a() const { return a_; }
  const SkewMatrix& b() const { return b_; }
  const Mat& c() const { return c_; }
  const std::vector<SkewMatrix>& centralizer() const { return centralizer_; }
  /// Orthonormal wedge-coordinate bases of g_a (columns) and d (columns).
  const Mat& ga_basis() const { return ga_basis_; }
  const Mat& d_basis() const { return d_basis_; }
  /// b = kappa * a when b is proportional to a (required by orbit flows).
  double kappa() const;

  SkewMatrix project_ga(const SkewMatrix& xi) const;
  SkewMatrix project_d(const SkewMatrix& xi) const;

  /// Applies the defining formula (ad-inverse route).
  SkewMatrix apply(const SkewMatrix& xi) const;
  /// The same operator assembled as a wedge-basis matrix.
  const InertiaOperator& as_operator() const { return *op_; }

private:
  SkewMatrix a_, b_;
  Mat c_;
  std::vector<SkewMatrix> centralizer_;
  Mat ga_basis_, d_basis_;
  std::optional<InertiaOperator> op_;
};

/// Verifies [xi, C xi] = 0 on g_a by bilinear polarization over basis pairs.
bool check_C_condition(const SectionalOperator& s, double tol = 1e-10);

/// Metric perturbation delta = <B_delta pr_d xi, xi> + 1/2 <C_delta pr_ga xi, xi>;
/// B_delta maps d -> g_a (matrix in the operator's d/ga bases).
struct PerturbationDelta {
  Mat b_delta;
  Mat c_delta;
};

/// Wedge matrix of the perturbed operator A_delta (positive definiteness
/// checked on construction).
InertiaOperator perturbed_operator(const SectionalOperator& s, const PerturbationDelta& delta);

/// Geodesic flow xi' = [xi, A xi], g' = g * A xi; returns (group velocity,
/// algebra derivative).
struct GeodesicDeriv {
  SkewMatrix omega;  // g' = g * omega
  SkewMatrix xidot;
};
GeodesicDeriv vf_geodesic(const SkewMatrix& xi, const InertiaOperator& metric);

/// Point of T*O(a) in redundant variables: x on the adjoint orbit of a,
/// momentum p Killing-orthogonal to the isotropy algebra of x.
struct OrbitPoint {
  SkewMatrix x;
  SkewMatrix p;
};

/// Sorted singular values (the orbit invariants of x).
Vec orbit_spectrum(const SkewMatrix& x);
/// Checks orbit membership against a reference element and the constraint
/// p perpendicular to g_x.
void validate_orbit_point(const OrbitPoint& pt, const SkewMatrix& a, double tol = 1e-8);

/// Reduced Hamiltonian H = 1/2 <[b_x, p], [x, p]> with b_x = kappa x.
double reduced_hamiltonian(const OrbitPoint& pt, double kappa);

/// Geodesic/natural flow on T*O(a) in redundant variables, b_x = kappa x.
/// Optional linear-potential gradient c (V(x) = <x, c>); the centralizer
/// component of p' is fixed by tangency to the realization.
OrbitPoint vf_orbit(const OrbitPoint& pt, double kappa,
                    const std::optional<SkewMatrix>& potential_grad = std::nullopt);

/// Projection of a trivialized phase point to (x, p): x = Ad_g a,
/// p = Ad_g (ad_a^-1 pr_d xi).
OrbitPoint orbit_projection(const Rotation& g, const SkewMatrix& xi, const SectionalOperator& s);

// ---- so(4) x so(4) Hess-Appel'rot system ----

struct DG4Params {
  double a12 = 1.0, a34 = 0.5;
  double j1 = 1.0, j3 = 0.6, j13 = 0.2, j24 = 0.1;

  SkewMatrix a_mat() const;
  Mat j_mat() const;
  double kappa() const { return j1 + j3; }
  /// A_delta(m) = J m + m J; throws unless positive definite on so(4).
  SkewMatrix a_delta(const SkewMatrix& m) const;
  void validate() const;
};

/// Closed system: m' = [m, A_delta m] + [gamma, a], gamma' = [gamma, A_delta m].
struct DG4ClosedState {
  SkewMatrix m;
  SkewMatrix gamma;
};
DG4ClosedState vf_dg4_closed(const DG4ClosedState& s, const DG4Params& params);

/// Full form on (g, m); gamma is reconstructed as Ad_{g^-1} a.
struct DG4FullDeriv {
  SkewMatrix mdot;
  SkewMatrix omega;  // g' = g * omega
};
DG4FullDeriv vf_dg4_full(const FullState& s, const DG4Params& params);

/// Energy 1/2 <A_delta m, m> and supplementary integral
/// F = gamma34 a12 + gamma12 a34 + (J1+J3)(m12 m34 + m23 m14 - m13 m24).
double dg4_energy(const SkewMatrix& m, const DG4Params& params);
double dg4_integral_f(const SkewMatrix& m, const SkewMatrix& gamma, const DG4Params& params);

/// Partially reduced flow on T*Gr+(4,2):
/// x' = (J1+J3)[[x,p],x], p' = (J1+J3)[[x,p],p] - a + pr_{g_x} a.
OrbitPoint vf_grassmann(const OrbitPoint& pt, const DG4Params& params);

/// Projection of a full-state point to the orbit realization.
OrbitPoint dg4_project(const FullState& s, const DG4Params& params);

}  // namespace hessflow

#endif
