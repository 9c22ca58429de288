#ifndef HESSFLOW_DYNAMICS_HPP
#define HESSFLOW_DYNAMICS_HPP

#include <array>
#include <optional>
#include <vector>

#include "hessflow/liealg.hpp"

namespace hessflow {

/// Body constants: mass-center offset rho along f_n and the gravity-mass
/// product GM (the force magnitude is rho * GM).
struct BodyParams {
  double rho = 1.0;
  double grav_mass = 1.0;
};

/// Positive-definite inertia operator A : m -> omega on so(n), stored as a
/// symmetric matrix in the ordered (lexicographic) wedge basis.
class InertiaOperator {
public:
  enum class Mode { GenericSpd, PhysicalJ, HessBlock };

  static InertiaOperator identity(int n);
  static InertiaOperator from_wedge_matrix(int n, const Mat& w);
  /// Physical body: the inertia tensor is omega -> J omega + omega J with J
  /// symmetric n x n; A is its inverse.
  static InertiaOperator physical(const Mat& j);
  /// Hess-Appel'rot block form: A = A_k on k, cross-term B : d -> k, and
  /// a * Id on d. Satisfies the invariance condition by construction.
  static InertiaOperator hess_block(int n, const Mat& a_k, const Mat& b, double a);

  int n() const { return n_; }
  Mode mode() const { return mode_; }
  const Mat& wedge_matrix() const { return w_; }
  SkewMatrix apply(const SkewMatrix& m) const;
  double energy_quadratic(const SkewMatrix& m) const;  // 1/2 <A m, m>

private:
  InertiaOperator(int n, Mode mode, Mat w);
  int n_;
  Mode mode_;
  Mat w_;
};

/// Tests whether pr_d o A o pr_d = a * Id_d; returns a when it holds.
std::pair<bool, std::optional<double>> check_ha_condition(const InertiaOperator& a);

struct EulerPoissonState {
  SkewMatrix m;
  Vec gamma;
};

struct FullState {
  Rotation g;
  SkewMatrix m;
};

struct RightState {
  SkewMatrix big_m;  // angular momentum in the space frame
  Rotation g;        // columns are the frame vectors F_i
};

struct PendulumState {
  Vec f;
  Vec fdot;
};

/// m' = [m, omega] + GM r ^ gamma, gamma' = -omega gamma, omega = A m,
/// with r = rho f_n.
EulerPoissonState vf_euler_poisson(const EulerPoissonState& s, const InertiaOperator& a,
                                   const BodyParams& params);

/// Left-trivialized flow: m' = [m, omega] + rho GM f_n ^ e_n with e_n the
/// last row of g; the group velocity is omega (g' = g omega).
struct FullDeriv {
  SkewMatrix mdot;
  SkewMatrix omega;  // body angular velocity, g' = g * omega
};
FullDeriv vf_full_left(const FullState& s, const InertiaOperator& a, const BodyParams& params);

/// Space-frame flow: M' = rho GM F_n ^ E_n, F_i' = Omega F_i with
/// Omega = Ad_g o A o Ad_{g^-1} (M); group velocity is Omega (g' = Omega g).
struct RightDeriv {
  SkewMatrix big_mdot;
  SkewMatrix omega_space;  // g' = omega_space * g
};
RightDeriv vf_right(const RightState& s, const InertiaOperator& a, const BodyParams& params);

/// Chart flow on the invariant set m_k = 0 for a Hess-Appel'rot block
/// operator: coordinates (m_{1n},...,m_{n-1,n}, gamma_1..gamma_n).
/// `b` is the cross-term matrix (k_dim x d_dim) in wedge coordinates.
struct HessChartState {
  Vec m_d;    // n-1 components m_{in}
  Vec gamma;  // n components
};
HessChartState vf_hess_coords(const HessChartState& s, const Mat& b, double a,
                              const BodyParams& params);

/// n = 4 example coefficients: kinetic energy
/// 1/2 (a1 m23^2 + a2 m13^2 + a3 m12^2) + a/2 (m14^2 + m24^2 + m34^2)
///   + m12 (b1 m14 + b2 m24 + b3 m34).
struct Hess4Coeffs {
  double a1, a2, a3, a;
  double b1, b2, b3;
};

/// The full so(4) operator of the n = 4 example (valid off the invariant
/// set as well).
InertiaOperator hess4_operator(const Hess4Coeffs& c);

/// The seven chart equations on m12 = m13 = m23 = 0; state layout
/// (m14, m24, m34, gamma1..gamma4).
Vec vf_hess4(const Vec& s, const Hess4Coeffs& c, const BodyParams& params);

/// Trace of the Jacobian of vf_hess4, by central differences (step 1e-6).
double divergence_hess4(const Vec& s, const Hess4Coeffs& c, const BodyParams& params);

/// Integrals of the chart flow: F1 = a/2 sum m_in^2 + rho GM gamma_n,
/// F2 = |gamma|^2, F3 = sqrt(sum_{i<j} (m_in gamma_j - m_jn gamma_i)^2).
std::array<double, 3> integrals_hess(const HessChartState& s, double a, const BodyParams& params);

/// Spherical pendulum on S^{n-1}: F'' = -a rho GM E + mu F with mu fixed by
/// the unit constraint. Reports a constraint violation beyond constraint_tol
/// (intermediate integrator stages sit off the sphere by O(h^2), so coarse
/// step studies may pass a looser bound).
PendulumState vf_pendulum(const PendulumState& s, double a, const BodyParams& params,
                          const Vec& e_dir, double constraint_tol = 1e-6);
double pendulum_energy(const PendulumState& s, double a, const BodyParams& params,
                       const Vec& e_dir);

// ---- classical (n = 3, vector form) ----

/// m' = m x omega + GM gamma x r, gamma' = gamma x omega, omega = A m.
struct ClassicalState {
  Vec m;
  Vec gamma;
};
ClassicalState vf_classical(const ClassicalState& s, const Mat& a_vec, const Vec& r,
                            double grav_mass);

/// (F1, F2, F3, F4) = (energy, |gamma|^2, (m, gamma), (m, r)).
std::array<double, 4> classical_integrals(const Vec& m, const Vec& gamma, const Mat& a_vec,
                                          const Vec& r, double grav_mass);

/// Mass-center direction satisfying the classical Hess conditions
/// r2 = 0, r1 sqrt(a3-a2) +/- r3 sqrt(a2-a1) = 0 for A = diag(a1,a2,a3),
/// a1 < a2 < a3. `branch` = +1 or -1 picks the sign.
Vec classical_conditions_r(double a1, double a2, double a3, double rho, int branch);

/// Frame rotation taking r to rho f_3; in the rotated frame the operator has
/// the Hess normal form with a = a2.
Rotation classical_frame_rotation(double a1, double a2, double a3, int branch);

/// Converts a symmetric operator in (m1,m2,m3) vector coordinates to the
/// wedge-basis matrix (order m12, m13, m23) via the hat identification.
Mat vector_operator_to_wedge(const Mat& a_vec);

}  // namespace hessflow

#endif
