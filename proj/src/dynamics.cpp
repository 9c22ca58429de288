#include "hessflow/dynamics.hpp"

#include <cmath>
#include <stdexcept>

namespace hessflow {

namespace {

void require_spd(const Mat& w, const char* what) {
  Eigen::SelfAdjointEigenSolver<Mat> es(w);
  if (es.eigenvalues().minCoeff() <= 0.0)
    throw std::invalid_argument(std::string(what) + ": quadratic form not positive definite");
}

}  // namespace

InertiaOperator::InertiaOperator(int n, Mode mode, Mat w)
    : n_(n), mode_(mode), w_(std::move(w)) {}

InertiaOperator InertiaOperator::identity(int n) {
  return InertiaOperator(n, Mode::GenericSpd, Mat::Identity(wedge_dim(n), wedge_dim(n)));
}

InertiaOperator InertiaOperator::from_wedge_matrix(int n, const Mat& w) {
  if (w.rows() != wedge_dim(n) || w.cols() != wedge_dim(n))
    throw std::invalid_argument("wedge matrix size mismatch");
  Mat sym = 0.5 * (w + w.transpose());
  require_spd(sym, "InertiaOperator");
  return InertiaOperator(n, Mode::GenericSpd, sym);
}

InertiaOperator InertiaOperator::physical(const Mat& j) {
  int n = static_cast<int>(j.rows());
  if (j.cols() != n || (j - j.transpose()).norm() > 1e-12)
    throw std::invalid_argument("physical inertia: J must be symmetric");
  int nw = wedge_dim(n);
  auto pairs = wedge_pairs(n);
  Mat inertia(nw, nw);
  for (int k = 0; k < nw; ++k) {
    Vec u = Vec::Unit(n, pairs[k].first), v = Vec::Unit(n, pairs[k].second);
    Mat e = wedge(u, v).matrix();
    inertia.col(k) = wedge_coords(SkewMatrix::skew_part(j * e + e * j));
  }
  require_spd(0.5 * (inertia + inertia.transpose()), "InertiaOperator::physical");
  Mat a = inertia.inverse();
  return InertiaOperator(n, Mode::PhysicalJ, 0.5 * (a + a.transpose()));
}

InertiaOperator InertiaOperator::hess_block(int n, const Mat& a_k, const Mat& b, double a) {
  SymmetricPairSplit pair(n);
  int dk = pair.k_dim(), dd = pair.d_dim();
  if (a_k.rows() != dk || a_k.cols() != dk) throw std::invalid_argument("A_k block size mismatch");
  if (b.rows() != dk || b.cols() != dd) throw std::invalid_argument("B block size mismatch");
  Mat w = Mat::Zero(wedge_dim(n), wedge_dim(n));
  for (int i = 0; i < dk; ++i) {
    for (int j = 0; j < dk; ++j)
      w(pair.k_indices()[i], pair.k_indices()[j]) = 0.5 * (a_k(i, j) + a_k(j, i));
    for (int j = 0; j < dd; ++j) {
      w(pair.k_indices()[i], pair.d_indices()[j]) = b(i, j);
      w(pair.d_indices()[j], pair.k_indices()[i]) = b(i, j);
    }
  }
  for (int j = 0; j < dd; ++j) w(pair.d_indices()[j], pair.d_indices()[j]) = a;
  require_spd(w, "InertiaOperator::hess_block");
  return InertiaOperator(n, Mode::HessBlock, w);
}

SkewMatrix InertiaOperator::apply(const SkewMatrix& m) const {
  if (m.dim() != n_) throw std::invalid_argument("dimension mismatch");
  return from_wedge_coords(n_, w_ * wedge_coords(m));
}

double InertiaOperator::energy_quadratic(const SkewMatrix& m) const {
  Vec c = wedge_coords(m);
  return 0.5 * c.dot(w_ * c);
}

std::pair<bool, std::optional<double>> check_ha_condition(const InertiaOperator& op) {
  SymmetricPairSplit pair(op.n());
  int dd = pair.d_dim();
  Mat block(dd, dd);
  for (int i = 0; i < dd; ++i)
    for (int j = 0; j < dd; ++j)
      block(i, j) = op.wedge_matrix()(pair.d_indices()[i], pair.d_indices()[j]);
  double a = block.trace() / dd;
  if ((block - a * Mat::Identity(dd, dd)).norm() <= 1e-10) return {true, a};
  return {false, std::nullopt};
}

EulerPoissonState vf_euler_poisson(const EulerPoissonState& s, const InertiaOperator& a,
                                   const BodyParams& params) {
  int n = s.m.dim();
  SkewMatrix omega = a.apply(s.m);
  Vec r = params.rho * Vec::Unit(n, n - 1);
  SkewMatrix mdot = bracket(s.m, omega) + params.grav_mass * wedge(r, s.gamma);
  Vec gdot = -omega.matrix() * s.gamma;
  return {mdot, gdot};
}

FullDeriv vf_full_left(const FullState& s, const InertiaOperator& a, const BodyParams& params) {
  int n = s.m.dim();
  SkewMatrix omega = a.apply(s.m);
  Vec fn = Vec::Unit(n, n - 1);
  Vec en = s.g.matrix().row(n - 1).transpose();  // e_n = g^T E_n
  SkewMatrix mdot = bracket(s.m, omega) + params.rho * params.grav_mass * wedge(fn, en);
  return {mdot, omega};
}

RightDeriv vf_right(const RightState& s, const InertiaOperator& a, const BodyParams& params) {
  int n = s.big_m.dim();
  Rotation ginv = Rotation::from_matrix(s.g.matrix().transpose(), 1e-8);
  SkewMatrix omega_space = adjoint(s.g, a.apply(adjoint(ginv, s.big_m)));
  Vec f_n_space = s.g.matrix().col(n - 1);
  Vec e_n = Vec::Unit(n, n - 1);
  SkewMatrix mdot =
      params.rho * params.grav_mass * wedge(f_n_space, e_n);
  return {mdot, omega_space};
}

HessChartState vf_hess_coords(const HessChartState& s, const Mat& b, double a,
                              const BodyParams& params) {
  int n = static_cast<int>(s.gamma.size());
  SymmetricPairSplit pair(n);
  if (s.m_d.size() != n - 1) throw std::invalid_argument("m_d size mismatch");
  if (b.rows() != pair.k_dim() || b.cols() != pair.d_dim())
    throw std::invalid_argument("B block size mismatch");

  // omega_ij = <B m, f_i ^ f_j>, i < j <= n-1, antisymmetric extension
  Vec omega_k = b * s.m_d;
  Mat omega = Mat::Zero(n - 1, n - 1);
  auto pairs = wedge_pairs(n);
  for (int t = 0; t < pair.k_dim(); ++t) {
    auto [i, j] = pairs[pair.k_indices()[t]];
    omega(i, j) = omega_k(t);
    omega(j, i) = -omega_k(t);
  }

  double f = params.rho * params.grav_mass;
  HessChartState out{Vec(n - 1), Vec(n)};
  for (int i = 0; i < n - 1; ++i) {
    double acc = 0.0;
    for (int j = 0; j < n - 1; ++j) acc += omega(i, j) * s.m_d(j);
    out.m_d(i) = -acc - f * s.gamma(i);
  }
  for (int i = 0; i < n - 1; ++i) {
    double acc = 0.0;
    for (int j = 0; j < n - 1; ++j) acc += omega(i, j) * s.gamma(j);
    out.gamma(i) = -a * s.gamma(n - 1) * s.m_d(i) - acc;
  }
  double acc = 0.0;
  for (int j = 0; j < n - 1; ++j) acc += s.gamma(j) * s.m_d(j);
  out.gamma(n - 1) = a * acc;
  return out;
}

InertiaOperator hess4_operator(const Hess4Coeffs& c) {
  // wedge order for n=4: m12, m13, m14, m23, m24, m34
  Mat w = Mat::Zero(6, 6);
  w(0, 0) = c.a3;
  w(1, 1) = c.a2;
  w(3, 3) = c.a1;
  w(2, 2) = w(4, 4) = w(5, 5) = c.a;
  w(0, 2) = w(2, 0) = c.b1;
  w(0, 4) = w(4, 0) = c.b2;
  w(0, 5) = w(5, 0) = c.b3;
  return InertiaOperator::from_wedge_matrix(4, w);
}

Vec vf_hess4(const Vec& s, const Hess4Coeffs& c, const BodyParams& params) {
  if (s.size() != 7) throw std::invalid_argument("hess4 chart state has 7 coordinates");
  double m14 = s(0), m24 = s(1), m34 = s(2);
  double g1 = s(3), g2 = s(4), g3 = s(5), g4 = s(6);
  double w12 = c.b1 * m14 + c.b2 * m24 + c.b3 * m34;
  double f = params.rho * params.grav_mass;
  Vec out(7);
  out(0) = -w12 * m24 - f * g1;
  out(1) = w12 * m14 - f * g2;
  out(2) = -f * g3;
  out(3) = -c.a * g4 * m14 - w12 * g2;
  out(4) = -c.a * g4 * m24 + w12 * g1;
  out(5) = -c.a * g4 * m34;
  out(6) = c.a * (g1 * m14 + g2 * m24 + g3 * m34);
  return out;
}

double divergence_hess4(const Vec& s, const Hess4Coeffs& c, const BodyParams& params) {
  const double h = 1e-6;
  double div = 0.0;
  for (int i = 0; i < 7; ++i) {
    Vec sp = s, sm = s;
    sp(i) += h;
    sm(i) -= h;
    div += (vf_hess4(sp, c, params)(i) - vf_hess4(sm, c, params)(i)) / (2.0 * h);
  }
  return div;
}

std::array<double, 3> integrals_hess(const HessChartState& s, double a, const BodyParams& params) {
  int n = static_cast<int>(s.gamma.size());
  double f1 = 0.5 * a * s.m_d.squaredNorm() + params.rho * params.grav_mass * s.gamma(n - 1);
  double f2 = s.gamma.squaredNorm();
  double acc = 0.0;
  for (int i = 0; i < n - 1; ++i)
    for (int j = i + 1; j < n - 1; ++j) {
      double t = s.m_d(i) * s.gamma(j) - s.m_d(j) * s.gamma(i);
      acc += t * t;
    }
  return {f1, f2, std::sqrt(acc)};
}

PendulumState vf_pendulum(const PendulumState& s, double a, const BodyParams& params,
                          const Vec& e_dir, double constraint_tol) {
  double unit_defect = std::abs(s.f.squaredNorm() - 1.0);
  double tangency_defect = std::abs(s.f.dot(s.fdot));
  if (unit_defect > constraint_tol || tangency_defect > constraint_tol)
    throw std::invalid_argument("pendulum state violates the sphere constraint");
  double k = a * params.rho * params.grav_mass;
  double mu = k * e_dir.dot(s.f) - s.fdot.squaredNorm();
  return {s.fdot, -k * e_dir + mu * s.f};
}

double pendulum_energy(const PendulumState& s, double a, const BodyParams& params,
                       const Vec& e_dir) {
  return 0.5 * s.fdot.squaredNorm() + a * params.rho * params.grav_mass * s.f.dot(e_dir);
}

namespace {
Vec cross3(const Vec& a, const Vec& b) {
  Vec c(3);
  c << a(1) * b(2) - a(2) * b(1), a(2) * b(0) - a(0) * b(2), a(0) * b(1) - a(1) * b(0);
  return c;
}
}  // namespace

ClassicalState vf_classical(const ClassicalState& s, const Mat& a_vec, const Vec& r,
                            double grav_mass) {
  Vec omega = a_vec * s.m;
  Vec mdot = cross3(s.m, omega) + grav_mass * cross3(s.gamma, r);
  Vec gdot = cross3(s.gamma, omega);
  return {mdot, gdot};
}

std::array<double, 4> classical_integrals(const Vec& m, const Vec& gamma, const Mat& a_vec,
                                          const Vec& r, double grav_mass) {
  double f1 = 0.5 * m.dot(a_vec * m) + grav_mass * r.dot(gamma);
  return {f1, gamma.squaredNorm(), m.dot(gamma), m.dot(r)};
}

Vec classical_conditions_r(double a1, double a2, double a3, double rho, int branch) {
  if (!(a1 < a2 && a2 < a3)) throw std::invalid_argument("need a1 < a2 < a3");
  double s = std::sqrt((a2 - a1) / (a3 - a1));
  double c = std::sqrt((a3 - a2) / (a3 - a1));
  if (branch < 0) s = -s;
  Vec r(3);
  r << -rho * s, 0.0, rho * c;
  return r;
}

Rotation classical_frame_rotation(double a1, double a2, double a3, int branch) {
  double s = std::sqrt((a2 - a1) / (a3 - a1));
  double c = std::sqrt((a3 - a2) / (a3 - a1));
  if (branch < 0) s = -s;
  Mat r(3, 3);
  r << c, 0, s,
       0, 1, 0,
      -s, 0, c;
  return Rotation::from_matrix(r);
}

Mat vector_operator_to_wedge(const Mat& a_vec) {
  if (a_vec.rows() != 3 || a_vec.cols() != 3)
    throw std::invalid_argument("vector operator must be 3x3");
  // hat identification: (m12, m13, m23) = (-m3, m2, -m1)
  Mat p(3, 3);
  p << 0, 0, -1,
       0, 1, 0,
      -1, 0, 0;
  return p * a_vec * p;
}

}  // namespace hessflow
