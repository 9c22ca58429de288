#include "hessflow/geodesic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hessflow {

namespace {

SkewMatrix project_span(const SkewMatrix& xi, const Mat& basis) {
  Vec c = wedge_coords(xi);
  return from_wedge_coords(xi.dim(), basis * (basis.transpose() * c));
}

SkewMatrix pr_centralizer(const SkewMatrix& x, const SkewMatrix& y,
                          const std::vector<SkewMatrix>& basis) {
  SkewMatrix out(x.dim());
  for (const auto& xi : basis) out = out + killing(y, xi) * xi;
  return out;
}

}  // namespace

SectionalOperator::SectionalOperator(const SkewMatrix& a, const SkewMatrix& b, const Mat& c)
    : a_(a), b_(b), c_(0.5 * (c + c.transpose())) {
  if (a.dim() != b.dim()) throw std::invalid_argument("a, b dimension mismatch");
  if (bracket(a_, b_).norm() > 1e-12 * std::max(1.0, a_.norm() * b_.norm()))
    throw std::invalid_argument("sectional operator: [a, b] != 0");

  centralizer_ = centralizer_basis(a_);
  int n = a_.dim(), nw = wedge_dim(n);
  int k = static_cast<int>(centralizer_.size());
  if (c_.rows() != k || c_.cols() != k)
    throw std::invalid_argument("C must act on the centralizer basis");

  ga_basis_ = Mat(nw, k);
  for (int i = 0; i < k; ++i) ga_basis_.col(i) = wedge_coords(centralizer_[i]);
  for (const auto& xi : centralizer_)
    if (bracket(b_, xi).norm() > 1e-10 * std::max(1.0, b_.norm()))
      throw std::invalid_argument("sectional operator: b not in the center of g_a");

  // orthonormal complement of g_a via full QR of [ga_basis | I]
  Eigen::HouseholderQR<Mat> qr(ga_basis_);
  Mat qfull = qr.householderQ() * Mat::Identity(nw, nw);
  d_basis_ = qfull.rightCols(nw - k);

  // assemble the wedge matrix by columns and keep the SPD check
  Mat w(nw, nw);
  auto pairs = wedge_pairs(n);
  for (int col = 0; col < nw; ++col) {
    Vec u = Vec::Unit(n, pairs[col].first), v = Vec::Unit(n, pairs[col].second);
    w.col(col) = wedge_coords(apply(wedge(u, v)));
  }
  op_.emplace(InertiaOperator::from_wedge_matrix(n, w));
}

double SectionalOperator::kappa() const {
  double k = killing(b_, a_) / killing(a_, a_);
  if ((b_ - k * a_).norm() > 1e-10 * std::max(1.0, b_.norm()))
    throw std::invalid_argument("b is not proportional to a");
  return k;
}

SkewMatrix SectionalOperator::project_ga(const SkewMatrix& xi) const {
  return project_span(xi, ga_basis_);
}

SkewMatrix SectionalOperator::project_d(const SkewMatrix& xi) const {
  return xi - project_ga(xi);
}

SkewMatrix SectionalOperator::apply(const SkewMatrix& xi) const {
  SkewMatrix xi_d = project_d(xi);
  SkewMatrix z = ad_inverse(a_, bracket(b_, xi_d));
  Vec coords = ga_basis_.transpose() * wedge_coords(xi);
  Vec c_out = c_ * coords;
  return z + from_wedge_coords(xi.dim(), ga_basis_ * c_out);
}

bool check_C_condition(const SectionalOperator& s, double tol) {
  const auto& basis = s.centralizer();
  int k = static_cast<int>(basis.size());
  auto apply_c = [&](int j) {
    return from_wedge_coords(s.n(), s.ga_basis() * s.c().col(j));
  };
  for (int i = 0; i < k; ++i)
    for (int j = i; j < k; ++j) {
      SkewMatrix r = bracket(basis[i], apply_c(j)) + bracket(basis[j], apply_c(i));
      if (r.norm() > tol) return false;
    }
  return true;
}

InertiaOperator perturbed_operator(const SectionalOperator& s, const PerturbationDelta& delta) {
  int nw = wedge_dim(s.n());
  int k = static_cast<int>(s.ga_basis().cols());
  int dd = static_cast<int>(s.d_basis().cols());
  if (delta.b_delta.rows() != k || delta.b_delta.cols() != dd)
    throw std::invalid_argument("B_delta size mismatch");
  if (delta.c_delta.rows() != k || delta.c_delta.cols() != k)
    throw std::invalid_argument("C_delta size mismatch");
  Mat bt = s.ga_basis() * delta.b_delta * s.d_basis().transpose();
  Mat w = s.as_operator().wedge_matrix() + bt + bt.transpose() +
          s.ga_basis() * (0.5 * (delta.c_delta + delta.c_delta.transpose())) *
              s.ga_basis().transpose();
  (void)nw;
  return InertiaOperator::from_wedge_matrix(s.n(), w);
}

GeodesicDeriv vf_geodesic(const SkewMatrix& xi, const InertiaOperator& metric) {
  SkewMatrix axi = metric.apply(xi);
  return {axi, bracket(xi, axi)};
}

Vec orbit_spectrum(const SkewMatrix& x) {
  Eigen::JacobiSVD<Mat> svd(x.matrix());
  Vec s = svd.singularValues();
  std::sort(s.data(), s.data() + s.size());
  return s;
}

void validate_orbit_point(const OrbitPoint& pt, const SkewMatrix& a, double tol) {
  if ((orbit_spectrum(pt.x) - orbit_spectrum(a)).norm() > tol)
    throw std::invalid_argument("x not on the adjoint orbit of a");
  for (const auto& xi : centralizer_basis(pt.x))
    if (std::abs(killing(pt.p, xi)) > tol)
      throw std::invalid_argument("p not orthogonal to the isotropy algebra of x");
}

double reduced_hamiltonian(const OrbitPoint& pt, double kappa) {
  SkewMatrix bx = kappa * pt.x;
  return 0.5 * killing(bracket(bx, pt.p), bracket(pt.x, pt.p));
}

OrbitPoint vf_orbit(const OrbitPoint& pt, double kappa,
                    const std::optional<SkewMatrix>& potential_grad) {
  SkewMatrix bx = kappa * pt.x;
  SkewMatrix w = bracket(bx, pt.p);
  SkewMatrix xdot = bracket(w, pt.x);
  auto gx = centralizer_basis(pt.x);
  SkewMatrix pdot = -ad_inverse(pt.x, bracket(pt.p, bracket(pt.x, w))) +
                    pr_centralizer(pt.x, bracket(w, pt.p), gx);
  if (potential_grad) {
    const SkewMatrix& c = *potential_grad;
    pdot = pdot - (c - pr_centralizer(pt.x, c, gx));
  }
  return {xdot, pdot};
}

OrbitPoint orbit_projection(const Rotation& g, const SkewMatrix& xi, const SectionalOperator& s) {
  SkewMatrix x = adjoint(g, s.a());
  SkewMatrix p0 = ad_inverse(s.a(), s.project_d(xi));
  return {x, adjoint(g, p0)};
}

SkewMatrix DG4Params::a_mat() const {
  Mat m = Mat::Zero(4, 4);
  m(0, 1) = a12;
  m(1, 0) = -a12;
  m(2, 3) = a34;
  m(3, 2) = -a34;
  return SkewMatrix::skew_part(m);
}

Mat DG4Params::j_mat() const {
  Mat j = Mat::Zero(4, 4);
  j(0, 0) = j(1, 1) = j1;
  j(2, 2) = j(3, 3) = j3;
  j(0, 2) = j(2, 0) = j13;
  j(1, 3) = j(3, 1) = j24;
  return j;
}

SkewMatrix DG4Params::a_delta(const SkewMatrix& m) const {
  Mat j = j_mat();
  return SkewMatrix::skew_part(j * m.matrix() + m.matrix() * j);
}

void DG4Params::validate() const {
  // positive definiteness of m -> Jm + mJ on so(4)
  Mat j = j_mat();
  Mat w(6, 6);
  auto pairs = wedge_pairs(4);
  for (int k = 0; k < 6; ++k) {
    Vec u = Vec::Unit(4, pairs[k].first), v = Vec::Unit(4, pairs[k].second);
    Mat e = wedge(u, v).matrix();
    w.col(k) = wedge_coords(SkewMatrix::skew_part(j * e + e * j));
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (w + w.transpose()));
  if (es.eigenvalues().minCoeff() <= 0.0)
    throw std::invalid_argument("DG4Params: A_delta not positive definite");
}

DG4ClosedState vf_dg4_closed(const DG4ClosedState& s, const DG4Params& params) {
  SkewMatrix omega = params.a_delta(s.m);
  SkewMatrix a = params.a_mat();
  return {bracket(s.m, omega) + bracket(s.gamma, a), bracket(s.gamma, omega)};
}

DG4FullDeriv vf_dg4_full(const FullState& s, const DG4Params& params) {
  SkewMatrix omega = params.a_delta(s.m);
  Rotation ginv = Rotation::from_matrix(s.g.matrix().transpose(), 1e-8);
  SkewMatrix gamma = adjoint(ginv, params.a_mat());
  return {bracket(s.m, omega) + bracket(gamma, params.a_mat()), omega};
}

double dg4_energy(const SkewMatrix& m, const DG4Params& params) {
  return 0.5 * killing(params.a_delta(m), m);
}

double dg4_integral_f(const SkewMatrix& m, const SkewMatrix& gamma, const DG4Params& params) {
  return gamma(2, 3) * params.a12 + gamma(0, 1) * params.a34 +
         params.kappa() * (m(0, 1) * m(2, 3) + m(1, 2) * m(0, 3) - m(0, 2) * m(1, 3));
}

OrbitPoint vf_grassmann(const OrbitPoint& pt, const DG4Params& params) {
  double kappa = params.kappa();
  SkewMatrix a = params.a_mat();
  SkewMatrix xp = bracket(pt.x, pt.p);
  auto gx = centralizer_basis(pt.x);
  SkewMatrix xdot = kappa * bracket(xp, pt.x);
  SkewMatrix pdot = kappa * bracket(xp, pt.p) - a + pr_centralizer(pt.x, a, gx);
  return {xdot, pdot};
}

OrbitPoint dg4_project(const FullState& s, const DG4Params& params) {
  SkewMatrix a = params.a_mat();
  SkewMatrix x = adjoint(s.g, a);
  // pr_d m relative to g_a, then p = Ad_g (ad_a^-1 m_d)
  auto ga = centralizer_basis(a);
  SkewMatrix m_d = s.m - pr_centralizer(a, s.m, ga);
  return {x, adjoint(s.g, ad_inverse(a, m_d))};
}

}  // namespace hessflow
