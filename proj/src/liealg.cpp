#include "hessflow/liealg.hpp"

#include <cassert>
#include <stdexcept>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

namespace hessflow {

namespace {

void check_dim(int n) {
  if (n < 2 || n > kMaxDim)
    throw std::invalid_argument("dimension must be in [2, " + std::to_string(kMaxDim) + "]");
}

void check_same(int a, int b) {
  if (a != b) throw std::invalid_argument("dimension mismatch");
}

}  // namespace

SkewMatrix::SkewMatrix(int n) : m_(Mat::Zero(n, n)) { check_dim(n); }

SkewMatrix SkewMatrix::from_matrix(const Mat& x, double tol) {
  check_dim(static_cast<int>(x.rows()));
  if (x.rows() != x.cols()) throw std::invalid_argument("matrix not square");
  if ((x + x.transpose()).norm() > tol)
    throw std::invalid_argument("matrix not skew-symmetric to tolerance");
  return SkewMatrix(0.5 * (x - x.transpose()), 0);
}

SkewMatrix SkewMatrix::skew_part(const Mat& x) {
  return SkewMatrix(0.5 * (x - x.transpose()), 0);
}

Rotation::Rotation(int n) : g_(Mat::Identity(n, n)) { check_dim(n); }

Rotation Rotation::from_matrix(const Mat& g, double tol) {
  check_dim(static_cast<int>(g.rows()));
  if (g.rows() != g.cols()) throw std::invalid_argument("matrix not square");
  int n = static_cast<int>(g.rows());
  if ((g.transpose() * g - Mat::Identity(n, n)).norm() > tol)
    throw std::invalid_argument("matrix not orthogonal to tolerance");
  if (g.determinant() < 0.0)
    throw std::invalid_argument("matrix has determinant -1");
  return Rotation(g, 0);
}

double Rotation::orthogonality_defect() const {
  int n = dim();
  return (g_.transpose() * g_ - Mat::Identity(n, n)).norm();
}

Rotation Rotation::reorthogonalized() const {
  Eigen::JacobiSVD<Mat> svd(g_, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return Rotation(svd.matrixU() * svd.matrixV().transpose(), 0);
}

std::vector<std::pair<int, int>> wedge_pairs(int n) {
  std::vector<std::pair<int, int>> out;
  out.reserve(wedge_dim(n));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) out.emplace_back(i, j);
  return out;
}

int wedge_dim(int n) { return n * (n - 1) / 2; }

int wedge_index(int n, int i, int j) {
  assert(0 <= i && i < j && j < n);
  // offset of row i in the lex enumeration
  return i * n - i * (i + 1) / 2 + (j - i - 1);
}

Vec wedge_coords(const SkewMatrix& x) {
  int n = x.dim();
  Vec c(wedge_dim(n));
  int k = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) c(k++) = x(i, j);
  return c;
}

SkewMatrix from_wedge_coords(int n, const Vec& c) {
  if (c.size() != wedge_dim(n)) throw std::invalid_argument("wedge coordinate size mismatch");
  Mat m = Mat::Zero(n, n);
  int k = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      m(i, j) = c(k);
      m(j, i) = -c(k);
      ++k;
    }
  return SkewMatrix::skew_part(m);
}

SkewMatrix wedge(const Vec& u, const Vec& v) {
  check_same(static_cast<int>(u.size()), static_cast<int>(v.size()));
  check_dim(static_cast<int>(u.size()));
  return SkewMatrix::skew_part(u * v.transpose() - v * u.transpose());
}

SkewMatrix bracket(const SkewMatrix& x, const SkewMatrix& y) {
  check_same(x.dim(), y.dim());
  return SkewMatrix::skew_part(x.matrix() * y.matrix() - y.matrix() * x.matrix());
}

double killing(const SkewMatrix& x, const SkewMatrix& y) {
  check_same(x.dim(), y.dim());
  return -0.5 * (x.matrix() * y.matrix()).trace();
}

SkewMatrix adjoint(const Rotation& g, const SkewMatrix& x) {
  check_same(g.dim(), x.dim());
  return SkewMatrix::skew_part(g.matrix() * x.matrix() * g.matrix().transpose());
}

Rotation exp_so(const SkewMatrix& x) {
  Mat e = x.matrix().exp();
  // one polar Newton sweep knocks the orthogonality defect down to ~1e-16
  e = 0.5 * (e + (e.transpose().inverse()));
  return Rotation::from_matrix(e, 1e-9);
}

SkewMatrix hat(const Vec& v) {
  if (v.size() != 3) throw std::invalid_argument("hat requires a 3-vector");
  Mat m(3, 3);
  m << 0, -v(2), v(1),
       v(2), 0, -v(0),
      -v(1), v(0), 0;
  return SkewMatrix::skew_part(m);
}

Vec vee(const SkewMatrix& x) {
  if (x.dim() != 3) throw std::invalid_argument("vee requires so(3)");
  Vec v(3);
  v << x(2, 1), x(0, 2), x(1, 0);
  return v;
}

SymmetricPairSplit::SymmetricPairSplit(int n) : n_(n) {
  check_dim(n);
  auto pairs = wedge_pairs(n);
  for (int k = 0; k < static_cast<int>(pairs.size()); ++k) {
    if (pairs[k].second == n - 1)
      d_idx_.push_back(k);
    else
      k_idx_.push_back(k);
  }
}

std::pair<SkewMatrix, SkewMatrix> split(const SkewMatrix& x, const SymmetricPairSplit& pair) {
  check_same(x.dim(), pair.n());
  int n = x.dim();
  Mat k = x.matrix(), d = Mat::Zero(n, n);
  for (int i = 0; i < n - 1; ++i) {
    d(i, n - 1) = k(i, n - 1);
    d(n - 1, i) = k(n - 1, i);
    k(i, n - 1) = 0.0;
    k(n - 1, i) = 0.0;
  }
  return {SkewMatrix::skew_part(k), SkewMatrix::skew_part(d)};
}

Mat ad_matrix(const SkewMatrix& x) {
  int n = x.dim();
  int nw = wedge_dim(n);
  auto pairs = wedge_pairs(n);
  Mat a(nw, nw);
  for (int k = 0; k < nw; ++k) {
    Vec u = Vec::Unit(n, pairs[k].first), v = Vec::Unit(n, pairs[k].second);
    a.col(k) = wedge_coords(bracket(x, wedge(u, v)));
  }
  return a;
}

std::vector<SkewMatrix> centralizer_basis(const SkewMatrix& x) {
  int n = x.dim();
  Mat a = ad_matrix(x);
  Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  double tol = 1e-9 * (s.size() > 0 ? s(0) : 0.0);
  std::vector<SkewMatrix> basis;
  for (int k = 0; k < s.size(); ++k)
    if (s(k) <= tol) basis.push_back(from_wedge_coords(n, svd.matrixV().col(k)));
  return basis;
}

SkewMatrix ad_inverse(const SkewMatrix& x, const SkewMatrix& y) {
  check_same(x.dim(), y.dim());
  Mat a = ad_matrix(x);
  Vec rhs = wedge_coords(y);
  // min-norm least-squares solution is orthogonal to ker(ad_x)
  Eigen::BDCSVD<Mat> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(1e-9);
  Vec z = svd.solve(rhs);
  SkewMatrix result = from_wedge_coords(x.dim(), z);
  double residual = (bracket(x, result) - y).norm();
  if (residual > 1e-8 * std::max(1.0, y.norm()))
    throw std::runtime_error("ad_inverse: rhs outside image(ad_x), residual " +
                             std::to_string(residual));
  return result;
}

}  // namespace hessflow
