#ifndef HESSFLOW_LIEALG_HPP
#define HESSFLOW_LIEALG_HPP

#include <Eigen/Dense>
#include <utility>
#include <vector>

namespace hessflow {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

constexpr int kMaxDim = 16;

/// Element of so(n), kept exactly skew-symmetric.
class SkewMatrix {
public:
  explicit SkewMatrix(int n);
  /// Builds from a raw matrix; the input must be skew to `tol`, the stored
  /// value is the exact skew part (X - X^T)/2.
  static SkewMatrix from_matrix(const Mat& x, double tol = 1e-10);
  /// Trusted constructor for internal arithmetic (no tolerance check).
  static SkewMatrix skew_part(const Mat& x);

  int dim() const { return static_cast<int>(m_.rows()); }
  const Mat& matrix() const { return m_; }
  double operator()(int i, int j) const { return m_(i, j); }
  double norm() const { return m_.norm(); }

  SkewMatrix operator+(const SkewMatrix& o) const { return SkewMatrix(m_ + o.m_, 0); }
  SkewMatrix operator-(const SkewMatrix& o) const { return SkewMatrix(m_ - o.m_, 0); }
  SkewMatrix operator-() const { return SkewMatrix(-m_, 0); }
  SkewMatrix operator*(double s) const { return SkewMatrix(m_ * s, 0); }
  friend SkewMatrix operator*(double s, const SkewMatrix& x) { return x * s; }

private:
  SkewMatrix(Mat m, int) : m_(std::move(m)) {}
  Mat m_;
};

/// Element of SO(n).
class Rotation {
public:
  explicit Rotation(int n);  // identity
  static Rotation from_matrix(const Mat& g, double tol = 1e-10);
  static Rotation identity(int n) { return Rotation(n); }

  int dim() const { return static_cast<int>(g_.rows()); }
  const Mat& matrix() const { return g_; }
  double orthogonality_defect() const;
  /// Nearest orthogonal matrix (polar projection via SVD).
  Rotation reorthogonalized() const;

  Rotation operator*(const Rotation& o) const { return Rotation(g_ * o.g_, 0); }
  Vec operator*(const Vec& v) const { return g_ * v; }

private:
  Rotation(Mat g, int) : g_(std::move(g)) {}
  Mat g_;
};

// Ordered wedge basis {f_i ^ f_j}, i < j, lexicographic. Coordinates in this
// basis are Killing-orthonormal: <X, f_i^f_j> = X(i,j).
std::vector<std::pair<int, int>> wedge_pairs(int n);
int wedge_dim(int n);
int wedge_index(int n, int i, int j);   // i < j
Vec wedge_coords(const SkewMatrix& x);
SkewMatrix from_wedge_coords(int n, const Vec& c);

/// u ^ v := u v^T - v u^T.
SkewMatrix wedge(const Vec& u, const Vec& v);
/// [X, Y] = XY - YX.
SkewMatrix bracket(const SkewMatrix& x, const SkewMatrix& y);
/// Killing metric <X, Y> = -1/2 tr(XY).
double killing(const SkewMatrix& x, const SkewMatrix& y);
/// Ad_g X = g X g^T.
SkewMatrix adjoint(const Rotation& g, const SkewMatrix& x);
/// Matrix exponential; result orthogonal to ~1e-12.
Rotation exp_so(const SkewMatrix& x);

/// n = 3 identification of (R^3, x) with (so(3), [.,.]):
/// hat(a) b = a x b, bracket(hat a, hat b) = hat(a x b).
SkewMatrix hat(const Vec& v);
Vec vee(const SkewMatrix& x);

/// Symmetric pair so(n) = k + d with k = so(n-1) (pairs i<j<=n-2, 0-based)
/// and d = span{f_i ^ f_{n-1}}.
class SymmetricPairSplit {
public:
  explicit SymmetricPairSplit(int n);
  int n() const { return n_; }
  const std::vector<int>& k_indices() const { return k_idx_; }
  const std::vector<int>& d_indices() const { return d_idx_; }
  int k_dim() const { return static_cast<int>(k_idx_.size()); }
  int d_dim() const { return static_cast<int>(d_idx_.size()); }

private:
  int n_;
  std::vector<int> k_idx_, d_idx_;
};

/// X = X_k + X_d, the Killing-orthogonal projections onto the pair.
std::pair<SkewMatrix, SkewMatrix> split(const SkewMatrix& x, const SymmetricPairSplit& pair);

/// Orthonormal (Killing) basis of ker(ad_x) = {xi : [x, xi] = 0}.
/// Rank decisions use SVD with relative tolerance 1e-9.
std::vector<SkewMatrix> centralizer_basis(const SkewMatrix& x);

/// Matrix of Y |-> [x, Y] in the wedge basis.
Mat ad_matrix(const SkewMatrix& x);

/// Solves [x, Z] = Y for the unique Z orthogonal to ker(ad_x).
/// Throws if the residual ||[x,Z] - Y|| exceeds 1e-8 * max(1, ||Y||).
SkewMatrix ad_inverse(const SkewMatrix& x, const SkewMatrix& y);

}  // namespace hessflow

#endif
