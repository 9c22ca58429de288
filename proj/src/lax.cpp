#include "hessflow/lax.hpp"

#include <cmath>
#include <stdexcept>

namespace hessflow {

namespace {

Mat embed_m(const SkewMatrix& m) {
  int n = m.dim();
  Mat out = Mat::Zero(n + 1, n + 1);
  out.topLeftCorner(n, n) = m.matrix();
  return out;
}

Mat embed_v(const Vec& v) {
  int n = static_cast<int>(v.size());
  Mat out = Mat::Zero(n + 1, n + 1);
  out.col(n).head(n) = v;
  out.row(n).head(n) = -v.transpose();
  return out;
}

LaxPolynomial commutator(const LaxPolynomial& l, const LaxPolynomial& a) {
  int deg = l.degree() + a.degree();
  int n1 = static_cast<int>(l.coeffs[0].rows());
  LaxPolynomial out;
  out.coeffs.assign(deg + 1, Mat::Zero(n1, n1));
  for (size_t i = 0; i < l.coeffs.size(); ++i)
    for (size_t j = 0; j < a.coeffs.size(); ++j)
      out.coeffs[i + j] += l.coeffs[i] * a.coeffs[j] - a.coeffs[j] * l.coeffs[i];
  return out;
}

}  // namespace

Mat LaxPolynomial::eval(double lambda) const {
  Mat out = coeffs.back();
  for (int k = degree() - 1; k >= 0; --k) out = lambda * out + coeffs[k];
  return out;
}

double LaxPolynomial::max_coeff_norm(int from_degree) const {
  double m = 0.0;
  for (int k = from_degree; k <= degree(); ++k) m = std::max(m, coeffs[k].norm());
  return m;
}

LaxPair build_lax(const EulerPoissonState& s, const InertiaOperator& a_op, double a,
                  const BodyParams& params) {
  if (a == 0.0) throw std::invalid_argument("build_lax: a must be nonzero");
  int n = s.m.dim();
  Vec r = params.rho * Vec::Unit(n, n - 1);
  double gm = params.grav_mass;
  SkewMatrix omega = a_op.apply(s.m);
  LaxPair out;
  out.l.coeffs = {embed_v(s.gamma), embed_m(s.m), (gm / a) * embed_v(r)};
  out.a.coeffs = {embed_m(omega), gm * embed_v(r)};
  return out;
}

LaxPolynomial lax_residual(const EulerPoissonState& s, const InertiaOperator& a_op, double a,
                           const BodyParams& params) {
  LaxPair pair = build_lax(s, a_op, a, params);
  EulerPoissonState sdot = vf_euler_poisson(s, a_op, params);
  int n1 = s.m.dim() + 1;
  LaxPolynomial ldot;
  ldot.coeffs = {embed_v(sdot.gamma), embed_m(sdot.m), Mat::Zero(n1, n1), Mat::Zero(n1, n1)};
  LaxPolynomial comm = commutator(pair.l, pair.a);
  LaxPolynomial out;
  out.coeffs.assign(4, Mat::Zero(n1, n1));
  for (int k = 0; k <= 3; ++k) out.coeffs[k] = ldot.coeffs[k] - comm.coeffs[k];
  return out;
}

LaxPolynomial lax_residual_fd(const EulerPoissonState& s, const InertiaOperator& a_op, double a,
                              const BodyParams& params, double h) {
  // one RK4 step forward/backward gives a centered estimate of L'
  EulerPoissonState d = vf_euler_poisson(s, a_op, params);
  auto advance = [&](double dt) {
    // second-order midpoint is plenty below the 1e-6 cross-check tolerance
    EulerPoissonState mid{s.m + (0.5 * dt) * d.m, s.gamma + 0.5 * dt * d.gamma};
    EulerPoissonState dm = vf_euler_poisson(mid, a_op, params);
    return EulerPoissonState{s.m + dt * dm.m, s.gamma + dt * dm.gamma};
  };
  LaxPair lp = build_lax(advance(h), a_op, a, params);
  LaxPair lm = build_lax(advance(-h), a_op, a, params);
  LaxPair here = build_lax(s, a_op, a, params);
  LaxPolynomial comm = commutator(here.l, here.a);
  int n1 = s.m.dim() + 1;
  LaxPolynomial out;
  out.coeffs.assign(4, Mat::Zero(n1, n1));
  for (int k = 0; k <= 2; ++k)
    out.coeffs[k] = (lp.l.coeffs[k] - lm.l.coeffs[k]) / (2.0 * h) - comm.coeffs[k];
  out.coeffs[3] = -comm.coeffs[3];
  return out;
}

double spectral_poly(const LaxPolynomial& l, double lambda, double mu) {
  Mat m = l.eval(lambda);
  int n1 = static_cast<int>(m.rows());
  return (m - mu * Mat::Identity(n1, n1)).determinant();
}

SpectralData spectral_invariants(const EulerPoissonState& s, const InertiaOperator& a_op, double a,
                                 const BodyParams& params) {
  LaxPair pair = build_lax(s, a_op, a, params);
  int n = s.m.dim();

  auto quartic_part = [&](double lambda, double mu) {
    return spectral_poly(pair.l, lambda, mu) / std::pow(-mu, n - 3);
  };
  // det/(-mu)^{n-3} = mu^4 + mu^2 P(lambda) + Q(lambda)^2; solve with mu = 1, 2
  auto pq = [&](double lambda) {
    double s1 = quartic_part(lambda, 1.0);
    double s2 = quartic_part(lambda, 2.0);
    double p = (s2 - s1 - 15.0) / 3.0;
    double q2 = s1 - 1.0 - p;
    return std::pair<double, double>{p, q2};
  };

  auto [p0, q2_0] = pq(0.0);
  auto [p1, q2_1] = pq(1.0);
  auto [p2, q2_2] = pq(2.0);
  SpectralData out{};
  out.c0 = p0;
  out.c2 = (16.0 * p1 - p2 - 15.0 * p0) / 12.0;
  out.c4 = p1 - p0 - out.c2;
  out.q = std::sqrt(std::max(0.0, q2_1));

  // residual over held-out (lambda, mu) nodes
  double scale = std::max(1.0, pair.l.max_coeff_norm());
  double res = std::abs(q2_0) / scale;
  res = std::max(res, std::abs(q2_2 - 4.0 * q2_1) / scale);
  for (double lambda : {1.5, -0.5, -1.5}) {
    double p_pred = out.c0 + out.c2 * lambda * lambda + out.c4 * std::pow(lambda, 4);
    double q_pred = out.q * lambda;
    for (double mu : {1.0, 2.0}) {
      double lhs = quartic_part(lambda, mu);
      double rhs = std::pow(mu, 4) + mu * mu * p_pred + q_pred * q_pred;
      res = std::max(res, std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)));
    }
  }
  out.fit_residual = res;
  return out;
}

}  // namespace hessflow
