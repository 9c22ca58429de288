#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hessflow/diagnostics.hpp"
#include "hessflow/dynamics.hpp"

using namespace hessflow;

namespace {

Vec cross(const Vec& a, const Vec& b) {
  Vec c(3);
  c << a(1) * b(2) - a(2) * b(1), a(2) * b(0) - a(0) * b(2), a(0) * b(1) - a(1) * b(0);
  return c;
}

// directional derivative of a scalar observable along a flat field
template <typename F, typename G>
double lie_derivative(const F& observable, const G& field, const Vec& y, double h = 1e-6) {
  Vec d = field(y);
  return (observable(y + h * d) - observable(y - h * d)) / (2.0 * h);
}

}  // namespace

TEST_CASE("physical inertia operator inverts J omega + omega J") {
  Vec jd(3);
  jd << 0.7, 1.1, 1.9;
  InertiaOperator a_op = InertiaOperator::physical(Mat(jd.asDiagonal()));
  // vector-form oracle: I = diag(j2+j3, j1+j3, j1+j2), A = I^-1
  Vec inertia(3);
  inertia << jd(1) + jd(2), jd(0) + jd(2), jd(0) + jd(1);
  Mat a_vec = Vec(inertia.cwiseInverse()).asDiagonal();
  CHECK((a_op.wedge_matrix() - vector_operator_to_wedge(a_vec)).norm() < 1e-12);

  SplitMix64 rng(31);
  for (int rep = 0; rep < 100; ++rep) {
    SkewMatrix m = from_wedge_coords(3, rng.vector(3));
    SkewMatrix omega = a_op.apply(m);
    Mat j = jd.asDiagonal();
    CHECK((j * omega.matrix() + omega.matrix() * j - m.matrix()).norm() < 1e-12);
  }
}

TEST_CASE("hess block operator satisfies the invariance condition by construction") {
  SplitMix64 rng(32);
  for (int n : {3, 4, 5, 6}) {
    SymmetricPairSplit pair(n);
    Mat a_k = Mat::Identity(pair.k_dim(), pair.k_dim()) * 2.0;
    for (int i = 0; i < pair.k_dim(); ++i) a_k(i, i) += 0.1 * i;
    Mat b(pair.k_dim(), pair.d_dim());
    for (int i = 0; i < b.rows(); ++i)
      for (int j = 0; j < b.cols(); ++j) b(i, j) = 0.1 * rng.next_double();
    InertiaOperator op = InertiaOperator::hess_block(n, a_k, b, 0.7);
    auto [holds, a] = check_ha_condition(op);
    CHECK(holds);
    CHECK(*a == doctest::Approx(0.7).epsilon(1e-12));

    Mat w = op.wedge_matrix();
    w(pair.d_indices()[0], pair.d_indices()[0]) += 0.1;
    auto [holds2, a2] = check_ha_condition(InertiaOperator::from_wedge_matrix(n, w));
    CHECK_FALSE(holds2);
  }
  CHECK_THROWS_AS(InertiaOperator::hess_block(4, Mat::Identity(3, 3), Mat::Ones(3, 3), 1e-6),
                  std::invalid_argument);
}

TEST_CASE("Euler-Poisson field reduces to the classical vector equations for n = 3") {
  SplitMix64 rng(33);
  Vec ad(3);
  ad << 0.9, 1.4, 2.2;
  Mat a_vec = ad.asDiagonal();
  InertiaOperator a_op = InertiaOperator::from_wedge_matrix(3, vector_operator_to_wedge(a_vec));
  BodyParams params{0.8, 1.3};
  Vec r = params.rho * Vec::Unit(3, 2);
  for (int rep = 0; rep < 200; ++rep) {
    Vec m = rng.vector(3), gamma = rng.vector(3);
    EulerPoissonState d = vf_euler_poisson({hat(m), gamma}, a_op, params);
    ClassicalState dc = vf_classical({m, gamma}, a_vec, r, params.grav_mass);
    CHECK((d.m - hat(dc.m)).norm() < 1e-12);
    CHECK((d.gamma - dc.gamma).norm() < 1e-12);
  }
}

TEST_CASE("chart equations agree with the Euler-Poisson field on the invariant set") {
  SplitMix64 rng(34);
  for (int n : {4, 5, 6}) {
    SymmetricPairSplit pair(n);
    Mat a_k = 2.0 * Mat::Identity(pair.k_dim(), pair.k_dim());
    Mat b(pair.k_dim(), pair.d_dim());
    for (int i = 0; i < b.rows(); ++i)
      for (int j = 0; j < b.cols(); ++j) b(i, j) = 0.3 * rng.next_double();
    double a = 0.6;
    InertiaOperator op = InertiaOperator::hess_block(n, a_k, b, a);
    BodyParams params{1.1, 0.9};
    for (int rep = 0; rep < 50; ++rep) {
      Vec m_d = rng.vector(n - 1), gamma = rng.vector(n);
      Vec mw = Vec::Zero(wedge_dim(n));
      for (int j = 0; j < n - 1; ++j) mw(pair.d_indices()[j]) = m_d(j);
      EulerPoissonState d = vf_euler_poisson({from_wedge_coords(n, mw), gamma}, op, params);
      HessChartState dc = vf_hess_coords({m_d, gamma}, b, a, params);
      Vec dmw = wedge_coords(d.m);
      for (int j = 0; j < n - 1; ++j)
        CHECK(std::abs(dmw(pair.d_indices()[j]) - dc.m_d(j)) < 1e-12);
      for (int idx : pair.k_indices()) CHECK(std::abs(dmw(idx)) < 1e-12);
      CHECK((d.gamma - dc.gamma).norm() < 1e-12);
    }
  }
}

TEST_CASE("n = 4 chart equations match the full operator on the invariant set") {
  Hess4Coeffs c{1.0, 2.0, 3.0, 0.8, 0.3, 0.2, 0.1};
  InertiaOperator op = hess4_operator(c);
  BodyParams params{1.0, 1.0};
  SplitMix64 rng(35);
  for (int rep = 0; rep < 100; ++rep) {
    Vec s = rng.vector(7);
    Vec mw = Vec::Zero(6);
    mw(wedge_index(4, 0, 3)) = s(0);
    mw(wedge_index(4, 1, 3)) = s(1);
    mw(wedge_index(4, 2, 3)) = s(2);
    EulerPoissonState d = vf_euler_poisson({from_wedge_coords(4, mw), s.tail(4)}, op, params);
    Vec dc = vf_hess4(s, c, params);
    Vec dmw = wedge_coords(d.m);
    CHECK(std::abs(dmw(wedge_index(4, 0, 3)) - dc(0)) < 1e-12);
    CHECK(std::abs(dmw(wedge_index(4, 1, 3)) - dc(1)) < 1e-12);
    CHECK(std::abs(dmw(wedge_index(4, 2, 3)) - dc(2)) < 1e-12);
    CHECK((d.gamma - dc.tail(4)).norm() < 1e-12);
    // m_k stays zero only for the gravity-free part; the bracket terms vanish
    CHECK(std::abs(dmw(wedge_index(4, 0, 1))) < 1e-12);
    CHECK(std::abs(dmw(wedge_index(4, 0, 2))) < 1e-12);
    CHECK(std::abs(dmw(wedge_index(4, 1, 2))) < 1e-12);
  }
}

TEST_CASE("n = 4 operator reproduces the example kinetic energy") {
  Hess4Coeffs c{1.0, 2.0, 3.0, 0.8, 0.3, 0.2, 0.1};
  InertiaOperator op = hess4_operator(c);
  SplitMix64 rng(36);
  for (int rep = 0; rep < 100; ++rep) {
    SkewMatrix m = from_wedge_coords(4, rng.vector(6));
    double m12 = m(0, 1), m13 = m(0, 2), m23 = m(1, 2);
    double m14 = m(0, 3), m24 = m(1, 3), m34 = m(2, 3);
    double h = 0.5 * (c.a1 * m23 * m23 + c.a2 * m13 * m13 + c.a3 * m12 * m12) +
               0.5 * c.a * (m14 * m14 + m24 * m24 + m34 * m34) +
               m12 * (c.b1 * m14 + c.b2 * m24 + c.b3 * m34);
    CHECK(std::abs(op.energy_quadratic(m) - h) < 1e-12);
  }
}

TEST_CASE("divergence of the n = 4 chart flow is b2 m14 - b1 m24") {
  SplitMix64 rng(37);
  BodyParams params{1.2, 0.7};
  for (int rep = 0; rep < 200; ++rep) {
    Hess4Coeffs c{1.0, 2.0, 3.0, 0.8, rng.next_double(), rng.next_double(), rng.next_double()};
    Vec s = rng.vector(7);
    CHECK(std::abs(divergence_hess4(s, c, params) - (c.b2 * s(0) - c.b1 * s(1))) < 1e-6);
  }
}

TEST_CASE("chart integrals are constant along the chart field") {
  SplitMix64 rng(38);
  for (int n : {4, 5}) {
    SymmetricPairSplit pair(n);
    Mat a_k = 2.0 * Mat::Identity(pair.k_dim(), pair.k_dim());
    Mat b(pair.k_dim(), pair.d_dim());
    for (int i = 0; i < b.rows(); ++i)
      for (int j = 0; j < b.cols(); ++j) b(i, j) = 0.3 * rng.next_double();
    double a = 0.6;
    BodyParams params{1.0, 1.0};
    auto field = [&](const Vec& y) {
      HessChartState d = vf_hess_coords({y.head(n - 1), y.tail(n)}, b, a, params);
      Vec out(2 * n - 1);
      out << d.m_d, d.gamma;
      return out;
    };
    for (int rep = 0; rep < 30; ++rep) {
      Vec y(2 * n - 1);
      y << rng.vector(n - 1), rng.vector(n).normalized();
      for (int k = 0; k < 3; ++k) {
        auto obs = [&](const Vec& z) {
          return integrals_hess({z.head(n - 1), z.tail(n)}, a, params)[k];
        };
        CHECK(std::abs(lie_derivative(obs, field, y)) < 1e-8);
      }
    }
  }
}

TEST_CASE("left-trivialized and reduced Euler-Poisson fields are consistent") {
  SplitMix64 rng(39);
  for (int n : {3, 4, 5}) {
    Mat j = Mat::Zero(n, n);
    for (int i = 0; i < n; ++i) j(i, i) = 1.0 + 0.3 * i;
    InertiaOperator op = InertiaOperator::physical(j);
    BodyParams params{0.9, 1.2};
    for (int rep = 0; rep < 30; ++rep) {
      Rotation g = exp_so(from_wedge_coords(n, rng.vector(wedge_dim(n))));
      SkewMatrix m = from_wedge_coords(n, rng.vector(wedge_dim(n)));
      Vec gamma = g.matrix().row(n - 1).transpose();
      FullDeriv dl = vf_full_left({g, m}, op, params);
      EulerPoissonState dr = vf_euler_poisson({m, gamma}, op, params);
      CHECK((dl.mdot - dr.m).norm() < 1e-12);
      CHECK((dl.omega - op.apply(m)).norm() < 1e-14);
    }
  }
}

TEST_CASE("space-frame field matches the transported left-trivialized one") {
  SplitMix64 rng(40);
  for (int n : {3, 4}) {
    Mat j = Mat::Zero(n, n);
    for (int i = 0; i < n; ++i) j(i, i) = 1.0 + 0.3 * i;
    InertiaOperator op = InertiaOperator::physical(j);
    BodyParams params{1.0, 1.0};
    for (int rep = 0; rep < 30; ++rep) {
      Rotation g = exp_so(from_wedge_coords(n, rng.vector(wedge_dim(n))));
      SkewMatrix m = from_wedge_coords(n, rng.vector(wedge_dim(n)));
      SkewMatrix big_m = adjoint(g, m);
      RightDeriv dr = vf_right({big_m, g}, op, params);
      FullDeriv dl = vf_full_left({g, m}, op, params);
      // chain rule: d/dt Ad_g m = Ad_g mdot + [Omega, M]
      SkewMatrix oracle = adjoint(g, dl.mdot) + bracket(dr.omega_space, big_m);
      CHECK((dr.big_mdot - oracle).norm() < 1e-11);
      CHECK((dr.omega_space - adjoint(g, dl.omega)).norm() < 1e-11);
    }
  }
}

TEST_CASE("pendulum field keeps the sphere constraint to second order") {
  SplitMix64 rng(41);
  for (int n : {3, 4, 5}) {
    Vec e = Vec::Unit(n, n - 1);
    BodyParams params{1.0, 1.0};
    for (int rep = 0; rep < 50; ++rep) {
      Vec f = rng.vector(n).normalized();
      Vec v = rng.vector(n);
      v -= v.dot(f) * f;
      PendulumState d = vf_pendulum({f, v}, 0.7, params, e);
      CHECK((d.f - v).norm() < 1e-15);
      CHECK(std::abs(f.dot(d.fdot) + v.squaredNorm()) < 1e-12);
    }
    Vec f = 2.0 * Vec::Unit(n, 0);
    CHECK_THROWS_AS(vf_pendulum({f, Vec::Zero(n)}, 0.7, params, e), std::invalid_argument);
  }
}

TEST_CASE("classical conditions produce the Hess center of mass on both branches") {
  double a1 = 1.0, a2 = 2.0, a3 = 4.0, rho = 1.3;
  for (int branch : {1, -1}) {
    Vec r = classical_conditions_r(a1, a2, a3, rho, branch);
    CHECK(std::abs(r(1)) < 1e-15);
    CHECK(std::abs(r.norm() - rho) < 1e-12);
    // r1 sqrt(a3-a2) +/- r3 sqrt(a2-a1) = 0 with the branch-matching sign
    double lhs = r(0) * std::sqrt(a3 - a2) + branch * r(2) * std::sqrt(a2 - a1);
    CHECK(std::abs(lhs) < 1e-12);
  }
  CHECK_THROWS_AS(classical_conditions_r(2.0, 1.0, 3.0, 1.0, 1), std::invalid_argument);
}

TEST_CASE("frame rotation takes the conditions into the block normal form") {
  double a1 = 1.0, a2 = 2.0, a3 = 4.0, rho = 0.9;
  Vec ad(3);
  ad << a1, a2, a3;
  for (int branch : {1, -1}) {
    Vec r = classical_conditions_r(a1, a2, a3, rho, branch);
    Mat rot = classical_frame_rotation(a1, a2, a3, branch).matrix();
    CHECK((rot * r - rho * Vec::Unit(3, 2)).norm() < 1e-12);
    Mat a_rot = rot * Mat(ad.asDiagonal()) * rot.transpose();
    auto [holds, a] =
        check_ha_condition(InertiaOperator::from_wedge_matrix(3, vector_operator_to_wedge(a_rot)));
    CHECK(holds);
    CHECK(*a == doctest::Approx(a2).epsilon(1e-12));
  }
}

TEST_CASE("classical integrals are constant along the classical field") {
  SplitMix64 rng(42);
  double a1 = 1.0, a2 = 2.0, a3 = 4.0;
  Vec ad(3);
  ad << a1, a2, a3;
  Mat a_vec = ad.asDiagonal();
  Vec r = classical_conditions_r(a1, a2, a3, 1.0, 1);
  double gm = 1.0;
  auto field = [&](const Vec& y) {
    ClassicalState d = vf_classical({y.head(3), y.tail(3)}, a_vec, r, gm);
    Vec out(6);
    out << d.m, d.gamma;
    return out;
  };
  for (int rep = 0; rep < 50; ++rep) {
    Vec y(6);
    Vec m = rng.vector(3);
    m -= m.dot(r) / r.squaredNorm() * r;
    y << m, rng.vector(3).normalized();
    for (int k = 0; k < 4; ++k) {
      auto obs = [&](const Vec& z) {
        return classical_integrals(z.head(3), z.tail(3), a_vec, r, gm)[k];
      };
      CHECK(std::abs(lie_derivative(obs, field, y)) < 1e-7);
    }
  }
}

TEST_CASE("classical field is the cross-product form of the heavy top") {
  // one fully hand-computed point
  Vec m(3), gamma(3), r(3), ad(3);
  m << 1.0, 0.0, 0.0;
  gamma << 0.0, 1.0, 0.0;
  r << 0.0, 0.0, 1.0;
  ad << 1.0, 2.0, 3.0;
  ClassicalState d = vf_classical({m, gamma}, Mat(ad.asDiagonal()), r, 2.0);
  // omega = (1,0,0); m x omega = 0; gamma x r = (1,0,0); gamma x omega = (0,0,-1)
  CHECK((d.m - 2.0 * cross(gamma, r)).norm() < 1e-15);
  CHECK((d.gamma - cross(gamma, Vec(Vec::Unit(3, 0)))).norm() < 1e-15);
}
