#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hessflow/diagnostics.hpp"

using namespace hessflow;

namespace {

FlatField harmonic() {
  return [](const Vec& y) {
    Vec d(2);
    d << y(1), -y(0);
    return d;
  };
}

InertiaOperator block_op(int n) {
  SymmetricPairSplit pair(n);
  Mat a_k = 2.0 * Mat::Identity(pair.k_dim(), pair.k_dim());
  for (int i = 0; i < pair.k_dim(); ++i) a_k(i, i) += 0.2 * i;
  Mat b(pair.k_dim(), pair.d_dim());
  for (int i = 0; i < b.rows(); ++i)
    for (int j = 0; j < b.cols(); ++j) b(i, j) = 0.1 / (1.0 + i + j);
  return InertiaOperator::hess_block(n, a_k, b, 0.7);
}

SkewMatrix invariant_m(int n, SplitMix64& rng) {
  SymmetricPairSplit pair(n);
  Vec mw = Vec::Zero(wedge_dim(n));
  for (int idx : pair.d_indices()) mw(idx) = 0.5 * rng.next_double();
  return from_wedge_coords(n, mw);
}

}  // namespace

TEST_CASE("conservation suite reports drift against per-observer tolerances") {
  IntegratorConfig cfg;
  cfg.step = 1e-3;
  cfg.t_end = 2.0;
  cfg.observer_stride = 10;
  Vec y0(2);
  y0 << 1.0, 0.0;
  std::vector<NamedObserver> obs = {
      {"energy", [](const Vec& y) { return 0.5 * y.squaredNorm(); }, 1e-10},
      {"q", [](const Vec& y) { return y(0); }, 1e-10}};
  ConservationReport rep = conservation_suite(harmonic(), y0, obs, cfg);
  REQUIRE(rep.rows.size() == 2);
  CHECK(rep.rows[0].pass);
  CHECK(rep.rows[0].max_drift < 1e-12);
  CHECK_FALSE(rep.rows[1].pass);
  CHECK(rep.rows[1].max_drift > 0.5);
  CHECK(rep.rows[1].time_of_max > 0.0);
  CHECK_FALSE(rep.all_pass());
  CHECK(rep.table().find("energy") != std::string::npos);
}

TEST_CASE("invariance drift tracks the norm of a vector relation") {
  IntegratorConfig cfg;
  cfg.step = 1e-3;
  cfg.t_end = 2.0;
  cfg.observer_stride = 10;
  Vec y0(2);
  y0 << 1.0, 0.0;
  auto conserved = [](const Vec& y) { return Vec((y.squaredNorm() - 1.0) * Vec::Ones(1)); };
  CHECK(invariance_drift(harmonic(), y0, conserved, 1e-10, cfg).all_pass());
  auto moving = [](const Vec& y) { return Vec(y.tail(1)); };
  CHECK_FALSE(invariance_drift(harmonic(), y0, moving, 1e-6, cfg).all_pass());
}

TEST_CASE("full flow on the invariant set tracks the spherical pendulum") {
  SplitMix64 rng(91);
  IntegratorConfig cfg;
  cfg.step = 1e-3;
  cfg.t_end = 3.0;
  cfg.observer_stride = 20;
  for (int n : {4, 5}) {
    InertiaOperator op = block_op(n);
    Rotation g = exp_so(from_wedge_coords(n, 0.4 * rng.vector(wedge_dim(n))));
    FullState s0{g, invariant_m(n, rng)};
    ComparisonReport rep = reduction_compare_pendulum(s0, op, BodyParams{1.1, 0.9}, cfg);
    CHECK(rep.sup_distance < 1e-6);
  }
}

TEST_CASE("the pendulum comparison fails off the invariant set") {
  SplitMix64 rng(92);
  int n = 4;
  InertiaOperator op = block_op(n);
  Rotation g = exp_so(from_wedge_coords(n, 0.4 * rng.vector(6)));
  Vec mw = wedge_coords(invariant_m(n, rng));
  mw(SymmetricPairSplit(n).k_indices()[0]) = 0.6;
  IntegratorConfig cfg;
  cfg.step = 1e-3;
  cfg.t_end = 3.0;
  cfg.observer_stride = 20;
  ComparisonReport rep =
      reduction_compare_pendulum({g, from_wedge_coords(n, mw)}, op, BodyParams{1.1, 0.9}, cfg);
  CHECK(rep.sup_distance > 1e-2);
}

TEST_CASE("projected so(4) x so(4) flow tracks the grassmannian equations") {
  SplitMix64 rng(93);
  DG4Params params;
  IntegratorConfig cfg;
  cfg.step = 1e-3;
  cfg.t_end = 3.0;
  cfg.observer_stride = 20;
  Vec mw = 0.5 * rng.vector(6);
  mw(wedge_index(4, 0, 1)) = mw(wedge_index(4, 2, 3)) = 0.0;
  Rotation g = exp_so(from_wedge_coords(4, 0.4 * rng.vector(6)));
  ComparisonReport rep =
      reduction_compare_grassmann({g, from_wedge_coords(4, mw)}, params, cfg);
  CHECK(rep.sup_distance < 1e-6);
  CHECK(rep.times.size() == rep.distances.size());
}

TEST_CASE("measure verdict follows the b coefficients of the chart flow") {
  BodyParams params{1.3, 0.8};
  MeasureVerdict ok = measure_test({1.0, 2.0, 3.0, 0.8, 0.0, 0.0, 0.4}, params, 500, 7);
  CHECK(ok.measure_preserving);
  CHECK(ok.max_divergence < 1e-6);

  MeasureVerdict bad = measure_test({1.0, 2.0, 3.0, 0.8, 0.5, 0.0, 0.0}, params, 500, 7);
  CHECK_FALSE(bad.measure_preserving);
  CHECK(bad.max_divergence > 1e-2);
  REQUIRE(bad.witness.size() == 7);
  // the witness actually exhibits the reported divergence
  CHECK(std::abs(std::abs(divergence_hess4(bad.witness, {1.0, 2.0, 3.0, 0.8, 0.5, 0.0, 0.0},
                                           params)) -
                 bad.max_divergence) < 1e-6);
}

TEST_CASE("metric perturbations shift the fiber phase but not the reduced motion") {
  SplitMix64 rng(94);
  Vec c = Vec::Zero(6);
  c(wedge_index(4, 0, 1)) = 1.0;
  c(wedge_index(4, 2, 3)) = 0.5;
  SkewMatrix a = from_wedge_coords(4, c);
  SectionalOperator s(a, 0.7 * a, 0.3 * Mat::Identity(2, 2));
  PerturbationDelta delta{0.05 * Mat::Ones(2, 4), 0.1 * Mat::Identity(2, 2)};
  SkewMatrix xi0 = s.project_d(from_wedge_coords(4, rng.vector(6)));
  IntegratorConfig cfg;
  cfg.step = 1e-3;
  cfg.t_end = 5.0;
  cfg.observer_stride = 20;
  PhaseCompareReport rep = local_phase_compare(s, delta, xi0, cfg);
  CHECK(rep.max_qp_distance < 1e-6);
  CHECK(rep.max_reduced_residual < 1e-6);
  CHECK(rep.max_phase_discrepancy > 1e-3);
}

TEST_CASE("seeded generator is deterministic and bounded") {
  SplitMix64 r1(123), r2(123), r3(124);
  bool differs = false;
  for (int k = 0; k < 1000; ++k) {
    double a = r1.next_double(), b = r2.next_double(), c = r3.next_double();
    CHECK(a == b);
    if (a != c) differs = true;
    CHECK(a >= -1.0);
    CHECK(a < 1.0);
  }
  CHECK(differs);
  CHECK(SplitMix64(5).vector(4).size() == 4);
  CHECK((SplitMix64(5).vector(4) - SplitMix64(5).vector(4)).norm() == 0.0);
}
