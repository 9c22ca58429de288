#include "hessflow/diagnostics.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace hessflow {

bool ConservationReport::all_pass() const {
  for (const auto& r : rows)
    if (!r.pass) return false;
  return true;
}

std::string ConservationReport::table() const {
  std::string out = "observer            initial        max|drift|     t_max    verdict\n";
  char buf[160];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%-18s %+.8e %.8e %8.3f  %s\n", r.name.c_str(), r.initial,
                  r.max_drift, r.time_of_max, r.pass ? "pass" : "FAIL");
    out += buf;
  }
  return out;
}

ConservationReport conservation_suite(const FlatField& field, const Vec& y0,
                                      const std::vector<NamedObserver>& observers,
                                      const IntegratorConfig& config) {
  std::vector<Observer> obs;
  for (const auto& o : observers) obs.emplace_back(o.name, o.fn);
  IntegrationResult res = integrate(field, y0, config, obs);

  ConservationReport report;
  for (size_t j = 0; j < observers.size(); ++j) {
    ObserverRow row;
    row.name = observers[j].name;
    row.tolerance = observers[j].tolerance;
    row.initial = res.observers.values.front()[j];
    for (size_t i = 0; i < res.observers.values.size(); ++i) {
      double d = std::abs(res.observers.values[i][j] - row.initial);
      if (d > row.max_drift) {
        row.max_drift = d;
        row.time_of_max = res.traj.times[i];
      }
    }
    row.pass = row.max_drift <= row.tolerance;
    report.rows.push_back(row);
  }
  return report;
}

ConservationReport invariance_drift(const FlatField& field, const Vec& y0,
                                    const std::function<Vec(const Vec&)>& relation,
                                    double tolerance, const IntegratorConfig& config) {
  IntegrationResult res = integrate(field, y0, config);
  ObserverRow row;
  row.name = "invariant-relation";
  row.tolerance = tolerance;
  row.initial = relation(y0).norm();
  for (size_t i = 0; i < res.traj.states.size(); ++i) {
    double d = relation(res.traj.states[i]).norm();
    if (d > row.max_drift) {
      row.max_drift = d;
      row.time_of_max = res.traj.times[i];
    }
  }
  row.pass = row.max_drift <= tolerance;
  ConservationReport report;
  report.rows.push_back(row);
  return report;
}

ComparisonReport reduction_compare_pendulum(const FullState& full0, const InertiaOperator& a_op,
                                            const BodyParams& params,
                                            const IntegratorConfig& config) {
  int n = full0.m.dim();
  auto [holds, a_opt] = check_ha_condition(a_op);
  if (!holds) throw std::invalid_argument("operator does not satisfy the invariance condition");
  double a = *a_opt;

  // right-trivialized flow, spatial angular momentum in the vector slot
  SkewMatrix m0_space = adjoint(full0.g, full0.m);
  LieField right_field = [&](const LieState& y) -> LieDeriv {
    RightState s{from_wedge_coords(n, y.v), y.g};
    RightDeriv d = vf_right(s, a_op, params);
    return {d.omega_space, wedge_coords(d.big_mdot)};
  };
  LieIntegrationResult full =
      integrate_lie(right_field, {full0.g, wedge_coords(m0_space)}, config, {},
                    Trivialization::Space);

  // pendulum data: F = F_n(0), F' = Omega F_n = a M F_n
  Vec f0 = full0.g.matrix().col(n - 1);
  Vec fdot0 = a * (m0_space.matrix() * f0);
  FlatField pend_field = [&, n](const Vec& y) {
    PendulumState s{y.head(n), y.tail(n)};
    PendulumState d = vf_pendulum(s, a, params, Vec::Unit(n, n - 1));
    Vec out(2 * n);
    out << d.f, d.fdot;
    return out;
  };
  Vec y0(2 * n);
  y0 << f0, fdot0;
  IntegrationResult pend = integrate(pend_field, y0, config);

  ComparisonReport report;
  for (size_t i = 0; i < full.traj.states.size(); ++i) {
    Vec fn_full = full.traj.states[i].g.matrix().col(n - 1);
    Vec fn_pend = pend.traj.states[i].head(n);
    double d = (fn_full - fn_pend).norm();
    report.times.push_back(full.traj.times[i]);
    report.distances.push_back(d);
    if (d > report.sup_distance) {
      report.sup_distance = d;
      report.time_of_max = full.traj.times[i];
    }
  }
  return report;
}

ComparisonReport reduction_compare_grassmann(const FullState& full0, const DG4Params& params,
                                             const IntegratorConfig& config) {
  LieField full_field = [&](const LieState& y) -> LieDeriv {
    FullState s{y.g, from_wedge_coords(4, y.v)};
    DG4FullDeriv d = vf_dg4_full(s, params);
    return {d.omega, wedge_coords(d.mdot)};
  };
  LieIntegrationResult full =
      integrate_lie(full_field, {full0.g, wedge_coords(full0.m)}, config);

  OrbitPoint pt0 = dg4_project(full0, params);
  FlatField red_field = [&](const Vec& y) {
    OrbitPoint pt{from_wedge_coords(4, y.head(6)), from_wedge_coords(4, y.tail(6))};
    OrbitPoint d = vf_grassmann(pt, params);
    Vec out(12);
    out << wedge_coords(d.x), wedge_coords(d.p);
    return out;
  };
  Vec y0(12);
  y0 << wedge_coords(pt0.x), wedge_coords(pt0.p);
  IntegrationResult red = integrate(red_field, y0, config);

  ComparisonReport report;
  for (size_t i = 0; i < full.traj.states.size(); ++i) {
    FullState s{full.traj.states[i].g, from_wedge_coords(4, full.traj.states[i].v)};
    SkewMatrix x_full = adjoint(s.g, params.a_mat());
    SkewMatrix x_red = from_wedge_coords(4, red.traj.states[i].head(6));
    double d = (x_full - x_red).norm();
    report.times.push_back(full.traj.times[i]);
    report.distances.push_back(d);
    if (d > report.sup_distance) {
      report.sup_distance = d;
      report.time_of_max = full.traj.times[i];
    }
  }
  return report;
}

MeasureVerdict measure_test(const Hess4Coeffs& coeffs, const BodyParams& params, int samples,
                            unsigned long long seed, double tol) {
  SplitMix64 rng(seed);
  MeasureVerdict verdict;
  verdict.witness = Vec::Zero(7);
  for (int k = 0; k < samples; ++k) {
    Vec s = rng.vector(7);
    double div = divergence_hess4(s, coeffs, params);
    if (std::abs(div) > verdict.max_divergence) {
      verdict.max_divergence = std::abs(div);
      verdict.witness = s;
    }
  }
  verdict.measure_preserving = verdict.max_divergence <= tol;
  return verdict;
}

PhaseCompareReport local_phase_compare(const SectionalOperator& s, const PerturbationDelta& delta,
                                       const SkewMatrix& xi0, const IntegratorConfig& config) {
  int n = s.n();
  double kappa = s.kappa();
  SkewMatrix xi0_d = s.project_d(xi0);  // zero-momentum level

  auto flow = [&](const InertiaOperator& metric) {
    LieField field = [&metric, n](const LieState& y) -> LieDeriv {
      GeodesicDeriv d = vf_geodesic(from_wedge_coords(n, y.v), metric);
      return {d.omega, wedge_coords(d.xidot)};
    };
    return integrate_lie(field, {Rotation::identity(n), wedge_coords(xi0_d)}, config);
  };
  LieIntegrationResult base = flow(s.as_operator());
  LieIntegrationResult pert = flow(perturbed_operator(s, delta));

  OrbitPoint pt0 = orbit_projection(Rotation::identity(n), xi0_d, s);
  FlatField red_field = [&](const Vec& y) {
    int nw = wedge_dim(n);
    OrbitPoint pt{from_wedge_coords(n, y.head(nw)), from_wedge_coords(n, y.tail(nw))};
    OrbitPoint d = vf_orbit(pt, kappa);
    Vec out(2 * nw);
    out << wedge_coords(d.x), wedge_coords(d.p);
    return out;
  };
  Vec y0(2 * wedge_dim(n));
  y0 << wedge_coords(pt0.x), wedge_coords(pt0.p);
  IntegrationResult red = integrate(red_field, y0, config);

  PhaseCompareReport report;
  int nw = wedge_dim(n);
  for (size_t i = 0; i < base.traj.states.size(); ++i) {
    const LieState& yb = base.traj.states[i];
    const LieState& yc = pert.traj.states[i];
    OrbitPoint pb = orbit_projection(yb.g, from_wedge_coords(n, yb.v), s);
    OrbitPoint pc = orbit_projection(yc.g, from_wedge_coords(n, yc.v), s);
    double qp = std::hypot((pb.x - pc.x).norm(), (pb.p - pc.p).norm());
    report.max_qp_distance = std::max(report.max_qp_distance, qp);

    Mat fiber = yc.g.matrix().transpose() * yb.g.matrix();
    report.max_phase_discrepancy =
        std::max(report.max_phase_discrepancy, (fiber - Mat::Identity(n, n)).norm());

    SkewMatrix xr = from_wedge_coords(n, red.traj.states[i].head(nw));
    SkewMatrix pr = from_wedge_coords(n, red.traj.states[i].tail(nw));
    double resid = std::hypot((pb.x - xr).norm(), (pb.p - pr).norm());
    report.max_reduced_residual = std::max(report.max_reduced_residual, resid);
  }
  return report;
}

unsigned long long SplitMix64::next_u64() {
  unsigned long long z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

double SplitMix64::next_double() {
  return 2.0 * (static_cast<double>(next_u64() >> 11) * 0x1.0p-53) - 1.0;
}

Vec SplitMix64::vector(int size) {
  Vec v(size);
  for (int i = 0; i < size; ++i) v(i) = next_double();
  return v;
}

}  // namespace hessflow
