#ifndef HESSFLOW_DIAGNOSTICS_HPP
#define HESSFLOW_DIAGNOSTICS_HPP

#include <functional>
#include <string>
#include <vector>

#include "hessflow/dynamics.hpp"
#include "hessflow/geodesic.hpp"
#include "hessflow/integrate.hpp"

namespace hessflow {

struct ObserverRow {
  std::string name;
  double initial = 0.0;
  double max_drift = 0.0;
  double time_of_max = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct ConservationReport {
  std::vector<ObserverRow> rows;
  bool all_pass() const;
  std::string table() const;
};

struct ComparisonReport {
  double sup_distance = 0.0;
  double time_of_max = 0.0;
  std::vector<double> times;
  std::vector<double> distances;
};

struct NamedObserver {
  std::string name;
  std::function<double(const Vec&)> fn;
  double tolerance;
};

/// Integrates `field` and reports per-observer |value(t) - value(0)| drift
/// against the declared tolerances.
ConservationReport conservation_suite(const FlatField& field, const Vec& y0,
                                      const std::vector<NamedObserver>& observers,
                                      const IntegratorConfig& config);

/// Max ||relation(state(t))|| along the flow; relation(y0) should be ~0.
ConservationReport invariance_drift(const FlatField& field, const Vec& y0,
                                    const std::function<Vec(const Vec&)>& relation,
                                    double tolerance, const IntegratorConfig& config);

/// Theorem comparison: right-trivialized full Hess-Appel'rot flow vs the
/// spherical pendulum, sup ||F_n(t) - F(t)||.
ComparisonReport reduction_compare_pendulum(const FullState& full0, const InertiaOperator& a_op,
                                            const BodyParams& params,
                                            const IntegratorConfig& config);

/// Theorem comparison: Psi-projected full so(4)xso(4) flow vs the reduced
/// Grassmannian flow, sup distance in x.
ComparisonReport reduction_compare_grassmann(const FullState& full0, const DG4Params& params,
                                             const IntegratorConfig& config);

struct MeasureVerdict {
  bool measure_preserving = true;
  double max_divergence = 0.0;
  Vec witness;
};

/// Samples divergence_hess4 on seeded random states; verdict holds iff all
/// |divergence| <= tol.
MeasureVerdict measure_test(const Hess4Coeffs& coeffs, const BodyParams& params, int samples,
                            unsigned long long seed, double tol = 1e-6);

struct PhaseCompareReport {
  double max_qp_distance = 0.0;       // reduced (x, p) disagreement
  double max_phase_discrepancy = 0.0; // fiber mismatch ||g_c^T g_b - Id||
  double max_reduced_residual = 0.0;  // projected vs directly reduced flow
};

/// Integrates the unperturbed and perturbed geodesic flows from the same
/// zero-momentum data and compares reduced projections and group phases.
PhaseCompareReport local_phase_compare(const SectionalOperator& s, const PerturbationDelta& delta,
                                       const SkewMatrix& xi0, const IntegratorConfig& config);

// deterministic 64-bit generator for seeded random states
struct SplitMix64 {
  unsigned long long state;
  explicit SplitMix64(unsigned long long seed) : state(seed) {}
  unsigned long long next_u64();
  /// uniform in [-1, 1)
  double next_double();
  Vec vector(int size);
};

}  // namespace hessflow

#endif
