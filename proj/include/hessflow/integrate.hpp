#ifndef HESSFLOW_INTEGRATE_HPP
#define HESSFLOW_INTEGRATE_HPP

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hessflow/liealg.hpp"

namespace hessflow {

struct IntegratorConfig {
  enum class Method { Rk4, LieRk4 };
  Method method = Method::Rk4;
  double step = 1e-3;
  double t_end = 10.0;
  bool project_gamma = false;
  bool reorthogonalize_g = false;
  int observer_stride = 1;

  void validate() const {
    if (step <= 0.0) throw std::invalid_argument("step must be positive");
    if (t_end < 0.0) throw std::invalid_argument("t_end must be nonnegative");
    if (observer_stride < 1) throw std::invalid_argument("observer_stride must be >= 1");
  }
};

/// Thrown when a state stops being finite; carries the failing time.
struct BlowupError : std::runtime_error {
  explicit BlowupError(double when)
      : std::runtime_error("non-finite state at t = " + std::to_string(when)), t(when) {}
  double t;
};

using FlatField = std::function<Vec(const Vec&)>;

Vec rk4_step(const FlatField& field, const Vec& y, double h);

/// Side of the trivialization for the group component:
/// Body means g' = g * omega (left-trivialized, body velocity),
/// Space means g' = omega * g (right-trivialized, spatial velocity).
enum class Trivialization { Body, Space };

struct LieState {
  Rotation g;
  Vec v;
};
struct LieDeriv {
  SkewMatrix omega;
  Vec vdot;
};
using LieField = std::function<LieDeriv(const LieState&)>;

/// Runge-Kutta-Munthe-Kaas order-4 step: the group component moves by a
/// single exponential of a dexpinv-corrected stage combination, the vector
/// component by classical RK4.
LieState lie_rk4_step(const LieField& field, const LieState& y, double h,
                      Trivialization side = Trivialization::Body);

struct Trajectory {
  std::vector<double> times;
  std::vector<Vec> states;
};
struct LieTrajectory {
  std::vector<double> times;
  std::vector<LieState> states;
};

using Observer = std::pair<std::string, std::function<double(const Vec&)>>;
using LieObserver = std::pair<std::string, std::function<double(const LieState&)>>;

struct ObserverSeries {
  std::vector<std::string> names;
  std::vector<std::vector<double>> values;  // one row per sample
};

struct IntegrationResult {
  Trajectory traj;
  ObserverSeries observers;
};
struct LieIntegrationResult {
  LieTrajectory traj;
  ObserverSeries observers;
};

/// Fixed-step loop; samples every observer_stride steps (plus the initial
/// state). `post_step`, when set, is applied after every step (used for the
/// optional gamma renormalization).
IntegrationResult integrate(const FlatField& field, const Vec& y0, const IntegratorConfig& config,
                            const std::vector<Observer>& observers = {},
                            const std::function<Vec(const Vec&)>& post_step = nullptr);

LieIntegrationResult integrate_lie(const LieField& field, const LieState& y0,
                                   const IntegratorConfig& config,
                                   const std::vector<LieObserver>& observers = {},
                                   Trivialization side = Trivialization::Body);

}  // namespace hessflow

#endif
