#include "hessflow/integrate.hpp"

#include <cmath>

namespace hessflow {

Vec rk4_step(const FlatField& field, const Vec& y, double h) {
  Vec k1 = field(y);
  Vec k2 = field(y + 0.5 * h * k1);
  Vec k3 = field(y + 0.5 * h * k2);
  Vec k4 = field(y + h * k3);
  return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

namespace {

// u' = dexpinv_{-u}(omega) for g' = g omega, u' = dexpinv_u(omega) for
// g' = omega g; truncation to two commutator terms suffices for order 4.
SkewMatrix dexpinv(const SkewMatrix& u, const SkewMatrix& omega, Trivialization side) {
  double sign = (side == Trivialization::Body) ? 1.0 : -1.0;
  SkewMatrix c1 = bracket(u, omega);
  SkewMatrix c2 = bracket(u, c1);
  return omega + (sign * 0.5) * c1 + (1.0 / 12.0) * c2;
}

Rotation advance(const Rotation& g, const SkewMatrix& u, Trivialization side) {
  Rotation e = exp_so(u);
  return (side == Trivialization::Body) ? g * e : e * g;
}

}  // namespace

LieState lie_rk4_step(const LieField& field, const LieState& y, double h, Trivialization side) {
  int n = y.g.dim();
  SkewMatrix zero(n);

  auto eval = [&](const SkewMatrix& u, const Vec& v) -> LieDeriv {
    LieDeriv d = field({advance(y.g, u, side), v});
    return {dexpinv(u, d.omega, side), d.vdot};
  };

  LieDeriv k1 = eval(zero, y.v);
  LieDeriv k2 = eval(0.5 * h * k1.omega, y.v + 0.5 * h * k1.vdot);
  LieDeriv k3 = eval(0.5 * h * k2.omega, y.v + 0.5 * h * k2.vdot);
  LieDeriv k4 = eval(h * k3.omega, y.v + h * k3.vdot);

  SkewMatrix u = (h / 6.0) * (k1.omega + 2.0 * k2.omega + 2.0 * k3.omega + k4.omega);
  Vec v = y.v + (h / 6.0) * (k1.vdot + 2.0 * k2.vdot + 2.0 * k3.vdot + k4.vdot);
  // a polar Newton sweep on the composed factor stops the orthogonality
  // defect from random-walking over long runs
  Mat g1 = advance(y.g, u, side).matrix();
  g1 = 0.5 * (g1 + g1.transpose().inverse());
  return {Rotation::from_matrix(g1, 1e-9), v};
}

IntegrationResult integrate(const FlatField& field, const Vec& y0, const IntegratorConfig& config,
                            const std::vector<Observer>& observers,
                            const std::function<Vec(const Vec&)>& post_step) {
  config.validate();
  IntegrationResult out;
  for (const auto& ob : observers) out.observers.names.push_back(ob.first);

  auto record = [&](double t, const Vec& y) {
    out.traj.times.push_back(t);
    out.traj.states.push_back(y);
    std::vector<double> row;
    row.reserve(observers.size());
    for (const auto& ob : observers) row.push_back(ob.second(y));
    out.observers.values.push_back(std::move(row));
  };

  long nsteps = std::lround(config.t_end / config.step);
  Vec y = y0;
  record(0.0, y);
  for (long k = 1; k <= nsteps; ++k) {
    y = rk4_step(field, y, config.step);
    if (post_step) y = post_step(y);
    if (!y.allFinite()) throw BlowupError(k * config.step);
    if (k % config.observer_stride == 0 || k == nsteps) record(k * config.step, y);
  }
  return out;
}

LieIntegrationResult integrate_lie(const LieField& field, const LieState& y0,
                                   const IntegratorConfig& config,
                                   const std::vector<LieObserver>& observers,
                                   Trivialization side) {
  config.validate();
  LieIntegrationResult out;
  for (const auto& ob : observers) out.observers.names.push_back(ob.first);

  auto record = [&](double t, const LieState& y) {
    out.traj.times.push_back(t);
    out.traj.states.push_back(y);
    std::vector<double> row;
    row.reserve(observers.size());
    for (const auto& ob : observers) row.push_back(ob.second(y));
    out.observers.values.push_back(std::move(row));
  };

  long nsteps = std::lround(config.t_end / config.step);
  LieState y = y0;
  record(0.0, y);
  for (long k = 1; k <= nsteps; ++k) {
    y = lie_rk4_step(field, y, config.step, side);
    if (config.reorthogonalize_g) y.g = y.g.reorthogonalized();
    if (!y.v.allFinite() || !y.g.matrix().allFinite()) throw BlowupError(k * config.step);
    if (k % config.observer_stride == 0 || k == nsteps) record(k * config.step, y);
  }
  return out;
}

}  // namespace hessflow
