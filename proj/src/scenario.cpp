#include "hessflow/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <sstream>

#include "hessflow/lax.hpp"

namespace hessflow {

namespace {

const std::vector<std::string> kSystems = {
    "classical-ha", "ndim-ha",    "hess4", "lagrange4", "pendulum", "euler-poisson-generic",
    "geodesic-b",   "geodesic-c", "orbit", "dg4-full",  "dg4-grassmann"};

double jnum(const Json& section, const std::string& prefix, const std::string& key) {
  if (!section.contains(key) || !section.at(key).is_number())
    throw ConfigError("missing or non-numeric key: " + prefix + "." + key);
  return section.at(key).get<double>();
}

double jnum_or(const Json& section, const std::string& key, double fallback) {
  if (!section.contains(key)) return fallback;
  return section.at(key).get<double>();
}

Mat jmatrix(const Json& j, const std::string& where) {
  if (!j.is_array() || j.empty() || !j.front().is_array())
    throw ConfigError(where + ": expected a row-major nested array");
  int rows = static_cast<int>(j.size());
  int cols = static_cast<int>(j.front().size());
  Mat m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    if (static_cast<int>(j[i].size()) != cols) throw ConfigError(where + ": ragged matrix");
    for (int k = 0; k < cols; ++k) m(i, k) = j[i][k].get<double>();
  }
  return m;
}

Vec jvector(const Json& j, const std::string& where) {
  if (!j.is_array()) throw ConfigError(where + ": expected an array");
  Vec v(static_cast<int>(j.size()));
  for (int i = 0; i < v.size(); ++i) v(i) = j[i].get<double>();
  return v;
}

void deep_merge(Json& base, const Json& user) {
  for (auto it = user.begin(); it != user.end(); ++it) {
    if (it->is_object() && base.contains(it.key()) && base.at(it.key()).is_object())
      deep_merge(base.at(it.key()), *it);
    else
      base[it.key()] = *it;
  }
}

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string fnv1a_hex(const std::string& bytes) {
  unsigned long long h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx", h);
  return buf;
}

IntegratorConfig integrator_config(const Scenario& sc) {
  const Json& j = sc.config.at("integrator");
  std::string method = j.value("method", "rk4");
  if (method != "rk4") throw ConfigError("integrator.method: only \"rk4\" is supported here");
  IntegratorConfig cfg;
  cfg.step = jnum(j, "integrator", "step");
  cfg.t_end = jnum(j, "integrator", "t_end");
  cfg.observer_stride = static_cast<int>(jnum_or(j, "observer_stride", 10));
  cfg.project_gamma = j.value("project_gamma", false);
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("integrator: ") + e.what());
  }
  return cfg;
}

BodyParams body_params(const Scenario& sc) {
  const Json& j = sc.config.at("params");
  return {jnum(j, "params", "rho"), jnum(j, "params", "grav_mass")};
}

std::vector<std::string> wedge_names(int n, const std::string& prefix) {
  std::vector<std::string> names;
  for (auto [i, j] : wedge_pairs(n))
    names.push_back(prefix + std::to_string(i + 1) + std::to_string(j + 1));
  return names;
}

Vec explicit_or(const Scenario& sc, int expected, const std::function<Vec(SplitMix64&)>& draw) {
  const Json& init = sc.config.at("initial");
  if (init.contains("state")) {
    Vec y = jvector(init.at("state"), "initial.state");
    if (y.size() != expected)
      throw ConfigError("initial.state: expected " + std::to_string(expected) + " coordinates");
    return y;
  }
  SplitMix64 rng(sc.seed);
  return draw(rng);
}

// ---- operator builders shared between runs and check suites ----

Hess4Coeffs hess4_coeffs(const Scenario& sc) {
  const Json& op = sc.config.at("operator");
  Hess4Coeffs c{jnum(op, "operator", "a1"), jnum(op, "operator", "a2"),
                jnum(op, "operator", "a3"), jnum(op, "operator", "a"),
                jnum(op, "operator", "b1"), jnum(op, "operator", "b2"),
                jnum(op, "operator", "b3")};
  if (sc.system == "lagrange4" && (c.b1 != 0.0 || c.b2 != 0.0 || c.b3 != 0.0))
    throw ConfigError("operator.b1..b3 must vanish for lagrange4");
  return c;
}

InertiaOperator ndim_operator(const Scenario& sc) {
  const Json& op = sc.config.at("operator");
  int n = sc.n;
  SymmetricPairSplit pair(n);
  Mat a_k;
  if (op.contains("a_k"))
    a_k = jmatrix(op.at("a_k"), "operator.a_k");
  else {
    a_k = Mat::Zero(pair.k_dim(), pair.k_dim());
    for (int i = 0; i < pair.k_dim(); ++i) a_k(i, i) = 1.0 + 0.25 * (i + 1);
  }
  Mat b;
  if (op.contains("b"))
    b = jmatrix(op.at("b"), "operator.b");
  else {
    b = Mat(pair.k_dim(), pair.d_dim());
    for (int i = 0; i < pair.k_dim(); ++i)
      for (int j = 0; j < pair.d_dim(); ++j) b(i, j) = 0.1 / (1.0 + i + j);
  }
  double a = jnum(op, "operator", "a");
  InertiaOperator base = [&] {
    try {
      return InertiaOperator::hess_block(n, a_k, b, a);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("operator: ") + e.what());
    }
  }();
  double eps = jnum_or(op, "violation", 0.0);
  if (eps == 0.0) return base;
  Mat w = base.wedge_matrix();
  w(pair.d_indices()[0], pair.d_indices()[0]) += eps;
  return InertiaOperator::from_wedge_matrix(n, w);
}

SectionalOperator sectional_operator(const Scenario& sc) {
  const Json& op = sc.config.at("operator");
  int n = sc.n;
  SkewMatrix a(n);
  if (op.contains("a_coords")) {
    a = from_wedge_coords(n, jvector(op.at("a_coords"), "operator.a_coords"));
  } else {
    if (n != 4) throw ConfigError("operator.a_coords required when scenario.n != 4");
    Vec c = Vec::Zero(6);
    c(wedge_index(4, 0, 1)) = jnum(op, "operator", "a12");
    c(wedge_index(4, 2, 3)) = jnum(op, "operator", "a34");
    a = from_wedge_coords(4, c);
  }
  double kappa = jnum(op, "operator", "kappa");
  SkewMatrix b = kappa * a;
  int k = static_cast<int>(centralizer_basis(a).size());
  Mat c_mat;
  if (op.contains("c"))
    c_mat = jmatrix(op.at("c"), "operator.c");
  else
    c_mat = jnum_or(op, "c_scale", 0.3) * Mat::Identity(k, k);
  try {
    return SectionalOperator(a, b, c_mat);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("operator: ") + e.what());
  }
}

DG4Params dg4_params(const Scenario& sc) {
  const Json& op = sc.config.at("operator");
  DG4Params p{jnum(op, "operator", "a12"), jnum(op, "operator", "a34"),
              jnum(op, "operator", "j1"),  jnum(op, "operator", "j3"),
              jnum(op, "operator", "j13"), jnum(op, "operator", "j24")};
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("operator: ") + e.what());
  }
  return p;
}

// seeded group element for check suites that need a nontrivial frame
Rotation seeded_rotation(int n, unsigned long long seed) {
  SplitMix64 rng(seed ^ 0x5bf0a8b1ull);
  return exp_so(SkewMatrix::skew_part(0.4 * from_wedge_coords(n, rng.vector(wedge_dim(n))).matrix()));
}

// ---- per-system run builders ----

ScenarioRun build_classical(const Scenario& sc) {
  const Json& op = sc.config.at("operator");
  double a1 = jnum(op, "operator", "a1"), a2 = jnum(op, "operator", "a2"),
         a3 = jnum(op, "operator", "a3");
  int branch = static_cast<int>(jnum_or(op, "branch", 1));
  BodyParams params = body_params(sc);
  Vec r = [&] {
    try {
      return classical_conditions_r(a1, a2, a3, params.rho, branch);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("operator: ") + e.what());
    }
  }();
  Vec diag(3);
  diag << a1, a2, a3;
  Mat a_vec = diag.asDiagonal();
  double gm = params.grav_mass;

  ScenarioRun run;
  run.config = integrator_config(sc);
  run.state_names = {"m1", "m2", "m3", "g1", "g2", "g3"};
  run.y0 = explicit_or(sc, 6, [&](SplitMix64& rng) {
    Vec m = rng.vector(3);
    m -= m.dot(r) / r.squaredNorm() * r;  // invariant relation (m, r) = 0
    Vec g = rng.vector(3).normalized();
    Vec y(6);
    y << m, g;
    return y;
  });
  run.field = [a_vec, r, gm](const Vec& y) {
    ClassicalState d = vf_classical({y.head(3), y.tail(3)}, a_vec, r, gm);
    Vec out(6);
    out << d.m, d.gamma;
    return out;
  };
  const char* names[] = {"F1", "F2", "F3", "F4"};
  for (int k = 0; k < 4; ++k)
    run.observers.push_back({names[k],
                             [a_vec, r, gm, k](const Vec& y) {
                               return classical_integrals(y.head(3), y.tail(3), a_vec, r, gm)[k];
                             },
                             1e-8});
  run.invariance_relation = [r](const Vec& y) {
    Vec out(1);
    out << y.head(3).dot(r);
    return out;
  };
  return run;
}

ScenarioRun build_ndim(const Scenario& sc) {
  int n = sc.n;
  int nw = wedge_dim(n);
  InertiaOperator a_op = ndim_operator(sc);
  BodyParams params = body_params(sc);
  SymmetricPairSplit pair(n);
  auto [holds, a_val] = check_ha_condition(a_op);
  double a = holds ? *a_val : a_op.wedge_matrix()(pair.d_indices()[0], pair.d_indices()[0]);

  ScenarioRun run;
  run.config = integrator_config(sc);
  run.state_names = wedge_names(n, "m");
  for (int i = 0; i < n; ++i) run.state_names.push_back("g" + std::to_string(i + 1));
  run.y0 = explicit_or(sc, nw + n, [&](SplitMix64& rng) {
    Vec m = Vec::Zero(nw);
    for (int idx : pair.d_indices()) m(idx) = rng.next_double();
    Vec g = rng.vector(n).normalized();
    Vec y(nw + n);
    y << m, g;
    return y;
  });
  run.field = [a_op, params, n](const Vec& y) {
    int nw2 = wedge_dim(n);
    EulerPoissonState d =
        vf_euler_poisson({from_wedge_coords(n, y.head(nw2)), y.tail(n)}, a_op, params);
    Vec out(y.size());
    out << wedge_coords(d.m), d.gamma;
    return out;
  };
  auto k_idx = pair.k_indices();
  run.observers.push_back({"mk_norm",
                           [k_idx](const Vec& y) {
                             double s = 0.0;
                             for (int idx : k_idx) s += y(idx) * y(idx);
                             return std::sqrt(s);
                           },
                           1e-8});
  auto chart = [n, pair](const Vec& y) {
    Vec m_d(n - 1);
    for (int j = 0; j < n - 1; ++j) m_d(j) = y(pair.d_indices()[j]);
    return HessChartState{m_d, y.tail(n)};
  };
  const char* names[] = {"F1", "F2", "F3"};
  for (int k = 0; k < 3; ++k)
    run.observers.push_back(
        {names[k],
         [chart, a, params, k](const Vec& y) { return integrals_hess(chart(y), a, params)[k]; },
         1e-8});
  run.invariance_relation = [k_idx](const Vec& y) {
    Vec out(static_cast<int>(k_idx.size()));
    for (size_t j = 0; j < k_idx.size(); ++j) out(static_cast<int>(j)) = y(k_idx[j]);
    return out;
  };
  if (run.config.project_gamma) {
    run.post_step = [nw, n](const Vec& y) {
      Vec out = y;
      out.tail(n).normalize();
      return out;
    };
  }
  return run;
}

ScenarioRun build_hess4(const Scenario& sc) {
  Hess4Coeffs c = hess4_coeffs(sc);
  BodyParams params = body_params(sc);
  ScenarioRun run;
  run.config = integrator_config(sc);
  run.state_names = {"m14", "m24", "m34", "g1", "g2", "g3", "g4"};
  run.y0 = explicit_or(sc, 7, [&](SplitMix64& rng) {
    Vec y(7);
    y << rng.vector(3), rng.vector(4).normalized();
    return y;
  });
  run.field = [c, params](const Vec& y) { return vf_hess4(y, c, params); };

  double f = params.rho * params.grav_mass;
  run.observers.push_back({"F1",
                           [c, f](const Vec& y) {
                             return 0.5 * c.a * y.head(3).squaredNorm() + f * y(6);
                           },
                           1e-8});
  run.observers.push_back({"F2", [](const Vec& y) { return y.tail(4).squaredNorm(); }, 1e-8});
  run.observers.push_back({"F3",
                           [](const Vec& y) {
                             double s = 0.0;
                             for (int i = 0; i < 3; ++i)
                               for (int j = i + 1; j < 3; ++j) {
                                 double t = y(i) * y(3 + j) - y(j) * y(3 + i);
                                 s += t * t;
                               }
                             return std::sqrt(s);
                           },
                           1e-8});
  run.observers.push_back(
      {"F12", [](const Vec& y) { return y(0) * y(4) - y(1) * y(3); }, 1e-8});
  run.observers.push_back(
      {"F13", [](const Vec& y) { return y(0) * y(5) - y(2) * y(3); }, 1e-8});
  run.observers.push_back(
      {"F23", [](const Vec& y) { return y(1) * y(5) - y(2) * y(4); }, 1e-8});
  return run;
}

ScenarioRun build_pendulum(const Scenario& sc) {
  int n = sc.n;
  double a = jnum(sc.config.at("operator"), "operator", "a");
  BodyParams params = body_params(sc);
  Vec e_dir = Vec::Unit(n, n - 1);

  ScenarioRun run;
  run.config = integrator_config(sc);
  for (int i = 0; i < n; ++i) run.state_names.push_back("f" + std::to_string(i + 1));
  for (int i = 0; i < n; ++i) run.state_names.push_back("fd" + std::to_string(i + 1));
  run.y0 = explicit_or(sc, 2 * n, [&](SplitMix64& rng) {
    Vec f = rng.vector(n).normalized();
    Vec v = rng.vector(n);
    v -= v.dot(f) * f;
    Vec y(2 * n);
    y << f, v;
    return y;
  });
  run.field = [a, params, e_dir, n](const Vec& y) {
    PendulumState d = vf_pendulum({y.head(n), y.tail(n)}, a, params, e_dir);
    Vec out(2 * n);
    out << d.f, d.fdot;
    return out;
  };
  run.observers.push_back(
      {"energy",
       [a, params, e_dir, n](const Vec& y) {
         return pendulum_energy({y.head(n), y.tail(n)}, a, params, e_dir);
       },
       1e-8});
  run.observers.push_back(
      {"unit", [n](const Vec& y) { return y.head(n).squaredNorm() - 1.0; }, 1e-8});
  run.observers.push_back(
      {"tangency", [n](const Vec& y) { return y.head(n).dot(y.tail(n)); }, 1e-8});
  for (int i = 0; i < n - 1; ++i)
    for (int j = i + 1; j < n - 1; ++j)
      run.observers.push_back({"G" + std::to_string(i + 1) + std::to_string(j + 1),
                               [i, j, n](const Vec& y) {
                                 return y(n + i) * y(j) - y(n + j) * y(i);
                               },
                               1e-8});
  return run;
}

ScenarioRun build_ep_generic(const Scenario& sc) {
  int n = sc.n;
  int nw = wedge_dim(n);
  const Json& op = sc.config.at("operator");
  InertiaOperator a_op = [&] {
    try {
      if (op.contains("wedge_matrix")) {
        if (op.value("basis", "") != std::string("lex-wedge"))
          throw ConfigError("operator.basis: wedge matrices must declare basis \"lex-wedge\"");
        return InertiaOperator::from_wedge_matrix(n, jmatrix(op.at("wedge_matrix"), "operator.wedge_matrix"));
      }
      if (op.contains("j")) return InertiaOperator::physical(jmatrix(op.at("j"), "operator.j"));
      Mat j = Mat::Zero(n, n);
      for (int i = 0; i < n; ++i) j(i, i) = 1.0 + 0.3 * i;
      return InertiaOperator::physical(j);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("operator: ") + e.what());
    }
  }();
  BodyParams params = body_params(sc);

  ScenarioRun run;
  run.config = integrator_config(sc);
  run.state_names = wedge_names(n, "m");
  for (int i = 0; i < n; ++i) run.state_names.push_back("g" + std::to_string(i + 1));
  run.y0 = explicit_or(sc, nw + n, [&](SplitMix64& rng) {
    Vec y(nw + n);
    y << rng.vector(nw), rng.vector(n).normalized();
    return y;
  });
  run.field = [a_op, params, n](const Vec& y) {
    int nw2 = wedge_dim(n);
    EulerPoissonState d =
        vf_euler_poisson({from_wedge_coords(n, y.head(nw2)), y.tail(n)}, a_op, params);
    Vec out(y.size());
    out << wedge_coords(d.m), d.gamma;
    return out;
  };
  run.observers.push_back({"energy",
                           [a_op, params, n, nw](const Vec& y) {
                             return a_op.energy_quadratic(from_wedge_coords(n, y.head(nw))) +
                                    params.rho * params.grav_mass * y(nw + n - 1);
                           },
                           1e-8});
  run.observers.push_back(
      {"gamma_norm", [n](const Vec& y) { return y.tail(n).squaredNorm(); }, 1e-8});
  return run;
}

ScenarioRun build_geodesic(const Scenario& sc, bool perturbed) {
  int n = sc.n;
  int nw = wedge_dim(n);
  SectionalOperator s = sectional_operator(sc);
  InertiaOperator metric = [&] {
    if (!perturbed) return s.as_operator();
    const Json& op = sc.config.at("operator");
    int k = static_cast<int>(s.ga_basis().cols());
    int dd = static_cast<int>(s.d_basis().cols());
    PerturbationDelta delta;
    if (op.contains("b_delta"))
      delta.b_delta = jmatrix(op.at("b_delta"), "operator.b_delta");
    else
      delta.b_delta = jnum_or(op, "b_delta_scale", 0.05) * Mat::Ones(k, dd);
    if (op.contains("c_delta"))
      delta.c_delta = jmatrix(op.at("c_delta"), "operator.c_delta");
    else
      delta.c_delta = jnum_or(op, "c_delta_scale", 0.2) * Mat::Identity(k, k);
    try {
      return perturbed_operator(s, delta);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("operator: ") + e.what());
    }
  }();
  Mat ga = s.ga_basis();

  ScenarioRun run;
  run.config = integrator_config(sc);
  run.state_names = wedge_names(n, "xi");
  run.y0 = explicit_or(sc, nw, [&](SplitMix64& rng) {
    Vec xi = rng.vector(nw);
    if (perturbed) xi -= ga * (ga.transpose() * xi);  // zero momentum level
    return xi;
  });
  run.field = [metric, n](const Vec& y) {
    GeodesicDeriv d = vf_geodesic(from_wedge_coords(n, y), metric);
    return wedge_coords(d.xidot);
  };
  run.observers.push_back({"energy",
                           [metric, n](const Vec& y) {
                             return metric.energy_quadratic(from_wedge_coords(n, y));
                           },
                           1e-8});
  if (perturbed) {
    run.observers.push_back(
        {"mom_norm", [ga](const Vec& y) { return (ga.transpose() * y).norm(); }, 1e-8});
  } else {
    for (int k = 0; k < ga.cols(); ++k)
      run.observers.push_back({"mom" + std::to_string(k + 1),
                               [ga, k](const Vec& y) { return ga.col(k).dot(y); }, 1e-8});
  }
  run.invariance_relation = [ga](const Vec& y) { return Vec(ga.transpose() * y); };
  return run;
}

ScenarioRun build_orbit(const Scenario& sc) {
  int n = sc.n;
  int nw = wedge_dim(n);
  SectionalOperator s = sectional_operator(sc);
  double kappa = s.kappa();
  SkewMatrix a = s.a();

  ScenarioRun run;
  run.config = integrator_config(sc);
  run.state_names = wedge_names(n, "x");
  for (const auto& nm : wedge_names(n, "p")) run.state_names.push_back(nm);
  run.y0 = explicit_or(sc, 2 * nw, [&](SplitMix64& rng) {
    Rotation g = exp_so(SkewMatrix::skew_part(0.6 * from_wedge_coords(n, rng.vector(nw)).matrix()));
    SkewMatrix x = adjoint(g, a);
    SkewMatrix p = from_wedge_coords(n, rng.vector(nw));
    for (const auto& e : centralizer_basis(x)) p = p - killing(p, e) * e;
    Vec y(2 * nw);
    y << wedge_coords(x), wedge_coords(p);
    return y;
  });
  run.field = [kappa, n, nw](const Vec& y) {
    OrbitPoint d =
        vf_orbit({from_wedge_coords(n, y.head(nw)), from_wedge_coords(n, y.tail(nw))}, kappa);
    Vec out(2 * nw);
    out << wedge_coords(d.x), wedge_coords(d.p);
    return out;
  };
  run.observers.push_back({"H",
                           [kappa, n, nw](const Vec& y) {
                             return reduced_hamiltonian({from_wedge_coords(n, y.head(nw)),
                                                         from_wedge_coords(n, y.tail(nw))},
                                                        kappa);
                           },
                           1e-8});
  for (int k = 0; k < n; ++k)
    run.observers.push_back({"spec" + std::to_string(k + 1),
                             [n, nw, k](const Vec& y) {
                               return orbit_spectrum(from_wedge_coords(n, y.head(nw)))(k);
                             },
                             1e-8});
  return run;
}

ScenarioRun build_dg4_full(const Scenario& sc) {
  DG4Params params = dg4_params(sc);
  ScenarioRun run;
  run.config = integrator_config(sc);
  run.state_names = wedge_names(4, "m");
  for (const auto& nm : wedge_names(4, "g")) run.state_names.push_back(nm);
  int i12 = wedge_index(4, 0, 1), i34 = wedge_index(4, 2, 3);
  run.y0 = explicit_or(sc, 12, [&](SplitMix64& rng) {
    Vec m = rng.vector(6);
    m(i12) = m(i34) = 0.0;  // invariant relation
    Rotation g = exp_so(SkewMatrix::skew_part(0.6 * from_wedge_coords(4, rng.vector(6)).matrix()));
    Rotation ginv = Rotation::from_matrix(g.matrix().transpose());
    Vec y(12);
    y << m, wedge_coords(adjoint(ginv, params.a_mat()));
    return y;
  });
  run.field = [params](const Vec& y) {
    DG4ClosedState d =
        vf_dg4_closed({from_wedge_coords(4, y.head(6)), from_wedge_coords(4, y.tail(6))}, params);
    Vec out(12);
    out << wedge_coords(d.m), wedge_coords(d.gamma);
    return out;
  };
  SkewMatrix a_fixed = params.a_mat();
  run.observers.push_back({"energy",
                           [params, a_fixed](const Vec& y) {
                             return dg4_energy(from_wedge_coords(4, y.head(6)), params) +
                                    killing(from_wedge_coords(4, y.tail(6)), a_fixed);
                           },
                           1e-8});
  run.observers.push_back({"F",
                           [params](const Vec& y) {
                             return dg4_integral_f(from_wedge_coords(4, y.head(6)),
                                                   from_wedge_coords(4, y.tail(6)), params);
                           },
                           1e-8});
  run.observers.push_back({"m12", [i12](const Vec& y) { return y(i12); }, 1e-8});
  run.observers.push_back({"m34", [i34](const Vec& y) { return y(i34); }, 1e-8});
  run.observers.push_back(
      {"casimir_gg", [](const Vec& y) { return y.tail(6).squaredNorm(); }, 1e-8});
  run.observers.push_back({"casimir_pf",
                           [](const Vec& y) {
                             SkewMatrix g = from_wedge_coords(4, y.tail(6));
                             return g(0, 1) * g(2, 3) - g(0, 2) * g(1, 3) + g(0, 3) * g(1, 2);
                           },
                           1e-8});
  run.invariance_relation = [i12, i34](const Vec& y) {
    Vec out(2);
    out << y(i12), y(i34);
    return out;
  };
  return run;
}

ScenarioRun build_dg4_grassmann(const Scenario& sc) {
  DG4Params params = dg4_params(sc);
  SkewMatrix a = params.a_mat();
  double kappa = params.kappa();

  ScenarioRun run;
  run.config = integrator_config(sc);
  run.state_names = wedge_names(4, "x");
  for (const auto& nm : wedge_names(4, "p")) run.state_names.push_back(nm);
  run.y0 = explicit_or(sc, 12, [&](SplitMix64& rng) {
    Rotation g = exp_so(SkewMatrix::skew_part(0.6 * from_wedge_coords(4, rng.vector(6)).matrix()));
    SkewMatrix x = adjoint(g, a);
    SkewMatrix p = from_wedge_coords(4, rng.vector(6));
    for (const auto& e : centralizer_basis(x)) p = p - killing(p, e) * e;
    Vec y(12);
    y << wedge_coords(x), wedge_coords(p);
    return y;
  });
  run.field = [params](const Vec& y) {
    OrbitPoint d =
        vf_grassmann({from_wedge_coords(4, y.head(6)), from_wedge_coords(4, y.tail(6))}, params);
    Vec out(12);
    out << wedge_coords(d.x), wedge_coords(d.p);
    return out;
  };
  run.observers.push_back({"energy",
                           [kappa, a](const Vec& y) {
                             SkewMatrix x = from_wedge_coords(4, y.head(6));
                             SkewMatrix p = from_wedge_coords(4, y.tail(6));
                             SkewMatrix xp = bracket(x, p);
                             return 0.5 * kappa * killing(xp, xp) + killing(x, a);
                           },
                           1e-8});
  for (int k = 0; k < 4; ++k)
    run.observers.push_back({"spec" + std::to_string(k + 1),
                             [k](const Vec& y) {
                               return orbit_spectrum(from_wedge_coords(4, y.head(6)))(k);
                             },
                             1e-8});
  return run;
}

// classical state carried to the rotated wedge frame with the operator in
// Hess normal form (used by the lax/spectral suites)
struct ClassicalBridge {
  InertiaOperator a_op;
  EulerPoissonState state;
  double a;
};

ClassicalBridge classical_bridge(const Scenario& sc, const Vec& y0) {
  const Json& op = sc.config.at("operator");
  double a1 = jnum(op, "operator", "a1"), a2 = jnum(op, "operator", "a2"),
         a3 = jnum(op, "operator", "a3");
  int branch = static_cast<int>(jnum_or(op, "branch", 1));
  Mat rot = classical_frame_rotation(a1, a2, a3, branch).matrix();
  Vec diag(3);
  diag << a1, a2, a3;
  Mat a_vec = diag.asDiagonal();
  Mat a_rot = rot * a_vec * rot.transpose();
  InertiaOperator a_op =
      InertiaOperator::from_wedge_matrix(3, vector_operator_to_wedge(a_rot));
  EulerPoissonState state{hat(rot * y0.head(3)), rot * y0.tail(3)};
  return {a_op, state, a2};
}

// ---- report plumbing ----

struct SuiteReport {
  ConservationReport rows;
  std::vector<std::string> notes;
};

void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + p.string());
  out << text;
}

void emit_report(const SuiteReport& rep, const std::string& suite,
                 const std::filesystem::path& dir) {
  std::string text = "suite: " + suite + "\n" + rep.rows.table();
  for (const auto& n : rep.notes) text += n + "\n";
  text += rep.rows.all_pass() ? "verdict: pass\n" : "verdict: fail\n";
  write_text(dir / "report.txt", text);

  Json j;
  j["suite"] = suite;
  j["version"] = kVersion;
  j["pass"] = rep.rows.all_pass();
  j["rows"] = Json::array();
  for (const auto& r : rep.rows.rows) {
    Json row;
    row["name"] = r.name;
    row["initial"] = r.initial;
    row["max_drift"] = r.max_drift;
    row["time_of_max"] = r.time_of_max;
    row["tolerance"] = r.tolerance;
    row["pass"] = r.pass;
    j["rows"].push_back(row);
  }
  j["notes"] = rep.notes;
  write_text(dir / "report.json", j.dump(2) + "\n");
}

ObserverRow make_row(const std::string& name, double value, double tol) {
  ObserverRow row;
  row.name = name;
  row.initial = 0.0;
  row.max_drift = value;
  row.tolerance = tol;
  row.pass = value <= tol;
  return row;
}

SuiteReport suite_lax(const Scenario& sc) {
  ScenarioRun run = build_run(sc);
  InertiaOperator a_op = InertiaOperator::identity(3);
  EulerPoissonState state{SkewMatrix(3), Vec::Zero(3)};
  double a = 1.0;
  BodyParams params = body_params(sc);
  if (sc.system == "classical-ha") {
    ClassicalBridge br = classical_bridge(sc, run.y0);
    a_op = br.a_op;
    state = br.state;
    a = br.a;
  } else if (sc.system == "ndim-ha") {
    int nw = wedge_dim(sc.n);
    a_op = ndim_operator(sc);
    state = {from_wedge_coords(sc.n, run.y0.head(nw)), run.y0.tail(sc.n)};
    auto [holds, a_val] = check_ha_condition(a_op);
    if (!holds) {
      SymmetricPairSplit pair(sc.n);
      a = a_op.wedge_matrix()(pair.d_indices()[0], pair.d_indices()[0]);
    } else {
      a = *a_val;
    }
  } else {
    throw ConfigError("suite lax requires scenario classical-ha or ndim-ha");
  }
  SuiteReport rep;
  double analytic = lax_residual(state, a_op, a, params).max_coeff_norm(0);
  double fd = lax_residual_fd(state, a_op, a, params).max_coeff_norm(0);
  rep.rows.rows.push_back(make_row("lax_residual", analytic, 1e-12));
  rep.rows.rows.push_back(make_row("lax_residual_fd", fd, 1e-6));
  rep.notes.push_back("analytic residual max " + fmt17(analytic));
  return rep;
}

SuiteReport suite_spectral(const Scenario& sc) {
  ScenarioRun run = build_run(sc);
  BodyParams params = body_params(sc);
  InertiaOperator a_op = InertiaOperator::identity(3);
  double a = 1.0;
  int n = sc.n;
  std::function<EulerPoissonState(const Vec&)> to_state;
  std::function<Vec(const Vec&)> field = run.field;
  Vec y0 = run.y0;
  if (sc.system == "classical-ha") {
    ClassicalBridge br = classical_bridge(sc, run.y0);
    a_op = br.a_op;
    a = br.a;
    n = 3;
    const Json& op = sc.config.at("operator");
    Mat rot = classical_frame_rotation(jnum(op, "operator", "a1"), jnum(op, "operator", "a2"),
                                       jnum(op, "operator", "a3"),
                                       static_cast<int>(jnum_or(op, "branch", 1)))
                  .matrix();
    to_state = [rot](const Vec& y) {
      return EulerPoissonState{hat(rot * y.head(3)), rot * y.tail(3)};
    };
  } else if (sc.system == "ndim-ha") {
    a_op = ndim_operator(sc);
    auto [holds, a_val] = check_ha_condition(a_op);
    if (!holds) throw ConfigError("suite spectral requires the block operator");
    a = *a_val;
    int nw = wedge_dim(n);
    to_state = [n, nw](const Vec& y) {
      return EulerPoissonState{from_wedge_coords(n, y.head(nw)), y.tail(n)};
    };
  } else {
    throw ConfigError("suite spectral requires scenario classical-ha or ndim-ha");
  }

  IntegrationResult res = integrate(field, y0, run.config);
  SpectralData first = spectral_invariants(to_state(y0), a_op, a, params);
  double drift_c0 = 0.0, drift_c2 = 0.0, drift_c4 = 0.0, drift_q = 0.0;
  double fit = first.fit_residual;
  for (const Vec& y : res.traj.states) {
    SpectralData d = spectral_invariants(to_state(y), a_op, a, params);
    drift_c0 = std::max(drift_c0, std::abs(d.c0 - first.c0));
    drift_c2 = std::max(drift_c2, std::abs(d.c2 - first.c2));
    drift_c4 = std::max(drift_c4, std::abs(d.c4 - first.c4));
    drift_q = std::max(drift_q, std::abs(d.q - first.q));
  }
  // match against the chart integrals
  SymmetricPairSplit pair(n);
  EulerPoissonState s0 = to_state(y0);
  Vec m_d(n - 1);
  Vec mw = wedge_coords(s0.m);
  for (int j = 0; j < n - 1; ++j) m_d(j) = mw(pair.d_indices()[j]);
  auto f123 = integrals_hess({m_d, s0.gamma}, a, params);
  double gm = params.rho * params.grav_mass;

  SuiteReport rep;
  rep.rows.rows.push_back(make_row("fit_residual", fit, 1e-9));
  rep.rows.rows.push_back(make_row("c0_vs_F2", std::abs(first.c0 - f123[1]), 1e-9));
  rep.rows.rows.push_back(make_row("c2_vs_2F1_a", std::abs(first.c2 - 2.0 * f123[0] / a), 1e-9));
  rep.rows.rows.push_back(
      make_row("c4_vs_rGM_a_sq", std::abs(first.c4 - (gm / a) * (gm / a)), 1e-9));
  rep.rows.rows.push_back(make_row("q_vs_F3", std::abs(first.q - f123[2]), 1e-9));
  rep.rows.rows.push_back(make_row("c0_drift", drift_c0, 1e-8));
  rep.rows.rows.push_back(make_row("c2_drift", drift_c2, 1e-8));
  rep.rows.rows.push_back(make_row("c4_drift", drift_c4, 1e-8));
  rep.rows.rows.push_back(make_row("q_drift", drift_q, 1e-8));
  return rep;
}

SuiteReport suite_reduce_pendulum(const Scenario& sc) {
  if (sc.system != "ndim-ha") throw ConfigError("suite reduce-pendulum requires scenario ndim-ha");
  ScenarioRun run = build_run(sc);
  int nw = wedge_dim(sc.n);
  FullState full0{seeded_rotation(sc.n, sc.seed), from_wedge_coords(sc.n, run.y0.head(nw))};
  IntegratorConfig cfg = run.config;
  cfg.t_end = std::min(cfg.t_end, 5.0);
  ComparisonReport cmp = reduction_compare_pendulum(full0, ndim_operator(sc), body_params(sc), cfg);
  SuiteReport rep;
  rep.rows.rows.push_back(make_row("pendulum_distance", cmp.sup_distance, 1e-6));
  rep.notes.push_back("sup distance " + fmt17(cmp.sup_distance) + " at t = " +
                      fmt17(cmp.time_of_max));
  return rep;
}

SuiteReport suite_reduce_grassmann(const Scenario& sc) {
  if (sc.system != "dg4-full")
    throw ConfigError("suite reduce-grassmann requires scenario dg4-full");
  ScenarioRun run = build_run(sc);
  DG4Params params = dg4_params(sc);
  // realize the closed-state gamma as Ad_{g^-1} a with the seeded frame
  SplitMix64 rng(sc.seed);
  Vec m = rng.vector(6);
  m(wedge_index(4, 0, 1)) = m(wedge_index(4, 2, 3)) = 0.0;
  Rotation g = exp_so(SkewMatrix::skew_part(0.6 * from_wedge_coords(4, rng.vector(6)).matrix()));
  FullState full0{g, from_wedge_coords(4, m)};
  IntegratorConfig cfg = run.config;
  cfg.t_end = std::min(cfg.t_end, 5.0);
  ComparisonReport cmp = reduction_compare_grassmann(full0, params, cfg);
  SuiteReport rep;
  rep.rows.rows.push_back(make_row("grassmann_distance", cmp.sup_distance, 1e-6));
  // the supplementary integral along the same run
  ScenarioRun closed = build_run(sc);
  ConservationReport cons =
      conservation_suite(closed.field, closed.y0, closed.observers, closed.config);
  for (const auto& r : cons.rows)
    if (r.name == "F") rep.rows.rows.push_back(r);
  return rep;
}

SuiteReport suite_measure(const Scenario& sc) {
  if (sc.system != "hess4" && sc.system != "lagrange4")
    throw ConfigError("suite measure requires scenario hess4 or lagrange4");
  MeasureVerdict v = measure_test(hess4_coeffs(sc), body_params(sc), 1000, sc.seed);
  SuiteReport rep;
  rep.rows.rows.push_back(make_row("max_divergence", v.max_divergence, 1e-6));
  if (!v.measure_preserving) {
    std::string witness = "witness state:";
    for (int i = 0; i < v.witness.size(); ++i) witness += " " + fmt17(v.witness(i));
    rep.notes.push_back(witness);
  }
  return rep;
}

}  // namespace

Json default_config(const std::string& system) {
  Json j;
  int n = 4;
  if (system == "classical-ha" || system == "pendulum") n = 3;
  if (system == "ndim-ha") n = 5;
  j["scenario"] = {{"system", system}, {"name", system + "-default"}, {"n", n}, {"seed", 1}};
  j["params"] = {{"rho", 1.0}, {"grav_mass", 1.0}};

  Json op = Json::object();
  if (system == "classical-ha") {
    op = {{"a1", 1.0}, {"a2", 2.0}, {"a3", 4.0}, {"branch", 1}};
  } else if (system == "ndim-ha") {
    op = {{"a", 0.5}, {"violation", 0.0}};
  } else if (system == "hess4") {
    op = {{"a1", 1.0}, {"a2", 2.0}, {"a3", 3.0}, {"a", 0.8},
          {"b1", 0.3}, {"b2", 0.2}, {"b3", 0.1}};
  } else if (system == "lagrange4") {
    op = {{"a1", 1.0}, {"a2", 1.3}, {"a3", 1.7}, {"a", 0.8},
          {"b1", 0.0}, {"b2", 0.0}, {"b3", 0.0}};
  } else if (system == "pendulum") {
    op = {{"a", 0.5}};
  } else if (system == "euler-poisson-generic") {
    op = Json::object();
  } else if (system == "geodesic-b" || system == "geodesic-c") {
    op = {{"a12", 1.0}, {"a34", 0.5}, {"kappa", 0.7}, {"c_scale", 0.3}};
    if (system == "geodesic-c") {
      op["b_delta_scale"] = 0.05;
      op["c_delta_scale"] = 0.1;
    }
  } else if (system == "orbit") {
    op = {{"a12", 1.0}, {"a34", 0.5}, {"kappa", 0.7}, {"c_scale", 0.3}};
  } else if (system == "dg4-full" || system == "dg4-grassmann") {
    op = {{"a12", 1.0}, {"a34", 0.5}, {"j1", 1.0}, {"j3", 0.6}, {"j13", 0.2}, {"j24", 0.1}};
  }
  j["operator"] = op;
  j["initial"] = {{"random", true}};
  j["integrator"] = {{"method", "rk4"},
                     {"step", 1e-3},
                     {"t_end", 10.0},
                     {"observer_stride", 10},
                     {"project_gamma", false}};
  j["output"] = Json::object();
  return j;
}

Scenario parse_config(const Json& user) {
  if (!user.is_object()) throw ConfigError("config root must be a JSON object");
  if (!user.contains("scenario") || !user.at("scenario").contains("system"))
    throw ConfigError("missing key: scenario.system");
  std::string system = user.at("scenario").at("system").get<std::string>();
  if (std::find(kSystems.begin(), kSystems.end(), system) == kSystems.end())
    throw ConfigError("scenario.system: unknown system \"" + system + "\"");

  Json merged = default_config(system);
  Json user_copy = user;
  deep_merge(merged, user_copy);

  Scenario sc;
  sc.system = system;
  sc.n = merged.at("scenario").value("n", 0);
  sc.seed = merged.at("scenario").value("seed", 1ull);
  sc.config = merged;

  if (sc.n < 3 || sc.n > kMaxDim)
    throw ConfigError("scenario.n: must be between 3 and " + std::to_string(kMaxDim));
  if (system == "classical-ha" && sc.n != 3) throw ConfigError("scenario.n: classical-ha needs n = 3");
  if ((system == "hess4" || system == "lagrange4" || system == "dg4-full" ||
       system == "dg4-grassmann") &&
      sc.n != 4)
    throw ConfigError("scenario.n: " + system + " needs n = 4");
  return sc;
}

void apply_override(Json& config, const std::string& key, const std::string& value) {
  Json parsed;
  try {
    parsed = Json::parse(value);
  } catch (const Json::parse_error&) {
    parsed = value;
  }
  Json* node = &config;
  size_t start = 0;
  while (true) {
    size_t dot = key.find('.', start);
    std::string part = key.substr(start, dot == std::string::npos ? dot : dot - start);
    if (part.empty()) throw ConfigError("--set: empty path segment in \"" + key + "\"");
    if (dot == std::string::npos) {
      (*node)[part] = parsed;
      return;
    }
    node = &(*node)[part];
    start = dot + 1;
  }
}

ScenarioRun build_run(const Scenario& sc) {
  if (sc.system == "classical-ha") return build_classical(sc);
  if (sc.system == "ndim-ha") return build_ndim(sc);
  if (sc.system == "hess4" || sc.system == "lagrange4") return build_hess4(sc);
  if (sc.system == "pendulum") return build_pendulum(sc);
  if (sc.system == "euler-poisson-generic") return build_ep_generic(sc);
  if (sc.system == "geodesic-b") return build_geodesic(sc, false);
  if (sc.system == "geodesic-c") return build_geodesic(sc, true);
  if (sc.system == "orbit") return build_orbit(sc);
  if (sc.system == "dg4-full") return build_dg4_full(sc);
  if (sc.system == "dg4-grassmann") return build_dg4_grassmann(sc);
  throw ConfigError("scenario.system: unknown system \"" + sc.system + "\"");
}

int run_simulate(const Scenario& sc, const std::string& out_dir) {
  auto t0 = std::chrono::steady_clock::now();
  ScenarioRun run = build_run(sc);
  std::filesystem::create_directories(out_dir);

  std::vector<Observer> obs;
  for (const auto& o : run.observers) obs.emplace_back(o.name, o.fn);
  IntegrationResult res = integrate(run.field, run.y0, run.config, obs, run.post_step);

  std::string csv = "t";
  for (const auto& nm : run.state_names) csv += ", " + nm;
  for (const auto& o : run.observers) csv += ", " + o.name;
  csv += "\n";
  for (size_t i = 0; i < res.traj.states.size(); ++i) {
    csv += fmt17(res.traj.times[i]);
    for (int k = 0; k < res.traj.states[i].size(); ++k)
      csv += ", " + fmt17(res.traj.states[i](k));
    for (double v : res.observers.values[i]) csv += ", " + fmt17(v);
    csv += "\n";
  }
  std::filesystem::path dir(out_dir);
  write_text(dir / "trajectory.csv", csv);

  double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  Json record;
  record["version"] = kVersion;
  record["scenario"] = sc.config;
  record["wall_clock_seconds"] = wall;
  record["outputs"] = Json::array();
  record["outputs"].push_back(
      {{"path", "trajectory.csv"}, {"hash", "fnv1a64:" + fnv1a_hex(csv)}, {"rows", res.traj.states.size()}});
  write_text(dir / "run.json", record.dump(2) + "\n");
  return 0;
}

int run_check(const Scenario& sc, const std::string& suite, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  SuiteReport rep;
  if (suite == "conservation") {
    ScenarioRun run = build_run(sc);
    rep.rows = conservation_suite(run.field, run.y0, run.observers, run.config);
  } else if (suite == "invariance") {
    ScenarioRun run = build_run(sc);
    if (!run.invariance_relation)
      throw ConfigError("suite invariance is not defined for scenario " + sc.system);
    rep.rows =
        invariance_drift(run.field, run.y0, run.invariance_relation, 1e-8, run.config);
  } else if (suite == "lax") {
    rep = suite_lax(sc);
  } else if (suite == "spectral") {
    rep = suite_spectral(sc);
  } else if (suite == "reduce-pendulum") {
    rep = suite_reduce_pendulum(sc);
  } else if (suite == "reduce-grassmann") {
    rep = suite_reduce_grassmann(sc);
  } else if (suite == "measure") {
    rep = suite_measure(sc);
  } else {
    throw ConfigError("unknown suite \"" + suite + "\"");
  }
  emit_report(rep, suite, out_dir);
  return rep.rows.all_pass() ? 0 : 1;
}

int run_scan(const Scenario& sc, const std::string& param, const std::vector<std::string>& values,
             const std::string& out_dir) {
  // the parameter path must already exist in the scenario
  {
    const Json* node = &sc.config;
    size_t start = 0;
    while (true) {
      size_t dot = param.find('.', start);
      std::string part = param.substr(start, dot == std::string::npos ? dot : dot - start);
      if (part.empty() || !node->is_object() || !node->contains(part))
        throw ConfigError("scan parameter not found: " + param);
      node = &node->at(part);
      if (dot == std::string::npos) break;
      start = dot + 1;
    }
  }
  bool with_measure = sc.system == "hess4" || sc.system == "lagrange4";

  struct Row {
    std::string value;
    ConservationReport report;
    bool measure_ok = true;
  };
  auto one = [&sc, &param, with_measure](const std::string& value) {
    Json cfg = sc.config;
    apply_override(cfg, param, value);
    Scenario scv = parse_config(cfg);
    ScenarioRun run = build_run(scv);
    Row row;
    row.value = value;
    row.report = conservation_suite(run.field, run.y0, run.observers, run.config);
    if (with_measure)
      row.measure_ok =
          measure_test(hess4_coeffs(scv), body_params(scv), 1000, scv.seed).measure_preserving;
    return row;
  };

  std::vector<std::future<Row>> futures;
  for (const auto& v : values) futures.push_back(std::async(std::launch::async, one, v));

  // header columns come from the base scenario's observers
  ScenarioRun base_run = build_run(sc);
  std::string csv = param;
  for (const auto& o : base_run.observers) csv += ", " + o.name + "_drift";
  if (with_measure) csv += ", measure";
  csv += ", pass\n";

  bool all_pass = true;
  for (auto& f : futures) {
    Row row = f.get();
    csv += row.value;
    for (const auto& r : row.report.rows) csv += ", " + fmt17(r.max_drift);
    if (with_measure) csv += row.measure_ok ? ", 1" : ", 0";
    bool pass = row.report.all_pass();
    csv += pass ? ", 1\n" : ", 0\n";
    all_pass = all_pass && pass;
  }
  std::filesystem::create_directories(out_dir);
  write_text(std::filesystem::path(out_dir) / "scan.csv", csv);
  return all_pass ? 0 : 1;
}

}  // namespace hessflow
