#include "geomint/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "geomint/compare.hpp"
#include "geomint/continuous.hpp"
#include "geomint/diagnostics.hpp"
#include "geomint/discrete.hpp"
#include "geomint/integrators.hpp"

namespace geomint {

namespace {

using nlohmann::json;

/// Round-trip-exact rendering for CSV cells.
std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Vec to_vec(const std::vector<double>& v) {
  Vec out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<Eigen::Index>(i)] = v[i];
  return out;
}

Vec resolve_initial(const std::optional<std::vector<double>>& flag, const Vec& fallback,
                    Eigen::Index want, const char* label) {
  if (!flag) return fallback;
  Vec v = to_vec(*flag);
  if (v.size() != want)
    throw ValidationError(std::string("--") + label + " must have " + std::to_string(want) +
                          " entries");
  return v;
}

/// Velocity-constraint residual of the phase flow at (q, p): the fiber
/// velocity of H always satisfies the constraints, so this is a consistency
/// observable, not an error estimate.
double phase_constraint_residual(const SystemModel& model, const Vec& q, const Vec& p) {
  if (model.is_linear()) {
    const LinearConstraintSystem& sys = model.linear();
    if (sys.k() == 0) return 0.0;
    HamiltonianGradient g = hamiltonian_gradient(sys, PhaseState{q, p});
    return constraint_values(sys, q, g.dp).cwiseAbs().maxCoeff();
  }
  TangentState t = fiber_derivative(model.martinet(), PhaseState{q, p});
  return std::abs(t.v[2] - 0.5 * q[1] * q[1] * t.v[0]);
}

struct SimResult {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  std::string failure;  // empty when the run completed
  int failed_step = -1;
};

void push_row(SimResult& sim, double t, const std::vector<Vec>& groups) {
  std::vector<double> row;
  row.push_back(t);
  for (const Vec& g : groups)
    for (Eigen::Index i = 0; i < g.size(); ++i) row.push_back(g[i]);
  sim.rows.push_back(std::move(row));
}

std::vector<std::string> sim_header(const std::string& mom_label, int n, int k) {
  std::vector<std::string> h;
  h.push_back("t");
  for (int i = 1; i <= n; ++i) h.push_back("q" + std::to_string(i));
  for (int i = 1; i <= n; ++i) h.push_back(mom_label + std::to_string(i));
  for (int i = 1; i <= k; ++i) h.push_back("lambda" + std::to_string(i));
  h.push_back("H");
  h.push_back("constraint_residual");
  return h;
}

using PhaseStepFn = std::function<PhaseState(const PhaseState&)>;

PhaseStepFn make_phase_step(const std::string& name, const HamiltonianSystem& hsys, double h,
                            const NewtonConfig& cfg) {
  if (name == "none") return [](const PhaseState& s) { return s; };
  if (name == "symplectic_euler")
    return [&hsys, h, cfg](const PhaseState& s) { return symplectic_euler_step(hsys, s, h, cfg); };
  if (name == "midpoint")
    return [&hsys, h, cfg](const PhaseState& s) { return midpoint_step(hsys, s, h, cfg); };
  if (name == "verlet")
    return [&hsys, h, cfg](const PhaseState& s) { return stormer_verlet_step(hsys, s, h, cfg); };
  if (name == "oracle_rk4")
    return [&hsys, h](const PhaseState& s) {
      OdeField field = hamiltonian_field(hsys);
      return unpack_phase(rk4_step(field, pack_phase(s), h), hsys.dim());
    };
  throw ValidationError("unknown integrator '" + name + "'");
}

bool is_phase_integrator(const std::string& name) {
  return name == "none" || name == "symplectic_euler" || name == "midpoint" || name == "verlet" ||
         name == "oracle_rk4";
}

bool is_vakonomic_integrator(const std::string& name) {
  return name == "vakonomic_euler" || name == "vakonomic_midpoint";
}

SimResult simulate_run(const SystemModel& model, const CliOptions& opts) {
  const int n = model.dim();
  NewtonConfig cfg = effective_newton_config(opts);
  Vec q0 = resolve_initial(opts.q0, model.default_q, n, "q");
  Vec p0 = resolve_initial(opts.p0, model.default_p, n, "p");

  SimResult sim;
  const double h = opts.h;

  if (is_phase_integrator(opts.integrator)) {
    auto hsys = model.make_hamiltonian();
    PhaseStepFn step = make_phase_step(opts.integrator, *hsys, h, cfg);
    sim.header = sim_header("p", n, 0);
    PhaseState s{q0, p0};
    auto emit = [&](double t, const PhaseState& ps) {
      Vec diag(2);
      diag[0] = model.hamiltonian_value(ps.q, ps.p);
      diag[1] = phase_constraint_residual(model, ps.q, ps.p);
      push_row(sim, t, {ps.q, ps.p, diag});
    };
    emit(0.0, s);
    for (int i = 1; i <= opts.steps; ++i) {
      try {
        s = step(s);
      } catch (const NumericalError& e) {
        sim.failure = e.what();
        sim.failed_step = i;
        return sim;
      }
      emit(h * i, s);
    }
    return sim;
  }

  if (is_vakonomic_integrator(opts.integrator)) {
    if (!model.is_linear())
      throw ValidationError("integrator '" + opts.integrator +
                            "' requires a linear-constraint system");
    const LinearConstraintSystem& sys = model.linear();
    Discretization disc = opts.integrator == "vakonomic_euler" ? Discretization::Euler
                                                               : Discretization::Midpoint;
    sim.header = sim_header("p", n, sys.k());
    Vec q = q0, p = p0;
    Vec lambda = Vec::Zero(sys.k());
    Vec prev_q = q;
    auto emit = [&](double t, bool first) {
      Vec diag(2);
      diag[0] = hamiltonian(sys, PhaseState{q, p});
      diag[1] = first || sys.k() == 0
                    ? 0.0
                    : discrete_constraint_values(sys, disc, prev_q, q, h).cwiseAbs().maxCoeff();
      push_row(sim, t, {q, p, lambda, diag});
    };
    emit(0.0, true);
    for (int i = 1; i <= opts.steps; ++i) {
      try {
        DiscreteVakStep st = discrete_vakonomic_step(sys, q, p, disc, h, lambda, cfg);
        prev_q = q;
        q = st.q1;
        p = st.p1;
        lambda = st.lambda1;
      } catch (const NumericalError& e) {
        sim.failure = e.what();
        sim.failed_step = i;
        return sim;
      }
      emit(h * i, false);
    }
    return sim;
  }

  if (opts.integrator == "nonholonomic_discrete") {
    if (!model.is_linear())
      throw ValidationError("integrator 'nonholonomic_discrete' requires a linear-constraint system");
    const LinearConstraintSystem& sys = model.linear();
    Vec v0 = opts.v0 ? resolve_initial(opts.v0, Vec(), n, "v")
                     : model.complete_velocity(q0, model.default_vfree);
    require_admissible(sys, TangentState{q0, v0});
    sim.header = sim_header("v", n, sys.k());
    auto energy_of = [&](const Vec& q, const Vec& v) {
      Mat g = metric_at(sys, q);
      return 0.5 * v.dot(g * v) + potential_at(sys, q);
    };
    Vec qprev = q0;
    Vec qcur = q0 + h * v0;
    Vec lambda = Vec::Zero(sys.k());
    auto emit = [&](double t, const Vec& q, const Vec& v, const Vec& lam, double phi_res) {
      Vec diag(2);
      diag[0] = energy_of(q, v);
      diag[1] = phi_res;
      push_row(sim, t, {q, v, lam, diag});
    };
    emit(0.0, q0, v0, lambda, 0.0);
    if (opts.steps >= 1) {
      double res = sys.k() ? discrete_constraint_values(sys, Discretization::Euler, qprev, qcur, h)
                                 .cwiseAbs()
                                 .maxCoeff()
                           : 0.0;
      emit(h, qcur, (qcur - qprev) / h, lambda, res);
    }
    for (int i = 2; i <= opts.steps; ++i) {
      try {
        DiscreteNonholonomicStep st = discrete_nonholonomic_step(sys, qprev, qcur, h, lambda, cfg);
        qprev = qcur;
        qcur = st.qnext;
        lambda = st.lambda;
      } catch (const NumericalError& e) {
        sim.failure = e.what();
        sim.failed_step = i;
        return sim;
      }
      double res = sys.k() ? discrete_constraint_values(sys, Discretization::Euler, qprev, qcur, h)
                                 .cwiseAbs()
                                 .maxCoeff()
                           : 0.0;
      emit(h * i, qcur, (qcur - qprev) / h, lambda, res);
    }
    return sim;
  }

  throw ValidationError("unknown integrator '" + opts.integrator + "'");
}

std::string sim_to_csv(const SimResult& sim) {
  std::ostringstream out;
  for (std::size_t i = 0; i < sim.header.size(); ++i) out << (i ? "," : "") << sim.header[i];
  out << "\n";
  for (const auto& row : sim.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << fmt17(row[i]);
    out << "\n";
  }
  if (!sim.failure.empty())
    out << "# failure: " << sim.failure << " at step " << sim.failed_step << "\n";
  return out.str();
}

std::string sim_to_json(const SimResult& sim, const SystemModel& model, const CliOptions& opts) {
  json doc;
  doc["schema"] = 1;
  doc["system"] = model.name;
  doc["integrator"] = opts.integrator;
  doc["h"] = opts.h;
  doc["steps"] = opts.steps;
  doc["header"] = sim.header;
  json rows = json::array();
  for (const auto& row : sim.rows) rows.push_back(row);
  doc["rows"] = rows;
  if (!sim.failure.empty()) {
    doc["failure"] = sim.failure;
    doc["failed_step"] = sim.failed_step;
  }
  return doc.dump(2) + "\n";
}

}  // namespace

NewtonConfig effective_newton_config(const CliOptions& opts) {
  NewtonConfig cfg;
  if (opts.newton_tol) {
    cfg.tol = *opts.newton_tol;
  } else if (const char* env = std::getenv("GEOMINT_NEWTON_TOL")) {
    try {
      cfg.tol = std::stod(env);
    } catch (const std::exception&) {
      throw ValidationError("GEOMINT_NEWTON_TOL is not a number");
    }
  }
  if (cfg.tol <= 0.0) throw ValidationError("newton tolerance must be positive");
  return cfg;
}

std::string simulate_to_string(const SystemModel& model, const CliOptions& opts, int& exit_code) {
  SimResult sim = simulate_run(model, opts);
  exit_code = sim.failure.empty() ? 0 : 2;
  if (opts.format == "csv") return sim_to_csv(sim);
  if (opts.format == "json") return sim_to_json(sim, model, opts);
  throw ValidationError("unknown format '" + opts.format + "' (expected csv or json)");
}

std::string compare_to_string(const SystemModel& model, const CliOptions& opts) {
  if (!model.is_linear() || model.linear().k() == 0)
    throw ValidationError("compare requires constraints");
  const LinearConstraintSystem& sys = model.linear();
  const int n = sys.n();
  NewtonConfig cfg = effective_newton_config(opts);

  Vec q0 = resolve_initial(opts.q0, model.default_q, n, "q");
  Vec v0 = opts.v0 ? resolve_initial(opts.v0, Vec(), n, "v")
                   : model.complete_velocity(q0, model.default_vfree);
  require_admissible(sys, TangentState{q0, v0});

  // continuous reaction-force trajectory via the fourth-order oracle
  OdeField field = nonholonomic_field(sys);
  Vec y0 = pack_tangent(TangentState{q0, v0});
  Trajectory traj = oracle_integrate(field, y0, opts.h, opts.steps, {{"q", n}, {"v", n}});
  CommonSolutionReport scan = common_solution_scan(sys, traj);

  double max_curv_entry = 0.0;
  for (int r = 0; r < traj.rows(); ++r) {
    CurvatureTensor curv = curvature(sys, traj.block_row(r, "q"));
    for (const Mat& m : curv.R)
      if (m.size()) max_curv_entry = std::max(max_curv_entry, m.cwiseAbs().maxCoeff());
  }

  json doc;
  doc["schema"] = 1;
  doc["system"] = model.name;
  doc["h"] = opts.h;
  doc["steps"] = opts.steps;
  doc["thresholds"] = {{"fit", scan.fit_threshold}, {"curvature", scan.residual_threshold}};
  doc["mu_strategy"] = scan.mu_strategy;
  doc["verdict"] = scan.common ? "common" : "not common";
  doc["curvature_summary"] = {{"max_abs_entry_along_trajectory", max_curv_entry}};

  json samples = json::array();
  for (std::size_t i = 0; i < scan.times.size(); ++i) {
    json s;
    s["t"] = scan.times[i];
    s["fit_residual"] = scan.fit_residuals[i];
    s["curvature_residual"] = scan.curvature_residuals[i];
    samples.push_back(s);
  }
  doc["continuous"] = {{"max_fit_residual", scan.max_fit_residual},
                       {"max_curvature_residual", scan.max_curvature_residual},
                       {"samples", samples}};

  if (opts.steps >= 2) {
    Vec qprev = q0;
    Vec qcur = q0 + opts.h * v0;
    double max_res = 0.0;
    json series = json::array();
    for (int i = 1; i < opts.steps; ++i) {
      DiscreteCommonReport rep = discrete_common_solution_check(sys, qprev, qcur, opts.h, cfg);
      max_res = std::max(max_res, rep.matching_residual);
      series.push_back(rep.matching_residual);
      qprev = qcur;
      qcur = rep.qnext;
    }
    doc["discrete"] = {{"max_matching_residual", max_res}, {"residuals", series}};
  }
  return doc.dump(2) + "\n";
}

std::string diagnose_to_string(const SystemModel& model, const CliOptions& opts) {
  const int n = model.dim();
  NewtonConfig cfg = effective_newton_config(opts);
  Vec q0 = resolve_initial(opts.q0, model.default_q, n, "q");
  Vec p0 = resolve_initial(opts.p0, model.default_p, n, "p");

  std::map<std::string, std::string> ctx{{"system", model.name},
                                         {"integrator", opts.integrator},
                                         {"seed", std::to_string(opts.seed)},
                                         {"h", fmt17(opts.h)}};

  std::vector<DiagnosticReport> reports;
  auto hsys = model.make_hamiltonian();

  PhaseStepFn step_h;  // one step of size opts.h
  std::function<PhaseState(const PhaseState&, double)> step_any;
  int expected_order = 0;
  if (is_phase_integrator(opts.integrator)) {
    step_h = make_phase_step(opts.integrator, *hsys, opts.h, cfg);
    step_any = [&](const PhaseState& s, double h) {
      return make_phase_step(opts.integrator, *hsys, h, cfg)(s);
    };
    expected_order = opts.integrator == "symplectic_euler" ? 1
                     : opts.integrator == "oracle_rk4"     ? 4
                     : opts.integrator == "none"           ? 0
                                                           : 2;
  } else if (is_vakonomic_integrator(opts.integrator)) {
    if (!model.is_linear())
      throw ValidationError("integrator '" + opts.integrator +
                            "' requires a linear-constraint system");
    const LinearConstraintSystem& sys = model.linear();
    Discretization disc = opts.integrator == "vakonomic_euler" ? Discretization::Euler
                                                               : Discretization::Midpoint;
    step_any = [&sys, disc, cfg](const PhaseState& s, double h) {
      DiscreteVakStep st = discrete_vakonomic_step(sys, s.q, s.p, disc, h, std::nullopt, cfg);
      return PhaseState{st.q1, st.p1};
    };
    step_h = [&, disc](const PhaseState& s) { return step_any(s, opts.h); };
    expected_order = disc == Discretization::Euler ? 1 : 2;
  } else {
    throw ValidationError("diagnose requires a phase-space integrator (got '" + opts.integrator +
                          "')");
  }

  // symplecticity defect at the initial state and a few seeded random states
  {
    double pole_scale = model.is_linear() ? 0.0 : model.martinet().beta;
    Rng rng(opts.seed);
    double worst = symplecticity_defect([&](const PhaseState& s) { return step_h(s); },
                                        PhaseState{q0, p0}, 1e-6);
    for (int i = 0; i < 3; ++i) {
      PhaseState s = random_phase_state(rng, n, model.is_linear() ? -1 : 0, pole_scale);
      worst = std::max(
          worst, symplecticity_defect([&](const PhaseState& st) { return step_h(st); }, s, 1e-6));
    }
    double tol = opts.integrator == "none" ? 1e-9 : 1e-5;
    reports.push_back(make_report("symplecticity_defect", worst, tol, ctx));
  }

  if (expected_order > 0) {
    double slope = convergence_order(step_any, *hsys, PhaseState{q0, p0}, 1.0,
                                     {0.02, 0.01, 0.005});
    auto octx = ctx;
    octx["fitted_slope"] = fmt17(slope);
    octx["expected_order"] = std::to_string(expected_order);
    double band = expected_order == 4 ? 0.2 : 0.1;
    reports.push_back(make_report("convergence_order_deviation",
                                  std::abs(slope - expected_order), band, octx));
  }

  // conditioning of the one-step equations at the run's first pair
  if (is_vakonomic_integrator(opts.integrator)) {
    const LinearConstraintSystem& sys = model.linear();
    DiscreteVakStep first = discrete_vakonomic_step(
        sys, q0, p0,
        opts.integrator == "vakonomic_euler" ? Discretization::Euler : Discretization::Midpoint,
        opts.h, std::nullopt, cfg);
    double cond = discrete_regularity_condition(sys, q0, gather(first.q1, sys.split.free),
                                                gather(first.p1, sys.split.constrained), opts.h);
    reports.push_back(make_report("discrete_regularity_condition", cond, 1e12, ctx));
  }

  {
    PhaseState s{q0, p0};
    double h0 = model.hamiltonian_value(s.q, s.p);
    double max_drift = 0.0;
    for (int i = 0; i < opts.steps; ++i) {
      s = step_h(s);
      max_drift = std::max(max_drift, std::abs(model.hamiltonian_value(s.q, s.p) - h0));
    }
    double tol = opts.integrator == "oracle_rk4"
                     ? 1e-8
                     : (opts.integrator == "none"
                            ? 1e-15
                            : 50.0 * (1.0 + std::abs(h0)) * std::pow(opts.h, expected_order));
    auto ectx = ctx;
    ectx["steps"] = std::to_string(opts.steps);
    ectx["tolerance_rule"] = opts.integrator == "oracle_rk4"
                                 ? "fixed 1e-8"
                                 : "50*(1+|H0|)*h^order (bounded-drift heuristic)";
    reports.push_back(make_report("energy_drift", max_drift, tol, ectx));
  }

  json arr = json::array();
  for (const auto& r : reports) {
    json j;
    j["name"] = r.name;
    j["value"] = r.value;
    j["tolerance"] = r.tolerance;
    j["pass"] = r.pass;
    j["context"] = r.context;
    arr.push_back(j);
  }
  json doc;
  doc["schema"] = 1;
  doc["reports"] = arr;
  return doc.dump(2) + "\n";
}

int run_cli(const CliOptions& opts) {
  try {
    if (opts.spec_path.empty()) throw ValidationError("--spec FILE is required");
    if (opts.h <= 0.0) throw ValidationError("--h must be positive");
    if (opts.steps < 1) throw ValidationError("--steps must be at least 1");
    SystemModel model = load_system_file(opts.spec_path);

    int code = 0;
    std::string out;
    if (opts.command == "simulate") {
      out = simulate_to_string(model, opts, code);
    } else if (opts.command == "compare") {
      out = compare_to_string(model, opts);
    } else if (opts.command == "diagnose") {
      out = diagnose_to_string(model, opts);
    } else {
      throw ValidationError("unknown command '" + opts.command + "'");
    }

    if (opts.out_path.empty()) {
      std::cout << out;
    } else {
      std::ofstream f(opts.out_path, std::ios::binary);
      if (!f) throw IoError("cannot open output file '" + opts.out_path + "'");
      f << out;
      f.flush();
      if (!f) throw IoError("failed writing output file '" + opts.out_path + "'");
    }
    return code;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 3;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace geomint
