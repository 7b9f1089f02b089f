#include <doctest.h>

#include <cmath>

#include "geomint/continuous.hpp"
#include "geomint/diagnostics.hpp"
#include "geomint/integrators.hpp"
#include "geomint/martinet.hpp"
#include "test_helpers.hpp"

using namespace geomint;
using namespace geomint::testing;

TEST_CASE("symplecticity defect: identity, exact flow, and the explicit-euler control") {
  OneStepMap identity = [](const PhaseState& s) { return s; };
  CHECK(symplecticity_defect(identity, {vec({0.3}), vec({-0.7})}, 1e-6) <= 1e-9);

  const double h = 0.1;
  OneStepMap rotation = [h](const PhaseState& s) {
    return PhaseState{vec({s.q[0] * std::cos(h) + s.p[0] * std::sin(h)}),
                      vec({-s.q[0] * std::sin(h) + s.p[0] * std::cos(h)})};
  };
  CHECK(symplecticity_defect(rotation, {vec({1.0}), vec({0.0})}, 1e-6) <= 1e-9);

  LinSysHamiltonian osc(oscillator());
  OneStepMap explicit_euler = [&](const PhaseState& s) { return explicit_euler_step(osc, s, h); };
  double defect = symplecticity_defect(explicit_euler, {vec({1.0}), vec({0.0})}, 1e-6);
  CHECK(defect == doctest::Approx(h * h).epsilon(0.1));

  OneStepMap veuler = [&](const PhaseState& s) { return symplectic_euler_step(osc, s, h); };
  CHECK(symplecticity_defect(veuler, {vec({1.0}), vec({0.0})}, 1e-6) <= 1e-5);

  MartinetHamiltonian mart({1.0});
  OneStepMap meuler = [&](const PhaseState& s) { return symplectic_euler_step(mart, s, h); };
  CHECK(symplecticity_defect(meuler, {vec({0.1, 0.4, 0.0}), vec({0.9, 0.5, 0.7})}, 1e-6) <= 1e-5);

  CHECK_THROWS_AS(symplecticity_defect(identity, {vec({0.0}), vec({0.0})}, 0.0), ValidationError);
}

TEST_CASE("energy drift: exact flow, long verlet run, oracle accuracy") {
  LinSysHamiltonian osc(oscillator());
  auto h_eval = [&](const Vec& q, const Vec& p) { return osc.value(q, p); };

  // trajectory sampled from the exact rotation drifts only by round-off
  Trajectory exact({{"q", 1}, {"p", 1}});
  for (int i = 0; i <= 200; ++i) {
    double t = 0.01 * i;
    exact.append(t == 0.0 ? 0.0 : t, vec({std::cos(t), -std::sin(t)}));
  }
  auto [mx, fin] = energy_drift(h_eval, exact);
  CHECK(mx <= 1e-14);
  CHECK(fin <= 1e-14);

  // long symplectic run: bounded oscillation of H, no secular growth
  const double h = 0.1;
  PhaseState s{vec({1.0}), vec({0.0})};
  double early_max = 0.0, running = 0.0, h0 = osc.value(s.q, s.p);
  for (int i = 1; i <= 10000; ++i) {
    s = stormer_verlet_step(osc, s, h);
    double drift = std::abs(osc.value(s.q, s.p) - h0);
    running = std::max(running, drift);
    if (i == 100) early_max = running;
  }
  double final_drift = std::abs(osc.value(s.q, s.p) - h0);
  CHECK(final_drift <= 2.0 * early_max);

  Trajectory rk =
      oracle_integrate(hamiltonian_field(osc), vec({1.0, 0.0}), 1e-3, 1000, {{"q", 1}, {"p", 1}});
  auto [rk_max, rk_fin] = energy_drift(h_eval, rk);
  CHECK(rk_max <= 1e-8);
  (void)rk_fin;
}

TEST_CASE("constraint residual observables") {
  LinearConstraintSystem md = martinet_distribution();
  Vec q0 = vec({0.2, 0.3, 0.1});
  Vec v0 = vec({0.7, -0.3, 0.5 * 0.3 * 0.3 * 0.7});
  Trajectory noh = oracle_integrate(nonholonomic_field(md), pack_tangent({q0, v0}), 1e-3, 1000,
                                    {{"q", 3}, {"v", 3}});
  CHECK(constraint_residual(md, noh, ResidualKind::Continuous) <= 1e-7);

  // a deliberately seeded violation is reported at its magnitude
  Trajectory bad({{"q", 3}, {"v", 3}});
  Vec row(6);
  row << q0, v0;
  bad.append(0.0, row);
  row[5] += 0.5;
  bad.append(1.0, row);
  CHECK(constraint_residual(md, bad, ResidualKind::Continuous) == doctest::Approx(0.5));

  CHECK_THROWS_AS(constraint_residual(md, Trajectory({{"q", 3}}), ResidualKind::Continuous),
                  ValidationError);
}

TEST_CASE("fitted convergence orders") {
  LinSysHamiltonian osc(oscillator());
  MartinetHamiltonian mart({1.0});
  PhaseState s_osc{vec({1.0}), vec({0.0})};
  PhaseState s_mart{vec({0.1, 0.4, 0.0}), vec({0.9, 0.5, 0.7})};
  const std::vector<double> hs = {0.02, 0.01, 0.005};

  auto euler = [&](const HamiltonianSystem& hs_) {
    return [&hs_](const PhaseState& st, double hh) { return symplectic_euler_step(hs_, st, hh); };
  };
  auto mid = [&](const HamiltonianSystem& hs_) {
    return [&hs_](const PhaseState& st, double hh) { return midpoint_step(hs_, st, hh); };
  };
  auto verlet = [&](const HamiltonianSystem& hs_) {
    return [&hs_](const PhaseState& st, double hh) { return stormer_verlet_step(hs_, st, hh); };
  };

  CHECK(convergence_order(euler(osc), osc, s_osc, 1.0, hs) == doctest::Approx(1.0).epsilon(0.1));
  CHECK(convergence_order(mid(mart), mart, s_mart, 1.0, hs) == doctest::Approx(2.0).epsilon(0.05));
  CHECK(convergence_order(verlet(mart), mart, s_mart, 1.0, hs) ==
        doctest::Approx(2.0).epsilon(0.05));

  // the oracle itself fits fourth order against a finer reference
  auto rk4 = [&](const PhaseState& st, double hh) {
    return unpack_phase(rk4_step(hamiltonian_field(osc), pack_phase(st), hh), 1);
  };
  double slope = convergence_order(rk4, osc, s_osc, 1.0, hs);
  CHECK(std::abs(slope - 4.0) <= 0.2);

  CHECK_THROWS_AS(convergence_order(rk4, osc, s_osc, 1.0, {0.02, 0.01}), ValidationError);
  CHECK_THROWS_AS(convergence_order(rk4, osc, s_osc, 1.0, {0.02, 0.015, 0.011}), ValidationError);
}

TEST_CASE("random draws are deterministic and respect the pole clamp") {
  Rng a(99), b(99);
  for (int i = 0; i < 100; ++i) CHECK(a.uniform(-2, 2) == b.uniform(-2, 2));

  Rng rng(7);
  for (int i = 0; i < 200; ++i) {
    PhaseState s = random_phase_state(rng, 3, 0, 1.0);
    CHECK(1.0 + s.q[0] >= 0.5);
    CHECK(s.q.cwiseAbs().maxCoeff() <= 2.0);
    CHECK(s.p.cwiseAbs().maxCoeff() <= 2.0);
  }
}

TEST_CASE("diagnostic reports pin pass to the tolerance comparison") {
  DiagnosticReport r = make_report("check", 0.5, 1.0, {{"k", "v"}});
  CHECK(r.pass);
  CHECK(!make_report("check", 2.0, 1.0).pass);
}
