#include <doctest.h>

#include <Eigen/Cholesky>
#include <cmath>
#include <string>
#include <vector>

#include "geomint/diagnostics.hpp"
#include "geomint/linsys.hpp"
#include "test_helpers.hpp"

using namespace geomint;
using namespace geomint::testing;

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "(%.9f)", v);
  return buf;
}

/// Random system with a certifiably SPD metric: constant SPD base plus
/// nonnegative q-dependent diagonal bumps, and polynomial constraint rows.
LinearConstraintSystem random_system(Rng& rng, int n, int k) {
  Mat b(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) b(i, j) = rng.uniform(-1.0, 1.0);
  Mat base = b * b.transpose() + Mat::Identity(n, n);

  const char* names[4] = {"x", "y", "z", "w"};
  std::vector<std::string> metric;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) {
        metric.push_back(num(base(i, i)) + "+" + num(std::abs(rng.uniform(0.0, 0.5))) + "*" +
                         names[static_cast<std::size_t>((i + 1) % n)] + "^2");
      } else {
        metric.push_back(num(base(std::min(i, j), std::max(i, j))));
      }
    }

  std::vector<std::string> gamma_row;
  LinearConstraintSystem sys;
  sys.split.n = n;
  std::vector<std::string> varnames(names, names + n);
  sys.varnames = varnames;
  auto table = variable_table(sys.varnames);
  for (const std::string& e : metric) sys.metric.push_back(Expr::parse(e, table));
  sys.potential = Expr::parse(num(rng.uniform(-1.0, 1.0)) + "*" + names[0] + "^2", table);
  for (int i = 0; i < n - k; ++i) sys.split.free.push_back(i);
  for (int i = n - k; i < n; ++i) sys.split.constrained.push_back(i);
  for (int al = 0; al < k; ++al)
    for (int a = 0; a < n - k; ++a) {
      std::string e = num(rng.uniform(-1.0, 1.0)) + "*" + names[static_cast<std::size_t>(a)] +
                      "+" + num(rng.uniform(-0.5, 0.5)) + "*" +
                      names[static_cast<std::size_t>((a + 1) % n)] + "^2";
      sys.gamma_coeffs.push_back(Expr::parse(e, table));
    }
  validate_system(sys);
  return sys;
}

Vec random_vec(Rng& rng, int n, double amp = 2.0) {
  Vec v(n);
  for (int i = 0; i < n; ++i) v[i] = rng.uniform(-amp, amp);
  return v;
}

}  // namespace

TEST_CASE("reduced metric on the distribution benchmark") {
  LinearConstraintSystem sys = martinet_distribution();
  ReducedMetric rm = reduced_metric(sys, vec({0, 1, 0}));
  CHECK(rm.gamma(0, 0) == doctest::Approx(1.25).epsilon(1e-14));
  CHECK(rm.gamma(0, 1) == doctest::Approx(0.0));
  CHECK(rm.gamma(1, 1) == doctest::Approx(1.0));

  ReducedMetric flat = reduced_metric(sys, vec({0.3, 0, 0.7}));
  CHECK((flat.gamma - Mat::Identity(2, 2)).cwiseAbs().maxCoeff() == 0.0);

  LinearConstraintSystem weighted =
      make_system(3, {"2", "0", "0", "0", "1", "0", "0", "0", "1"}, "0", {"y^2/2", "0"});
  ReducedMetric w = reduced_metric(weighted, vec({0, 1, 0}));
  CHECK(w.gamma(0, 0) == doctest::Approx(2.25).epsilon(1e-14));
  CHECK(w.gamma(0, 1) == doctest::Approx(0.0));
  CHECK(w.gamma(1, 1) == doctest::Approx(1.0));

  CHECK((rm.gamma * rm.gamma_inv - Mat::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("metric SPD failures are reported") {
  LinearConstraintSystem sys = make_system(2, {"x", "0", "0", "1"}, "0", {});
  CHECK_THROWS_AS(metric_at(sys, vec({-1, 0})), NumericalError);
  LinearConstraintSystem asym = make_system(2, {"1", "x", "0", "1"}, "0", {});
  CHECK_THROWS_AS(metric_at(asym, vec({0.5, 0})), NumericalError);
}

TEST_CASE("induced hamiltonian values") {
  LinearConstraintSystem sys = martinet_distribution();
  CHECK(hamiltonian(sys, {vec({0, 1, 0}), vec({1, 0, 2})}) == doctest::Approx(1.6).epsilon(1e-14));
  CHECK(hamiltonian(sys, {vec({0.4, 0, 0.2}), vec({1, 1, 5})}) == doctest::Approx(1.0).epsilon(1e-14));

  LinearConstraintSystem with_pot = make_system(3, identity_metric(3), "x^2/2", {"y^2/2", "0"});
  Vec q = vec({0.7, -0.3, 0.1});
  CHECK(hamiltonian(with_pot, {q, Vec::Zero(3)}) == doctest::Approx(potential_at(with_pot, q)));
}

TEST_CASE("hamiltonian gradient: worked entry and finite-difference oracle") {
  LinearConstraintSystem sys = martinet_distribution();
  PhaseState s{vec({0, 1, 0}), vec({1, 0, 2})};
  HamiltonianGradient g = hamiltonian_gradient(sys, s);
  CHECK(g.dp[2] == doctest::Approx(0.8).epsilon(1e-13));

  LinearConstraintSystem with_pot = make_system(3, identity_metric(3), "x^2/2+y^2", {"y^2/2", "0"});
  PhaseState rest{vec({0.4, -0.7, 0.2}), Vec::Zero(3)};
  HamiltonianGradient gr = hamiltonian_gradient(with_pot, rest);
  CHECK(gr.dp.cwiseAbs().maxCoeff() == 0.0);
  CHECK((gr.dq - potential_gradient(with_pot, rest.q)).cwiseAbs().maxCoeff() == 0.0);

  Rng rng(42);
  for (int trial = 0; trial < 100; ++trial) {
    LinearConstraintSystem rsys = trial % 2 ? random_system(rng, 3, 1) : with_pot;
    PhaseState st{random_vec(rng, 3), random_vec(rng, 3)};
    HamiltonianGradient grad = hamiltonian_gradient(rsys, st);
    const double step = 1e-6;
    for (int i = 0; i < 3; ++i) {
      PhaseState qp = st, qm = st, pp = st, pm = st;
      qp.q[i] += step;
      qm.q[i] -= step;
      pp.p[i] += step;
      pm.p[i] -= step;
      double fd_q = (hamiltonian(rsys, qp) - hamiltonian(rsys, qm)) / (2 * step);
      double fd_p = (hamiltonian(rsys, pp) - hamiltonian(rsys, pm)) / (2 * step);
      CHECK(std::abs(grad.dq[i] - fd_q) <= 1e-6 * (1.0 + std::abs(fd_q)));
      CHECK(std::abs(grad.dp[i] - fd_p) <= 1e-6 * (1.0 + std::abs(fd_p)));
    }
  }
}

TEST_CASE("legendre map: worked values and round trips") {
  LinearConstraintSystem sys = martinet_distribution();
  VakonomicState s{vec({0, 1, 0}), vec({1, 0}), vec({2})};
  PhaseState ph = constrained_legendre(sys, s);
  CHECK(ph.p[0] == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(ph.p[1] == doctest::Approx(0.0));
  CHECK(ph.p[2] == doctest::Approx(2.0));

  VakonomicState back = legendre_inverse(sys, ph);
  CHECK((back.vfree - s.vfree).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((back.mu - s.mu).cwiseAbs().maxCoeff() <= 1e-12);

  VakonomicState zero{vec({0.3, -0.4, 0.9}), Vec::Zero(2), Vec::Zero(1)};
  CHECK(constrained_legendre(sys, zero).p.cwiseAbs().maxCoeff() == 0.0);
  VakonomicState rest = legendre_inverse(sys, {vec({0.3, -0.4, 0.9}), Vec::Zero(3)});
  CHECK(rest.vfree.cwiseAbs().maxCoeff() == 0.0);
  CHECK(rest.mu.cwiseAbs().maxCoeff() == 0.0);

  Rng rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    LinearConstraintSystem rsys = random_system(rng, 3, 1);
    VakonomicState vs{random_vec(rng, 3), random_vec(rng, 2), random_vec(rng, 1)};
    VakonomicState round = legendre_inverse(rsys, constrained_legendre(rsys, vs));
    CHECK((round.vfree - vs.vfree).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((round.mu - vs.mu).cwiseAbs().maxCoeff() <= 1e-12);
    PhaseState st{random_vec(rng, 3), random_vec(rng, 3)};
    PhaseState round2 = constrained_legendre(rsys, legendre_inverse(rsys, st));
    CHECK((round2.p - st.p).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("energy: rest value, worked value, multiplier independence, H o FL") {
  LinearConstraintSystem sys = martinet_distribution();
  LinearConstraintSystem with_pot = make_system(3, identity_metric(3), "x^2/2", {"y^2/2", "0"});

  VakonomicState rest{vec({0.9, 0.1, -0.2}), Vec::Zero(2), vec({3})};
  CHECK(energy(with_pot, rest) == doctest::Approx(potential_at(with_pot, rest.q)));

  VakonomicState s{vec({0, 1, 0}), vec({1, 0}), vec({2})};
  CHECK(energy(sys, s) == doctest::Approx(0.625).epsilon(1e-14));
  CHECK(hamiltonian(sys, constrained_legendre(sys, s)) == doctest::Approx(0.625).epsilon(1e-14));

  VakonomicState bumped = s;
  bumped.mu[0] = -17.0;
  CHECK(energy(sys, bumped) == energy(sys, s));

  Rng rng(1234);
  for (int trial = 0; trial < 1000; ++trial) {
    LinearConstraintSystem rsys = trial % 3 ? random_system(rng, 3, 1) : random_system(rng, 4, 2);
    int nf = rsys.nf(), k = rsys.k();
    VakonomicState vs{random_vec(rng, rsys.n()), random_vec(rng, nf), random_vec(rng, k)};
    double el = energy(rsys, vs);
    double h = hamiltonian(rsys, constrained_legendre(rsys, vs));
    CHECK(std::abs(el - h) <= 1e-10);
  }
}

TEST_CASE("derivative identity of the inverse reduced metric") {
  Rng rng(555);
  for (int trial = 0; trial < 50; ++trial) {
    LinearConstraintSystem sys = random_system(rng, 3, 1);
    Vec q = random_vec(rng, 3);
    ReducedMetric rm = reduced_metric(sys, q);
    for (int i = 0; i < 3; ++i) {
      Mat lhs = rm.dgamma_inv(i) * rm.gamma;
      Mat rhs = -rm.gamma_inv * rm.dgamma[static_cast<std::size_t>(i)];
      CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-10);
    }
  }
}

TEST_CASE("reduced metric stays SPD whenever the metric is SPD") {
  Rng rng(2222);
  int samples = 0;
  for (int sys_trial = 0; sys_trial < 50; ++sys_trial) {
    int n = 2 + static_cast<int>(rng.uniform(0.0, 3.0));
    int k = 1 + static_cast<int>(rng.uniform(0.0, std::min(2, n - 1) + 0.0));
    k = std::min(k, n - 1);
    LinearConstraintSystem sys = random_system(rng, n, k);
    for (int point = 0; point < 20; ++point) {
      Vec q = random_vec(rng, n);
      ReducedMetric rm = reduced_metric(sys, q);  // throws on Cholesky failure
      Eigen::LLT<Mat> llt(rm.gamma);
      CHECK(llt.info() == Eigen::Success);
      ++samples;
    }
  }
  CHECK(samples == 1000);
}
