#include "geomint/linsys.hpp"

#include <Eigen/Cholesky>
#include <sstream>

namespace geomint {

namespace {

std::string point_string(const Vec& q) {
  std::ostringstream os;
  os << "(";
  for (Eigen::Index i = 0; i < q.size(); ++i) os << (i ? "," : "") << q[i];
  os << ")";
  return os.str();
}

std::span<const double> as_span(const Vec& q) {
  return {q.data(), static_cast<std::size_t>(q.size())};
}

}  // namespace

void validate_system(const LinearConstraintSystem& sys) {
  require_valid(sys.split);
  const int n = sys.n();
  if (static_cast<int>(sys.varnames.size()) != n)
    throw ValidationError("system has " + std::to_string(sys.varnames.size()) +
                          " variable names for dimension " + std::to_string(n));
  if (static_cast<int>(sys.metric.size()) != n * n)
    throw ValidationError("metric must have n*n entries");
  if (static_cast<int>(sys.gamma_coeffs.size()) != sys.k() * sys.nf())
    throw ValidationError("constraint coefficients must have k*(n-k) entries");
  for (const Expr& e : sys.metric)
    if (e.max_var_index() >= n) throw ValidationError("metric entry references unknown variable");
  if (sys.potential.max_var_index() >= n)
    throw ValidationError("potential references unknown variable");
  for (const Expr& e : sys.gamma_coeffs)
    if (e.max_var_index() >= n)
      throw ValidationError("constraint coefficient references unknown variable");
}

Mat metric_at(const LinearConstraintSystem& sys, const Vec& q) {
  const int n = sys.n();
  Mat g(n, n);
  auto qs = as_span(q);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = sys.metric_entry(i, j).eval(qs);
  double scale = g.cwiseAbs().maxCoeff();
  if ((g - g.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + scale))
    throw NumericalError("metric not symmetric at q=" + point_string(q));
  Eigen::LLT<Mat> llt(g);
  if (llt.info() != Eigen::Success)
    throw NumericalError("metric not SPD at q=" + point_string(q));
  return g;
}

Mat gamma_at(const LinearConstraintSystem& sys, const Vec& q) {
  Mat g(sys.k(), sys.nf());
  auto qs = as_span(q);
  for (int al = 0; al < sys.k(); ++al)
    for (int a = 0; a < sys.nf(); ++a) g(al, a) = sys.gamma_entry(al, a).eval(qs);
  return g;
}

double potential_at(const LinearConstraintSystem& sys, const Vec& q) {
  return sys.potential.eval(as_span(q));
}

Vec potential_gradient(const LinearConstraintSystem& sys, const Vec& q) {
  Vec g(sys.n());
  for (int i = 0; i < sys.n(); ++i) g[i] = sys.potential.diff(as_span(q), i);
  return g;
}

ReducedMetric reduced_metric(const LinearConstraintSystem& sys, const Vec& q) {
  const int n = sys.n();
  const int nf = sys.nf();
  const int k = sys.k();
  auto qs = as_span(q);

  Mat g = metric_at(sys, q);
  Mat gam_coef = gamma_at(sys, q);

  // metric blocks in the (free, constrained) ordering
  Mat g_ff(nf, nf), g_fc(nf, k), g_cc(k, k);
  for (int a = 0; a < nf; ++a) {
    for (int b = 0; b < nf; ++b) g_ff(a, b) = g(sys.split.free[a], sys.split.free[b]);
    for (int al = 0; al < k; ++al) g_fc(a, al) = g(sys.split.free[a], sys.split.constrained[al]);
  }
  for (int al = 0; al < k; ++al)
    for (int be = 0; be < k; ++be)
      g_cc(al, be) = g(sys.split.constrained[al], sys.split.constrained[be]);

  ReducedMetric rm;
  Mat cross = g_fc * gam_coef;  // (nf x nf)
  rm.gamma = g_ff + cross + cross.transpose() + gam_coef.transpose() * g_cc * gam_coef;

  Eigen::LLT<Mat> llt(rm.gamma);
  if (llt.info() != Eigen::Success)
    throw NumericalError("reduced metric not SPD at q=" + point_string(q));
  rm.gamma_inv = llt.solve(Mat::Identity(nf, nf));

  // exact derivative of gamma per coordinate, by the product rule
  rm.dgamma.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    Mat dg_ff(nf, nf), dg_fc(nf, k), dg_cc(k, k), dgam(k, nf);
    for (int a = 0; a < nf; ++a) {
      for (int b = 0; b < nf; ++b)
        dg_ff(a, b) = sys.metric_entry(sys.split.free[a], sys.split.free[b]).diff(qs, i);
      for (int al = 0; al < k; ++al)
        dg_fc(a, al) =
            sys.metric_entry(sys.split.free[a], sys.split.constrained[al]).diff(qs, i);
    }
    for (int al = 0; al < k; ++al)
      for (int be = 0; be < k; ++be)
        dg_cc(al, be) =
            sys.metric_entry(sys.split.constrained[al], sys.split.constrained[be]).diff(qs, i);
    for (int al = 0; al < k; ++al)
      for (int a = 0; a < nf; ++a) dgam(al, a) = sys.gamma_entry(al, a).diff(qs, i);

    Mat dcross = dg_fc * gam_coef + g_fc * dgam;
    rm.dgamma[static_cast<std::size_t>(i)] =
        dg_ff + dcross + dcross.transpose() + dgam.transpose() * g_cc * gam_coef +
        gam_coef.transpose() * dg_cc * gam_coef + gam_coef.transpose() * g_cc * dgam;
  }
  return rm;
}

Vec absorbed_momentum(const LinearConstraintSystem& sys, const Vec& q, const Vec& p) {
  Mat gam_coef = gamma_at(sys, q);
  Vec p_free = gather(p, sys.split.free);
  Vec p_con = gather(p, sys.split.constrained);
  return p_free + gam_coef.transpose() * p_con;
}

double hamiltonian(const LinearConstraintSystem& sys, const PhaseState& state) {
  ReducedMetric rm = reduced_metric(sys, state.q);
  Vec big_p = absorbed_momentum(sys, state.q, state.p);
  return 0.5 * big_p.dot(rm.gamma_inv * big_p) + potential_at(sys, state.q);
}

HamiltonianGradient hamiltonian_gradient(const LinearConstraintSystem& sys,
                                         const PhaseState& state) {
  const int n = sys.n();
  const int nf = sys.nf();
  const int k = sys.k();
  auto qs = as_span(state.q);

  ReducedMetric rm = reduced_metric(sys, state.q);
  Mat gam_coef = gamma_at(sys, state.q);
  Vec big_p = absorbed_momentum(sys, state.q, state.p);
  Vec u = rm.gamma_inv * big_p;  // free velocities of the flow
  Vec p_con = gather(state.p, sys.split.constrained);

  HamiltonianGradient out;
  out.dp = Vec::Zero(n);
  scatter(out.dp, sys.split.free, u);
  scatter(out.dp, sys.split.constrained, gam_coef * u);

  out.dq = potential_gradient(sys, state.q);
  for (int i = 0; i < n; ++i) {
    // d(gamma^{-1})/dq contracted twice with P, plus P's own q-dependence
    out.dq[i] -= 0.5 * u.dot(rm.dgamma[static_cast<std::size_t>(i)] * u);
    for (int a = 0; a < nf; ++a) {
      double dP_a = 0.0;
      for (int al = 0; al < k; ++al) dP_a += p_con[al] * sys.gamma_entry(al, a).diff(qs, i);
      out.dq[i] += u[a] * dP_a;
    }
  }
  return out;
}

PhaseState constrained_legendre(const LinearConstraintSystem& sys, const VakonomicState& s) {
  ReducedMetric rm = reduced_metric(sys, s.q);
  Mat gam_coef = gamma_at(sys, s.q);
  Vec p_free = rm.gamma * s.vfree - gam_coef.transpose() * s.mu;
  PhaseState out;
  out.q = s.q;
  out.p = Vec::Zero(sys.n());
  scatter(out.p, sys.split.free, p_free);
  scatter(out.p, sys.split.constrained, s.mu);
  return out;
}

VakonomicState legendre_inverse(const LinearConstraintSystem& sys, const PhaseState& state) {
  ReducedMetric rm = reduced_metric(sys, state.q);
  Vec big_p = absorbed_momentum(sys, state.q, state.p);
  VakonomicState out;
  out.q = state.q;
  out.vfree = rm.gamma_inv * big_p;
  out.mu = gather(state.p, sys.split.constrained);
  return out;
}

double energy(const LinearConstraintSystem& sys, const VakonomicState& s) {
  ReducedMetric rm = reduced_metric(sys, s.q);
  return 0.5 * s.vfree.dot(rm.gamma * s.vfree) + potential_at(sys, s.q);
}

}  // namespace geomint
