#include "geomint/compare.hpp"

#include <Eigen/SVD>

#include "geomint/continuous.hpp"

namespace geomint {

namespace {

std::span<const double> as_span(const Vec& q) {
  return {q.data(), static_cast<std::size_t>(q.size())};
}

/// Least-squares minimizer of ||A x - b||_2 with the minimum-norm convention
/// on rank deficiency.
Vec least_squares(const Mat& a, const Vec& b) {
  if (a.cols() == 0) return Vec(0);
  Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(1e-12);
  return svd.solve(b);
}

}  // namespace

CurvatureTensor curvature(const LinearConstraintSystem& sys, const Vec& q) {
  const int nf = sys.nf();
  const int k = sys.k();
  auto qs = as_span(q);
  Mat gam_coef = gamma_at(sys, q);

  // dgam(i) entry (alpha, a) = d Gamma^alpha_a / dq^i for full coordinate i
  auto dgamma = [&](int alpha, int a, int i) { return sys.gamma_entry(alpha, a).diff(qs, i); };

  CurvatureTensor out;
  out.R.resize(static_cast<std::size_t>(k), Mat::Zero(nf, nf));
  for (int al = 0; al < k; ++al) {
    for (int a = 0; a < nf; ++a) {
      for (int b = a + 1; b < nf; ++b) {
        int ia = sys.split.free[static_cast<std::size_t>(a)];
        int ib = sys.split.free[static_cast<std::size_t>(b)];
        double val = dgamma(al, b, ia) - dgamma(al, a, ib);
        for (int be = 0; be < k; ++be) {
          int ibe = sys.split.constrained[static_cast<std::size_t>(be)];
          val += gam_coef(be, a) * dgamma(al, b, ibe) - gam_coef(be, b) * dgamma(al, a, ibe);
        }
        out.R[static_cast<std::size_t>(al)](a, b) = val;
        out.R[static_cast<std::size_t>(al)](b, a) = -val;
      }
    }
  }
  return out;
}

Vec comparison_residual(const LinearConstraintSystem& sys, const Vec& q, const Vec& vfree,
                        const Vec& mu) {
  const int nf = sys.nf();
  const int k = sys.k();
  CurvatureTensor r = curvature(sys, q);
  Vec out = Vec::Zero(nf);
  for (int b = 0; b < nf; ++b)
    for (int a = 0; a < nf; ++a)
      for (int al = 0; al < k; ++al) out[b] += vfree[a] * mu[al] * r(al, a, b);
  return out;
}

CommonSolutionReport common_solution_scan(const LinearConstraintSystem& sys,
                                          const Trajectory& traj) {
  if (!traj.has_block("q") || !traj.has_block("v"))
    throw ValidationError("common_solution_scan needs a trajectory with q and v blocks");
  const int n = sys.n();
  const int nf = sys.nf();
  const int k = sys.k();

  CommonSolutionReport report;
  report.mu = Mat::Zero(traj.rows(), k);

  for (int r = 0; r < traj.rows(); ++r) {
    Vec q = traj.block_row(r, "q");
    Vec v = traj.block_row(r, "v");
    Vec vfree = gather(v, sys.split.free);

    NonholonomicRhs rhs = nonholonomic_rhs(sys, TangentState{q, v});
    Vec adot_free = gather(rhs.vdot, sys.split.free);

    ReducedMetric rm = reduced_metric(sys, q);
    Mat gam_coef = gamma_at(sys, q);
    Vec grad_v = potential_gradient(sys, q);
    CurvatureTensor curv = curvature(sys, q);

    // the variational momentum balance along the sampled motion, with the
    // multiplier rates eliminated through the constrained-block equations
    Vec c(nf);
    for (int a = 0; a < nf; ++a) {
      int ia = sys.split.free[static_cast<std::size_t>(a)];
      double lhs = rm.gamma.row(a).dot(adot_free);
      for (int i = 0; i < n; ++i)
        lhs += v[i] * rm.dgamma[static_cast<std::size_t>(i)].row(a).dot(vfree);
      lhs -= 0.5 * vfree.dot(rm.dgamma[static_cast<std::size_t>(ia)] * vfree);
      lhs += grad_v[ia];
      for (int al = 0; al < k; ++al) {
        int ial = sys.split.constrained[static_cast<std::size_t>(al)];
        lhs -= gam_coef(al, a) *
               (0.5 * vfree.dot(rm.dgamma[static_cast<std::size_t>(ial)] * vfree) - grad_v[ial]);
      }
      c[a] = lhs;
    }

    // coefficient of the unknown multipliers: the curvature contraction
    Mat b_mat(nf, k);
    for (int a = 0; a < nf; ++a)
      for (int al = 0; al < k; ++al) {
        double acc = 0.0;
        for (int b = 0; b < nf; ++b) acc += vfree[b] * curv(al, b, a);
        b_mat(a, al) = acc;
      }

    Vec mu_fit = least_squares(b_mat, c);
    double fit_res = k ? (b_mat * mu_fit - c).cwiseAbs().maxCoeff() : c.cwiseAbs().maxCoeff();
    Vec curv_res = comparison_residual(sys, q, vfree, mu_fit);
    double curv_max = nf ? curv_res.cwiseAbs().maxCoeff() : 0.0;

    report.times.push_back(traj.times()[static_cast<std::size_t>(r)]);
    report.fit_residuals.push_back(fit_res);
    report.curvature_residuals.push_back(curv_max);
    report.mu.row(r) = mu_fit.transpose();
    report.max_fit_residual = std::max(report.max_fit_residual, fit_res);
    report.max_curvature_residual = std::max(report.max_curvature_residual, curv_max);
  }

  report.common = report.max_fit_residual <= report.fit_threshold &&
                  report.max_curvature_residual <= report.residual_threshold;
  return report;
}

DiscreteCommonReport discrete_common_solution_check(const LinearConstraintSystem& sys,
                                                    const Vec& qprev, const Vec& qcur, double h,
                                                    const NewtonConfig& cfg) {
  const int n = sys.n();
  const int k = sys.k();
  const Discretization disc = Discretization::Euler;

  DiscreteNonholonomicStep step = discrete_nonholonomic_step(sys, qprev, qcur, h, std::nullopt, cfg);

  DiscreteCommonReport report;
  report.qnext = step.qnext;
  report.lambda_nonholonomic = step.lambda;
  Vec phi_prev = discrete_constraint_values(sys, disc, qprev, qcur, h);
  report.phi_prev_residual = k ? phi_prev.cwiseAbs().maxCoeff() : 0.0;

  // variational matching over the same configurations: momenta exist iff the
  // two step multipliers can absorb the mismatch of the Lagrangian slopes
  Vec d2_prev = discrete_lagrangian_slot_gradient(sys, disc, qprev, qcur, h, 1);
  Vec d1_next = discrete_lagrangian_slot_gradient(sys, disc, qcur, step.qnext, h, 0);
  Mat dphi2_prev = discrete_constraint_slot_jacobian(sys, disc, qprev, qcur, h, 1);
  Mat dphi1_next = discrete_constraint_slot_jacobian(sys, disc, qcur, step.qnext, h, 0);

  Mat a_mat(n, 2 * k);
  a_mat.leftCols(k) = dphi2_prev.transpose();
  a_mat.rightCols(k) = dphi1_next.transpose();
  Vec rhs = -(d2_prev + d1_next);

  report.lambda_fit = least_squares(a_mat, rhs);
  Vec resid = a_mat * report.lambda_fit - rhs;
  report.matching_residual = resid.cwiseAbs().maxCoeff();
  return report;
}

}  // namespace geomint
