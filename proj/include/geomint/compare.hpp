#pragma once

#include <string>
#include <vector>

#include "geomint/discrete.hpp"
#include "geomint/linsys.hpp"
#include "geomint/newton.hpp"
#include "geomint/types.hpp"

namespace geomint {

/// Curvature of the constraint connection: R[alpha](a, b), antisymmetric in
/// (a, b) by construction.
struct CurvatureTensor {
  std::vector<Mat> R;  // one (n-k) x (n-k) matrix per constraint

  double operator()(int alpha, int a, int b) const {
    return R[static_cast<std::size_t>(alpha)](a, b);
  }
};

/// R^alpha_ab = d_a Gamma^alpha_b - d_b Gamma^alpha_a
///            + Gamma^beta_a d_beta Gamma^alpha_b - Gamma^beta_b d_beta Gamma^alpha_a,
/// assembled antisymmetrically from exact derivatives.
CurvatureTensor curvature(const LinearConstraintSystem& sys, const Vec& q);

/// r_b = sum_{a,alpha} vfree^a mu_alpha R^alpha_ab(q). Zero characterizes
/// states where a reaction-force trajectory can also be variational.
Vec comparison_residual(const LinearConstraintSystem& sys, const Vec& q, const Vec& vfree,
                        const Vec& mu);

/// Verdict of scanning one reaction-force trajectory for membership in the
/// constrained-variational dynamics. The multiplier time series is
/// reconstructed per sample by least squares against the variational
/// momentum-balance equations (a reconstruction choice, labelled as such);
/// a trajectory counts as common when both the fit residual and the
/// curvature contraction stay below the thresholds.
struct CommonSolutionReport {
  bool common = false;
  double fit_threshold = 1e-6;
  double residual_threshold = 1e-6;
  double max_fit_residual = 0.0;
  double max_curvature_residual = 0.0;
  std::vector<double> times;
  std::vector<double> fit_residuals;
  std::vector<double> curvature_residuals;
  Mat mu;  // samples x k, the fitted multipliers
  std::string mu_strategy = "per-sample least squares";
};

/// Scans a trajectory with blocks "q" and "v" produced by the continuous
/// reaction-force dynamics.
CommonSolutionReport common_solution_scan(const LinearConstraintSystem& sys,
                                          const Trajectory& traj);

/// Discrete counterpart on one configuration triple: runs the discrete
/// reaction-force step from (qprev, qcur), then asks whether multipliers
/// exist making the same configurations satisfy the discrete variational
/// matching equations, by least squares over the two step multipliers.
struct DiscreteCommonReport {
  Vec qnext;
  Vec lambda_nonholonomic;
  double matching_residual = 0.0;   // infinity norm of the best LS fit
  double phi_prev_residual = 0.0;   // discrete constraint on (qprev, qcur)
  Vec lambda_fit;                   // the 2k fitted multipliers
};

DiscreteCommonReport discrete_common_solution_check(const LinearConstraintSystem& sys,
                                                    const Vec& qprev, const Vec& qcur, double h,
                                                    const NewtonConfig& cfg = {});

}  // namespace geomint
