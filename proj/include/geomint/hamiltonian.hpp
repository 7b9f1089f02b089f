#pragma once

#include <memory>

#include "geomint/linsys.hpp"
#include "geomint/types.hpp"

namespace geomint {

/// Abstract Hamiltonian on a flat phase space: value, exact first
/// derivatives, and exact second-derivative blocks. The implicit one-step
/// maps consume this interface, so any system that can price H and its
/// derivatives plugs into every integrator.
class HamiltonianSystem {
public:
  virtual ~HamiltonianSystem() = default;

  virtual int dim() const = 0;
  virtual double value(const Vec& q, const Vec& p) const = 0;
  virtual void gradient(const Vec& q, const Vec& p, Vec& dq, Vec& dp) const = 0;

  /// Second derivatives: qq(i,j) = d2H/dq_i dq_j, qp(i,j) = d2H/dq_i dp_j,
  /// pp(i,j) = d2H/dp_i dp_j.
  virtual void hessian(const Vec& q, const Vec& p, Mat& qq, Mat& qp, Mat& pp) const = 0;
};

/// Hamiltonian induced by a linear-constraint system. The gradient comes
/// from the hand-assembled chain rule in linsys; the Hessian comes from an
/// independent nested-dual sweep of the same formula, which doubles as a
/// cross-check of the analytic route.
class LinSysHamiltonian final : public HamiltonianSystem {
public:
  explicit LinSysHamiltonian(LinearConstraintSystem sys) : sys_(std::move(sys)) {}

  const LinearConstraintSystem& system() const { return sys_; }

  int dim() const override { return sys_.n(); }
  double value(const Vec& q, const Vec& p) const override;
  void gradient(const Vec& q, const Vec& p, Vec& dq, Vec& dp) const override;
  void hessian(const Vec& q, const Vec& p, Mat& qq, Mat& qp, Mat& pp) const override;

private:
  LinearConstraintSystem sys_;
};

/// Splits the packed Hessian of a scalar f(q,p) into the three blocks.
void split_hessian_blocks(const Mat& full, int n, Mat& qq, Mat& qp, Mat& pp);

}  // namespace geomint
