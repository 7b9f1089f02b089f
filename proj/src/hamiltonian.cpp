#include "geomint/hamiltonian.hpp"

#include "geomint/autodiff.hpp"

namespace geomint {

void split_hessian_blocks(const Mat& full, int n, Mat& qq, Mat& qp, Mat& pp) {
  qq = full.topLeftCorner(n, n);
  qp = full.topRightCorner(n, n);
  pp = full.bottomRightCorner(n, n);
}

double LinSysHamiltonian::value(const Vec& q, const Vec& p) const {
  return hamiltonian(sys_, PhaseState{q, p});
}

void LinSysHamiltonian::gradient(const Vec& q, const Vec& p, Vec& dq, Vec& dp) const {
  HamiltonianGradient g = hamiltonian_gradient(sys_, PhaseState{q, p});
  dq = std::move(g.dq);
  dp = std::move(g.dp);
}

void LinSysHamiltonian::hessian(const Vec& q, const Vec& p, Mat& qq, Mat& qp, Mat& pp) const {
  const int n = sys_.n();
  Vec packed(2 * n);
  packed << q, p;
  Mat full = fn_hessian(
      [this](const auto& x) { return hamiltonian_packed(sys_, x); }, packed);
  split_hessian_blocks(full, n, qq, qp, pp);
}

}  // namespace geomint
