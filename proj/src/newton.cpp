#include "geomint/newton.hpp"

#include <Eigen/LU>

#include "geomint/errors.hpp"

namespace geomint {

namespace {

Mat fd_jacobian(const std::function<Vec(const Vec&)>& f, const Vec& x, double step) {
  const int n = static_cast<int>(x.size());
  Vec probe = x;
  probe[0] += step;  // sizes the output without assuming f's dimension
  Vec f0 = f(x);
  const int m = static_cast<int>(f0.size());
  Mat j(m, n);
  for (int i = 0; i < n; ++i) {
    Vec xp = x, xm = x;
    xp[i] += step;
    xm[i] -= step;
    j.col(i) = (f(xp) - f(xm)) / (2.0 * step);
  }
  return j;
}

}  // namespace

Vec solve_implicit(const ImplicitProblem& problem, const Vec& x0, const NewtonConfig& cfg) {
  if (cfg.tol <= 0.0) throw ValidationError("newton tolerance must be positive");
  if (cfg.max_iter < 1) throw ValidationError("newton max_iter must be at least 1");

  const bool use_exact = cfg.jacobian == JacobianMode::ExactDual && problem.jacobian;

  Vec x = x0;
  Vec f = problem.residual(x);
  double nrm = f.size() ? f.cwiseAbs().maxCoeff() : 0.0;

  for (int it = 0; it < cfg.max_iter; ++it) {
    if (nrm <= cfg.tol) return x;

    Mat j = use_exact ? problem.jacobian(x) : fd_jacobian(problem.residual, x, cfg.fd_step);
    Eigen::FullPivLU<Mat> lu(j);
    if (!lu.isInvertible()) throw SingularJacobian(it);
    Vec delta = lu.solve(-f);

    bool accepted = false;
    for (double t = 1.0; t >= 0x1p-10; t *= 0.5) {
      Vec xt = x + t * delta;
      Vec ft = problem.residual(xt);
      double nt = ft.size() ? ft.cwiseAbs().maxCoeff() : 0.0;
      if (nt < nrm) {
        x = std::move(xt);
        f = std::move(ft);
        nrm = nt;
        accepted = true;
        break;
      }
    }
    if (!accepted) throw NoConvergence(it + 1, nrm);
  }
  if (nrm <= cfg.tol) return x;
  throw NoConvergence(cfg.max_iter, nrm);
}

}  // namespace geomint
