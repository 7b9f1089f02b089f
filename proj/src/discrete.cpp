#include "geomint/discrete.hpp"

#include <Eigen/SVD>
#include <limits>

#include "geomint/autodiff.hpp"
#include "geomint/continuous.hpp"

namespace geomint {

namespace {

template <class T>
std::vector<T> lift(const Vec& v) {
  std::vector<T> out(static_cast<std::size_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) out[static_cast<std::size_t>(i)] = T(v[i]);
  return out;
}

/// Sampling point of the discretization: left endpoint or midpoint.
template <class T>
std::vector<T> reference_point(Discretization disc, const std::vector<T>& q0,
                               const std::vector<T>& q1) {
  if (disc == Discretization::Euler) return q0;
  std::vector<T> m(q0.size());
  for (std::size_t i = 0; i < q0.size(); ++i) m[i] = (q0[i] + q1[i]) * 0.5;
  return m;
}

/// Extended discrete Lagrangian on a configuration pair:
/// (1/2h) g_ij(ref) dq^i dq^j - h V(ref).
template <class T>
T ld_eval(const LinearConstraintSystem& sys, Discretization disc, const std::vector<T>& q0,
          const std::vector<T>& q1, double h) {
  const int n = sys.n();
  std::vector<T> ref = reference_point(disc, q0, q1);
  std::span<const T> refs(ref.data(), ref.size());
  T acc = T(0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      T gij = sys.metric_entry(i, j).template eval_t<T>(refs);
      acc += gij * (q1[static_cast<std::size_t>(i)] - q0[static_cast<std::size_t>(i)]) *
             (q1[static_cast<std::size_t>(j)] - q0[static_cast<std::size_t>(j)]);
    }
  }
  acc = acc * (0.5 / h);
  acc -= T(h) * sys.potential.template eval_t<T>(refs);
  return acc;
}

/// Discrete constraints phi^alpha = dq^alpha - Gamma^alpha_a(ref) dq^a.
template <class T>
std::vector<T> phi_eval(const LinearConstraintSystem& sys, Discretization disc,
                        const std::vector<T>& q0, const std::vector<T>& q1) {
  const int nf = sys.nf();
  const int k = sys.k();
  std::vector<T> ref = reference_point(disc, q0, q1);
  std::span<const T> refs(ref.data(), ref.size());
  std::vector<T> out(static_cast<std::size_t>(k));
  for (int al = 0; al < k; ++al) {
    int ia = sys.split.constrained[static_cast<std::size_t>(al)];
    T acc = q1[static_cast<std::size_t>(ia)] - q0[static_cast<std::size_t>(ia)];
    for (int a = 0; a < nf; ++a) {
      int iaf = sys.split.free[static_cast<std::size_t>(a)];
      acc -= sys.gamma_entry(al, a).template eval_t<T>(refs) *
             (q1[static_cast<std::size_t>(iaf)] - q0[static_cast<std::size_t>(iaf)]);
    }
    out[static_cast<std::size_t>(al)] = acc;
  }
  return out;
}

/// Gradient of the discrete Lagrangian with respect to one slot (0 or 1),
/// exact via a dual sweep; both slots stay generic in T so the result can
/// feed a second differentiation.
template <class T>
std::vector<T> ld_grad(const LinearConstraintSystem& sys, Discretization disc,
                       const std::vector<T>& q0, const std::vector<T>& q1, double h, int wrt) {
  const std::size_t n = q0.size();
  std::vector<Dual<T>> a(n), b(n);
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = Dual<T>(q0[i], T(0.0));
    b[i] = Dual<T>(q1[i], T(0.0));
  }
  std::vector<Dual<T>>& target = wrt == 0 ? a : b;
  std::vector<T> grad(n);
  for (std::size_t i = 0; i < n; ++i) {
    target[i].b = T(1.0);
    grad[i] = ld_eval<Dual<T>>(sys, disc, a, b, h).b;
    target[i].b = T(0.0);
  }
  return grad;
}

/// Same sweep for the constraints; result[alpha][i].
template <class T>
std::vector<std::vector<T>> phi_grad(const LinearConstraintSystem& sys, Discretization disc,
                                     const std::vector<T>& q0, const std::vector<T>& q1,
                                     int wrt) {
  const std::size_t n = q0.size();
  const std::size_t k = static_cast<std::size_t>(sys.k());
  std::vector<Dual<T>> a(n), b(n);
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = Dual<T>(q0[i], T(0.0));
    b[i] = Dual<T>(q1[i], T(0.0));
  }
  std::vector<Dual<T>>& target = wrt == 0 ? a : b;
  std::vector<std::vector<T>> grad(k, std::vector<T>(n));
  for (std::size_t i = 0; i < n; ++i) {
    target[i].b = T(1.0);
    std::vector<Dual<T>> phi = phi_eval<Dual<T>>(sys, disc, a, b);
    for (std::size_t al = 0; al < k; ++al) grad[al][i] = phi[al].b;
    target[i].b = T(0.0);
  }
  return grad;
}

/// Residual of the constrained-variational step over unknowns x = [q1; lambda]:
/// departure-momentum match on the first n rows, discrete constraints on the
/// last k.
template <class T>
std::vector<T> vak_residual(const LinearConstraintSystem& sys, Discretization disc, const Vec& q0,
                            const Vec& p0, double h, const std::vector<T>& x) {
  const int n = sys.n();
  const int k = sys.k();
  std::vector<T> q0t = lift<T>(q0);
  std::vector<T> q1(x.begin(), x.begin() + n);
  std::vector<T> lam(x.begin() + n, x.end());

  std::vector<T> d1 = ld_grad<T>(sys, disc, q0t, q1, h, 0);
  std::vector<std::vector<T>> dphi0 = phi_grad<T>(sys, disc, q0t, q1, 0);
  std::vector<T> phi = phi_eval<T>(sys, disc, q0t, q1);

  std::vector<T> r(static_cast<std::size_t>(n + k));
  for (int i = 0; i < n; ++i) {
    T acc = T(p0[i]) + d1[static_cast<std::size_t>(i)];
    for (int al = 0; al < k; ++al)
      acc += lam[static_cast<std::size_t>(al)] *
             dphi0[static_cast<std::size_t>(al)][static_cast<std::size_t>(i)];
    r[static_cast<std::size_t>(i)] = acc;
  }
  for (int al = 0; al < k; ++al)
    r[static_cast<std::size_t>(n + al)] = phi[static_cast<std::size_t>(al)];
  return r;
}

Vec to_vec(const std::vector<double>& v) {
  Vec out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<Eigen::Index>(i)] = v[i];
  return out;
}

std::vector<double> to_std(const Vec& v) { return lift<double>(v); }

/// Reduced generating value of the left-endpoint step in the adapted
/// parameterization: the discrete Lagrangian on the completed pair minus the
/// multiplier pairing with the completed constrained components.
template <class T>
T adapted_value(const LinearConstraintSystem& sys, const std::vector<T>& q0,
                const std::vector<T>& q1f, const Vec& mu1, double h) {
  const int n = sys.n();
  const int nf = sys.nf();
  const int k = sys.k();
  std::span<const T> q0s(q0.data(), q0.size());
  std::vector<T> q1(static_cast<std::size_t>(n));
  std::vector<T> psi(static_cast<std::size_t>(k));
  for (int a = 0; a < nf; ++a)
    q1[static_cast<std::size_t>(sys.split.free[static_cast<std::size_t>(a)])] =
        q1f[static_cast<std::size_t>(a)];
  for (int al = 0; al < k; ++al) {
    int ia = sys.split.constrained[static_cast<std::size_t>(al)];
    T acc = q0[static_cast<std::size_t>(ia)];
    for (int a = 0; a < nf; ++a) {
      int iaf = sys.split.free[static_cast<std::size_t>(a)];
      acc += sys.gamma_entry(al, a).template eval_t<T>(q0s) *
             (q1f[static_cast<std::size_t>(a)] - q0[static_cast<std::size_t>(iaf)]);
    }
    psi[static_cast<std::size_t>(al)] = acc;
    q1[static_cast<std::size_t>(ia)] = acc;
  }
  T val = ld_eval<T>(sys, Discretization::Euler, q0, q1, h);
  for (int al = 0; al < k; ++al) val -= T(mu1[al]) * psi[static_cast<std::size_t>(al)];
  return val;
}

/// Gradient of adapted_value over the packed input [q0 (n); q1free (n-k)].
Vec adapted_gradient(const LinearConstraintSystem& sys, const Vec& q0, const Vec& q1free,
                     const Vec& mu1, double h) {
  const int n = sys.n();
  const int nf = sys.nf();
  Vec packed(n + nf);
  packed << q0, q1free;
  return fn_gradient(
      [&](const auto& z) {
        using T = std::decay_t<decltype(z[0])>;
        std::vector<T> zq0(z.begin(), z.begin() + n);
        std::vector<T> zq1f(z.begin() + n, z.end());
        return adapted_value<T>(sys, zq0, zq1f, mu1, h);
      },
      packed);
}

}  // namespace

Vec discrete_constraint_values(const LinearConstraintSystem& sys, Discretization disc,
                               const Vec& q0, const Vec& q1, double h) {
  (void)h;  // residuals are stored unscaled
  return to_vec(phi_eval<double>(sys, disc, to_std(q0), to_std(q1)));
}

double discrete_lagrangian_value(const LinearConstraintSystem& sys, Discretization disc,
                                 const Vec& q0, const Vec& q1, double h) {
  return ld_eval<double>(sys, disc, to_std(q0), to_std(q1), h);
}

Vec discrete_lagrangian_slot_gradient(const LinearConstraintSystem& sys, Discretization disc,
                                      const Vec& q0, const Vec& q1, double h, int slot) {
  return to_vec(ld_grad<double>(sys, disc, to_std(q0), to_std(q1), h, slot));
}

Mat discrete_constraint_slot_jacobian(const LinearConstraintSystem& sys, Discretization disc,
                                      const Vec& q0, const Vec& q1, double h, int slot) {
  (void)h;
  std::vector<std::vector<double>> g = phi_grad<double>(sys, disc, to_std(q0), to_std(q1), slot);
  Mat out(sys.k(), sys.n());
  for (int al = 0; al < sys.k(); ++al)
    for (int i = 0; i < sys.n(); ++i)
      out(al, i) = g[static_cast<std::size_t>(al)][static_cast<std::size_t>(i)];
  return out;
}

DiscreteVakStep discrete_vakonomic_step(const LinearConstraintSystem& sys, const Vec& q0,
                                        const Vec& p0, Discretization disc, double h,
                                        const std::optional<Vec>& lambda_guess,
                                        const NewtonConfig& cfg) {
  if (h <= 0.0) throw ValidationError("discrete step requires h > 0");
  const int n = sys.n();
  const int k = sys.k();

  ImplicitProblem prob;
  prob.residual = [&](const Vec& x) {
    return to_vec(vak_residual<double>(sys, disc, q0, p0, h, to_std(x)));
  };
  prob.jacobian = [&](const Vec& x) {
    return fn_jacobian(
        [&](const auto& z) {
          using T = std::decay_t<decltype(z[0])>;
          return vak_residual<T>(sys, disc, q0, p0, h, z);
        },
        x, n + k);
  };

  HamiltonianGradient g0 = hamiltonian_gradient(sys, PhaseState{q0, p0});
  Vec guess(n + k);
  guess.head(n) = q0 + h * g0.dp;
  guess.tail(k) = lambda_guess ? *lambda_guess : Vec(Vec::Zero(k));

  Vec sol = solve_implicit(prob, guess, cfg);

  DiscreteVakStep out;
  out.q1 = sol.head(n);
  out.lambda1 = sol.tail(k);
  std::vector<double> q0s = to_std(q0), q1s = to_std(out.q1);
  std::vector<double> d2 = ld_grad<double>(sys, disc, q0s, q1s, h, 1);
  std::vector<std::vector<double>> dphi1 = phi_grad<double>(sys, disc, q0s, q1s, 1);
  out.p1 = Vec(n);
  for (int i = 0; i < n; ++i) {
    double acc = d2[static_cast<std::size_t>(i)];
    for (int al = 0; al < k; ++al)
      acc += out.lambda1[al] * dphi1[static_cast<std::size_t>(al)][static_cast<std::size_t>(i)];
    out.p1[i] = acc;
  }
  return out;
}

DiscreteNonholonomicStep discrete_nonholonomic_step(const LinearConstraintSystem& sys,
                                                    const Vec& qprev, const Vec& qcur, double h,
                                                    const std::optional<Vec>& lambda_guess,
                                                    const NewtonConfig& cfg) {
  if (h <= 0.0) throw ValidationError("discrete step requires h > 0");
  const int n = sys.n();
  const int nf = sys.nf();
  const int k = sys.k();

  // arrival momentum of the previous pair; constant during the solve
  Vec d2_prev =
      to_vec(ld_grad<double>(sys, Discretization::Euler, to_std(qprev), to_std(qcur), h, 1));

  // constraint one-forms at the current configuration
  Mat gam_coef = gamma_at(sys, qcur);
  Mat omega = Mat::Zero(k, n);
  for (int al = 0; al < k; ++al) {
    omega(al, sys.split.constrained[static_cast<std::size_t>(al)]) = 1.0;
    for (int a = 0; a < nf; ++a)
      omega(al, sys.split.free[static_cast<std::size_t>(a)]) = -gam_coef(al, a);
  }

  auto residual_t = [&](const auto& x) {
    using T = std::decay_t<decltype(x[0])>;
    std::vector<T> qct = lift<T>(qcur);
    std::vector<T> qn(x.begin(), x.begin() + n);
    std::vector<T> lam(x.begin() + n, x.end());
    std::vector<T> d1 = ld_grad<T>(sys, Discretization::Euler, qct, qn, h, 0);
    std::vector<T> phi = phi_eval<T>(sys, Discretization::Euler, qct, qn);
    std::vector<T> r(static_cast<std::size_t>(n + k));
    for (int i = 0; i < n; ++i) {
      T acc = T(d2_prev[i]) + d1[static_cast<std::size_t>(i)];
      for (int al = 0; al < k; ++al) acc -= lam[static_cast<std::size_t>(al)] * T(omega(al, i));
      r[static_cast<std::size_t>(i)] = acc;
    }
    for (int al = 0; al < k; ++al)
      r[static_cast<std::size_t>(n + al)] = phi[static_cast<std::size_t>(al)];
    return r;
  };

  ImplicitProblem prob;
  prob.residual = [&](const Vec& x) { return to_vec(residual_t(to_std(x))); };
  prob.jacobian = [&](const Vec& x) { return fn_jacobian(residual_t, x, n + k); };

  Vec guess(n + k);
  guess.head(n) = 2.0 * qcur - qprev;
  guess.tail(k) = lambda_guess ? *lambda_guess : Vec(Vec::Zero(k));

  Vec sol = solve_implicit(prob, guess, cfg);
  return {sol.head(n), sol.tail(k)};
}

Vec complete_discrete_configuration(const LinearConstraintSystem& sys, const Vec& q0,
                                    const Vec& q1free) {
  Mat gam_coef = gamma_at(sys, q0);
  Vec q1 = Vec::Zero(sys.n());
  scatter(q1, sys.split.free, q1free);
  Vec delta_free = q1free - gather(q0, sys.split.free);
  Vec con = gather(q0, sys.split.constrained) + gam_coef * delta_free;
  scatter(q1, sys.split.constrained, con);
  return q1;
}

PhaseState discrete_legendre_minus(const LinearConstraintSystem& sys, const Vec& q0,
                                   const Vec& q1free, const Vec& mu1, double h) {
  if (h <= 0.0) throw ValidationError("discrete step requires h > 0");
  const int n = sys.n();
  Vec grad = adapted_gradient(sys, q0, q1free, mu1, h);
  return {q0, Vec(-grad.head(n))};
}

PhaseState discrete_legendre_plus(const LinearConstraintSystem& sys, const Vec& q0,
                                  const Vec& q1free, const Vec& mu1, double h) {
  if (h <= 0.0) throw ValidationError("discrete step requires h > 0");
  const int n = sys.n();
  const int nf = sys.nf();
  Vec grad = adapted_gradient(sys, q0, q1free, mu1, h);
  PhaseState out;
  out.q = complete_discrete_configuration(sys, q0, q1free);
  out.p = Vec::Zero(n);
  scatter(out.p, sys.split.free, Vec(grad.tail(nf)));
  scatter(out.p, sys.split.constrained, mu1);
  return out;
}

Mat discrete_regularity_matrix(const LinearConstraintSystem& sys, const Vec& q0,
                               const Vec& q1free, const Vec& mu1, double h) {
  const int n = sys.n();
  const int nf = sys.nf();
  const int k = sys.k();
  Vec packed(n + nf);
  packed << q0, q1free;
  Mat full = fn_hessian(
      [&](const auto& z) {
        using T = std::decay_t<decltype(z[0])>;
        std::vector<T> zq0(z.begin(), z.begin() + n);
        std::vector<T> zq1f(z.begin() + n, z.end());
        return adapted_value<T>(sys, zq0, zq1f, mu1, h);
      },
      packed);

  Mat reg(n, n);
  reg.leftCols(nf) = full.topRightCorner(n, nf);  // mixed block d2/(dq0 dq1free)

  // gradients of the completed constrained components with respect to q0
  std::span<const double> q0s(q0.data(), static_cast<std::size_t>(q0.size()));
  Mat gam_coef = gamma_at(sys, q0);
  Vec delta_free = q1free - gather(q0, sys.split.free);
  for (int al = 0; al < k; ++al) {
    for (int i = 0; i < n; ++i) {
      double v = 0.0;
      if (i == sys.split.constrained[static_cast<std::size_t>(al)]) v += 1.0;
      for (int a = 0; a < nf; ++a) {
        v += sys.gamma_entry(al, a).diff(q0s, i) * delta_free[a];
        if (i == sys.split.free[static_cast<std::size_t>(a)]) v -= gam_coef(al, a);
      }
      reg(i, nf + al) = v;
    }
  }
  return reg;
}

double discrete_regularity_condition(const LinearConstraintSystem& sys, const Vec& q0,
                                     const Vec& q1free, const Vec& mu1, double h) {
  Mat reg = discrete_regularity_matrix(sys, q0, q1free, mu1, h);
  Eigen::JacobiSVD<Mat> svd(reg);
  double smin = svd.singularValues().minCoeff();
  double smax = svd.singularValues().maxCoeff();
  if (smin == 0.0) return std::numeric_limits<double>::infinity();
  return smax / smin;
}

}  // namespace geomint
